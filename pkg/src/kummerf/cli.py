"""Command-line front ends: ``fverify`` for spec files and ``fcollapse`` for the collapse numerics.

Exit codes: 0 when everything checks out, 1 on a verification or assertion
failure, 2 on bad input (unreadable or malformed spec, bad arguments).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import collapse as cn
from .mutations import FIXTURE_DIR, SPEC_DIR
from .structure import SpecError, load_spec
from .verify import VerifyConfig, derive_claims, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SCHEMA_PATH = Path(__file__).parent / "report.schema.json"


# ---------------------------------------------------------------------------
# bundled specs


def list_bundled_specs() -> list[tuple[str, str]]:
    """(name, description) for the primary specs followed by the mutation fixtures."""
    out = []
    for d in (SPEC_DIR, FIXTURE_DIR):
        for p in sorted(d.glob("*.spec")):
            doc = json.loads(p.read_text(encoding="utf-8"))
            mut = doc.get("mutation")
            desc = f"mutation of {mut['of']}: {mut['description']} (fails {mut['expect_fail']})" if mut \
                else doc.get("description", "")
            out.append((p.stem, desc))
    primary = [x for x in out if "_" not in x[0]]
    order = {"k3": 0, "j8": 1, "g2": 2, "cy3": 3}
    primary.sort(key=lambda x: order.get(x[0], 99))
    return primary + [x for x in out if "_" in x[0]]


def resolve_spec(arg: str) -> Path:
    """A filesystem path, or a bundled name such as ``j8``, ``specs/j8.spec`` or ``j8_bad_psi``."""
    p = Path(arg)
    if p.is_file():
        return p
    stem = p.name[:-5] if p.name.endswith(".spec") else p.name
    for d in (SPEC_DIR, FIXTURE_DIR):
        q = d / f"{stem}.spec"
        if q.is_file():
            return q
    raise FileNotFoundError(arg)


def _rational(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


# ---------------------------------------------------------------------------
# fverify


def claims_text(claims: dict) -> str:
    lines = [f"group: order {claims['group_order']}" + (f", type {claims['group_type']}"
                                                          if "group_type" in claims else "")]
    for name, f in claims["fixed"].items():
        what = "fixed points" if f["dim"] == 0 else f"fixed components of dimension {f['dim']}"
        lines.append(f"{name}: {f['components']} {what}")
    for e in claims.get("fixed_equals_intersection", []):
        lines.append(f"Fix({e['element']}) = S_{e['of'][0]} ∩ S_{e['of'][1]}")
    for o in claims["orbits"]:
        sizes = ", ".join(f"{n} of size {k}" for k, n in o["sizes"].items())
        lines.append(f"orbits of {' ∪ '.join('S_' + x for x in o['of'])} under {o['group']}: {sizes}")
    for i in claims.get("intersections", []):
        total = sum(i["sizes"].values())
        lines.append(f"S_{i['of'][0]} ∩ S_{i['of'][1]}: {i['components']} components of dimension {i['dim']}"
                     f" in {total} orbits")
    return "\n".join(lines) + "\n"


def _fverify_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fverify", description="Verify a torus-action structure spec.")
    ap.add_argument("spec", nargs="?", help="spec file, or the name of a bundled spec")
    ap.add_argument("--epsilon", type=_rational, default=Fraction(1, 16), help="tube unit (default 1/16)")
    ap.add_argument("--min-cell", type=_rational, default=Fraction(1, 256),
                    help="smallest box side in the cover check (default 1/256)")
    ap.add_argument("--samples", type=_positive_int, default=32, help="sample points per stratum (default 32)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--report", choices=("text", "json"), default="text")
    ap.add_argument("--output", help="write the report here instead of standard output")
    ap.add_argument("--emit-claims", action="store_true", help="print the claims derived from the spec file")
    ap.add_argument("--list", action="store_true", help="list the bundled specs")
    return ap


def run_fverify(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = _fverify_parser().parse_args(argv)
    if args.list:
        for name, desc in list_bundled_specs():
            out.write(f"{name:<18} {desc}\n")
        return EXIT_OK
    if args.spec is None:
        err.write("fverify: a spec is required (or use --list)\n")
        return EXIT_INPUT
    try:
        path = resolve_spec(args.spec)
        spec = load_spec(path)
    except FileNotFoundError:
        err.write(f"fverify: no such spec: {args.spec}\n")
        return EXIT_INPUT
    except SpecError as exc:
        err.write(f"fverify: {args.spec}: {exc}\n")
        return EXIT_INPUT
    cfg = VerifyConfig(epsilon=args.epsilon, min_cell=args.min_cell, samples_per_stratum=args.samples,
                       seed=args.seed)
    if args.emit_claims:
        claims = derive_claims(spec, cfg)
        text = json.dumps(claims, indent=2) + "\n" if args.report == "json" else claims_text(claims)
        _emit(text, args.output, out)
        return EXIT_OK
    try:
        report = verify(spec, cfg)
    except SpecError as exc:
        err.write(f"fverify: {args.spec}: {exc}\n")
        return EXIT_INPUT
    text = json.dumps(report.to_dict(), indent=2) + "\n" if args.report == "json" else report.to_text()
    _emit(text, args.output, out)
    if not report.ok:
        err.write(f"fverify: {spec.name}: failed pass {report.first_failure}\n")
        return EXIT_FAIL
    return EXIT_OK


def _emit(text: str, path: str | None, out):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


# ---------------------------------------------------------------------------
# fcollapse


CSV_FIELDS = ("section", "profile", "convention", "delta", "t", "quantity", "value", "reference", "ok")
_RANGE = re.compile(r"^1e-(\d+)\.\.1e-(\d+)$")


def parse_deltas(text: str) -> list[float]:
    """``1e-1..1e-6`` (decades) or a comma-separated list."""
    m = _RANGE.match(text.strip())
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        step = 1 if b >= a else -1
        return [10.0 ** -k for k in range(a, b + step, step)]
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list: {text!r}") from None
    if not vals or any(not 0 < v < 1 for v in vals):
        raise argparse.ArgumentTypeError("deltas must lie in (0, 1)")
    return vals


@dataclass
class CollapseRun:
    rows: list[dict]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()


def _g(x) -> str:
    return "" if x is None else f"{x:.10g}"


def collapse_tables(deltas, profile: str = "quintic", grid: int = 2001, fd_step: float = 1e-3,
                    oracle_t: float = 3.0) -> CollapseRun:
    """Profile check, bounds per delta and convention, oracle comparison, volume schedules."""
    prof = cn.PROFILES[profile]()
    rows, failures = [], []

    def row(section, quantity, value, reference=None, ok=True, convention="", delta=None, t=None):
        rows.append({"section": section, "profile": prof.name, "convention": convention, "delta": _g(delta),
                     "t": _g(t), "quantity": quantity, "value": _g(value), "reference": _g(reference),
                     "ok": "yes" if ok else "no"})

    chk = cn.validate_profile(prof, grid)
    row("profile", "max s'", chk.ds_max, 1.0, chk.ds_max <= 1 + 1e-12)
    row("profile", "min s''", chk.d2s_min, -2.0, chk.d2s_min >= -2 - 1e-12)
    row("profile", "valid", float(chk.ok), 1.0, chk.ok)
    failures.extend(f"profile {prof.name}: {f}" for f in chk.failures)

    for d in deltas:
        for conv in cn.CONVENTIONS:
            m = cn.WarpedMetric(prof, d, convention=conv)
            b = cn.curvature_lower_bound(m, grid)
            row("bound", "min -f''/f - (f'/f)^2", b.minimum, b.required, b.ok, conv, d, b.t_min)
            if not b.ok:
                failures.append(f"bound violated at delta={d:g}, t={b.t_min:g} ({conv}): "
                                f"{b.minimum:.6g} < {b.required:.6g}")

    for d in deltas:
        for conv in cn.CONVENTIONS:
            m = cn.WarpedMetric(prof, d, convention=conv)
            grid_pts = cn.sample_metric_grid(m.metric_at, [oracle_t, 0.1, 0.2], fd_step)
            for label, u, v, xw, vw in (("K(dt, dy1)", [1, 0, 0], [0, 1, 0], 1.0, 0.0),
                                       ("K(dy1, dy2)", [0, 1, 0], [0, 0, 1], 0.0, 1.0)):
                exact = cn.sectional_curvature(m, oracle_t, xw, vw, 0.0)
                fd = cn.fd_sectional_oracle(grid_pts, fd_step, u, v)
                ok = abs(fd - exact) <= 1e-3 * max(abs(exact), 1.0)
                row("oracle", label, fd, exact, ok, conv, d, oracle_t)
                if not ok:
                    failures.append(f"oracle mismatch at delta={d:g}, t={oracle_t:g} ({conv}, {label}): "
                                    f"{fd:.6g} vs {exact:.6g}")

    vdeltas = [x for x in deltas if x < 1]
    for piece in cn.MODEL_PIECES + (cn.CONTROL_PIECE,):
        s = cn.volume_schedule(piece, vdeltas)
        for d, v in zip(s.deltas, s.volumes):
            row("volume", piece.name, v, None, True, delta=d)
        if piece.collapsed_dims == 0:
            row("volume", f"{piece.name}: divergent", 1.0, None, s.divergent)
            continue
        turn = piece.turning_delta
        row("volume", f"{piece.name}: turning delta", turn, None, turn is not None and 0 < turn < 1)
        row("volume", f"{piece.name}: log10 delta at 1e-2 of first", cn.delta_below(piece, 1e-2, vdeltas[0]))
    return CollapseRun(rows, failures)


def _fcollapse_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fcollapse", description="Collapse numerics for warped-product metrics.")
    ap.add_argument("--deltas", type=parse_deltas, default=list(cn.DEFAULT_DELTAS),
                    help="comma list or decade range like 1e-1..1e-6 (default)")
    ap.add_argument("--profile", choices=sorted(cn.PROFILES), default="quintic")
    ap.add_argument("--grid", type=_positive_int, default=2001, help="t grid points (default 2001)")
    ap.add_argument("--fd-step", type=float, default=1e-3, help="finite-difference step (default 1e-3)")
    ap.add_argument("--output", help="write the CSV here instead of standard output")
    return ap


def run_fcollapse(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = _fcollapse_parser().parse_args(argv)
    if args.grid < 100 or not (0 < args.fd_step < 0.1) or not math.isfinite(args.fd_step):
        err.write("fcollapse: --grid must be at least 100 and --fd-step in (0, 0.1)\n")
        return EXIT_INPUT
    run = collapse_tables(args.deltas, args.profile, args.grid, args.fd_step)
    _emit(run.csv(), args.output, out)
    for f in run.failures:
        err.write(f"fcollapse: {f}\n")
    return EXIT_OK if run.ok else EXIT_FAIL


def fverify_main():
    sys.exit(run_fverify())


def fcollapse_main():
    sys.exit(run_fcollapse())
