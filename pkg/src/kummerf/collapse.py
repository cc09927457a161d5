"""Warped-product curvature bounds, a finite-difference curvature oracle and collapse volume schedules.

The warped metrics are g = dt^2 + F(t)^2 h on [2, 4] x fiber with
F = delta^(c s(t)).  ``convention="literal"`` uses c = 1, i.e. the warping
function f = delta^s itself is plugged into the Bishop-O'Neill formula;
``convention="squared"`` uses c = 1/2, i.e. the metric dt^2 + delta^s h read
as written.  Both are evaluated throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

A, B = 2.0, 4.0
CONVENTIONS = {"literal": 1.0, "squared": 0.5}


class CollapseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class WarpProfile:
    name: str
    s: Callable[[np.ndarray], np.ndarray]
    ds: Callable[[np.ndarray], np.ndarray]
    d2s: Callable[[np.ndarray], np.ndarray]
    margin: float = 0.0
    extrema: dict = field(default_factory=dict)  # closed-form max s', min s'' when known


def quintic(margin: float = 0.05) -> WarpProfile:
    """Quintic smoothstep 6u^5 - 15u^4 + 10u^3, flat on margins of width ``margin`` at both ends."""
    if not 0 <= margin < 1:
        raise CollapseError("margin must lie in [0, 1)")
    k = 1.0 / (B - A - 2 * margin)  # du/dt

    def u(t):
        return np.clip((np.asarray(t, dtype=float) - A - margin) * k, 0.0, 1.0)

    def s(t):
        x = u(t)
        return x ** 3 * (10 - 15 * x + 6 * x * x)

    def ds(t):
        x = u(t)
        return 30 * x * x * (1 - x) ** 2 * k

    def d2s(t):
        x = u(t)
        return 60 * x * (1 - x) * (1 - 2 * x) * k * k

    extrema = {"ds_max": 30 / 16 * k, "d2s_min": -10 / math.sqrt(3) * k * k}
    return WarpProfile(f"quintic(m={margin:g})", s, ds, d2s, margin, extrema)


def linear_ramp() -> WarpProfile:
    return WarpProfile("linear_ramp",
                       lambda t: (np.asarray(t, dtype=float) - A) / 2,
                       lambda t: np.full_like(np.asarray(t, dtype=float), 0.5),
                       lambda t: np.zeros_like(np.asarray(t, dtype=float)))


def steep_ramp() -> WarpProfile:
    return WarpProfile("steep_ramp",
                       lambda t: 2 * (np.asarray(t, dtype=float) - A),
                       lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
                       lambda t: np.zeros_like(np.asarray(t, dtype=float)))


PROFILES: dict[str, Callable[[], WarpProfile]] = {
    "quintic": quintic,
    "quintic_m0": lambda: quintic(0.0),
    "quintic_m10": lambda: quintic(0.1),
    "linear_ramp": linear_ramp,
    "steep_ramp": steep_ramp,
}


@dataclass
class ProfileCheck:
    ok: bool
    s_min: float
    s_max: float
    ds_min: float
    ds_max: float
    d2s_min: float
    failures: list[str]


def validate_profile(p: WarpProfile, grid_size: int = 2001, tol: float = 1e-12) -> ProfileCheck:
    """Check the warp hypotheses on a uniform grid: 0 <= s <= 1, 0 <= s' <= 1, s'' >= -2, flat ends."""
    if grid_size < 100:
        raise CollapseError("grid_size must be at least 100")
    t = np.linspace(A, B, grid_size)
    s, ds, d2s = p.s(t), p.ds(t), p.d2s(t)
    ds_max = max(float(ds.max()), p.extrema.get("ds_max", -math.inf))
    d2s_min = min(float(d2s.min()), p.extrema.get("d2s_min", math.inf))
    failures = []
    if s.min() < -tol or s.max() > 1 + tol:
        failures.append(f"s leaves [0, 1] (range {s.min():.6g}..{s.max():.6g})")
    if ds.min() < -tol:
        failures.append(f"s decreases (min s' = {ds.min():.6g})")
    if ds_max > 1 + tol:
        failures.append(f"s' exceeds 1 (max s' = {ds_max:.6g})")
    if d2s_min < -2 - tol:
        failures.append(f"s'' below -2 (min s'' = {d2s_min:.6g})")
    # flat ends: s = 0 near 2 and s = 1 near 4, with vanishing derivatives where the flat piece meets
    ends = [(A, 0.0), (B, 1.0)]
    for t0, target in ends:
        vals = (float(p.s(np.array([t0]))[0]), float(p.ds(np.array([t0]))[0]), float(p.d2s(np.array([t0]))[0]))
        if abs(vals[0] - target) > tol or abs(vals[1]) > tol or abs(vals[2]) > tol:
            failures.append(f"not flat at t = {t0:g} (s, s', s'' = {vals[0]:.6g}, {vals[1]:.6g}, {vals[2]:.6g})")
    return ProfileCheck(not failures, float(s.min()), float(s.max()), float(ds.min()), ds_max, d2s_min, failures)


# ---------------------------------------------------------------------------
# warped metrics


@dataclass(frozen=True)
class Fiber:
    kind: str = "flat"  # flat | sphere
    dim: int = 2
    radius: float = 1.0

    @property
    def K(self) -> float:
        return 0.0 if self.kind == "flat" else 1.0 / self.radius ** 2

    def metric(self, y: np.ndarray) -> np.ndarray:
        if self.kind == "flat":
            return np.eye(self.dim)
        if self.dim != 2:
            raise CollapseError("sphere fibers are modeled in dimension 2")
        theta = y[0]
        return self.radius ** 2 * np.diag([1.0, math.sin(theta) ** 2])


@dataclass(frozen=True)
class WarpedMetric:
    profile: WarpProfile
    delta: float
    fiber: Fiber = Fiber()
    convention: str = "literal"

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise CollapseError(f"delta must lie in (0, 1], got {self.delta}")
        if self.convention not in CONVENTIONS:
            raise CollapseError(f"unknown convention {self.convention!r}")

    @property
    def c(self) -> float:
        return CONVENTIONS[self.convention]

    @property
    def L(self) -> float:
        return math.log(self.delta)

    def f(self, t):
        return np.exp(self.c * self.profile.s(t) * self.L)

    def df(self, t):
        """f' = c s' log(delta) f."""
        return self.c * self.profile.ds(t) * self.L * self.f(t)

    def d2f(self, t):
        """f'' = (c s'' log(delta) + c^2 s'^2 log^2(delta)) f."""
        c, L = self.c, self.L
        return (c * self.profile.d2s(t) * L + (c * self.profile.ds(t) * L) ** 2) * self.f(t)

    def metric_at(self, x: np.ndarray) -> np.ndarray:
        """Metric matrix at (t, y) in the product chart."""
        t, y = x[0], np.asarray(x[1:])
        n = 1 + self.fiber.dim
        g = np.zeros((n, n))
        g[0, 0] = 1.0
        g[1:, 1:] = float(self.f(np.array([t]))[0]) ** 2 * self.fiber.metric(y)
        return g


@dataclass
class BoundResult:
    delta: float
    convention: str
    minimum: float
    t_min: float
    paper_bound: float  # -4 log^2(delta)
    required: float  # the bound asserted at this delta
    ok: bool


def _bound_values(m: WarpedMetric, t: np.ndarray) -> np.ndarray:
    f = m.f(t)
    return -m.d2f(t) / f - (m.df(t) / f) ** 2


def curvature_lower_bound(m: WarpedMetric, grid_size: int = 2001) -> BoundResult:
    """Grid minimum of -f''/f - (f'/f)^2, compared with -4 log^2(delta).

    For delta <= 1/e the hypotheses give the -4 log^2(delta) bound; closer
    to 1 they give only -2|log delta| - 2 log^2(delta), which is asserted
    there instead.
    """
    if not 0 < m.delta < 1:
        raise CollapseError(f"delta must lie in (0, 1), got {m.delta}")
    t = np.linspace(A, B, grid_size)
    vals = _bound_values(m, t)
    k = int(np.argmin(vals))
    L = m.L
    paper = -4 * L * L
    required = paper if m.delta <= math.exp(-1) else -2 * abs(L) - 2 * L * L
    mn = float(vals[k])
    return BoundResult(m.delta, m.convention, mn, float(t[k]), paper, required, mn >= required - 1e-9 * abs(required))


def bound_closed_form(m: WarpedMetric, t) -> np.ndarray:
    """-c s'' log(delta) - 2 c^2 s'^2 log^2(delta), the simplified bound."""
    c, L = m.c, m.L
    return -c * m.profile.d2s(t) * L - 2 * (c * m.profile.ds(t) * L) ** 2


def sectional_curvature(m: WarpedMetric, t: float, x_weight: float, v_weight: float, K_h_plane: float) -> float:
    """Bishop-O'Neill: -f''/f g(x,x) + (K_h - f'^2)/f^2 g(v,v)."""
    if x_weight < 0 or v_weight < 0:
        raise CollapseError("weights must be non-negative")
    tt = np.array([t], dtype=float)
    f, df, d2f = float(m.f(tt)[0]), float(m.df(tt)[0]), float(m.d2f(tt)[0])
    return -d2f / f * x_weight + (K_h_plane - df * df) / (f * f) * v_weight


# ---------------------------------------------------------------------------
# finite-difference oracle


def sample_metric_grid(metric: Callable[[np.ndarray], np.ndarray], point: Sequence[float], step: float) -> np.ndarray:
    """Metric matrices on the 5^n stencil centered at ``point``; shape (5,)*n + (n, n)."""
    p = np.asarray(point, dtype=float)
    n = p.size
    grid = np.empty((5,) * n + (n, n))
    for idx in np.ndindex(*(5,) * n):
        grid[idx] = metric(p + (np.array(idx) - 2) * step)
    return grid


def _christoffel(grid: np.ndarray, idx: tuple, h: float) -> np.ndarray:
    """Gamma^k_ij at a stencil index, by central differences of the metric."""
    n = grid.shape[-1]
    dg = np.empty((n, n, n))  # dg[l, i, j] = d_l g_ij
    for l in range(n):
        up = list(idx)
        dn = list(idx)
        up[l] += 1
        dn[l] -= 1
        dg[l] = (grid[tuple(up)] - grid[tuple(dn)]) / (2 * h)
    ginv = np.linalg.inv(grid[idx])
    # lower[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    lower = dg + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, lower)


def fd_sectional_oracle(grid: np.ndarray, step: float, u: Sequence[float], v: Sequence[float]) -> float:
    """Sectional curvature of span(u, v) at the grid center, from differences of the metric only."""
    n = grid.shape[-1]
    c = (2,) * n
    gam = _christoffel(grid, c, step)
    dgam = np.empty((n, n, n, n))  # dgam[a] = d_a Gamma
    for a in range(n):
        up = list(c)
        dn = list(c)
        up[a] += 1
        dn[a] -= 1
        dgam[a] = (_christoffel(grid, tuple(up), step) - _christoffel(grid, tuple(dn), step)) / (2 * step)
    # R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    R = (np.einsum("iljk->lijk", dgam) - np.einsum("jlik->lijk", dgam)
         + np.einsum("lim,mjk->lijk", gam, gam) - np.einsum("ljm,mik->lijk", gam, gam))
    g = grid[c]
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    nu, nv = u @ g @ u, v @ g @ v
    if nu <= 0 or nv <= 0:
        raise CollapseError("plane basis contains a zero vector")
    # unit vectors, so the Gram test measures the angle and not the scale of the metric
    u, v = u / math.sqrt(nu), v / math.sqrt(nv)
    gram = 1.0 - (u @ g @ v) ** 2
    if gram < 1e-12:
        raise CollapseError("plane is degenerate (Gram determinant below 1e-12)")
    # <R(u, v) v, u>
    num = float(np.einsum("al,a,lijk,i,j,k->", g, u, R, u, v, v))
    return num / gram


# ---------------------------------------------------------------------------
# volume schedules


@dataclass(frozen=True)
class CollapsePiece:
    name: str
    total_dim: int
    collapsed_dims: int
    base_volume: float = 1.0

    def volume(self, delta: float) -> float:
        return self.base_volume * abs(math.log(delta)) ** self.total_dim * delta ** (self.collapsed_dims / 2)

    def log_volume(self, L: float) -> float:
        """log of the volume at delta = exp(-L)."""
        return math.log(self.base_volume) + self.total_dim * math.log(L) - self.collapsed_dims * L / 2

    @property
    def turning_delta(self) -> float | None:
        """Below this delta the volume decreases with delta; None when nothing collapses."""
        if self.collapsed_dims == 0:
            return None
        return math.exp(-2 * self.total_dim / self.collapsed_dims)


@dataclass
class Schedule:
    piece: CollapsePiece
    deltas: list[float]
    volumes: list[float]
    divergent: bool
    monotone_from: int | None  # first index from which the tabulated volumes strictly decrease

    @property
    def eventually_decreasing(self) -> bool:
        return self.monotone_from is not None and self.monotone_from < len(self.volumes) - 1


def volume_schedule(piece: CollapsePiece, deltas: Sequence[float]) -> Schedule:
    deltas = [float(d) for d in deltas]
    if any(not 0 < d < 1 for d in deltas):
        raise CollapseError("deltas must lie in (0, 1)")
    vols = [piece.volume(d) for d in deltas]
    start = len(vols) - 1
    while start > 0 and vols[start - 1] > vols[start]:
        start -= 1
    return Schedule(piece, deltas, vols, piece.collapsed_dims == 0, start if len(vols) > 1 else None)


def delta_below(piece: CollapsePiece, fraction: float, ref_delta: float = 0.1) -> float | None:
    """Largest delta past the turning point with volume <= fraction * volume(ref_delta), as log10."""
    if piece.collapsed_dims == 0:
        return None
    target = math.log(fraction) + piece.log_volume(-math.log(ref_delta))
    lo = max(2 * piece.total_dim / piece.collapsed_dims, -math.log(ref_delta))
    hi = lo * 2
    while piece.log_volume(hi) > target:
        hi *= 2
    if piece.log_volume(lo) <= target:
        return -lo / math.log(10)
    for _ in range(200):
        mid = (lo + hi) / 2
        if piece.log_volume(mid) > target:
            lo = mid
        else:
            hi = mid
    return -hi / math.log(10)


# J8 x T^4 connected with an HP^2-bundle over S^4: a 12-manifold
MODEL_PIECES = (
    CollapsePiece("F-structure piece", 12, 1),
    CollapsePiece("fiber-shrunk bundle piece", 12, 8),
    CollapsePiece("gluing neck", 12, 9),
)
CONTROL_PIECE = CollapsePiece("no collapsed direction", 12, 0)
DEFAULT_DELTAS = tuple(10.0 ** -k for k in range(1, 7))
