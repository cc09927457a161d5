from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kummerf.actions import (ActionError, ChartAction, PairRotation, Tagging, TranslationFlow,
                             commute_check, equivariance_check, finite_kernel_check, orbit_dim_at,
                             psi_is_homomorphism, rank)
from kummerf.torus import AffineMap, TorusPoint, group_closure

HALF = Fraction(1, 2)
Q = Fraction(1, 4)


def test_tagging_signs():
    t = Tagging([(0, {"0": 1, "1/2": -1}), (4, {"3/4": -1, "1/4": 1})])
    assert t.coords == (0, 4)
    assert t.sign({0: HALF, 4: Fraction(3, 4)}) == 1
    assert t.sign({0: 0, 4: Fraction(3, 4)}) == -1
    assert t.sign({0: 0}) is None
    assert t.sign({0: Fraction(1, 3), 4: Q}) is None
    with pytest.raises(ActionError):
        Tagging([(0, {"0": 2})])


def test_flow_equivariance():
    A1 = TranslationFlow.axes(4, [0])
    J = AffineMap([-1] * 4)
    assert equivariance_check(A1, J, [-1])
    assert not equivariance_check(A1, J, [1])
    assert equivariance_check(A1, J, [[-1]])
    with pytest.raises(ActionError):
        equivariance_check(A1, J, [2])
    A47 = TranslationFlow.axes(7, [3, 6])
    beta = AffineMap([-1, -1, 1, 1, -1, -1, 1], [0, HALF, 0, 0, 0, 0, 0])
    assert equivariance_check(A47, beta, [1, 1])
    gamma = AffineMap([-1, 1, -1, 1, -1, 1, -1])
    assert equivariance_check(A47, gamma, [1, -1])
    assert not equivariance_check(A47, gamma, [-1, 1])


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=5))
def test_rank_matches_numpy(rows):
    assert rank(rows) == np.linalg.matrix_rank(np.array(rows, dtype=float))


def test_finite_kernel():
    assert finite_kernel_check(TranslationFlow.axes(4, [0, 2]))
    assert not finite_kernel_check(TranslationFlow(2, ((1, 2), (1, 2))))


def test_rotation_generators_and_orbit_dimension():
    R = PairRotation(4, (0, 3), [(0, 0)])
    x = TorusPoint([Q / 2, 0, 0, 0])
    assert R.generators_at(x)[0] == [0, 0, 0, Q / 2]
    assert orbit_dim_at([R], x) == 1
    assert orbit_dim_at([R], TorusPoint([0, HALF, HALF, 0])) == 0
    A1 = TranslationFlow.axes(4, [0])
    assert orbit_dim_at([A1, R], x) == 2
    with pytest.raises(ActionError):
        orbit_dim_at([R], x, valid=lambda p: False)


def test_chart_action_vanishes_only_at_centers():
    C = ChartAction(4, ((1, 2), (0, 3)), (1, 1), [(0, 0, 0, 0)])
    assert orbit_dim_at([C], TorusPoint([0, 0, 0, 0])) == 0
    assert orbit_dim_at([C], TorusPoint([0, Fraction(1, 32), 0, 0])) == 1
    assert C.conjugation_sign(AffineMap([-1] * 4)) == 1
    assert C.conjugation_sign(AffineMap([-1, -1, 1, 1])) == -1
    assert C.conjugation_sign(AffineMap([-1, 1, 1, 1])) is None
    with pytest.raises(ActionError):
        ChartAction(4, ((0, 1), (1, 2)), (1, 1), [(0, 0, 0, 0)])


def test_commute_rules():
    A = TranslationFlow.axes(8, [7])
    B = TranslationFlow.axes(8, [0, 1])
    R13 = PairRotation(8, (0, 2), [(0, 0), (HALF, HALF)])
    R31 = PairRotation(8, (2, 0), [(0, 0), (HALF, HALF)])
    R68 = PairRotation(8, (5, 7), [(0, 0)])
    assert commute_check(A, B)
    assert commute_check(A, R13)
    assert not commute_check(A, R68)
    # same plane, either orientation
    assert commute_check(R13, R31)
    assert not commute_check(R13, PairRotation(8, (0, 2), [(Q, 0)]))
    assert not commute_check(R13, PairRotation(8, (0, 1), [(0, 0)]))
    assert commute_check(R13, PairRotation(8, (4, 6), [(0, 0)]))
    H = ChartAction(8, ((0, 2), (1, 3)), (1, 1), [(0, 0, 0, 0), (HALF, HALF, 0, 0)])
    assert commute_check(R13, H) and commute_check(H, R31)
    assert not commute_check(H, PairRotation(8, (0, 1), [(0, 0)]))
    assert not commute_check(H, PairRotation(8, (0, 2), [(Q, Q)]))
    H2 = ChartAction(8, ((1, 3), (2, 0)), (1, 1), [(0, 0, 0, 0), (0, 0, HALF, HALF)])
    assert commute_check(H, H2)
    assert not commute_check(H, ChartAction(8, ((0, 1), (2, 3)), (1, 1), [(0, 0, 0, 0)]))


prims = st.sampled_from([
    TranslationFlow.axes(6, [0]), TranslationFlow.axes(6, [4, 5]),
    PairRotation(6, (0, 1), [(0, 0)]), PairRotation(6, (1, 0), [(0, 0)]),
    PairRotation(6, (2, 3), [(0, 0), (HALF, 0)]), PairRotation(6, (0, 1), [(HALF, 0)]),
    ChartAction(6, ((0, 1), (2, 3)), (1, 1), [(0, 0, 0, 0)]),
    ChartAction(6, ((2, 3), (4, 5)), (1, 0), [(0, 0, 0, 0), (HALF, 0, 0, 0)]),
])


@given(prims, prims)
def test_commute_check_is_symmetric(a, b):
    assert commute_check(a, b) == commute_check(b, a)
    assert commute_check(a, a)


def test_psi_homomorphism():
    gens = [AffineMap([-1, -1, -1, -1, 1, 1]), AffineMap([-1, -1, 1, 1, -1, -1], [HALF, 0, 0, 0, 0, 0])]
    G = group_closure(gens, ["alpha", "beta"])
    psi = {0: [1, 1], G.element_by_name("alpha"): [-1, 1], G.element_by_name("beta"): [1, -1],
           G.element_by_name("alpha*beta"): [-1, -1]}
    assert psi_is_homomorphism(G.table, psi, range(4)) is None
    psi[G.element_by_name("alpha*beta")] = [1, 1]
    assert psi_is_homomorphism(G.table, psi, range(4)) is not None
