import numpy as np
import pytest

from ellcommute.errors import ClearanceError, UsageError
from ellcommute.fixtures import constant_coefficient_operator, sqrt_pair
from ellcommute.lame import lame_operator, lame_q_genus_one
from ellcommute.monodromy import (
    BranchPermutation, PathSpec, circle_loop, continue_solution, lame_loops, monodromy_matrix,
    permutation_from_matrices, run_loop_suite, sigma_permutation,
)
from ellcommute.operators import PoleSet


@pytest.fixture(scope="module")
def lame2():
    return lame_operator(2.0, 1j, 0.5, 20)


def test_single_point_path_is_identity():
    p = constant_coefficient_operator([1, 0, -1.0], 8)
    assert np.allclose(continue_solution(p, 1.0, PathSpec((0.3,))), np.eye(2))


def test_constant_coefficient_segment():
    # u'' = X u with X = 1 along [0, L]: jets evolve by [[cosh, sinh], [sinh, cosh]]
    p = constant_coefficient_operator([1, 0, 0], 8)
    L = 1.3
    t = continue_solution(p, 1.0, PathSpec((0j, L + 0j)), tol=1e-12, atol=1e-14)
    ref = np.array([[np.cosh(L), np.sinh(L)], [np.sinh(L), np.cosh(L)]])
    assert np.max(np.abs(t - ref)) < 1e-9


def test_reversal_inverts(lame2):
    path = PathSpec((0.5, 0.6 + 0.3j, 0.2 + 0.45j), PoleSet("lattice", 1j))
    t = continue_solution(lame2, 2.0, path)
    tr = continue_solution(lame2, 2.0, path.reversed())
    assert np.max(np.abs(tr @ t - np.eye(2))) < 1e-7


def test_lame_integer_case_trivial_monodromy(lame2):
    for lp in lame_loops(1j, 0.5):
        m = monodromy_matrix(lame2, 5 + 1j, lp)
        assert m.distance_to_identity() < 1e-6, lp.label
        assert m.det_error < 1e-7


def test_lame_quarter_case_minus_one():
    p = lame_operator(0.75, 1j, 0.5, 16)
    m = monodromy_matrix(p, 2.0, lame_loops(1j, 0.5)[0], tol=1e-12)
    # exponents 3/2 and −1/2: a Jordan block with eigenvalue −1 (trace −2, det 1)
    assert abs(np.trace(m.matrix) + 2) < 1e-8
    assert abs(np.linalg.det(m.matrix) - 1) < 1e-8
    assert np.max(np.abs(m.eigenvalues() + 1)) < 1e-6


def test_contractible_loop(lame2):
    lp = circle_loop(0.5 + 0.5j, 0.2, 0.5, pole_set=PoleSet("lattice", 1j))
    m = monodromy_matrix(lame2, 2.0, lp)
    assert m.distance_to_identity() < 1e-7


def test_clearance_enforced(lame2):
    # radius 0.98 passes within 0.02 of the lattice point 1
    lp = circle_loop(0j, 0.98, 0.5, pole_set=PoleSet("lattice", 1j))
    with pytest.raises(ClearanceError):
        monodromy_matrix(lame2, 2.0, lp)


def test_open_path_rejected(lame2):
    with pytest.raises(UsageError):
        monodromy_matrix(lame2, 2.0, PathSpec((0.5, 0.6), PoleSet("lattice", 1j)))


def test_sigma_trivial_commutant(lame2):
    perm = sigma_permutation(lame2, lame2, 2.0, lame_loops(1j, 0.5)[0])
    assert perm.is_identity() and perm.degenerate


def test_sigma_lame_pair_identity(lame2):
    q = lame_q_genus_one(1j, 0.5, 20)
    for lp in lame_loops(1j, 0.5):
        assert sigma_permutation(lame2, q, 2.0, lp).is_identity()


def test_sigma_sqrt_fixture_transposition():
    # Q only acts on ker P, i.e. at X = 0, where it swaps z^(1/4) and z^(3/4)
    p, q = sqrt_pair(24)
    lp = circle_loop(0j, 0.5, 1.0, pole_set=p.pole_set, label="around0")
    perm = sigma_permutation(p, q, 0.0, lp)
    assert perm.perm == (1, 0)
    assert perm.power(2).is_identity()
    two = circle_loop(0j, 0.5, 1.0, pole_set=p.pole_set, turns=2)
    assert sigma_permutation(p, q, 0.0, two).is_identity()


def test_permutation_power_order():
    perm = BranchPermutation((1, 2, 0))
    assert not perm.power(2).is_identity() and perm.power(3).is_identity()
    with pytest.raises(UsageError):
        BranchPermutation((0, 0))


def test_permutation_from_swap_matrix():
    cmat = np.diag([1.0, -1.0])
    assert permutation_from_matrices(cmat, np.array([[0, 1], [1, 0]])).perm == (1, 0)
    assert permutation_from_matrices(cmat, np.diag([2.0, 0.5])).is_identity()


def test_loop_suite_deterministic_order(lame2):
    q = lame_q_genus_one(1j, 0.5, 20)
    loops = lame_loops(1j, 0.5)
    recs = run_loop_suite(lame2, q, [2.0, 10.0], loops, workers=2)
    assert [(r["X"][0], r["loop"]) for r in recs] == [(x, lp.label) for x in (2.0, 10.0) for lp in loops]
    assert all(r["permutation"]["identity"] for r in recs)


def test_path_json_roundtrip():
    lp = lame_loops(0.3 + 1.1j, 0.5)[1]
    back = PathSpec.from_json(lp.to_json())
    assert back.vertices == lp.vertices and back.pole_set == lp.pole_set
