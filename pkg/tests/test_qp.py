"""Anchor construction, simplex projection and the active-set QP solver."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretoscan import qp
from paretoscan.core import DimensionMismatchError
from paretoscan.selftest import qp_grid_oracle


# ---------------------------------------------------------------------------
# profile, non-uniformity, anchor
# ---------------------------------------------------------------------------


def test_normalized_weighted_losses():
    h = qp.normalized_weighted_losses([0.2, 0.6], [1.0, 1.0])
    assert h == pytest.approx([0.25, 0.75])
    h = qp.normalized_weighted_losses([0.4, 0.2], [1.0, 2.0])
    assert h == pytest.approx([0.5, 0.5])


def test_normalized_weighted_losses_degenerate():
    with pytest.raises(qp.DegenerateLossError):
        qp.normalized_weighted_losses([0.0, 0.0], [1.0, 1.0])


def test_nonuniformity_against_hand_kl():
    # h = (0.25, 0.75): KL(h || uniform) = sum h log(2 h)
    expected = 0.25 * math.log(0.5) + 0.75 * math.log(1.5)
    assert qp.nonuniformity([0.2, 0.6], [1.0, 1.0]) == pytest.approx(
        expected, abs=1e-15
    )
    assert qp.nonuniformity([0.3, 0.3], [1.0, 1.0]) == 0.0
    assert qp.nonuniformity([0.4, 0.2], [1.0, 2.0]) == 0.0


def test_nonuniformity_handles_zero_component():
    # h = (1, 0): 0 log 0 treated as 0, KL = log m
    assert qp.nonuniformity([0.5, 0.0], [1.0, 1.0]) == pytest.approx(math.log(2.0))


def test_active_index_set_regimes():
    # unbalanced profile: every objective stays constrained
    assert qp.active_index_set([0.2, 0.6], [1.0, 1.0]) == [0, 1]
    # balanced: only the maximizers (here a tie) remain
    assert qp.active_index_set([0.3, 0.3], [1.0, 1.0]) == [0, 1]
    assert qp.active_index_set([0.30000001, 0.3], [1.0, 1.0]) == [0]


def test_anchor_direction_balanced_is_weighted_losses():
    a = qp.anchor_direction([0.4, 0.2], [1.0, 2.0])
    assert a == pytest.approx([0.4, 0.4])


def test_anchor_direction_unbalanced_log_ratio():
    mu = 0.25 * math.log(0.5) + 0.75 * math.log(1.5)
    a = qp.anchor_direction([0.2, 0.6], [1.0, 1.0])
    assert a == pytest.approx([math.log(0.5) - mu, math.log(1.5) - mu], abs=1e-12)
    # weights scale the anchor componentwise
    a2 = qp.anchor_direction([0.2, 0.6], [2.0, 2.0])
    h = qp.normalized_weighted_losses([0.2, 0.6], [2.0, 2.0])
    assert h == pytest.approx([0.25, 0.75])
    assert a2 == pytest.approx(2.0 * a, abs=1e-12)


def test_paired_validation():
    with pytest.raises(DimensionMismatchError):
        qp.nonuniformity([0.2, 0.6], [1.0, 1.0, 1.0])


# ---------------------------------------------------------------------------
# simplex projection
# ---------------------------------------------------------------------------


def test_project_simplex_known_cases():
    assert qp.project_simplex(np.array([0.5, 0.5])) == pytest.approx([0.5, 0.5])
    assert qp.project_simplex(np.array([2.0, 0.0])) == pytest.approx([1.0, 0.0])
    assert qp.project_simplex(np.array([0.4, 0.1, 0.1])) == pytest.approx(
        [0.4 + 0.4 / 3, 0.1 + 0.4 / 3, 0.1 + 0.4 / 3]
    )
    assert qp.project_simplex(np.array([-1.0, 1.0])) == pytest.approx([0.0, 1.0])


@settings(deadline=None, max_examples=200)
@given(st.integers(0, 10**9), st.integers(1, 5))
def test_project_simplex_properties(seed, m):
    rng = np.random.default_rng(seed)
    v = rng.normal(scale=3.0, size=m)
    p = qp.project_simplex(v)
    assert p.min() >= 0.0
    assert p.sum() == pytest.approx(1.0, abs=1e-9)
    again = qp.project_simplex(p)
    assert again == pytest.approx(p, abs=1e-9)
    # projection optimality: p is no farther from v than random simplex points
    q = rng.dirichlet(np.ones(m))
    assert np.sum((p - v) ** 2) <= np.sum((q - v) ** 2) + 1e-9


# ---------------------------------------------------------------------------
# solve_qp
# ---------------------------------------------------------------------------


def test_solve_qp_m1_trivial():
    sol = qp.solve_qp(np.ones((4, 1)), np.array([0.3]), [0])
    assert sol.beta == pytest.approx([1.0])
    assert not sol.infeasible and not sol.degenerate


def test_solve_qp_zero_gradients_degenerate():
    sol = qp.solve_qp(np.zeros((5, 3)), np.zeros(3), [0, 1, 2])
    assert sol.degenerate
    assert sol.beta == pytest.approx([1 / 3, 1 / 3, 1 / 3])


def test_solve_qp_identity_gram_hand_case():
    # M = I: minimize ||beta - a||^2 over the simplex = simplex projection
    G = np.eye(2)
    sol = qp.solve_qp(G, np.array([0.6, 0.1]), [])
    assert sol.beta == pytest.approx([0.75, 0.25], abs=1e-12)
    assert not sol.infeasible


def test_solve_qp_validation():
    with pytest.raises(ValueError):
        qp.solve_qp(np.ones((3,)), np.array([1.0]), [])
    with pytest.raises(DimensionMismatchError):
        qp.solve_qp(np.ones((3, 2)), np.array([1.0, 2.0, 3.0]), [])
    with pytest.raises(ValueError):
        qp.solve_qp(np.ones((3, 2)), np.array([1.0, 2.0]), [5])
    with pytest.raises(ValueError):
        qp.solve_qp(np.array([[np.nan, 1.0]]), np.array([1.0, 2.0]), [])


@settings(deadline=None, max_examples=150)
@given(st.integers(0, 10**9), st.integers(2, 4))
def test_solve_qp_always_returns_simplex_point(seed, m):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    G = rng.normal(size=(n, m))
    a = rng.normal(size=m)
    active = [int(j) for j in range(m) if rng.random() < 0.6]
    sol = qp.solve_qp(G, a, active)
    assert sol.beta.shape == (m,)
    assert float(sol.beta.min()) >= -1e-12
    assert float(sol.beta.sum()) == pytest.approx(1.0, abs=1e-9)
    if active and not sol.infeasible and not sol.degenerate:
        slack = (G.T @ G) @ sol.beta
        assert float(np.min(slack[active])) >= -1e-8


@pytest.mark.parametrize("m,resolution", [(2, 200), (3, 120), (4, 40)])
def test_solve_qp_matches_grid_oracle(m, resolution):
    rng = np.random.default_rng(1234 + m)
    compared = 0
    for _ in range(5):
        n = int(rng.integers(m, 9))
        G = rng.normal(size=(n, m))
        M = G.T @ G
        a = rng.normal(size=m)
        active = sorted(rng.choice(m, size=int(rng.integers(0, m + 1)), replace=False))
        sol = qp.solve_qp(G, a, active)
        if sol.infeasible:
            continue
        arg, oracle_obj = qp_grid_oracle(M, a, active, resolution)
        if active and float(np.min((M @ arg)[active])) < -1e-8:
            continue  # grid too coarse to certify a feasible minimizer here
        compared += 1
        ours = float(np.sum((M @ sol.beta - a) ** 2))
        assert ours <= oracle_obj + 1e-4
    assert compared >= 3


def test_solve_qp_realistic_balance_instances():
    # anchors and active sets as the descent loop would produce them
    rng = np.random.default_rng(7)
    for _ in range(6):
        m = int(rng.integers(2, 5))
        G = rng.normal(size=(6, m))
        losses = rng.uniform(0.05, 1.0, size=m)
        weights = rng.uniform(0.2, 1.0, size=m)
        a = qp.anchor_direction(losses, weights)
        active = qp.active_index_set(losses, weights)
        sol = qp.solve_qp(G, a, active)
        assert float(sol.beta.sum()) == pytest.approx(1.0, abs=1e-9)
        if not sol.infeasible:
            slack = (G.T @ G) @ sol.beta
            assert float(np.min(slack[active])) >= -1e-8


def test_qp_solution_diagnostics_payload():
    G = np.eye(2)
    sol = qp.solve_qp(G, np.array([0.6, 0.1]), [0])
    dump = sol.diagnostics(G.T @ G, np.array([0.6, 0.1]), [0])
    assert set(dump) == {
        "gram", "anchor", "active", "beta", "slacks", "objective",
        "infeasible", "degenerate",
    }
    assert dump["active"] == [0]
    assert len(dump["slacks"]) == 1
    assert dump["objective"] >= 0.0


# ---------------------------------------------------------------------------
# directions
# ---------------------------------------------------------------------------


def test_non_dominating_direction_combines_columns():
    G = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    d = qp.non_dominating_direction(G, [0.25, 0.75])
    assert d == pytest.approx([0.25, 0.75, 1.0])
    with pytest.raises(DimensionMismatchError):
        qp.non_dominating_direction(G, [0.5, 0.25, 0.25])


def test_ls_direction_is_weighted_gradient_sum():
    G = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    d = qp.ls_direction(G, [2.0, 1.0])
    assert d == pytest.approx([2.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        qp.ls_direction(G, [1.0, 0.0])  # weights must be strictly positive
