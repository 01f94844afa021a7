"""Embedded verification suites and their supporting grid utilities."""

import numpy as np
import pytest

from paretoscan.selftest import qp_grid_oracle, run_selftest, simplex_grid


def test_simplex_grid_2d():
    pts = simplex_grid(2, 4)
    assert pts.shape == (5, 2)
    assert pts.sum(axis=1) == pytest.approx(np.ones(5))
    assert pts[0] == pytest.approx([0.0, 1.0])
    assert pts[-1] == pytest.approx([1.0, 0.0])


def test_simplex_grid_3d_counts():
    pts = simplex_grid(3, 3)
    # compositions of 3 into 3 parts: C(5, 2) = 10
    assert pts.shape == (10, 3)
    assert pts.sum(axis=1) == pytest.approx(np.ones(10))
    assert np.all(pts >= 0.0)
    rows = {tuple(np.round(p, 12)) for p in pts}
    assert len(rows) == 10


def test_simplex_grid_4d_counts():
    pts = simplex_grid(4, 2)
    # compositions of 2 into 4 parts: C(5, 3) = 10
    assert pts.shape == (10, 4)


def test_simplex_grid_dimension_limits():
    with pytest.raises(ValueError):
        simplex_grid(5, 3)
    with pytest.raises(ValueError):
        simplex_grid(1, 3)


def test_qp_grid_oracle_identity_case():
    # with M = I the problem is a plain simplex projection of a
    beta, value = qp_grid_oracle(np.eye(2), np.array([0.6, 0.1]), [], 400)
    assert beta == pytest.approx([0.75, 0.25], abs=1e-6)
    assert value == pytest.approx(0.045, abs=1e-6)  # 2 * 0.15^2


def test_qp_grid_oracle_respects_active_constraints():
    # force (M b)_0 >= 0 with M pushing the first coordinate negative
    M = np.array([[-1.0, 1.0], [0.0, 1.0]])
    a = np.array([-1.0, 0.0])
    beta, _ = qp_grid_oracle(M, a, [0], 400)
    # the refinement stage works at 1e-9 steps, so allow oracle-scale slack
    assert (M @ beta)[0] >= -5e-8
    assert beta.sum() == pytest.approx(1.0)


def test_run_selftest_all_rows_pass():
    rows = run_selftest(seed=0)
    assert [r.name for r in rows] == ["qp", "hv", "grad", "weights"]
    assert all(r.passed for r in rows)
    assert all(r.seconds >= 0.0 for r in rows)
    assert all(r.detail for r in rows)


def test_run_selftest_filter_subsets():
    rows = run_selftest("grad", seed=0)
    assert [r.name for r in rows] == ["grad"]
    assert run_selftest("zzz", seed=0) == []
