"""Non-dominating descent directions from a tiny constrained least-squares QP.

Given per-objective gradients G (columns g_1..g_m) at a relaxed point, losses L
and preference weights lam, the step direction is d = G beta* where

    beta* = argmin  || G^T G beta - a ||^2
            s.t.    beta in the probability simplex,
                    beta^T G^T g_j >= 0  for every j in the active index set J.

The anchor a switches between a pure descent target (weighted losses, taken
when the weighted loss profile is already uniform along the preference ray)
and a balancing target built from the log-ratio of each normalized weighted
loss to the uniform profile.  The constraint set J shrinks to the maximal
weighted losses in the uniform regime so the step may trade off the rest.

m is tiny (2..4 in practice), so the solver enumerates active sets exactly:
a closed-form interval argmin for m = 2 and equality-constrained KKT solves
over all small constraint subsets otherwise.  Solutions are exact to machine
precision, which the downstream descent loop leans on heavily.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, as_objectives, as_weights

__all__ = [
    "DegenerateLossError",
    "QPSolution",
    "normalized_weighted_losses",
    "nonuniformity",
    "active_index_set",
    "anchor_direction",
    "project_simplex",
    "solve_qp",
    "non_dominating_direction",
    "ls_direction",
]

#: Default threshold on the non-uniformity below which the weighted loss
#: profile counts as balanced and the solver switches to pure descent.
EPSILON_DEFAULT = 1e-3

# Inequalities are considered satisfied down to this slack; candidate
# generation uses half of it so returned slacks clear the bound.
_SLACK_TOL = 1e-8
_RELIEF = 5e-9


class DegenerateLossError(ValueError):
    """Raised when every weighted loss is zero and no profile can be formed."""


def _paired(losses, weights) -> tuple[np.ndarray, np.ndarray]:
    lv = as_objectives(losses)
    wv = as_weights(weights)
    if lv.shape != wv.shape:
        raise DimensionMismatchError(
            f"losses have length {lv.size} but weights have length {wv.size}"
        )
    return lv, wv


def normalized_weighted_losses(losses, weights) -> np.ndarray:
    """Weighted losses normalized to sum to one.

    Raises:
        DegenerateLossError: If every weighted loss is zero.
    """
    lv, wv = _paired(losses, weights)
    prod = lv * wv
    total = float(prod.sum())
    if total <= 0.0:
        raise DegenerateLossError("all weighted losses are zero")
    return prod / total


def nonuniformity(losses, weights) -> float:
    """KL divergence of the normalized weighted losses from the uniform profile.

    Zero exactly when every weighted loss is equal; grows as the profile
    concentrates.  Zero entries contribute nothing (0 log 0 = 0).
    """
    h = normalized_weighted_losses(losses, weights)
    m = h.size
    pos = h > 0.0
    return float(np.sum(h[pos] * np.log(h[pos] * m)))


def active_index_set(losses, weights, epsilon: float = EPSILON_DEFAULT) -> list[int]:
    """Objectives whose descent must not be sacrificed by the next step.

    Returns the maximizers of the weighted loss (ties included) when the
    profile is already uniform within ``epsilon``; otherwise every index, so a
    balancing step cannot regress any objective.
    """
    lv, wv = _paired(losses, weights)
    mu = nonuniformity(lv, wv)
    if mu <= epsilon:
        prod = lv * wv
        top = float(prod.max())
        return [int(j) for j in np.flatnonzero(prod >= top - 1e-12 * max(top, 1.0))]
    return list(range(lv.size))


def anchor_direction(losses, weights, epsilon: float = EPSILON_DEFAULT) -> np.ndarray:
    """Target vector the QP tries to match with G^T G beta.

    In the balanced regime (non-uniformity <= epsilon) the anchor is the
    weighted loss vector itself, yielding a weighted descent step.  Otherwise
    each component is ``lam_j * (log(m * h_j) - mu)`` with h the normalized
    weighted losses and mu the non-uniformity, which pushes oversized
    components of the profile down and undersized ones up; components with
    h_j = 0 are left at zero.
    """
    lv, wv = _paired(losses, weights)
    mu = nonuniformity(lv, wv)
    if mu <= epsilon:
        return wv * lv
    h = normalized_weighted_losses(lv, wv)
    m = h.size
    a = np.zeros(m)
    pos = h > 0.0
    a[pos] = wv[pos] * (np.log(h[pos] * m) - mu)
    return a


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = int(ks[u - css / ks > 0][-1])
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@dataclass
class QPSolution:
    """Result of :func:`solve_qp`.

    Attributes:
        beta: Simplex coefficients combining the gradient columns.
        infeasible: True when the J constraints could not be satisfied to
            tolerance and the unconstrained-over-simplex minimizer was
            returned instead (soft flag; callers may still step).
        degenerate: True when every gradient was zero and beta is uniform
            by convention (the caller should treat the step as converged).
    """

    beta: np.ndarray
    infeasible: bool = False
    degenerate: bool = False

    def diagnostics(self, gram: np.ndarray, anchor: np.ndarray, active) -> dict:
        """JSON-serializable dump of the solve for verbose tooling."""
        slack = gram @ self.beta
        act = list(active)
        return {
            "gram": gram.tolist(),
            "anchor": anchor.tolist(),
            "active": act,
            "beta": self.beta.tolist(),
            "slacks": [float(slack[j]) for j in act],
            "objective": float(np.sum((gram @ self.beta - anchor) ** 2)),
            "infeasible": self.infeasible,
            "degenerate": self.degenerate,
        }


def _objective(M: np.ndarray, a: np.ndarray, beta: np.ndarray) -> float:
    r = M @ beta - a
    return float(r @ r)


def _solve_m2(M: np.ndarray, a: np.ndarray, act: np.ndarray) -> tuple[np.ndarray, bool]:
    """Exact solve for m = 2 via interval arithmetic on beta = (b, 1 - b)."""
    m00, m01 = float(M[0, 0]), float(M[0, 1])
    m10, m11 = float(M[1, 0]), float(M[1, 1])
    a0, a1 = float(a[0]), float(a[1])
    # (M beta)_j = d_j * b + M[j, 1] with d_j the column difference.
    d0 = m00 - m01
    d1 = m10 - m11

    def interval(relief: float) -> tuple[float, float]:
        lo, hi = 0.0, 1.0
        for j in act:
            dj = d0 if j == 0 else d1
            cj = m01 if j == 0 else m11
            bound = cj + relief
            if dj > 0.0:
                lo = max(lo, -bound / dj)
            elif dj < 0.0:
                hi = min(hi, -bound / dj)
            elif bound < 0.0:
                return 1.0, 0.0  # constant constraint violated
        return lo, hi

    def argmin_on(lo: float, hi: float) -> float:
        # q(b) = ||(d0, d1) b + (m01 - a0, m11 - a1)||^2
        alpha = d0 * d0 + d1 * d1
        half_beta = d0 * (m01 - a0) + d1 * (m11 - a1)
        if alpha > 0.0:
            b = -half_beta / alpha
            return min(max(b, lo), hi)
        if half_beta > 0.0:
            return lo
        if half_beta < 0.0:
            return hi
        return lo

    lo, hi = interval(0.0)
    if lo > hi:
        lo, hi = interval(_RELIEF)
    if lo > hi:
        b = argmin_on(0.0, 1.0)
        return np.array([b, 1.0 - b]), True
    b = argmin_on(lo, hi)
    return np.array([b, 1.0 - b]), False


def _kkt_candidates(M: np.ndarray, a: np.ndarray, act: np.ndarray):
    """Equality-constrained minimizers over every small active-set pattern.

    Constraints considered as equalities: any subset of the m nonnegativity
    bounds and the |J| slack inequalities, of size at most m - 1, always
    together with the simplex sum constraint.  Each subset yields a KKT
    system; singular or inconsistent subsets are skipped (a spanning,
    nonsingular subset for the true active set always appears elsewhere in
    the enumeration).
    """
    m = M.shape[0]
    Q2 = 2.0 * (M.T @ M)
    c2 = 2.0 * (M.T @ a)
    # Rows of inequality constraints as (coef, offset 0) pairs: bounds e_i, slacks M[j].
    rows = [np.eye(m)[i] for i in range(m)] + [M[j] for j in act]
    ones = np.ones(m)
    for size in range(m):
        for combo in itertools.combinations(range(len(rows)), size):
            E = np.vstack([ones] + [rows[i] for i in combo])
            e = np.zeros(1 + size)
            e[0] = 1.0
            k = E.shape[0]
            kkt = np.zeros((m + k, m + k))
            kkt[:m, :m] = Q2
            kkt[:m, m:] = E.T
            kkt[m:, :m] = E
            rhs = np.concatenate([c2, e])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            beta = sol[:m]
            if not np.all(np.isfinite(beta)):
                continue
            if np.max(np.abs(E @ beta - e)) > 1e-8:
                continue
            yield beta


def _best_feasible(M: np.ndarray, a: np.ndarray, act: np.ndarray) -> np.ndarray | None:
    best = None
    best_obj = np.inf
    for beta in _kkt_candidates(M, a, act):
        if float(beta.min()) < -1e-10:
            continue
        beta = np.maximum(beta, 0.0)
        total = float(beta.sum())
        if not (0.999999 < total < 1.000001):
            continue
        beta = beta / total
        if act.size and float(np.min((M @ beta)[act])) < -_RELIEF:
            continue
        obj = _objective(M, a, beta)
        if obj < best_obj - 1e-15 or best is None:
            best, best_obj = beta, obj
    return best


def solve_qp(gradients, anchor, active) -> QPSolution:
    """Solve the simplex-constrained least-squares problem for beta.

    Args:
        gradients: (n, m) matrix whose columns are per-objective gradients.
        anchor: Length-m anchor vector (see :func:`anchor_direction`).
        active: Indices J whose constraints ``(G^T G beta)_j >= 0`` apply.

    Returns:
        QPSolution with the coefficients and status flags.  When the J
        constraints cannot be met within tolerance the unconstrained-over-
        simplex minimizer is returned with ``infeasible=True``.
    """
    G = np.asarray(gradients, dtype=np.float64)
    if G.ndim != 2:
        raise ValueError(f"gradients must be 2-D (n, m), got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ValueError("gradients contain non-finite entries")
    n, m = G.shape
    a = np.asarray(anchor, dtype=np.float64)
    if a.shape != (m,):
        raise DimensionMismatchError(f"anchor has shape {a.shape}, expected ({m},)")
    act = np.array(sorted(set(int(j) for j in active)), dtype=int)
    if act.size and (act[0] < 0 or act[-1] >= m):
        raise ValueError("active index out of range")
    if m == 1:
        return QPSolution(beta=np.ones(1))
    M = G.T @ G
    if not M.any():
        return QPSolution(beta=np.full(m, 1.0 / m), degenerate=True)
    if m == 2:
        beta, infeasible = _solve_m2(M, a, act)
        return QPSolution(beta=beta, infeasible=infeasible)
    beta = _best_feasible(M, a, act)
    if beta is not None:
        return QPSolution(beta=beta)
    fallback = _best_feasible(M, a, np.array([], dtype=int))
    if fallback is None:  # cannot happen: the unconstrained pattern always solves
        fallback = np.full(m, 1.0 / m)
    return QPSolution(beta=fallback, infeasible=True)


def non_dominating_direction(gradients, beta) -> np.ndarray:
    """Step direction d = G beta in parameter space."""
    G = np.asarray(gradients, dtype=np.float64)
    b = np.asarray(beta, dtype=np.float64)
    if G.ndim != 2 or G.shape[1] != b.size:
        raise DimensionMismatchError(
            f"gradients of shape {G.shape} incompatible with beta of length {b.size}"
        )
    return G @ b


def ls_direction(gradients, weights) -> np.ndarray:
    """Fixed linear-scalarization direction d = G lam (baseline)."""
    G = np.asarray(gradients, dtype=np.float64)
    wv = as_weights(weights)
    if G.ndim != 2 or G.shape[1] != wv.size:
        raise DimensionMismatchError(
            f"gradients of shape {G.shape} incompatible with weights of length {wv.size}"
        )
    return G @ wv
