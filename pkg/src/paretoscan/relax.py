"""Task contract and the relax-descend-discretize inner machinery.

A task exposes a discrete candidate space with an oracle evaluation, a smooth
relaxation of that space with losses and per-objective gradients, and a way to
sample discrete candidates near a relaxed point.  The inner loop descends the
relaxation along non-dominating (or fixed linear-scalarization) directions;
discretization then evaluates a small batch of nearby candidates with the
oracle and keeps the one with the smallest weighted relative max.

Oracle accounting: one discrete evaluation costs m calls by default (one per
objective); construct tasks with ``per_property_oracle=False`` to count one
call per candidate instead.
"""

from __future__ import annotations

import abc
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import qp
from .core import as_objectives, as_weights, relative_max

__all__ = [
    "Box",
    "SimplexRows",
    "Unconstrained",
    "RelaxedPoint",
    "TaskContract",
    "InvalidRelaxationError",
    "ExhaustedNeighborhoodError",
    "NumericalFailureError",
    "RoundTrace",
    "InnerResult",
    "SelectionResult",
    "inner_descent",
    "discretize_select",
    "trace_to_csv",
]

#: Step directions with norm below this count as converged.
CONVERGENCE_NORM = 1e-9


class InvalidRelaxationError(ValueError):
    """Raised when relaxed parameters leave the task's feasible region."""


class ExhaustedNeighborhoodError(RuntimeError):
    """Raised when discretization produces no candidates."""


class NumericalFailureError(RuntimeError):
    """Non-finite loss or gradient encountered during descent.

    Attributes:
        round_index: Inner round at which the failure occurred.
    """

    def __init__(self, message: str, round_index: int) -> None:
        super().__init__(f"{message} (inner round {round_index})")
        self.round_index = round_index


@dataclass(frozen=True)
class Box:
    """Axis-aligned box feasible region with shared scalar bounds."""

    lo: float
    hi: float

    def project(self, params: np.ndarray) -> np.ndarray:
        return np.clip(params, self.lo, self.hi)


@dataclass(frozen=True)
class SimplexRows:
    """Product of probability simplices, one per row of a flattened matrix."""

    rows: int
    cols: int

    def project(self, params: np.ndarray) -> np.ndarray:
        mat = params.reshape(self.rows, self.cols)
        return np.stack([qp.project_simplex(row) for row in mat]).ravel()


@dataclass(frozen=True)
class Unconstrained:
    """No feasible-region restriction."""

    def project(self, params: np.ndarray) -> np.ndarray:
        return params


@dataclass
class RelaxedPoint:
    """Continuous parameters plus the feasible region they live in."""

    params: np.ndarray
    region: Box | SimplexRows | Unconstrained

    def __post_init__(self) -> None:
        self.params = np.asarray(self.params, dtype=np.float64).ravel()


class TaskContract(abc.ABC):
    """Discrete optimization task with a differentiable relaxation.

    Subclasses define the candidate space, the oracle, the relaxation and its
    gradients.  ``eval_discrete`` is the only operation that touches the
    oracle counter.
    """

    #: Number of objectives; set by subclasses.
    m: int = 0

    def __init__(self, per_property_oracle: bool = True) -> None:
        self.per_property_oracle = per_property_oracle
        self._oracle_calls = 0

    @property
    def oracle_calls(self) -> int:
        """Cumulative oracle calls consumed by discrete evaluations."""
        return self._oracle_calls

    def eval_discrete(self, candidate) -> np.ndarray:
        """Evaluate a discrete candidate with the oracle (counted)."""
        self._oracle_calls += self.m if self.per_property_oracle else 1
        return as_objectives(self._discrete_losses(candidate))

    def clamp(self, point: RelaxedPoint) -> RelaxedPoint:
        """Project a relaxed point back onto the task's feasible region."""
        return RelaxedPoint(point.region.project(point.params), point.region)

    @abc.abstractmethod
    def _discrete_losses(self, candidate) -> np.ndarray:
        """Oracle losses of a discrete candidate (uncounted internal hook)."""

    @abc.abstractmethod
    def relax(self, candidate) -> RelaxedPoint:
        """Embed a discrete candidate into the continuous search space."""

    @abc.abstractmethod
    def relaxed_losses(self, point: RelaxedPoint) -> np.ndarray:
        """Differentiable losses at a relaxed point."""

    @abc.abstractmethod
    def gradients(self, point: RelaxedPoint) -> np.ndarray:
        """(n, m) matrix of per-objective gradients at a relaxed point."""

    @abc.abstractmethod
    def neighborhood_discretize(self, point: RelaxedPoint, count: int, rng) -> list:
        """Discrete candidates near ``point``; first entry is deterministic."""

    @abc.abstractmethod
    def candidate_id(self, candidate) -> str:
        """Stable identifier for a discrete candidate."""

    @abc.abstractmethod
    def random_candidate(self, rng):
        """Seeded draw of an initial discrete candidate."""


@dataclass
class RoundTrace:
    """State recorded at the top of one inner descent round."""

    round_index: int
    losses: np.ndarray
    mu: float
    r_check: float
    mode: str


@dataclass
class InnerResult:
    """Outcome of :func:`inner_descent`."""

    point: RelaxedPoint
    trace: list[RoundTrace]
    converged: bool
    qp_diagnostics: list[dict] = field(default_factory=list)


def _guarded_mu(losses: np.ndarray, weights: np.ndarray) -> float:
    """Non-uniformity with the all-zero-losses case mapped to 0 (ideal point)."""
    try:
        return qp.nonuniformity(losses, weights)
    except qp.DegenerateLossError:
        return 0.0


def inner_descent(
    task: TaskContract,
    point: RelaxedPoint,
    weights,
    *,
    eta: float,
    rounds: int,
    mode: str = "epo",
    epsilon: float = qp.EPSILON_DEFAULT,
    collect_qp_diagnostics: bool = False,
) -> InnerResult:
    """Gradient descent on the relaxation driven by the chosen direction rule.

    Args:
        task: The task providing relaxed losses/gradients.
        point: Starting relaxed point (clamped before use).
        weights: Preference weight vector lam.
        eta: Step size.
        rounds: Number of descent rounds (K).
        mode: "epo" for the non-dominating QP direction, "ls" for d = G lam.
        epsilon: Balance threshold for the QP mode.
        collect_qp_diagnostics: Record per-round QP dumps (epo mode only).

    Returns:
        InnerResult with the final point, a per-round trace of
        (losses, mu, r_check), and a converged flag set when every round's
        direction norm fell below 1e-9.

    Raises:
        NumericalFailureError: On non-finite losses, gradients or direction,
            carrying the offending round index.
    """
    if mode not in ("epo", "ls"):
        raise ValueError(f"unknown descent mode {mode!r}")
    wv = as_weights(weights)
    x = task.clamp(point)
    trace: list[RoundTrace] = []
    diags: list[dict] = []
    max_norm = 0.0
    for k in range(rounds):
        losses = np.asarray(task.relaxed_losses(x), dtype=np.float64)
        if not np.all(np.isfinite(losses)):
            raise NumericalFailureError("non-finite relaxed losses", k)
        grads = np.asarray(task.gradients(x), dtype=np.float64)
        if not np.all(np.isfinite(grads)):
            raise NumericalFailureError("non-finite gradients", k)
        mu = _guarded_mu(losses, wv)
        r_check = relative_max(np.maximum(losses, 0.0), wv)
        trace.append(RoundTrace(k, losses.copy(), mu, r_check, mode))
        degenerate_losses = float(np.sum(losses * wv)) <= 0.0
        if mode == "ls":
            direction = qp.ls_direction(grads, wv)
        elif degenerate_losses:
            direction = np.zeros(x.params.size)
        else:
            anchor = qp.anchor_direction(losses, wv, epsilon)
            active = qp.active_index_set(losses, wv, epsilon)
            solution = qp.solve_qp(grads, anchor, active)
            if collect_qp_diagnostics:
                diags.append(solution.diagnostics(grads.T @ grads, anchor, active))
            if solution.degenerate:
                direction = np.zeros(x.params.size)
            else:
                direction = qp.non_dominating_direction(grads, solution.beta)
        if not np.all(np.isfinite(direction)):
            raise NumericalFailureError("non-finite step direction", k)
        max_norm = max(max_norm, float(np.linalg.norm(direction)))
        x = task.clamp(RelaxedPoint(x.params - eta * direction, x.region))
    return InnerResult(
        point=x,
        trace=trace,
        converged=max_norm < CONVERGENCE_NORM,
        qp_diagnostics=diags,
    )


@dataclass
class SelectionResult:
    """Outcome of :func:`discretize_select`.

    ``evaluations`` logs every candidate batch entry as
    (candidate, objectives, r_check) in draw order.
    """

    candidate: object
    objectives: np.ndarray
    evaluations: list[tuple[object, np.ndarray, float]]


def discretize_select(
    task: TaskContract,
    point: RelaxedPoint,
    weights,
    count: int,
    rng,
) -> SelectionResult:
    """Sample candidates near a relaxed point and keep the best by r_check.

    Evaluates ``count`` discrete candidates with the oracle and returns the
    one minimizing the weighted relative max; ties break by lower weighted
    loss sum, then by draw order.

    Raises:
        ExhaustedNeighborhoodError: If the task yields no candidates.
    """
    wv = as_weights(weights)
    candidates = task.neighborhood_discretize(point, count, rng)
    if not candidates:
        raise ExhaustedNeighborhoodError("discretization produced no candidates")
    evaluations: list[tuple[object, np.ndarray, float]] = []
    best_key: tuple[float, float, int] | None = None
    best: tuple[object, np.ndarray] | None = None
    for idx, cand in enumerate(candidates):
        objectives = task.eval_discrete(cand)
        r_check = relative_max(objectives, wv)
        evaluations.append((cand, objectives, r_check))
        key = (r_check, float(np.sum(objectives * wv)), idx)
        if best_key is None or key < best_key:
            best_key = key
            best = (cand, objectives)
    assert best is not None
    return SelectionResult(
        candidate=best[0], objectives=best[1], evaluations=evaluations
    )


def trace_to_csv(trace: list[RoundTrace], m: int) -> str:
    """Serialize an inner trace: round, l_1..l_m, mu, r_check, mode."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["round"] + [f"l_{i + 1}" for i in range(m)] + ["mu", "r_check", "mode"]
    )
    for row in trace:
        writer.writerow(
            [str(row.round_index)]
            + [repr(float(x)) for x in row.losses]
            + [repr(float(row.mu)), repr(float(row.r_check)), row.mode]
        )
    return buf.getvalue()
