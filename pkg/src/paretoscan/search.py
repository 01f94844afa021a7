"""Outer optimization drivers and theory diagnostics.

A run repeats relax -> inner descent -> discretize/select for one weight
ray, logging one trajectory record per outer iteration.  A scan runs one
ray per weight vector from a deterministic per-ray seed, merges every
evaluated candidate into a shared Pareto archive, and summarizes front
quality.  Diagnostics check the run's loss path against the descent
theory: each step should stay inside the previous admissible box
(componentwise l_j <= r_check / lambda_j), the weighted relative max
should fall monotonically, and the final point should satisfy the
geometric-decay bound implied by the fitted per-step decay ratio.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import ArchiveEntry, ParetoArchive, as_weights, relative_max
from .metrics import (
    UnsupportedDimensionError,
    front_coverage,
    hypervolume,
    nonuniformity_report,
    ray_nonuniformity,
)
from .qp import EPSILON_DEFAULT
from .relax import (
    NumericalFailureError,
    TaskContract,
    discretize_select,
    inner_descent,
)
from .tasks import default_eta, make_task
from .weights import lift_positive

__all__ = [
    "RunConfig",
    "TrajectoryPoint",
    "RunResult",
    "TheoryReport",
    "RayOutcome",
    "ScanResult",
    "run_inversion",
    "run_ls",
    "front_scan",
    "theory_diagnostics",
    "trajectory_to_csv",
]

#: Slack for admissible-set and monotonicity comparisons.
_THEORY_TOL = 1e-9


@dataclass
class RunConfig:
    """Settings for one optimization run.

    ``oracle_budget`` of 0 means unlimited; ``eta=None`` picks the task's
    default step size; ``weights=None`` picks the uniform ray.  ``eta=0``
    is allowed and yields a constant trajectory (useful as a control).
    """

    task: str = "synthetic"
    task_params: dict = field(default_factory=dict)
    mode: str = "epo"
    weights: np.ndarray | None = None
    T: int = 50
    K: int = 20
    eta: float | None = None
    C: int = 10
    epsilon: float = EPSILON_DEFAULT
    oracle_budget: int = 0
    seed: int = 0

    _ALIASES = {"lambda": "weights", "t": "T", "k": "K", "c": "C", "budget": "oracle_budget"}

    def validate(self) -> None:
        if self.mode not in ("epo", "ls"):
            raise ValueError(f"mode must be 'epo' or 'ls', got {self.mode!r}")
        if self.T < 1 or self.K < 1 or self.C < 1:
            raise ValueError("T, K and C must all be at least 1")
        if self.eta is not None and self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.oracle_budget < 0:
            raise ValueError("oracle_budget must be non-negative (0 = unlimited)")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        """Build from a JSON-style dict; accepts lambda/T/K/C aliases."""
        kwargs = {}
        fields = set(cls.__dataclass_fields__)
        for key, value in data.items():
            name = cls._ALIASES.get(key if key in cls._ALIASES else key.lower(), key)
            if name not in fields or name.startswith("_"):
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = value
        if kwargs.get("weights") is not None:
            kwargs["weights"] = np.asarray(kwargs["weights"], dtype=np.float64)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


@dataclass
class TrajectoryPoint:
    """One outer-iteration record; round 0 is the evaluated initial point."""

    round_index: int
    candidate_id: str
    objectives: np.ndarray
    mu: float
    r_check: float
    oracle_calls: int


@dataclass
class RunResult:
    """Everything produced by one run, including the partial state on failure."""

    config: RunConfig
    weights: np.ndarray
    trajectory: list[TrajectoryPoint]
    final_candidate: object
    archive: ParetoArchive
    diagnostics: "TheoryReport | None" = None
    converged: bool = False
    failed: bool = False
    error: str | None = None

    @property
    def oracle_calls(self) -> int:
        return self.trajectory[-1].oracle_calls if self.trajectory else 0


@dataclass
class TheoryReport:
    """Descent-theory diagnostics for one trajectory.

    ``bound_check`` evaluates the geometric-decay bound
    (gamma * r_star + (1 - gamma) * r_0) / lambda_j with
    gamma = (1 - alpha_hat^T) / ((1 - alpha_hat) * N) over the steps
    actually taken; it is observational (r_star is the best observed
    relative max, not the unknown optimum).
    """

    admissible_violations: int
    violation_steps: list[int]
    r_check_sequence: list[float]
    monotone_fraction: float
    bound_check: dict

    def to_dict(self) -> dict:
        return {
            "admissible_violations": self.admissible_violations,
            "violation_steps": list(self.violation_steps),
            "r_check_sequence": list(self.r_check_sequence),
            "monotone_fraction": self.monotone_fraction,
            "bound_check": dict(self.bound_check),
        }


def _resolve_weights(config: RunConfig, m: int) -> np.ndarray:
    if config.weights is None:
        w = np.full(m, 1.0 / np.sqrt(m))
    else:
        w = np.asarray(config.weights, dtype=np.float64)
        if w.size != m:
            raise ValueError(
                f"weight vector has {w.size} components but the task has {m} objectives"
            )
    return as_weights(lift_positive(w))


def _record(
    task: TaskContract,
    candidate,
    objectives: np.ndarray,
    weights: np.ndarray,
    round_index: int,
    start_calls: int,
) -> TrajectoryPoint:
    return TrajectoryPoint(
        round_index=round_index,
        candidate_id=task.candidate_id(candidate),
        objectives=objectives,
        mu=ray_nonuniformity(objectives, weights),
        r_check=relative_max(objectives, weights),
        oracle_calls=task.oracle_calls - start_calls,
    )


def _run(config: RunConfig, x0=None, task: TaskContract | None = None) -> RunResult:
    config.validate()
    if task is None:
        task = make_task(config.task, **config.task_params)
    weights = _resolve_weights(config, task.m)
    eta = default_eta(config.task) if config.eta is None else config.eta
    rng = np.random.default_rng(config.seed)
    start_calls = task.oracle_calls
    if x0 is None:
        x0 = task.random_candidate(rng)

    archive = ParetoArchive()
    trajectory: list[TrajectoryPoint] = []
    x = x0
    objectives = task.eval_discrete(x)
    trajectory.append(_record(task, x, objectives, weights, 0, start_calls))
    archive.insert(
        ArchiveEntry(task.candidate_id(x), objectives, weights, trajectory[-1].oracle_calls)
    )

    converged = False
    failed = False
    error: str | None = None
    for t in range(1, config.T + 1):
        budget = config.oracle_budget
        if budget and task.oracle_calls - start_calls >= budget:
            break
        try:
            inner = inner_descent(
                task,
                task.relax(x),
                weights,
                eta=eta,
                rounds=config.K,
                mode=config.mode,
                epsilon=config.epsilon,
            )
            selection = discretize_select(task, inner.point, weights, config.C, rng)
        except NumericalFailureError as exc:
            failed = True
            error = f"round {t}: {exc}"
            break
        x = selection.candidate
        objectives = selection.objectives
        trajectory.append(_record(task, x, objectives, weights, t, start_calls))
        archive.insert(
            ArchiveEntry(
                task.candidate_id(x), objectives, weights, trajectory[-1].oracle_calls
            )
        )
        if inner.converged:
            converged = True
            break

    result = RunResult(
        config=config,
        weights=weights,
        trajectory=trajectory,
        final_candidate=x,
        archive=archive,
        converged=converged,
        failed=failed,
        error=error,
    )
    if len(trajectory) >= 2:
        result.diagnostics = theory_diagnostics(result, weights)
    return result


def run_inversion(config: RunConfig, x0=None, task: TaskContract | None = None) -> RunResult:
    """Run the relax-descend-discretize loop with the QP descent direction.

    Args:
      config: Run settings; ``config.mode`` is forced to "epo".
      x0: Optional starting candidate; drawn from the seeded stream if omitted.
      task: Optional pre-built task instance (otherwise built from config).

    Returns:
      RunResult with the per-iteration trajectory, final candidate, local
      Pareto archive and theory diagnostics.  Numerical failures abort the
      loop and return the partial result with ``failed`` set.
    """
    return _run(replace(config, mode="epo"), x0, task)


def run_ls(config: RunConfig, x0=None, task: TaskContract | None = None) -> RunResult:
    """Baseline run using the linearly weighted direction d = G lambda."""
    return _run(replace(config, mode="ls"), x0, task)


def theory_diagnostics(result: RunResult, weights, n_neighborhood: int | None = None) -> TheoryReport:
    """Check a finished trajectory against the descent theory.

    Args:
      result: A run with at least two trajectory records.
      weights: The ray the run targeted.
      n_neighborhood: Neighborhood-size bound N for the decay bound;
        defaults to the run's discretization count C.

    Returns:
      TheoryReport.  The decay ratio ``alpha_hat`` is the median of
      consecutive-step ratios over strictly decreasing pairs and is None
      (bound not applicable) when no such pair exists, except in the exact
      one-step case where gamma = 1/N regardless.
    """
    if len(result.trajectory) < 2:
        raise ValueError("theory diagnostics need a trajectory of length >= 2")
    wv = as_weights(weights)
    losses = [p.objectives for p in result.trajectory]
    r_seq = [p.r_check for p in result.trajectory]
    steps = len(r_seq) - 1

    violations = []
    for t in range(steps):
        bound = r_seq[t] / wv + _THEORY_TOL
        if np.any(losses[t + 1] > bound):
            violations.append(t + 1)

    monotone = sum(1 for t in range(steps) if r_seq[t + 1] <= r_seq[t] + _THEORY_TOL)
    monotone_fraction = monotone / steps

    drops = np.diff(r_seq) * -1.0  # positive where r_check strictly fell
    ratios = [
        drops[t + 1] / drops[t]
        for t in range(steps - 1)
        if drops[t] > 0.0 and drops[t + 1] > 0.0
    ]
    alpha_hat = float(np.median(ratios)) if ratios else None

    N = n_neighborhood if n_neighborhood is not None else result.config.C
    if N < 1:
        raise ValueError("neighborhood bound must be at least 1")
    gamma: float | None
    if steps == 1:
        gamma = 1.0 / N  # (1 - alpha) / ((1 - alpha) N), exact for any alpha
    elif alpha_hat is None:
        gamma = None
    elif abs(1.0 - alpha_hat) < 1e-12:
        gamma = steps / N  # limit of the geometric sum at alpha -> 1
    else:
        gamma = (1.0 - alpha_hat**steps) / ((1.0 - alpha_hat) * N)

    r_star = float(min(r_seq))
    r_zero = float(r_seq[0])
    bound_check: dict = {
        "alpha_hat": alpha_hat,
        "gamma": gamma,
        "n_neighborhood": int(N),
        "steps": steps,
        "r_star": r_star,
        "r_zero": r_zero,
        "bound": None,
        "final_losses": [float(v) for v in losses[-1]],
        "satisfied": None,
    }
    if gamma is not None:
        level = gamma * r_star + (1.0 - gamma) * r_zero
        bound_vec = level / wv
        bound_check["bound"] = [float(v) for v in bound_vec]
        bound_check["satisfied"] = bool(np.all(losses[-1] <= bound_vec + _THEORY_TOL))

    return TheoryReport(
        admissible_violations=len(violations),
        violation_steps=violations,
        r_check_sequence=[float(v) for v in r_seq],
        monotone_fraction=float(monotone_fraction),
        bound_check=bound_check,
    )


@dataclass
class RayOutcome:
    """Per-ray scan record; ``failed`` rays keep the scan going."""

    index: int
    weights: np.ndarray
    final_objectives: np.ndarray | None
    final_mu: float
    oracle_calls: int
    converged: bool
    failed: bool
    error: str | None = None


@dataclass
class ScanResult:
    """Merged archive plus per-ray outcomes and summary metrics."""

    archive: ParetoArchive
    rays: list[RayOutcome]
    metrics: dict


def front_scan(
    task_factory,
    weight_list: list,
    config: RunConfig,
    *,
    threads: int = 1,
    reference=None,
    true_front=None,
    coverage_radius: float = 0.05,
    nu_top_k: int = 5,
) -> ScanResult:
    """Scan a weight grid: one seeded run per ray, merged into one archive.

    Args:
      task_factory: Zero-argument callable building a fresh task per ray, or
        a single TaskContract instance (single-thread only).
      weight_list: Non-empty list of weight vectors.
      config: Per-ray settings; ray i runs with seed ``config.seed + i`` and
        an even share of ``config.oracle_budget``.
      threads: Worker threads; rays are independent, merge order is fixed.
      reference: Hypervolume reference point (defaults to the unit corner).
      true_front: Optional reference front for coverage.
      coverage_radius: Capture distance for coverage.
      nu_top_k: How many best rays feed the non-uniformity summary.

    Returns:
      ScanResult; ``metrics`` holds hv, coverage (None without a reference
      front), nu_per_ray, nu_topk and oracle_calls_total.  hv and coverage
      summarize the per-ray final solutions — the points the scan actually
      returns, one per weight — while the merged archive additionally keeps
      every per-iteration selection as a trace.  Per-ray failures are
      recorded and skipped in the merge.
    """
    if not weight_list:
        raise ValueError("weight_list must be non-empty")
    if callable(task_factory):
        factory = task_factory
    elif isinstance(task_factory, TaskContract):
        if threads > 1:
            raise ValueError("a shared task instance cannot run multi-threaded scans")
        factory = lambda: task_factory  # noqa: E731 - deliberate shared instance
    else:
        raise TypeError("task_factory must be callable or a TaskContract")

    per_ray_budget = (
        config.oracle_budget // len(weight_list) if config.oracle_budget else 0
    )

    def one_ray(index: int, w) -> tuple[RayOutcome, ParetoArchive | None]:
        cfg = replace(
            config,
            weights=np.asarray(w, dtype=np.float64),
            seed=config.seed + index,
            oracle_budget=per_ray_budget,
        )
        try:
            task = factory()
            result = _run(cfg, task=task)
        except Exception as exc:  # per-ray isolation: record and continue
            return (
                RayOutcome(index, np.asarray(w, float), None, float("nan"), 0, False, True, str(exc)),
                None,
            )
        last = result.trajectory[-1]
        outcome = RayOutcome(
            index=index,
            weights=result.weights,
            final_objectives=last.objectives,
            final_mu=last.mu,
            oracle_calls=result.oracle_calls,
            converged=result.converged,
            failed=result.failed,
            error=result.error,
        )
        return outcome, result.archive

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(one_ray, i, w) for i, w in enumerate(weight_list)]
            pairs = [f.result() for f in futures]
    else:
        pairs = [one_ray(i, w) for i, w in enumerate(weight_list)]

    merged = ParetoArchive()
    rays = []
    for outcome, archive in pairs:
        rays.append(outcome)
        if archive is not None:
            merged.merge(archive)

    finals = np.array(
        [r.final_objectives for r in rays if r.final_objectives is not None]
    )
    if finals.size == 0:
        hv = 0.0
    else:
        ref = np.ones(finals.shape[1]) if reference is None else reference
        try:
            hv = hypervolume(finals, ref)
        except UnsupportedDimensionError:
            hv = float("nan")
    coverage = (
        front_coverage(finals, true_front, coverage_radius)
        if true_front is not None and finals.size
        else None
    )
    nu_per_ray = [r.final_mu for r in rays]
    finite_mu = [v for v in nu_per_ray if np.isfinite(v)]
    metrics = {
        "hv": float(hv),
        "coverage": coverage,
        "nu_per_ray": nu_per_ray,
        "nu_topk": nonuniformity_report(finite_mu, nu_top_k) if finite_mu else None,
        "oracle_calls_total": int(sum(r.oracle_calls for r in rays)),
    }
    return ScanResult(archive=merged, rays=rays, metrics=metrics)


def trajectory_to_csv(trajectory: list[TrajectoryPoint], m: int) -> str:
    """Serialize an outer trajectory: round, l_1..l_m, mu, r_check, oracle_calls."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["round"] + [f"l_{i + 1}" for i in range(m)] + ["mu", "r_check", "oracle_calls"]
    )
    for p in trajectory:
        writer.writerow(
            [str(p.round_index)]
            + [repr(float(v)) for v in p.objectives]
            + [repr(float(p.mu)), repr(float(p.r_check)), str(p.oracle_calls)]
        )
    return buf.getvalue()
