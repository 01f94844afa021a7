"""Shared vocabulary for multi-objective minimization over discrete candidate spaces.

Objective vectors are plain 1-D float arrays of per-objective losses (lower is
better); weight vectors are strictly positive preference directions of the same
length.  This module provides the dominance relation, non-dominated filtering,
a Pareto archive with eviction-on-insert semantics, and the weighted
relative-max scalar used by the descent loop and its diagnostics.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dominance",
    "DimensionMismatchError",
    "EmptyInputError",
    "ArchiveEntry",
    "ParetoArchive",
    "as_objectives",
    "as_weights",
    "dominates",
    "pareto_filter",
    "relative_max",
]


class DimensionMismatchError(ValueError):
    """Raised when two vectors that must share a length do not."""


class EmptyInputError(ValueError):
    """Raised when an operation requires at least one point."""


class Dominance(enum.Enum):
    """Outcome of comparing two objective vectors under minimization."""

    STRICT = "strictly-dominates"
    WEAK = "weakly-dominates"
    INCOMPARABLE = "incomparable"


def as_objectives(values) -> np.ndarray:
    """Validate and convert per-objective losses to a 1-D float64 array.

    Args:
        values: Sequence of m >= 1 finite, non-negative loss values.

    Returns:
        A float64 copy of ``values``.

    Raises:
        EmptyInputError: If ``values`` has no entries.
        ValueError: If any entry is negative or non-finite.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"objective vector must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInputError("objective vector must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError("objective vector contains non-finite entries")
    if np.any(arr < 0.0):
        raise ValueError("objective vector contains negative entries")
    return arr.copy()


def as_weights(values, *, check_norm: bool = False) -> np.ndarray:
    """Validate a preference weight vector (strictly positive, finite).

    Args:
        values: Sequence of m >= 1 weights.
        check_norm: When True additionally require unit Euclidean norm
            within 1e-9 (the contract for generated weight vectors).

    Returns:
        A float64 copy of ``values``.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"weight vector must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInputError("weight vector must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError("weight vector contains non-finite entries")
    if np.any(arr <= 0.0):
        raise ValueError("weight vector entries must be strictly positive")
    if check_norm and abs(float(np.linalg.norm(arr)) - 1.0) > 1e-9:
        raise ValueError("weight vector must have unit Euclidean norm")
    return arr.copy()


def dominates(a, b) -> Dominance:
    """Compare two objective vectors under minimization.

    ``a`` weakly dominates ``b`` iff every component of ``a`` is <= the
    matching component of ``b``; the dominance is strict when at least one
    component is strictly smaller.  The strongest applicable label is
    returned, so equal vectors compare as ``Dominance.WEAK``.

    Raises:
        DimensionMismatchError: If the vectors differ in length.
    """
    av = as_objectives(a)
    bv = as_objectives(b)
    if av.shape != bv.shape:
        raise DimensionMismatchError(
            f"cannot compare objective vectors of length {av.size} and {bv.size}"
        )
    if np.all(av <= bv):
        if np.any(av < bv):
            return Dominance.STRICT
        return Dominance.WEAK
    return Dominance.INCOMPARABLE


def pareto_filter(points) -> list[int]:
    """Indices of points not strictly dominated by any other point.

    Exact duplicates of a retained point are all retained (equal vectors never
    strictly dominate each other).  Runs a sum-ordered sweep: a point can only
    be strictly dominated by a point with strictly smaller coordinate sum, so
    each point is checked against previously retained points only.

    Args:
        points: Iterable of equal-length objective vectors.

    Returns:
        Sorted list of indices into ``points``.

    Raises:
        EmptyInputError: If ``points`` is empty.
    """
    vecs = [as_objectives(p) for p in points]
    if not vecs:
        raise EmptyInputError("pareto_filter requires at least one point")
    m = vecs[0].size
    for v in vecs[1:]:
        if v.size != m:
            raise DimensionMismatchError("points must share a common length")
    sums = np.array([float(v.sum()) for v in vecs])
    order = np.argsort(sums, kind="stable")
    kept: list[int] = []
    for idx in order:
        v = vecs[idx]
        s = sums[idx]
        dominated = False
        for j in kept:
            if sums[j] >= s:
                # Strict dominance forces a strictly smaller sum; sums are
                # emitted in non-decreasing order, so nothing later can apply.
                break
            w = vecs[j]
            if np.all(w <= v) and np.any(w < v):
                dominated = True
                break
        if not dominated:
            kept.append(int(idx))
    return sorted(kept)


def relative_max(losses, weights) -> float:
    """Largest weighted loss ``max_j losses[j] * weights[j]``.

    This scalar tracks progress of a run: the region of objective space at or
    below the current value along every weighted axis is exactly the set of
    points whose own relative max does not exceed it.
    """
    lv = as_objectives(losses)
    wv = as_weights(weights)
    if lv.shape != wv.shape:
        raise DimensionMismatchError(
            f"losses have length {lv.size} but weights have length {wv.size}"
        )
    return float(np.max(lv * wv))


@dataclass
class ArchiveEntry:
    """A discrete candidate with its evaluated objectives.

    Attributes:
        candidate_id: Opaque, stable identifier of the discrete candidate.
        objectives: Evaluated objective vector for the candidate.
        weight_used: Preference vector active when the candidate was produced,
            or None when not applicable.
        oracle_calls_at_insert: Cumulative oracle-call count at insertion time.
    """

    candidate_id: str
    objectives: np.ndarray
    weight_used: np.ndarray | None = None
    oracle_calls_at_insert: int = 0

    def __post_init__(self) -> None:
        self.objectives = as_objectives(self.objectives)
        if self.weight_used is not None:
            self.weight_used = as_weights(self.weight_used)


class ParetoArchive:
    """Mutually non-dominated set of evaluated candidates.

    Inserting an entry evicts every incumbent it strictly dominates.  An entry
    is rejected when an incumbent weakly dominates it, which both discards
    strictly worse entries and keeps the earliest-inserted copy of exact
    duplicates.
    """

    def __init__(self) -> None:
        self.entries: list[ArchiveEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def m(self) -> int | None:
        """Number of objectives, or None while the archive is empty."""
        return self.entries[0].objectives.size if self.entries else None

    def insert(self, entry: ArchiveEntry) -> bool:
        """Insert ``entry`` unless an incumbent weakly dominates it.

        Returns:
            True when the entry was inserted, False when rejected.

        Raises:
            DimensionMismatchError: If the entry's objective length differs
                from the archive's.
        """
        if self.entries and entry.objectives.size != self.m:
            raise DimensionMismatchError(
                f"archive holds {self.m}-objective entries, got {entry.objectives.size}"
            )
        for inc in self.entries:
            rel = dominates(inc.objectives, entry.objectives)
            if rel is not Dominance.INCOMPARABLE:
                return False
        self.entries = [
            inc
            for inc in self.entries
            if dominates(entry.objectives, inc.objectives) is not Dominance.STRICT
        ]
        self.entries.append(entry)
        return True

    def merge(self, other: "ParetoArchive") -> int:
        """Insert every entry of ``other`` in order; returns the insert count."""
        inserted = 0
        for entry in other.entries:
            if self.insert(entry):
                inserted += 1
        return inserted

    def objectives_array(self) -> np.ndarray:
        """All entry objectives stacked as a (len, m) array."""
        if not self.entries:
            raise EmptyInputError("archive is empty")
        return np.stack([e.objectives for e in self.entries])

    def to_csv(self) -> str:
        """Serialize as CSV: candidate_id, l_1..l_m, lambda_1..lambda_m, oracle_calls."""
        if not self.entries:
            raise EmptyInputError("archive is empty")
        m = self.m
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = (
            ["candidate_id"]
            + [f"l_{i + 1}" for i in range(m)]
            + [f"lambda_{i + 1}" for i in range(m)]
            + ["oracle_calls"]
        )
        writer.writerow(header)
        for e in self.entries:
            lam = (
                [repr(float(x)) for x in e.weight_used]
                if e.weight_used is not None
                else [""] * m
            )
            writer.writerow(
                [e.candidate_id]
                + [repr(float(x)) for x in e.objectives]
                + lam
                + [str(e.oracle_calls_at_insert)]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ParetoArchive":
        """Rebuild an archive from :meth:`to_csv` output (entries kept as-is)."""
        reader = csv.reader(io.StringIO(text))
        rows = list(reader)
        if not rows:
            raise EmptyInputError("archive CSV is empty")
        header = rows[0]
        m = sum(1 for h in header if h.startswith("l_"))
        if m == 0 or header[0] != "candidate_id" or header[-1] != "oracle_calls":
            raise ValueError("unrecognized archive CSV header")
        archive = cls()
        for row in rows[1:]:
            if not row:
                continue
            objectives = np.array([float(x) for x in row[1 : 1 + m]])
            lam_cells = row[1 + m : 1 + 2 * m]
            weight = (
                np.array([float(x) for x in lam_cells]) if all(lam_cells) else None
            )
            archive.entries.append(
                ArchiveEntry(
                    candidate_id=row[0],
                    objectives=objectives,
                    weight_used=weight,
                    oracle_calls_at_insert=int(row[-1]),
                )
            )
        return archive
