"""Built-in discrete multi-objective tasks.

Three task families exercise the relax-descend-discretize loop:

* ``SyntheticTask`` -- two Gaussian-well losses over a fine grid in a box,
  with a closed-form Pareto front (the segment between the two well centers)
  for ground-truth comparisons.
* ``NGramTask`` -- fixed-length strings over the alphabet {C, V, A} (an end
  token is reserved but never emitted), scored by symbol counts (unigram
  mode, conflicting: the counts compete for the same positions) or by
  adjacent-pair counts of CV, VA, AC (bigram mode, correlated: a cyclic
  string feeds all three).  The relaxation is a row-stochastic position-wise
  distribution matrix; bigram counts factorize across adjacent positions.
* ``SurrogateTask`` -- bit vectors scored by hidden monotone-sigmoid
  properties.  Discrete evaluation always queries the ground-truth oracle,
  while gradients come from a small net pretrained on oracle-labeled
  samples, so descent consumes no oracle budget.
"""

from __future__ import annotations

import math

import numpy as np

from .net import DualPathNet
from .relax import Box, RelaxedPoint, SimplexRows, TaskContract, InvalidRelaxationError

__all__ = [
    "SyntheticTask",
    "NGramTask",
    "SurrogateTask",
    "SigmoidOracle",
    "synthetic_losses",
    "synthetic_gradients",
    "synthetic_true_front",
    "ngram_losses",
    "ngram_gradients",
    "surrogate_ground_truth",
    "make_task",
    "default_eta",
    "TASK_NAMES",
]

TASK_NAMES = ("synthetic", "ngram-uni", "ngram-bi", "surrogate")

#: Fallback step size; tasks override via ``default_eta``.
GLOBAL_ETA_DEFAULT = 1e-3

_ETA_DEFAULTS = {
    "synthetic": 0.05,
    "ngram-uni": 0.2,
    "ngram-bi": 0.2,
    "surrogate": 0.1,
}


def default_eta(task_name: str) -> float:
    """Per-task default descent step size."""
    return _ETA_DEFAULTS.get(task_name, GLOBAL_ETA_DEFAULT)


# ---------------------------------------------------------------------------
# Synthetic Gaussian-well task
# ---------------------------------------------------------------------------


def synthetic_losses(x) -> np.ndarray:
    """Two-objective losses 1 - exp(-||x -+ c||^2) with c = ones/sqrt(n)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    c = np.full(x.size, 1.0 / math.sqrt(x.size))
    d_plus = x - c
    d_minus = x + c
    return np.array(
        [
            1.0 - math.exp(-float(d_plus @ d_plus)),
            1.0 - math.exp(-float(d_minus @ d_minus)),
        ]
    )


def synthetic_gradients(x) -> np.ndarray:
    """(n, 2) gradient matrix of :func:`synthetic_losses`."""
    x = np.asarray(x, dtype=np.float64).ravel()
    c = np.full(x.size, 1.0 / math.sqrt(x.size))
    d_plus = x - c
    d_minus = x + c
    g1 = 2.0 * d_plus * math.exp(-float(d_plus @ d_plus))
    g2 = 2.0 * d_minus * math.exp(-float(d_minus @ d_minus))
    return np.stack([g1, g2], axis=1)


def synthetic_true_front(samples: int = 200) -> np.ndarray:
    """Loss images of the optimal segment x = t * c, t in [-1, 1].

    Along the segment the squared distances to the two centers are (t - 1)^2
    and (t + 1)^2 regardless of dimension, so the front is dimension-free.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    t = np.linspace(-1.0, 1.0, samples)
    return np.stack(
        [1.0 - np.exp(-((t - 1.0) ** 2)), 1.0 - np.exp(-((t + 1.0) ** 2))], axis=1
    )


class SyntheticTask(TaskContract):
    """Gaussian-well losses on the grid (step 0.01) inside [-2, 2]^n.

    Candidates are integer index vectors k with coordinates k * grid_step.
    Initial draws come from a sub-box around the origin: far from the
    centers both exponentials vanish and gradients carry no signal, so
    starting in the dead zone would stall the descent immediately.
    """

    m = 2

    def __init__(
        self,
        n: int = 20,
        grid_step: float = 0.01,
        bound: float = 2.0,
        init_bound: float = 0.5,
        per_property_oracle: bool = True,
    ) -> None:
        super().__init__(per_property_oracle)
        if n < 1:
            raise ValueError("n must be positive")
        if grid_step <= 0 or bound <= 0:
            raise ValueError("grid_step and bound must be positive")
        self.n = n
        self.grid_step = float(grid_step)
        self.bound = float(bound)
        self.init_bound = float(min(init_bound, bound))
        self.center = np.full(n, 1.0 / math.sqrt(n))
        self._max_index = int(round(self.bound / self.grid_step))

    def _coords(self, candidate: np.ndarray) -> np.ndarray:
        return np.asarray(candidate, dtype=np.float64) * self.grid_step

    def _discrete_losses(self, candidate) -> np.ndarray:
        return synthetic_losses(self._coords(candidate))

    def relax(self, candidate) -> RelaxedPoint:
        return RelaxedPoint(self._coords(candidate), Box(-self.bound, self.bound))

    def relaxed_losses(self, point: RelaxedPoint) -> np.ndarray:
        return synthetic_losses(point.params)

    def gradients(self, point: RelaxedPoint) -> np.ndarray:
        return synthetic_gradients(point.params)

    def _snap(self, params: np.ndarray) -> np.ndarray:
        idx = np.rint(params / self.grid_step).astype(np.int64)
        return np.clip(idx, -self._max_index, self._max_index)

    def neighborhood_discretize(self, point: RelaxedPoint, count: int, rng) -> list:
        if count < 1:
            raise ValueError("count must be positive")
        out = [self._snap(point.params)]
        for _ in range(count - 1):
            noise = rng.uniform(-self.grid_step, self.grid_step, self.n)
            out.append(self._snap(point.params + noise))
        return out

    def candidate_id(self, candidate) -> str:
        return "x:" + ",".join(str(int(k)) for k in candidate)

    def random_candidate(self, rng) -> np.ndarray:
        lim = int(round(self.init_bound / self.grid_step))
        return rng.integers(-lim, lim + 1, self.n).astype(np.int64)

    def true_front(self, samples: int = 200) -> np.ndarray:
        return synthetic_true_front(samples)


# ---------------------------------------------------------------------------
# N-gram string task
# ---------------------------------------------------------------------------

ALPHABET = "CVA"
END_TOKEN = "$"  # reserved in the vocabulary; sequences never emit it
_UNIGRAM_TARGETS = ("C", "V", "A")
_BIGRAM_TARGETS = ("CV", "VA", "AC")
_CHAR_INDEX = {ch: i for i, ch in enumerate(ALPHABET)}


def _validate_rows(P: np.ndarray) -> None:
    if np.any(P < -1e-9) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9):
        raise InvalidRelaxationError("rows must lie on the probability simplex")


def _as_matrix(sequence_or_matrix, l_max: int) -> np.ndarray:
    if isinstance(sequence_or_matrix, str):
        seq = sequence_or_matrix
        if len(seq) != l_max or any(ch not in _CHAR_INDEX for ch in seq):
            raise ValueError(f"sequence must have length {l_max} over {ALPHABET!r}")
        P = np.zeros((l_max, 3))
        for t, ch in enumerate(seq):
            P[t, _CHAR_INDEX[ch]] = 1.0
        return P
    P = np.asarray(sequence_or_matrix, dtype=np.float64)
    if P.shape != (l_max, 3):
        raise ValueError(f"matrix must have shape ({l_max}, 3), got {P.shape}")
    _validate_rows(P)
    return P


def ngram_losses(sequence_or_matrix, mode: str = "unigram", l_max: int = 8) -> np.ndarray:
    """Losses 1 - normalized target counts for a sequence or relaxed matrix.

    Unigram mode counts each alphabet symbol (normalized by the length);
    bigram mode counts CV, VA, AC over adjacent pairs (normalized by the
    pair count).  For a relaxed matrix the counts are expectations, with
    bigram expectations factorized across adjacent rows.
    """
    P = _as_matrix(sequence_or_matrix, l_max)
    if mode == "unigram":
        counts = P.sum(axis=0)
        return 1.0 - counts / l_max
    if mode == "bigram":
        first = P[:-1]
        second = P[1:]
        counts = np.array(
            [
                float(np.sum(first[:, _CHAR_INDEX[a]] * second[:, _CHAR_INDEX[b]]))
                for a, b in _BIGRAM_TARGETS
            ]
        )
        return 1.0 - counts / (l_max - 1)
    raise ValueError(f"unknown n-gram mode {mode!r}")


def ngram_gradients(P, mode: str = "unigram", l_max: int = 8) -> np.ndarray:
    """(3 * l_max, 3) gradient matrix of :func:`ngram_losses` w.r.t. flat P."""
    P = _as_matrix(P, l_max)
    grads = np.zeros((l_max, 3, 3))  # position, symbol, objective
    if mode == "unigram":
        for a, sym in enumerate(_UNIGRAM_TARGETS):
            grads[:, _CHAR_INDEX[sym], a] = -1.0 / l_max
    elif mode == "bigram":
        for k, (a, b) in enumerate(_BIGRAM_TARGETS):
            ia, ib = _CHAR_INDEX[a], _CHAR_INDEX[b]
            grads[:-1, ia, k] -= P[1:, ib] / (l_max - 1)
            grads[1:, ib, k] -= P[:-1, ia] / (l_max - 1)
    else:
        raise ValueError(f"unknown n-gram mode {mode!r}")
    return grads.reshape(3 * l_max, 3)


class NGramTask(TaskContract):
    """Fixed-length strings over {C, V, A} scored by n-gram counts."""

    m = 3

    def __init__(
        self, mode: str = "unigram", l_max: int = 8, per_property_oracle: bool = True
    ) -> None:
        super().__init__(per_property_oracle)
        if mode not in ("unigram", "bigram"):
            raise ValueError(f"unknown n-gram mode {mode!r}")
        if l_max < 2:
            raise ValueError("l_max must be at least 2")
        self.mode = mode
        self.l_max = l_max

    def _discrete_losses(self, candidate) -> np.ndarray:
        return ngram_losses(candidate, self.mode, self.l_max)

    def relax(self, candidate) -> RelaxedPoint:
        P = _as_matrix(candidate, self.l_max)
        return RelaxedPoint(P.ravel(), SimplexRows(self.l_max, 3))

    def _matrix(self, point: RelaxedPoint) -> np.ndarray:
        return point.params.reshape(self.l_max, 3)

    def relaxed_losses(self, point: RelaxedPoint) -> np.ndarray:
        return ngram_losses(self._matrix(point), self.mode, self.l_max)

    def gradients(self, point: RelaxedPoint) -> np.ndarray:
        return ngram_gradients(self._matrix(point), self.mode, self.l_max)

    def neighborhood_discretize(self, point: RelaxedPoint, count: int, rng) -> list:
        if count < 1:
            raise ValueError("count must be positive")
        P = self._matrix(point)
        _validate_rows(P)
        rows = np.clip(P, 0.0, None)
        rows = rows / rows.sum(axis=1, keepdims=True)
        out = ["".join(ALPHABET[int(i)] for i in np.argmax(rows, axis=1))]
        for _ in range(count - 1):
            draws = [rng.choice(3, p=rows[t]) for t in range(self.l_max)]
            out.append("".join(ALPHABET[int(i)] for i in draws))
        return out

    def candidate_id(self, candidate) -> str:
        return str(candidate)

    def random_candidate(self, rng) -> str:
        return "".join(ALPHABET[int(i)] for i in rng.integers(0, 3, self.l_max))


# ---------------------------------------------------------------------------
# Surrogate bit-vector task
# ---------------------------------------------------------------------------

#: Published seed for the default ground-truth oracle family.
DEFAULT_ORACLE_SEED = 7


class SigmoidOracle:
    """Hidden ground-truth properties O_i(x) = sigmoid(w_i . x + b_i).

    Property directions live in a fixed plane with controlled pairwise
    angles (the default 120 degrees makes two heads conflict), and each bias
    centers the property at the half-on bit vector, so scores spread over a
    useful sigmoid range on {0, 1}^n.
    """

    def __init__(
        self,
        n_b: int = 16,
        m: int = 2,
        seed: int = DEFAULT_ORACLE_SEED,
        scale: float = 4.0,
        conflict_angle_deg: float = 120.0,
    ) -> None:
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(n_b)
        u /= np.linalg.norm(u)
        v = rng.standard_normal(n_b)
        v -= (v @ u) * u
        v /= np.linalg.norm(v)
        if m == 1:
            angles = np.array([0.0])
        else:
            angles = np.linspace(0.0, math.radians(conflict_angle_deg), m)
        self.w = scale * np.stack(
            [math.cos(t) * u + math.sin(t) * v for t in angles]
        )
        self.b = -0.5 * self.w.sum(axis=1)

    @classmethod
    def from_parameters(cls, w, b) -> "SigmoidOracle":
        self = cls.__new__(cls)
        self.w = np.atleast_2d(np.asarray(w, dtype=np.float64))
        self.b = np.asarray(b, dtype=np.float64).ravel()
        return self

    @property
    def m(self) -> int:
        return self.w.shape[0]

    def scores(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        z = self.w @ x + self.b
        return 1.0 / (1.0 + np.exp(-z))

    def losses(self, x) -> np.ndarray:
        return 1.0 - self.scores(x)


def surrogate_ground_truth(x, oracle: SigmoidOracle | None = None) -> np.ndarray:
    """Oracle losses 1 - O_i(x) under the default published-seed oracle."""
    if oracle is None:
        oracle = SigmoidOracle()
    return oracle.losses(x)


_NET_CACHE: dict[tuple, DualPathNet] = {}


def _trained_net(
    oracle: SigmoidOracle,
    n_b: int,
    hidden: int,
    oracle_seed: int,
    train_seed: int,
    train_size: int,
    epochs: int,
    rate: float,
) -> DualPathNet:
    key = (n_b, hidden, oracle.m, oracle_seed, train_seed, train_size, epochs, rate)
    if key in _NET_CACHE:
        return _NET_CACHE[key]
    rng = np.random.default_rng(train_seed)
    X = rng.integers(0, 2, size=(train_size, n_b)).astype(np.float64)
    Y = np.stack([oracle.scores(x) for x in X])
    net = DualPathNet(n_b, hidden, oracle.m, seed=train_seed)
    net.train(X, Y, epochs=epochs, rate=rate)
    _NET_CACHE[key] = net
    return net


class SurrogateTask(TaskContract):
    """Bit vectors scored by hidden sigmoid properties via a trained net.

    Discrete evaluations query the ground-truth oracle and count against the
    oracle budget.  The relaxation is the unit cube; its losses and
    gradients are the per-head cross-entropies (target 1) of the pretrained
    net, so the descent path never touches the oracle.  Pretraining labels
    are tallied separately in ``pretrain_oracle_calls``.
    """

    def __init__(
        self,
        n_b: int = 16,
        m: int = 2,
        oracle_seed: int = DEFAULT_ORACLE_SEED,
        train_seed: int = 101,
        hidden: int = 32,
        train_size: int = 1024,
        epochs: int = 5000,
        rate: float = 5e-2,
        per_property_oracle: bool = True,
    ) -> None:
        super().__init__(per_property_oracle)
        self.m = m
        self.n_b = n_b
        self.oracle = SigmoidOracle(n_b=n_b, m=m, seed=oracle_seed)
        self.net = _trained_net(
            self.oracle, n_b, hidden, oracle_seed, train_seed, train_size, epochs, rate
        )
        self.pretrain_oracle_calls = train_size * (m if per_property_oracle else 1)

    def _discrete_losses(self, candidate) -> np.ndarray:
        return self.oracle.losses(np.asarray(candidate, dtype=np.float64))

    def relax(self, candidate) -> RelaxedPoint:
        return RelaxedPoint(
            np.asarray(candidate, dtype=np.float64), Box(0.0, 1.0)
        )

    def relaxed_losses(self, point: RelaxedPoint) -> np.ndarray:
        z = self.net.logits(point.params)
        return np.logaddexp(0.0, -z)  # -log sigmoid(z), per head

    def gradients(self, point: RelaxedPoint) -> np.ndarray:
        return self.net.input_gradients(point.params)

    def neighborhood_discretize(self, point: RelaxedPoint, count: int, rng) -> list:
        if count < 1:
            raise ValueError("count must be positive")
        p = np.clip(point.params, 0.0, 1.0)
        out = [(p >= 0.5).astype(np.int64)]
        for _ in range(count - 1):
            out.append((rng.random(self.n_b) < p).astype(np.int64))
        return out

    def candidate_id(self, candidate) -> str:
        return "b:" + "".join(str(int(b)) for b in candidate)

    def random_candidate(self, rng) -> np.ndarray:
        return rng.integers(0, 2, self.n_b).astype(np.int64)


# ---------------------------------------------------------------------------
# Factory
# ---------------------------------------------------------------------------


def make_task(name: str, **params) -> TaskContract:
    """Build a task by name: synthetic, ngram-uni, ngram-bi, or surrogate.

    Recognized params: n, grid_step (synthetic); l_max (n-gram); n_b,
    oracle_seed (surrogate); per_property_oracle (all).
    """
    accounting = {"per_property_oracle": params.pop("per_property_oracle", True)}
    if name == "synthetic":
        allowed = {k: params[k] for k in ("n", "grid_step", "init_bound") if k in params}
        return SyntheticTask(**allowed, **accounting)
    if name in ("ngram-uni", "ngram-bi"):
        mode = "unigram" if name == "ngram-uni" else "bigram"
        allowed = {k: params[k] for k in ("l_max",) if k in params}
        return NGramTask(mode=mode, **allowed, **accounting)
    if name == "surrogate":
        allowed = {
            k: params[k]
            for k in ("n_b", "m", "oracle_seed", "train_seed", "epochs")
            if k in params
        }
        return SurrogateTask(**allowed, **accounting)
    raise ValueError(f"unknown task {name!r}; expected one of {TASK_NAMES}")
