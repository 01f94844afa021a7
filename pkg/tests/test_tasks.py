"""Built-in task families: frozen values, lattice exactness, gradients."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretoscan import tasks
from paretoscan.relax import Box, InvalidRelaxationError, SimplexRows
from paretoscan.tasks import (
    ALPHABET,
    NGramTask,
    SigmoidOracle,
    SurrogateTask,
    SyntheticTask,
    default_eta,
    make_task,
    ngram_gradients,
    ngram_losses,
    surrogate_ground_truth,
    synthetic_gradients,
    synthetic_losses,
    synthetic_true_front,
)


def _fd_columns(f, x, m, eps=1e-6):
    """Central-difference gradient columns of a vector function."""
    out = np.zeros((x.size, m))
    for i in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[i] += eps
        dn[i] -= eps
        out[i] = (f(up) - f(dn)) / (2.0 * eps)
    return out


# ---------------------------------------------------------------------------
# synthetic
# ---------------------------------------------------------------------------


def test_synthetic_losses_at_origin():
    # ||0 -+ c||^2 = 1 exactly, so both losses are 1 - 1/e
    l = synthetic_losses(np.zeros(20))
    assert l == pytest.approx([1.0 - math.exp(-1.0)] * 2, abs=1e-12)
    assert l[0] == l[1]


def test_synthetic_losses_at_centers():
    n = 10
    c = np.full(n, 1.0 / math.sqrt(n))
    at_plus = synthetic_losses(c)
    assert at_plus[0] == pytest.approx(0.0, abs=1e-15)
    assert at_plus[1] == pytest.approx(1.0 - math.exp(-4.0), abs=1e-12)
    at_minus = synthetic_losses(-c)
    assert at_minus[0] == pytest.approx(1.0 - math.exp(-4.0), abs=1e-12)
    assert at_minus[1] == pytest.approx(0.0, abs=1e-15)


def test_synthetic_gradients_closed_form_at_origin():
    n = 5
    c = np.full(n, 1.0 / math.sqrt(n))
    G = synthetic_gradients(np.zeros(n))
    assert G.shape == (n, 2)
    assert G[:, 0] == pytest.approx(-2.0 * c * math.exp(-1.0))
    assert G[:, 1] == pytest.approx(2.0 * c * math.exp(-1.0))


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 10**9))
def test_synthetic_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.4, 0.4, size=8)
    G = synthetic_gradients(x)
    fd = _fd_columns(synthetic_losses, x, 2)
    assert np.max(np.abs(G - fd)) < 1e-8


def test_synthetic_true_front_endpoints():
    front = synthetic_true_front(201)
    edge = 1.0 - math.exp(-4.0)
    assert front[0] == pytest.approx([edge, 0.0], abs=1e-12)
    assert front[-1] == pytest.approx([0.0, edge], abs=1e-12)
    mid = front[100]
    assert mid[0] == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    assert mid[0] == mid[1]
    with pytest.raises(ValueError):
        synthetic_true_front(0)


def test_synthetic_task_snap_and_bounds():
    task = SyntheticTask(n=3, grid_step=0.01, bound=2.0)
    point = task.relax(np.array([1, -2, 0], dtype=np.int64))
    assert isinstance(point.region, Box)
    assert point.params == pytest.approx([0.01, -0.02, 0.0])
    snapped = task._snap(np.array([0.014, -5.0, 1.996]))
    assert snapped.tolist() == [1, -200, 200]
    assert snapped.dtype == np.int64


def test_synthetic_task_neighborhood_first_is_deterministic():
    task = SyntheticTask(n=4)
    point = task.relax(np.array([3, 3, 3, 3], dtype=np.int64))
    batch = task.neighborhood_discretize(point, 6, np.random.default_rng(0))
    assert len(batch) == 6
    assert batch[0].tolist() == [3, 3, 3, 3]
    again = task.neighborhood_discretize(point, 6, np.random.default_rng(0))
    assert all(a.tolist() == b.tolist() for a, b in zip(batch, again))
    with pytest.raises(ValueError):
        task.neighborhood_discretize(point, 0, np.random.default_rng(0))


def test_synthetic_task_initial_draw_stays_in_sub_box():
    task = SyntheticTask(n=12, init_bound=0.5)
    for seed in range(5):
        k = task.random_candidate(np.random.default_rng(seed))
        assert np.max(np.abs(k)) <= 50
        losses = task.eval_discrete(k)
        assert np.all(losses < 1.0)  # inside the informative region


def test_synthetic_task_oracle_accounting_and_ids():
    task = SyntheticTask(n=3)
    task.eval_discrete(np.array([1, 2, 3], dtype=np.int64))
    assert task.oracle_calls == 2
    flat = SyntheticTask(n=3, per_property_oracle=False)
    flat.eval_discrete(np.array([1, 2, 3], dtype=np.int64))
    assert flat.oracle_calls == 1
    assert task.candidate_id(np.array([1, -2, 0])) == "x:1,-2,0"


def test_synthetic_task_validation():
    with pytest.raises(ValueError):
        SyntheticTask(n=0)
    with pytest.raises(ValueError):
        SyntheticTask(grid_step=-0.1)


# ---------------------------------------------------------------------------
# n-gram
# ---------------------------------------------------------------------------


def test_ngram_unigram_counts():
    assert ngram_losses("CVCVCVCV", "unigram") == pytest.approx([0.5, 0.5, 1.0])
    assert ngram_losses("AAAAAAAA", "unigram") == pytest.approx([1.0, 1.0, 0.0])


def test_ngram_bigram_counts():
    # pairs of CVACVACV: CV VA AC CV VA AC CV -> counts (3, 2, 2) over 7
    assert ngram_losses("CVACVACV", "bigram") == pytest.approx(
        [1 - 3 / 7, 1 - 2 / 7, 1 - 2 / 7]
    )
    assert ngram_losses("AAAAAAAA", "bigram") == pytest.approx([1.0, 1.0, 1.0])


@settings(deadline=None, max_examples=100)
@given(st.text(alphabet=ALPHABET, min_size=8, max_size=8))
def test_ngram_unigram_losses_sum_is_conserved(s):
    # the three symbol counts always total l_max: sum of losses == 2 exactly
    assert float(ngram_losses(s, "unigram").sum()) == pytest.approx(2.0, abs=1e-12)


@settings(deadline=None, max_examples=100)
@given(st.text(alphabet=ALPHABET, min_size=6, max_size=6), st.sampled_from(["unigram", "bigram"]))
def test_ngram_relaxation_is_lattice_exact(s, mode):
    # one-hot relaxation of a string reproduces the discrete losses exactly
    task = NGramTask(mode=mode, l_max=6)
    point = task.relax(s)
    assert isinstance(point.region, SimplexRows)
    assert task.relaxed_losses(point) == pytest.approx(
        ngram_losses(s, mode, 6), abs=1e-15
    )


def test_ngram_input_validation():
    with pytest.raises(ValueError):
        ngram_losses("CVX", "unigram", l_max=3)
    with pytest.raises(ValueError):
        ngram_losses("CV", "unigram", l_max=3)
    with pytest.raises(InvalidRelaxationError):
        ngram_losses(np.full((3, 3), 0.5), "unigram", l_max=3)
    with pytest.raises(ValueError):
        ngram_losses("CVA", "trigram", l_max=3)
    with pytest.raises(ValueError):
        NGramTask(mode="trigram")
    with pytest.raises(ValueError):
        NGramTask(l_max=1)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10**9), st.sampled_from(["unigram", "bigram"]))
def test_ngram_gradients_match_finite_differences(seed, mode):
    rng = np.random.default_rng(seed)
    l_max = 5
    P = rng.dirichlet(np.ones(3), size=l_max)

    def raw_losses(flat):
        # recompute the expectations directly, without simplex validation,
        # so off-simplex finite-difference probes stay well-defined
        Q = flat.reshape(l_max, 3)
        if mode == "unigram":
            return 1.0 - Q.sum(axis=0) / l_max
        pairs = [(0, 1), (1, 2), (2, 0)]
        counts = np.array(
            [float(np.sum(Q[:-1, a] * Q[1:, b])) for a, b in pairs]
        )
        return 1.0 - counts / (l_max - 1)

    G = ngram_gradients(P, mode, l_max)
    assert G.shape == (3 * l_max, 3)
    fd = _fd_columns(raw_losses, P.ravel(), 3)
    assert np.max(np.abs(G - fd)) < 1e-9


def test_ngram_bigram_relaxed_losses_are_sampling_expectations():
    # independent oracle for the factorized expectation: sample strings
    # position-wise from the relaxed rows and average their discrete losses
    rng = np.random.default_rng(5)
    P = rng.dirichlet(np.ones(3), size=5)
    rel = ngram_losses(P, "bigram", l_max=5)
    draws = 20000
    acc = np.zeros(3)
    for _ in range(draws):
        s = "".join(ALPHABET[rng.choice(3, p=P[t])] for t in range(5))
        acc += ngram_losses(s, "bigram", l_max=5)
    assert np.max(np.abs(rel - acc / draws)) < 0.005


def test_ngram_task_neighborhood_argmax_first():
    task = NGramTask(mode="unigram", l_max=4)
    P = np.array(
        [
            [0.6, 0.3, 0.1],
            [0.1, 0.8, 0.1],
            [0.2, 0.2, 0.6],
            [0.9, 0.05, 0.05],
        ]
    )
    point = task.relax("CVAC")  # replace params with a soft matrix
    point.params = P.ravel()
    batch = task.neighborhood_discretize(point, 5, np.random.default_rng(0))
    assert batch[0] == "CVAC"
    assert all(len(s) == 4 and set(s) <= set(ALPHABET) for s in batch)


def test_ngram_task_ids_and_random_candidates():
    task = NGramTask(mode="bigram", l_max=8)
    s = task.random_candidate(np.random.default_rng(11))
    assert len(s) == 8 and set(s) <= set(ALPHABET)
    assert task.candidate_id(s) == s
    assert task.random_candidate(np.random.default_rng(11)) == s


# ---------------------------------------------------------------------------
# surrogate
# ---------------------------------------------------------------------------


def test_sigmoid_oracle_geometry():
    oracle = SigmoidOracle(n_b=8, m=2)
    w0, w1 = oracle.w
    assert np.linalg.norm(w0) == pytest.approx(4.0)
    assert np.linalg.norm(w1) == pytest.approx(4.0)
    cos = (w0 @ w1) / (np.linalg.norm(w0) * np.linalg.norm(w1))
    assert cos == pytest.approx(-0.5, abs=1e-12)  # 120 degrees apart
    # bias centers every head at the half-on vector
    assert oracle.scores(np.full(8, 0.5)) == pytest.approx([0.5, 0.5], abs=1e-12)


def test_sigmoid_oracle_from_parameters():
    oracle = SigmoidOracle.from_parameters([[1.0, -1.0]], [0.5])
    x = np.array([1.0, 0.0])
    z = 1.0 * 1.0 + 0.5
    assert oracle.scores(x) == pytest.approx([1.0 / (1.0 + math.exp(-z))])
    assert oracle.losses(x) == pytest.approx([1.0 - 1.0 / (1.0 + math.exp(-z))])
    assert oracle.m == 1


def test_surrogate_ground_truth_uses_published_oracle():
    x = np.array([1, 0] * 8)
    assert surrogate_ground_truth(x) == pytest.approx(SigmoidOracle().losses(x))


@pytest.fixture(scope="module")
def small_surrogate():
    return SurrogateTask(n_b=8, m=2, train_seed=3, train_size=128, epochs=400)


def test_surrogate_discrete_eval_is_the_oracle(small_surrogate):
    task = small_surrogate
    bits = np.array([1, 0, 1, 1, 0, 0, 1, 0])
    before = task.oracle_calls
    losses = task.eval_discrete(bits)
    assert task.oracle_calls == before + 2
    assert losses == pytest.approx(task.oracle.losses(bits))


def test_surrogate_relaxed_losses_are_head_cross_entropies(small_surrogate):
    task = small_surrogate
    point = task.relax(np.array([1, 0, 1, 0, 1, 0, 1, 0]))
    assert isinstance(point.region, Box)
    rel = task.relaxed_losses(point)
    assert rel == pytest.approx(-np.log(task.net.forward(point.params)), abs=1e-9)
    assert np.all(rel >= 0.0)


def test_surrogate_gradients_match_finite_differences(small_surrogate):
    task = small_surrogate
    rng = np.random.default_rng(2)
    for _ in range(5):
        x = rng.uniform(0.2, 0.8, size=8)
        point = task.relax(x)
        point.params = x
        G = task.gradients(point)
        fd = _fd_columns(
            lambda v: np.logaddexp(0.0, -task.net.logits(v)), x, 2
        )
        assert np.max(np.abs(G - fd)) < 1e-7


def test_surrogate_descent_consumes_no_oracle_budget(small_surrogate):
    task = small_surrogate
    before = task.oracle_calls
    point = task.relax(np.array([1, 1, 0, 0, 1, 1, 0, 0]))
    task.relaxed_losses(point)
    task.gradients(point)
    assert task.oracle_calls == before
    assert task.pretrain_oracle_calls == 128 * 2


def test_surrogate_neighborhood_threshold_first(small_surrogate):
    task = small_surrogate
    point = task.relax(np.array([1, 0, 1, 0, 1, 0, 1, 0]))
    point.params = np.array([0.9, 0.2, 0.51, 0.49, 0.5, 0.1, 0.8, 0.3])
    batch = task.neighborhood_discretize(point, 4, np.random.default_rng(0))
    assert batch[0].tolist() == [1, 0, 1, 0, 1, 0, 1, 0]
    assert all(set(b.tolist()) <= {0, 1} for b in batch)
    assert task.candidate_id(batch[0]) == "b:10101010"


def test_surrogate_net_cache_reuses_training():
    a = SurrogateTask(n_b=8, m=2, train_seed=3, train_size=128, epochs=400)
    b = SurrogateTask(n_b=8, m=2, train_seed=3, train_size=128, epochs=400)
    assert a.net is b.net
    c = SurrogateTask(n_b=8, m=2, train_seed=4, train_size=128, epochs=400)
    assert c.net is not a.net


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------


def test_make_task_dispatch():
    assert isinstance(make_task("synthetic", n=5), SyntheticTask)
    uni = make_task("ngram-uni")
    bi = make_task("ngram-bi", l_max=6)
    assert isinstance(uni, NGramTask) and uni.mode == "unigram"
    assert bi.mode == "bigram" and bi.l_max == 6
    sur = make_task("surrogate", n_b=8, m=2, train_seed=3, epochs=100)
    assert isinstance(sur, SurrogateTask)
    with pytest.raises(ValueError):
        make_task("quantum")


def test_make_task_per_property_passthrough():
    task = make_task("synthetic", n=4, per_property_oracle=False)
    task.eval_discrete(np.zeros(4, dtype=np.int64))
    assert task.oracle_calls == 1


def test_default_eta_table():
    assert default_eta("synthetic") == 0.05
    assert default_eta("ngram-uni") == 0.2
    assert default_eta("ngram-bi") == 0.2
    assert default_eta("surrogate") == 0.1
    assert default_eta("anything-else") == 1e-3
