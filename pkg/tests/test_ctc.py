import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import best_path_bruteforce, collapse, ctc_prob_bruteforce
from scene2locale.seqnet import Alphabet, beta_collapse, best_path_decode, ctc_loss, ctc_loss_batch
from scene2locale.seqnet.ctc import log_softmax, softmax

ABC = Alphabet(("a", "b", "c"))


def random_probs(rng, T, C):
    return softmax(rng.normal(size=(T, C)) * 2)


def test_beta_collapse_string_path():
    assert beta_collapse("--ddd-ee-l-hh---i-") == "delhi"
    assert beta_collapse("aa-a") == "aa"
    assert beta_collapse("----") == ""


def test_beta_collapse_index_path_needs_alphabet():
    assert beta_collapse([1, 1, 0, 1, 2], ABC) == "aab"
    with pytest.raises(ValueError):
        beta_collapse([1, 2])


@given(st.lists(st.integers(0, 3), max_size=12))
def test_collapse_inverts_blank_interleaving(path):
    once = beta_collapse(path, ABC)
    assert "-" not in once and len(once) <= len(path)
    spaced = [k for i in ABC.encode(once) for k in (0, i)]
    assert beta_collapse(spaced, ABC) == once


@pytest.mark.parametrize("seed", range(30))
def test_loss_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(1, 6))
    C = int(rng.integers(2, 5))
    L = int(rng.integers(0, T + 1))
    target = list(rng.integers(1, C, size=L))
    p = random_probs(rng, T, C)
    prob = ctc_prob_bruteforce(p, target)
    if prob == 0.0:
        with pytest.raises(ValueError):
            ctc_loss(p, target)
        return
    loss, _ = ctc_loss(p, target)
    assert abs(loss - (-math.log(prob))) < 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_best_path_matches_exhaustive(seed):
    rng = np.random.default_rng(100 + seed)
    p = random_probs(rng, int(rng.integers(1, 6)), 4)
    text, prob = best_path_decode(p, ABC)
    ref, ref_prob = best_path_bruteforce(p)
    assert text == ABC.decode(ref)
    assert prob == pytest.approx(ref_prob, rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_central_differences(seed):
    rng = np.random.default_rng(seed)
    T, C = 5, 4
    logits = rng.normal(size=(T, C))
    target = [1, 2]

    def f(z):
        return ctc_loss(softmax(z), target)[0]

    _, grad = ctc_loss(softmax(logits), target)
    eps = 1e-5
    num = np.zeros_like(logits)
    for idx in np.ndindex(logits.shape):
        zp, zm = logits.copy(), logits.copy()
        zp[idx] += eps
        zm[idx] -= eps
        num[idx] = (f(zp) - f(zm)) / (2 * eps)
    assert np.max(np.abs(num - grad)) / max(1e-8, np.max(np.abs(num))) < 1e-4


def test_gradient_rows_sum_to_zero(rng):
    _, grad = ctc_loss(random_probs(rng, 6, 4), [1, 1, 2])
    np.testing.assert_allclose(grad.sum(axis=1), 0.0, atol=1e-12)


def test_batched_matches_single(rng):
    T, C = 7, 4
    lp = log_softmax(rng.normal(size=(3, T, C)))
    targets = [[1, 2], [3], [2, 2, 1]]
    lengths = [7, 4, 6]
    losses, grads = ctc_loss_batch(lp, targets, lengths)
    for b in range(3):
        n = lengths[b]
        single, g = ctc_loss(np.exp(lp[b, :n]), targets[b])
        assert losses[b] == pytest.approx(single, abs=1e-10)
        np.testing.assert_allclose(grads[b, :n], g, atol=1e-10)
        assert np.all(grads[b, n:] == 0)


def test_empty_target_is_all_blank_probability(rng):
    p = random_probs(rng, 4, 3)
    loss, _ = ctc_loss(p, [])
    assert loss == pytest.approx(-np.log(np.prod(p[:, 0])), abs=1e-12)


def test_target_too_long_raises(rng):
    with pytest.raises(ValueError, match="path capacity"):
        ctc_loss(random_probs(rng, 2, 3), [1, 1])


def test_blank_in_target_rejected(rng):
    with pytest.raises(ValueError):
        ctc_loss(random_probs(rng, 3, 3), [0, 1])


def test_rows_must_be_distributions():
    with pytest.raises(ValueError):
        best_path_decode(np.full((2, 4), 0.3), ABC)


def test_string_targets_use_alphabet(rng):
    p = random_probs(rng, 5, ABC.size)
    a, _ = ctc_loss(p, "ab", ABC)
    b, _ = ctc_loss(p, [1, 2])
    assert a == b


def test_collapse_helper_agrees():
    assert collapse([0, 1, 1, 0, 1, 2, 2]) == [1, 1, 2]
