import numpy as np
import pytest
from hypothesis import given, strategies as st

from scene2locale.seqnet import (Alphabet, builtin_alphabet, bilstm_states, init_params, load_params,
                                 maxout_forward, save_params)
from scene2locale.seqnet.ctc import ctc_loss_batch
from scene2locale.seqnet.font import (FONT_CHARS, STRIP_HEIGHT, STRIP_WIDTH, normalize_word_image,
                                      render_word, to_strips, word_strips)
from scene2locale.seqnet.network import backward_batch, forward_batch, head_probs, maxout
from scene2locale.seqnet.train import TrainConfig, sgd_momentum_step

SMALL = Alphabet(("A", "B", "C"))


def small_params(seed=0):
    return init_params(SMALL, "en", seed=seed, input_dim=12, n_features=5, n_hidden=4, pieces=2)


def test_maxout_takes_piecewise_max():
    x = np.array([[1.0, -2.0]])
    W = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])  # (k=2, F=1, D=2)
    b = np.zeros((2, 1))
    out, win = maxout(x, W, b)
    assert out[0, 0] == 1.0 and win[0, 0] == 0
    out, win = maxout(-x, W, b)
    assert out[0, 0] == 2.0 and win[0, 0] == 1


def test_bilstm_backward_direction_reverses_within_length(rng):
    params = small_params()
    feats = rng.normal(size=(6, 5))
    h = bilstm_states(feats, params)
    H = params.n_hidden
    # backward half at step t only depends on steps >= t, forward half on steps <= t
    feats2 = feats.copy()
    feats2[:2] += 5.0
    h2 = bilstm_states(feats2, params)
    np.testing.assert_allclose(h[2:, H:], h2[2:, H:], atol=1e-12)
    assert not np.allclose(h[2:, :H], h2[2:, :H])


def test_direction_symmetry_with_swapped_weights(rng):
    params = small_params()
    w = params.weights
    for k in ("Wx", "Wh", "b"):
        w[f"bw_{k}"] = w[f"fw_{k}"].copy()
    feats = rng.normal(size=(5, 5))
    h = bilstm_states(feats, params)
    hr = bilstm_states(feats[::-1].copy(), params)
    H = params.n_hidden
    np.testing.assert_allclose(h[:, :H], hr[::-1, H:], atol=1e-12)


def test_padding_does_not_change_valid_steps(rng):
    params = small_params()
    x = rng.normal(size=(1, 4, 12))
    padded = np.concatenate([x, rng.normal(size=(1, 3, 12))], axis=1)
    a = forward_batch(params, x, [4])
    b = forward_batch(params, padded, [4])
    np.testing.assert_allclose(a[0], b[0, :4], atol=1e-12)


def test_full_model_gradient(rng):
    params = small_params(seed=3)
    x = rng.normal(size=(2, 5, 12))
    lengths = [5, 4]
    targets = [[1, 2], [3]]

    def loss_of(p):
        return ctc_loss_batch(forward_batch(p, x, lengths), targets, lengths)[0].sum()

    logp, cache = forward_batch(params, x, lengths, keep_cache=True)
    _, dlogits = ctc_loss_batch(logp, targets, lengths)
    grads = backward_batch(params, dlogits, cache)
    eps = 1e-6
    for name in ("maxout_W", "fw_Wh", "bw_Wx", "out_b"):
        arr = params.weights[name]
        for idx in list(np.ndindex(arr.shape))[:6]:
            orig = arr[idx]
            arr[idx] = orig + eps
            lp = loss_of(params)
            arr[idx] = orig - eps
            lm = loss_of(params)
            arr[idx] = orig
            num = (lp - lm) / (2 * eps)
            assert abs(num - grads[name][idx]) <= 1e-4 * max(1.0, abs(num)), name


def test_head_probs_rows_are_distributions(rng):
    params = small_params()
    p = head_probs(rng.normal(size=(3, 12)), params)
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)


def test_forget_bias_initialised_to_one():
    params = small_params()
    H = params.n_hidden
    assert np.all(params.weights["fw_b"][H:2 * H] == 1.0)
    assert np.all(params.weights["bw_b"][H:2 * H] == 1.0)


def test_validate_rejects_bad_shapes():
    params = small_params()
    params.weights["out_b"] = np.zeros(99)
    with pytest.raises(ValueError):
        params.validate()


def test_params_round_trip(tmp_path):
    params = small_params(seed=5)
    path = tmp_path / "h.s2lp"
    save_params(params, path)
    back = load_params(path)
    assert back.language == "en"
    assert back.alphabet == params.alphabet
    for k, v in params.weights.items():
        np.testing.assert_array_equal(back.weights[k], v.astype(np.float32))


def test_params_reject_garbage(tmp_path):
    path = tmp_path / "bad.s2lp"
    path.write_bytes(b"NOPE" + b"\0" * 20)
    with pytest.raises(ValueError):
        load_params(path)


def test_sgd_momentum_step():
    p = {"w": np.array([1.0])}
    v = {}
    cfg = TrainConfig(learning_rate=0.1, momentum=0.5)
    sgd_momentum_step(p, {"w": np.array([2.0])}, v, cfg)
    assert p["w"][0] == pytest.approx(0.8)
    sgd_momentum_step(p, {"w": np.array([2.0])}, v, cfg)
    # v = 0.5*2 + 2 = 3
    assert p["w"][0] == pytest.approx(0.5)


def test_builtin_alphabets():
    en = builtin_alphabet("en")
    assert en.blank == "-" and en.size == 37
    assert set(FONT_CHARS) <= set(en.labels)
    for lang in ("hi", "te"):
        a = builtin_alphabet(lang)
        assert a.size > 50
    with pytest.raises(Exception):
        builtin_alphabet("xx")


def test_alphabet_file_round_trip(tmp_path):
    path = tmp_path / "a.txt"
    SMALL.to_file(path)
    assert Alphabet.from_file(path) == SMALL


@given(st.text(alphabet=FONT_CHARS, min_size=1, max_size=8))
def test_word_strip_geometry(word):
    strips = word_strips(word)
    assert strips.shape[1] == STRIP_HEIGHT * STRIP_WIDTH
    assert 0.0 <= strips.min() and strips.max() <= 1.0


def test_normalize_is_scale_invariant_for_integer_scales():
    a = normalize_word_image(render_word("KAHARA", scale=4))
    b = normalize_word_image(render_word("KAHARA", scale=8))
    np.testing.assert_array_equal(a, b)


def test_blank_crop_is_one_zero_strip():
    s = to_strips(normalize_word_image(np.zeros((10, 10))))
    assert s.shape == (1, 256) and not s.any()


def test_maxout_forward_shape(rng):
    params = small_params()
    assert maxout_forward(rng.normal(size=(7, 12)), params).shape == (7, 5)
