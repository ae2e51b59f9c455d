"""MaxOut feature layer, bidirectional LSTM and softmax projection (numpy, batched)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alphabet import Alphabet
from .ctc import log_softmax

# reference scale
STRIP_DIM = 32 * 8
MAXOUT_PIECES = 2
N_FEATURES = 64
N_HIDDEN = 64

PARAM_NAMES = (
    "maxout_W", "maxout_b",
    "fw_Wx", "fw_Wh", "fw_b",
    "bw_Wx", "bw_Wh", "bw_b",
    "out_W", "out_b",
)


@dataclass
class SeqNetParams:
    """Weights of one language head.

    maxout_W has shape (pieces, features, input_dim); LSTM gate blocks are
    ordered input, forget, cell, output along the last axis.
    """

    language: str
    alphabet: Alphabet
    weights: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_hidden(self) -> int:
        return self.weights["fw_Wh"].shape[0]

    @property
    def input_dim(self) -> int:
        return self.weights["maxout_W"].shape[2]

    def validate(self) -> None:
        missing = set(PARAM_NAMES) - set(self.weights)
        if missing:
            raise ValueError(f"missing parameters: {sorted(missing)}")
        k, f, d = self.weights["maxout_W"].shape
        h = self.n_hidden
        c = self.alphabet.size
        expected = {
            "maxout_W": (k, f, d), "maxout_b": (k, f),
            "fw_Wx": (f, 4 * h), "fw_Wh": (h, 4 * h), "fw_b": (4 * h,),
            "bw_Wx": (f, 4 * h), "bw_Wh": (h, 4 * h), "bw_b": (4 * h,),
            "out_W": (2 * h, c), "out_b": (c,),
        }
        for name, shape in expected.items():
            arr = self.weights[name]
            if arr.shape != shape:
                raise ValueError(f"{name}: expected shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: non-finite parameter values")

    def copy(self) -> "SeqNetParams":
        return SeqNetParams(self.language, self.alphabet, {k: v.copy() for k, v in self.weights.items()})


def init_params(alphabet: Alphabet, language: str = "en", seed: int = 0,
                input_dim: int = STRIP_DIM, n_features: int = N_FEATURES,
                n_hidden: int = N_HIDDEN, pieces: int = MAXOUT_PIECES) -> SeqNetParams:
    rng = np.random.default_rng(seed)

    def glorot(fan_in, fan_out, shape):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=shape)

    h = n_hidden
    w = {
        "maxout_W": glorot(input_dim, n_features, (pieces, n_features, input_dim)),
        "maxout_b": np.zeros((pieces, n_features)),
    }
    for d in ("fw", "bw"):
        w[f"{d}_Wx"] = glorot(n_features, h, (n_features, 4 * h))
        w[f"{d}_Wh"] = glorot(h, h, (h, 4 * h))
        b = np.zeros(4 * h)
        b[h:2 * h] = 1.0
        w[f"{d}_b"] = b
    w["out_W"] = glorot(2 * h, alphabet.size, (2 * h, alphabet.size))
    w["out_b"] = np.zeros(alphabet.size)
    params = SeqNetParams(language, alphabet, w)
    params.validate()
    return params


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def maxout(x: np.ndarray, W: np.ndarray, b: np.ndarray):
    """Max over affine pieces. x: (..., D), W: (k, F, D), b: (k, F) -> (..., F), winner index."""
    z = np.einsum("...d,kfd->...kf", x, W) + b
    win = z.argmax(axis=-2)
    return np.take_along_axis(z, win[..., None, :], axis=-2)[..., 0, :], win


def maxout_forward(strips: np.ndarray, params: SeqNetParams) -> np.ndarray:
    """Feature sequence (T, F) for a strip sequence (T, D)."""
    strips = np.asarray(strips, dtype=np.float64)
    if strips.ndim != 2 or strips.shape[0] < 1:
        raise ValueError(f"strip sequence must be (T, D) with T >= 1, got {strips.shape}")
    W = params.weights["maxout_W"]
    if strips.shape[1] != W.shape[2]:
        raise ValueError(f"strip dimension {strips.shape[1]} does not match layer input {W.shape[2]}")
    return maxout(strips, W, params.weights["maxout_b"])[0]


def _reverse_index(lengths: np.ndarray, T: int) -> np.ndarray:
    t = np.arange(T)[None, :]
    L = lengths[:, None]
    return np.where(t < L, L - 1 - t, t)


def _gather_time(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return np.take_along_axis(x, idx[:, :, None], axis=1)


def _lstm_run(x: np.ndarray, Wx, Wh, b):
    """Unidirectional LSTM over (B, T, F) from zero state. Returns hidden states and a cache."""
    B, T, _ = x.shape
    H = Wh.shape[0]
    ax = x @ Wx + b
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    hs = np.empty((B, T, H))
    cs = np.empty((B, T, H))
    gates = np.empty((B, T, 4 * H))
    for t in range(T):
        a = ax[:, t] + h @ Wh
        i = _sigmoid(a[:, :H])
        f = _sigmoid(a[:, H:2 * H])
        g = np.tanh(a[:, 2 * H:3 * H])
        o = _sigmoid(a[:, 3 * H:])
        c = f * c + i * g
        h = o * np.tanh(c)
        hs[:, t] = h
        cs[:, t] = c
        gates[:, t, :H] = i
        gates[:, t, H:2 * H] = f
        gates[:, t, 2 * H:3 * H] = g
        gates[:, t, 3 * H:] = o
    return hs, (x, hs, cs, gates)


def _lstm_backprop(dhs: np.ndarray, cache, Wx, Wh):
    x, hs, cs, gates = cache
    B, T, H = hs.shape
    da_all = np.empty((B, T, 4 * H))
    dh_next = np.zeros((B, H))
    dc_next = np.zeros((B, H))
    dWh = np.zeros_like(Wh)
    for t in range(T - 1, -1, -1):
        i = gates[:, t, :H]
        f = gates[:, t, H:2 * H]
        g = gates[:, t, 2 * H:3 * H]
        o = gates[:, t, 3 * H:]
        c = cs[:, t]
        c_prev = cs[:, t - 1] if t > 0 else np.zeros((B, H))
        h_prev = hs[:, t - 1] if t > 0 else np.zeros((B, H))
        tc = np.tanh(c)
        dh = dhs[:, t] + dh_next
        dc = dh * o * (1.0 - tc * tc) + dc_next
        da = np.concatenate([
            dc * g * i * (1.0 - i),
            dc * c_prev * f * (1.0 - f),
            dc * i * (1.0 - g * g),
            dh * tc * o * (1.0 - o),
        ], axis=1)
        da_all[:, t] = da
        dWh += h_prev.T @ da
        dh_next = da @ Wh.T
        dc_next = dc * f
    dx = da_all @ Wx.T
    dWx = np.einsum("btf,btg->fg", x, da_all)
    db = da_all.sum(axis=(0, 1))
    return dx, dWx, dWh, db


def forward_batch(params: SeqNetParams, strips: np.ndarray, lengths=None, keep_cache: bool = False):
    """Run the head on a padded batch of strip sequences (B, T, D).

    Returns log-probabilities (B, T, C) and, if requested, the cache needed by
    `backward_batch`. Steps beyond an item's length hold padding garbage.
    """
    w = params.weights
    strips = np.asarray(strips, dtype=np.float64)
    B, T, _ = strips.shape
    lengths = np.full(B, T) if lengths is None else np.asarray(lengths, dtype=int)
    feats, win = maxout(strips, w["maxout_W"], w["maxout_b"])
    hf, cache_f = _lstm_run(feats, w["fw_Wx"], w["fw_Wh"], w["fw_b"])
    rev = _reverse_index(lengths, T)
    hb_rev, cache_b = _lstm_run(_gather_time(feats, rev), w["bw_Wx"], w["bw_Wh"], w["bw_b"])
    hb = _gather_time(hb_rev, rev)
    states = np.concatenate([hf, hb], axis=2)
    logits = states @ w["out_W"] + w["out_b"]
    logp = log_softmax(logits)
    if not keep_cache:
        return logp
    return logp, (strips, win, rev, cache_f, cache_b, states, lengths)


def backward_batch(params: SeqNetParams, dlogits: np.ndarray, cache) -> dict[str, np.ndarray]:
    """Parameter gradients given d loss / d logits (B, T, C)."""
    w = params.weights
    strips, win, rev, cache_f, cache_b, states, lengths = cache
    H = params.n_hidden
    grads = {
        "out_W": np.einsum("bts,btc->sc", states, dlogits),
        "out_b": dlogits.sum(axis=(0, 1)),
    }
    dstates = dlogits @ w["out_W"].T
    dhf = dstates[:, :, :H]
    dhb_rev = _gather_time(dstates[:, :, H:], rev)
    dxf, grads["fw_Wx"], grads["fw_Wh"], grads["fw_b"] = _lstm_backprop(dhf, cache_f, w["fw_Wx"], w["fw_Wh"])
    dxb_rev, grads["bw_Wx"], grads["bw_Wh"], grads["bw_b"] = _lstm_backprop(dhb_rev, cache_b, w["bw_Wx"], w["bw_Wh"])
    dfeats = dxf + _gather_time(dxb_rev, rev)
    mask = np.arange(strips.shape[1])[None, :] < lengths[:, None]
    dfeats = dfeats * mask[:, :, None]
    # route the feature gradient to the winning piece only
    k = w["maxout_W"].shape[0]
    dz = np.zeros(dfeats.shape[:2] + (k, dfeats.shape[2]))
    np.put_along_axis(dz, win[..., None, :], dfeats[..., None, :], axis=-2)
    grads["maxout_W"] = np.einsum("btkf,btd->kfd", dz, strips)
    grads["maxout_b"] = dz.sum(axis=(0, 1))
    return grads


def bilstm_states(features: np.ndarray, params: SeqNetParams) -> np.ndarray:
    """Concatenated [forward, backward] hidden states (T, 2H) for a feature sequence (T, F)."""
    params.validate()
    w = params.weights
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError(f"feature sequence must be (T, F) with T >= 1, got {x.shape}")
    if x.shape[1] != w["fw_Wx"].shape[0]:
        raise ValueError(f"feature dimension {x.shape[1]} does not match LSTM input {w['fw_Wx'].shape[0]}")
    hf, _ = _lstm_run(x[None], w["fw_Wx"], w["fw_Wh"], w["fw_b"])
    hb, _ = _lstm_run(x[::-1][None], w["bw_Wx"], w["bw_Wh"], w["bw_b"])
    return np.concatenate([hf[0], hb[0][::-1]], axis=1)


def bilstm_forward(features: np.ndarray, params: SeqNetParams) -> np.ndarray:
    """Per-step class distributions (T, C) for a feature sequence (T, F)."""
    states = bilstm_states(features, params)
    logits = states @ params.weights["out_W"] + params.weights["out_b"]
    return np.exp(log_softmax(logits))


def head_probs(strips: np.ndarray, params: SeqNetParams) -> np.ndarray:
    return bilstm_forward(maxout_forward(strips, params), params)
