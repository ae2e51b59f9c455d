"""CTC collapse, greedy decoding and the forward-backward loss."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .alphabet import Alphabet

NEG_INF = -np.inf


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - logits.max(axis=axis, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))


def beta_collapse(path, alphabet: Alphabet | None = None) -> str:
    """Collapse repeated labels, then drop blanks.

    `path` is either a string of symbols (blank marker included) or a
    sequence of class indices, in which case `alphabet` is required.

    >>> beta_collapse("--ddd-ee-l-hh---i-")
    'delhi'
    """
    if isinstance(path, str):
        blank = alphabet.blank if alphabet is not None else "-"
        symbols = list(path)
    else:
        if alphabet is None:
            raise ValueError("an alphabet is needed to collapse an index path")
        blank = alphabet.blank
        symbols = [alphabet.symbol(int(i)) for i in path]
    out = []
    prev = None
    for s in symbols:
        if s != prev and s != blank:
            out.append(s)
        prev = s
    return "".join(out)


def _collapse_indices(path: Sequence[int], blank: int = 0) -> list[int]:
    out = []
    prev = None
    for k in path:
        if k != prev and k != blank:
            out.append(int(k))
        prev = k
    return out


def check_probs(p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 1:
        raise ValueError(f"probability sequence must be (T, C) with T >= 1, got {p.shape}")
    if (p < 0).any() or not np.allclose(p.sum(axis=1), 1.0, atol=tol, rtol=0):
        raise ValueError("every row of a probability sequence must be a distribution")
    return p


def best_path_decode(p: np.ndarray, alphabet: Alphabet) -> tuple[str, float]:
    """Greedy CTC decoding: per-step argmax path, collapsed.

    Returns the label string and the probability of the chosen path.
    """
    p = check_probs(p)
    path = p.argmax(axis=1)
    prob = float(np.prod(p[np.arange(len(p)), path]))
    return beta_collapse(path, alphabet), prob


def _as_indices(target, alphabet: Alphabet | None) -> list[int]:
    if isinstance(target, str):
        if alphabet is None:
            raise ValueError("an alphabet is needed for a string target")
        idx = alphabet.encode(target)
    else:
        idx = [int(k) for k in target]
    if any(k == 0 for k in idx):
        raise ValueError("target must not contain the blank")
    return idx


def min_path_length(target: Sequence[int]) -> int:
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats


def ctc_loss_batch(log_probs: np.ndarray, targets: Sequence[Sequence[int]], lengths=None):
    """Negative log-likelihood of each target under CTC, with logit gradients.

    log_probs: (B, T, C) log-softmax outputs, blank at class 0.
    targets: B label-index sequences (no blanks).
    lengths: valid time steps per item (defaults to T for all).

    Returns (loss (B,), grad (B, T, C)) where grad is d loss / d logits for
    logits that were fed through log_softmax; padded steps get zero gradient.
    """
    log_probs = np.asarray(log_probs, dtype=np.float64)
    B, T, C = log_probs.shape
    lengths = np.full(B, T) if lengths is None else np.asarray(lengths, dtype=int)
    if len(targets) != B:
        raise ValueError("one target per batch item required")
    for tgt, tb in zip(targets, lengths):
        if tb < 1 or tb > T:
            raise ValueError(f"sequence length {tb} outside [1, {T}]")
        if min_path_length(tgt) > tb:
            raise ValueError("target longer than path capacity")

    S = max(3, 2 * max(len(t) for t in targets) + 1)
    ext = np.zeros((B, S), dtype=int)
    n_states = np.empty(B, dtype=int)
    skip = np.zeros((B, S), dtype=bool)
    for b, tgt in enumerate(targets):
        n = 2 * len(tgt) + 1
        n_states[b] = n
        ext[b, 1:n:2] = tgt
        for s in range(3, n, 2):
            skip[b, s] = ext[b, s] != ext[b, s - 2]
    valid = np.arange(S)[None, :] < n_states[:, None]

    bidx = np.arange(B)[:, None]
    # emissions per (t, b, state)
    emit = log_probs[bidx, :, ext].transpose(2, 0, 1)
    emit = np.where(valid[None], emit, NEG_INF)

    alpha = np.full((T, B, S), NEG_INF)
    alpha[0, :, 0] = emit[0, :, 0]
    has_label = n_states > 1
    alpha[0, has_label, 1] = emit[0, has_label, 1]
    pad1 = np.full((B, 1), NEG_INF)
    pad2 = np.full((B, 2), NEG_INF)
    for t in range(1, T):
        a = alpha[t - 1]
        s1 = np.concatenate([pad1, a[:, :-1]], axis=1)
        s2 = np.concatenate([pad2, a[:, :-2]], axis=1)
        s2 = np.where(skip, s2, NEG_INF)
        alpha[t] = np.logaddexp(np.logaddexp(a, s1), s2) + emit[t]

    last = lengths - 1
    end_a = alpha[last, np.arange(B), n_states - 1]
    end_b = np.where(has_label, alpha[last, np.arange(B), np.maximum(n_states - 2, 0)], NEG_INF)
    log_z = np.logaddexp(end_a, end_b)

    beta = np.full((T, B, S), NEG_INF)
    skip_next = np.concatenate([skip[:, 2:], np.zeros((B, 2), dtype=bool)], axis=1)
    init = np.full((B, S), NEG_INF)
    rows = np.arange(B)
    init[rows, n_states - 1] = 0.0
    init[rows[has_label], n_states[has_label] - 2] = 0.0
    for t in range(T - 1, -1, -1):
        if t < T - 1:
            nb = beta[t + 1]
            n1 = np.concatenate([nb[:, 1:], pad1], axis=1)
            n2 = np.concatenate([nb[:, 2:], pad2], axis=1)
            n2 = np.where(skip_next, n2, NEG_INF)
            rec = np.logaddexp(np.logaddexp(nb, n1), n2)
        else:
            rec = np.full((B, S), NEG_INF)
        here = np.where((t == last)[:, None], init, np.where((t < last)[:, None], rec, NEG_INF))
        beta[t] = here + emit[t]

    with np.errstate(invalid="ignore"):
        log_occ = alpha + beta - emit - log_z[None, :, None]
    occ = np.where(np.isfinite(log_occ), np.exp(log_occ), 0.0)
    post = np.zeros((T, B, C))
    tt = np.arange(T)[:, None, None]
    bb = np.arange(B)[None, :, None]
    np.add.at(post, (np.broadcast_to(tt, occ.shape), np.broadcast_to(bb, occ.shape),
                     np.broadcast_to(ext[None], occ.shape)), occ)
    post = post.transpose(1, 0, 2)
    grad = np.exp(log_probs) - post
    grad[np.arange(T)[None, :] >= lengths[:, None]] = 0.0
    return -log_z, grad


def ctc_loss(p: np.ndarray, target, alphabet: Alphabet | None = None) -> tuple[float, np.ndarray]:
    """CTC loss of one probability sequence and its gradient w.r.t. the logits.

    `p` is the (T, C) softmax output; the gradient is taken with respect to the
    pre-softmax logits that produced it.
    """
    p = check_probs(p)
    tgt = _as_indices(target, alphabet)
    with np.errstate(divide="ignore"):
        lp = np.log(p)
    loss, grad = ctc_loss_batch(lp[None], [tgt])
    return float(loss[0]), grad[0]
