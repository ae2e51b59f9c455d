"""SGD-with-momentum training of a head on rendered toy-font words."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .alphabet import Alphabet
from .ctc import beta_collapse, ctc_loss_batch
from .font import word_strips
from .network import SeqNetParams, backward_batch, forward_batch, init_params

log = logging.getLogger(__name__)

TOY_WORDS = (
    "KAHARA", "SAHARSA", "BIHAR", "DELHI", "PATNA", "RANIGANJ", "BAZAR", "KOLKATA",
    "NAGAR", "ROAD", "MARG", "PUNE", "GAYA", "HARDA", "SURAT", "AGRA",
    "BANKA", "ARRAH", "KATNI", "SIKAR",
)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    momentum: float = 0.9
    iterations: int = 5000
    seed: int = 0
    target_loss: float = 0.1
    check_every: int = 50

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")


def sgd_momentum_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
                      velocity: dict[str, np.ndarray], cfg: TrainConfig) -> dict[str, np.ndarray]:
    """v <- momentum * v + g; p <- p - lr * v. Updates `params` and `velocity` in place."""
    if set(grads) - set(params):
        raise ValueError(f"gradients for unknown parameters: {sorted(set(grads) - set(params))}")
    for name, g in grads.items():
        p = params[name]
        if g.shape != p.shape:
            raise ValueError(f"{name}: gradient shape {g.shape} != parameter shape {p.shape}")
        v = velocity.get(name)
        if v is None:
            v = velocity[name] = np.zeros_like(p)
        v *= cfg.momentum
        v += g
        p -= cfg.learning_rate * v
    return params


def make_batch(words, alphabet: Alphabet):
    seqs = [word_strips(w) for w in words]
    lengths = np.array([len(s) for s in seqs])
    batch = np.zeros((len(seqs), lengths.max(), seqs[0].shape[1]))
    for i, s in enumerate(seqs):
        batch[i, :len(s)] = s
    targets = [alphabet.encode(w) for w in words]
    return batch, lengths, targets


def batch_loss_and_grads(params: SeqNetParams, batch, lengths, targets):
    """Summed CTC loss over the batch, per-item losses, and parameter gradients."""
    logp, cache = forward_batch(params, batch, lengths, keep_cache=True)
    losses, dlogits = ctc_loss_batch(logp, targets, lengths)
    grads = backward_batch(params, dlogits, cache)
    return float(losses.sum()), losses, grads, logp


def greedy_batch(logp: np.ndarray, lengths, alphabet: Alphabet) -> list[str]:
    return [beta_collapse(logp[i, :n].argmax(axis=1), alphabet) for i, n in enumerate(lengths)]


@dataclass
class TrainResult:
    params: SeqNetParams
    iterations: int
    mean_loss: float
    decoded: list[str]
    words: list[str] = field(default_factory=list)
    target_loss: float = 0.1
    history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.mean_loss < self.target_loss and self.decoded == self.words


def train_head(words, alphabet: Alphabet, cfg: TrainConfig | None = None,
               params: SeqNetParams | None = None, language: str = "en") -> TrainResult:
    """Train until the mean per-word loss drops below cfg.target_loss and every
    word decodes exactly, or until cfg.iterations is exhausted.

    The gradient is summed over the batch, one update per full pass.
    """
    cfg = cfg or TrainConfig()
    words = list(words)
    params = params.copy() if params is not None else init_params(alphabet, language, seed=cfg.seed)
    batch, lengths, targets = make_batch(words, alphabet)
    velocity: dict[str, np.ndarray] = {}
    history = []
    mean_loss = float("inf")
    decoded: list[str] = []
    it = 0
    for it in range(1, cfg.iterations + 1):
        total, losses, grads, logp = batch_loss_and_grads(params, batch, lengths, targets)
        mean_loss = total / len(words)
        if it % cfg.check_every == 0 or it == 1:
            decoded = greedy_batch(logp, lengths, alphabet)
            history.append((it, mean_loss))
            log.debug("iter %d mean loss %.4f", it, mean_loss)
            if mean_loss < cfg.target_loss and decoded == words:
                break
        sgd_momentum_step(params.weights, grads, velocity, cfg)
    else:
        logp = forward_batch(params, batch, lengths)
        losses, _ = ctc_loss_batch(logp, targets, lengths)
        mean_loss = float(losses.mean())
        decoded = greedy_batch(logp, lengths, alphabet)
    return TrainResult(params, it, mean_loss, decoded, words, cfg.target_loss, history)
