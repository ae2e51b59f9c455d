"""MaxOut + bidirectional LSTM recognizer with CTC decoding and loss."""

from .alphabet import Alphabet, builtin_alphabet
from .ctc import beta_collapse, best_path_decode, ctc_loss, ctc_loss_batch
from .network import SeqNetParams, bilstm_forward, bilstm_states, init_params, maxout_forward
from .params_io import load_params, save_params
from .recognize import Recognition, gate_language, recognize
from .train import TOY_WORDS, TrainConfig, sgd_momentum_step, train_head

ctc_best_path_decode = best_path_decode

__all__ = [
    "Alphabet", "builtin_alphabet", "beta_collapse", "best_path_decode", "ctc_best_path_decode",
    "ctc_loss", "ctc_loss_batch", "SeqNetParams", "bilstm_forward", "bilstm_states",
    "init_params", "maxout_forward", "load_params", "save_params", "Recognition",
    "gate_language", "recognize", "TOY_WORDS", "TrainConfig", "sgd_momentum_step", "train_head",
]
