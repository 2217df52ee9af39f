"""LSTM next-event baseline.

Interoperates with the n-gram toolkit purely through its file contracts:
it reads ``#seqfile v1`` sequence files, trains an
embedding/LSTM/dense next-event classifier on the Normal sequences, and
writes ``session_id,position,actual,predicted`` files that the toolkit's
``compare`` command consumes directly.
"""

from .data import DataError, Sequence, read_predictions, read_seqfile, write_seqfile
from .model import LstmConfig, NextEventLstm
from .predict import predict_to_file
from .train import load_artifact, train_model

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "LstmConfig",
    "NextEventLstm",
    "Sequence",
    "load_artifact",
    "predict_to_file",
    "read_predictions",
    "read_seqfile",
    "train_model",
    "write_seqfile",
]
