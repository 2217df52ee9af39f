"""Next-event classifier: embedding, stacked LSTM, dense head."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn


@dataclass
class LstmConfig:
    """Architecture and training controls.

    The architecture dimensions default to the reference setup: 50-d event
    embeddings, two LSTM layers of 100 units, two dense layers of 100 units
    before the softmax projection. ``window_n`` is the sliding-window size:
    n-1 input events predict the next one.
    """

    window_n: int = 5
    embed_dim: int = 50
    lstm_units: int = 100
    lstm_layers: int = 2
    dense_units: int = 100
    dense_layers: int = 2
    epochs: int = 60
    batch_size: int = 64
    learning_rate: float = 1e-3
    seed: int = 7
    val_fraction: float = 0.1
    patience: int = 5

    def __post_init__(self) -> None:
        if self.window_n < 2:
            raise ValueError("window_n must be >= 2")
        for name in ("embed_dim", "lstm_units", "lstm_layers", "dense_units",
                     "dense_layers", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


class NextEventLstm(nn.Module):
    """Maps a window of n-1 event indices to logits over vocab+1 classes
    (every template id plus the end-of-sequence class)."""

    def __init__(self, vocab_size: int, config: LstmConfig):
        super().__init__()
        self.vocab_size = vocab_size
        # vocab real ids + EOS class + SOS padding row
        self.embed = nn.Embedding(vocab_size + 2, config.embed_dim)
        self.lstm = nn.LSTM(
            config.embed_dim,
            config.lstm_units,
            num_layers=config.lstm_layers,
            batch_first=True,
        )
        layers: list[nn.Module] = []
        width = config.lstm_units
        for _ in range(config.dense_layers):
            layers += [nn.Linear(width, config.dense_units), nn.ReLU()]
            width = config.dense_units
        self.dense = nn.Sequential(*layers)
        self.out = nn.Linear(width, vocab_size + 1)

    def forward(self, windows: torch.Tensor) -> torch.Tensor:
        embedded = self.embed(windows)
        hidden, _ = self.lstm(embedded)
        return self.out(self.dense(hidden[:, -1, :]))

    @torch.no_grad()
    def predict_proba(self, windows: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.forward(windows), dim=-1)
