"""Training: windows from a sequence file in, weights plus a log out."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .data import DataError, read_seqfile, stack_windows
from .model import LstmConfig, NextEventLstm

ARTIFACT_FORMAT = "lstm-baseline v1"


def train_model(seqfile, artifact_path, log_path, config: LstmConfig | None = None) -> dict:
    """Train on every Normal sequence of ``seqfile``.

    Windows are shuffled once with the configured seed; the last tenth (by
    default) is held out for per-epoch validation accuracy and early
    stopping. Loss, optimizer and stopping rules are recorded in the
    training log (``epoch,loss,val_accuracy`` rows) for auditability.
    """
    config = config or LstmConfig()
    sequences, vocab_size = read_seqfile(seqfile)
    train_seqs = [s for s in sequences if s.label == "Normal"]
    if not train_seqs:
        raise DataError(f"{seqfile} holds no Normal sequences to train on")

    x, y = stack_windows(train_seqs, config.window_n, vocab_size)
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(x))
    x, y = x[order], y[order]
    n_val = int(len(x) * config.val_fraction)
    if n_val:
        x_train, y_train = x[:-n_val], y[:-n_val]
        x_val, y_val = x[-n_val:], y[-n_val:]
    else:
        x_train, y_train = x, y
        x_val, y_val = x[:0], y[:0]

    torch.manual_seed(config.seed)
    torch.set_num_threads(1)  # keeps repeated runs bit-identical on CPU
    model = NextEventLstm(vocab_size, config)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    x_train_t = torch.from_numpy(x_train)
    y_train_t = torch.from_numpy(y_train)
    x_val_t = torch.from_numpy(x_val)
    y_val_t = torch.from_numpy(y_val)

    best_val = -1.0
    stale = 0
    history = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        total_loss = 0.0
        for start in range(0, len(x_train_t), config.batch_size):
            batch_x = x_train_t[start : start + config.batch_size]
            batch_y = y_train_t[start : start + config.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(batch_x), batch_y)
            loss.backward()
            optimizer.step()
            total_loss += loss.item() * len(batch_x)
        mean_loss = total_loss / len(x_train_t)
        val_accuracy = _accuracy(model, x_val_t, y_val_t) if n_val else float("nan")
        history.append((epoch, mean_loss, val_accuracy))
        if n_val:
            if val_accuracy > best_val:
                best_val, stale = val_accuracy, 0
            else:
                stale += 1
                if stale > config.patience:
                    break

    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,loss,val_accuracy\n")
        for epoch, loss, val_accuracy in history:
            fh.write(f"{epoch},{loss:.6f},{val_accuracy:.6f}\n")

    torch.save(
        {
            "format": ARTIFACT_FORMAT,
            "config": config.to_dict(),
            "vocab_size": vocab_size,
            "state_dict": model.state_dict(),
        },
        artifact_path,
    )
    return {
        "epochs_run": len(history),
        "final_loss": history[-1][1],
        "val_accuracy": history[-1][2],
        "train_windows": len(x_train),
        "vocab_size": vocab_size,
    }


@torch.no_grad()
def _accuracy(model: NextEventLstm, x: torch.Tensor, y: torch.Tensor) -> float:
    model.eval()
    hits = 0
    for start in range(0, len(x), 4096):
        logits = model(x[start : start + 4096])
        hits += int((logits.argmax(dim=-1) == y[start : start + 4096]).sum())
    return hits / max(1, len(x))


def load_artifact(artifact_path) -> tuple[NextEventLstm, LstmConfig, int]:
    payload = torch.load(artifact_path, map_location="cpu", weights_only=False)
    if not isinstance(payload, dict) or payload.get("format") != ARTIFACT_FORMAT:
        raise DataError(f"not a {ARTIFACT_FORMAT} artifact: {artifact_path}")
    config = LstmConfig(**payload["config"])
    model = NextEventLstm(payload["vocab_size"], config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, config, payload["vocab_size"]
