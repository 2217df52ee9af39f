"""Inference: argmax next-event predictions written as a prediction file."""

from __future__ import annotations

import torch

from .data import DataError, build_windows, read_seqfile, to_public_id, write_predictions
from .train import load_artifact


def predict_to_file(artifact_path, seqfile, out_path) -> int:
    """Predict every position of every sequence in ``seqfile``; returns the
    row count, which is always the sum of (length + 1) over sequences."""
    model, config, vocab_size = load_artifact(artifact_path)
    sequences, file_vocab = read_seqfile(seqfile)
    if file_vocab != vocab_size:
        raise DataError(
            f"vocab mismatch: model trained with {vocab_size}, "
            f"{seqfile} declares {file_vocab}"
        )

    rows = []
    with torch.no_grad():
        for seq in sequences:
            x, y = build_windows(seq.events, config.window_n, vocab_size)
            predicted = model(torch.from_numpy(x)).argmax(dim=-1).tolist()
            for i, (actual, guess) in enumerate(zip(y.tolist(), predicted), start=1):
                rows.append(
                    (seq.session_id, i,
                     to_public_id(actual, vocab_size),
                     to_public_id(guess, vocab_size))
                )
    write_predictions(out_path, rows)
    return len(rows)
