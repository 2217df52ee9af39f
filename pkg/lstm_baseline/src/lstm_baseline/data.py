"""Sequence-file and prediction-file handling.

This package talks to the n-gram toolkit only through its documented file
contracts, so the parsers here are written against the format description,
not against that package's code.

Event-id conventions: a sequence file declares ``vocab=<k>`` and carries
ids in ``[0, k)``. Internally the model appends two indices: class ``k``
is the end-of-sequence target and embedding row ``k + 1`` is the
start-of-sequence padding. In prediction files the end-of-sequence event
is written as the shared reserved id 2147483646.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EOS_PUBLIC_ID = 2147483646
SEQFILE_HEADER_PREFIX = "#seqfile v1 vocab="
PREDICTION_HEADER = "session_id,position,actual,predicted"

LABELS = ("Normal", "Anomaly", "Unlabeled")


class DataError(Exception):
    """Input violates a file contract (bad header, out-of-vocab id, ...)."""


@dataclass
class Sequence:
    session_id: str
    label: str
    events: list[int]


def read_seqfile(path) -> tuple[list[Sequence], int]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(SEQFILE_HEADER_PREFIX):
            raise DataError(f"not a v1 sequence file: {path}")
        try:
            vocab_size = int(header[len(SEQFILE_HEADER_PREFIX):])
        except ValueError:
            raise DataError(f"bad vocab in header: {header!r}") from None

        sequences = []
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields")
            session_id, label, ids_text = fields
            if label.capitalize() not in LABELS:
                raise DataError(f"{path}:{lineno}: unknown label {label!r}")
            try:
                events = [int(t) for t in ids_text.split()] if ids_text else []
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer event id") from None
            for e in events:
                if not 0 <= e < vocab_size:
                    raise DataError(
                        f"{path}:{lineno}: id {e} outside declared vocab {vocab_size}"
                    )
            sequences.append(Sequence(session_id, label.capitalize(), events))
    return sequences, vocab_size


def write_seqfile(path, sequences: list[Sequence], vocab_size: int) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{SEQFILE_HEADER_PREFIX}{vocab_size}\n")
        for seq in sequences:
            fh.write(f"{seq.session_id}\t{seq.label}\t{' '.join(map(str, seq.events))}\n")


def build_windows(events: list[int], n: int, vocab_size: int) -> tuple[np.ndarray, np.ndarray]:
    """All sliding windows of one padded sequence: n-1 inputs, one target.

    A sequence of length L yields L+1 windows (the last predicts the
    end-of-sequence class).
    """
    sos = vocab_size + 1
    eos = vocab_size
    padded = [sos] * (n - 1) + list(events) + [eos]
    count = len(events) + 1
    x = np.empty((count, n - 1), dtype=np.int64)
    y = np.empty(count, dtype=np.int64)
    for i in range(count):
        x[i] = padded[i : i + n - 1]
        y[i] = padded[i + n - 1]
    return x, y


def stack_windows(sequences: list[Sequence], n: int, vocab_size: int):
    xs, ys = [], []
    for seq in sequences:
        x, y = build_windows(seq.events, n, vocab_size)
        xs.append(x)
        ys.append(y)
    if not xs:
        raise DataError("no sequences to window")
    return np.concatenate(xs), np.concatenate(ys)


def to_public_id(internal: int, vocab_size: int) -> int:
    return EOS_PUBLIC_ID if internal == vocab_size else int(internal)


def write_predictions(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PREDICTION_HEADER + "\n")
        for session_id, position, actual, predicted in rows:
            fh.write(f"{session_id},{position},{actual},{predicted}\n")


def read_predictions(path) -> list[tuple[str, int, int, int]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        if fh.readline().rstrip("\n") != PREDICTION_HEADER:
            raise DataError(f"not a prediction file: {path}")
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            sid, position, actual, predicted = line.split(",")
            rows.append((sid, int(position), int(actual), int(predicted)))
    return rows
