"""Shared file contracts: sequence files and prediction files.

These two formats are the interop surface between this package and any
external model trainer. Sentinel ids never appear in a sequence file
(padding is the model's job); the end-of-sequence sentinel may appear in
prediction files as the actual/predicted event of a run's final position.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .base import RESERVED_FLOOR, SEQUENCE_END, DataFormatError, EventSequence, Label

SEQFILE_MAGIC = "#seqfile"
SEQFILE_VERSION = "v1"
PREDICTION_HEADER = "session_id,position,actual,predicted"


def write_sequences(path, sequences: Iterable[EventSequence], vocab_size: int) -> None:
    """One line per session: ``session_id<TAB>label<TAB>space-joined ids``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{SEQFILE_MAGIC} {SEQFILE_VERSION} vocab={vocab_size}\n")
        for seq in sequences:
            _check_session_id(seq.session_id)
            ids = " ".join(map(str, seq.events))
            fh.write(f"{seq.session_id}\t{seq.label.value}\t{ids}\n")


def read_sequences(path) -> tuple[list[EventSequence], int]:
    """Returns the sequences and the declared vocabulary size."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split(" ")
        if len(parts) != 3 or parts[0] != SEQFILE_MAGIC or not parts[2].startswith("vocab="):
            raise DataFormatError(f"not a sequence file: {path}")
        if parts[1] != SEQFILE_VERSION:
            raise DataFormatError(f"unsupported sequence-file version {parts[1]!r}")
        try:
            vocab_size = int(parts[2][len("vocab=") :])
        except ValueError:
            raise DataFormatError(f"bad vocab header in {path}") from None

        sequences = []
        seen_ids = set()
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
            session_id, label_text, ids_text = fields
            if session_id in seen_ids:
                raise DataFormatError(f"{path}:{lineno}: duplicate session {session_id!r}")
            seen_ids.add(session_id)
            try:
                label = Label.from_string(label_text)
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            try:
                events = [int(t) for t in ids_text.split()] if ids_text else []
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-integer event id") from None
            for e in events:
                if e < 0 or e >= vocab_size:
                    raise DataFormatError(
                        f"{path}:{lineno}: event id {e} outside vocab of {vocab_size}"
                    )
            sequences.append(EventSequence(session_id, events, label))
    return sequences, vocab_size


def write_predictions(
    path, rows: Iterable[tuple[str, int, int, int]]
) -> None:
    """CSV of per-position outcomes: ``session_id,position,actual,predicted``.

    The end-of-sequence sentinel is written as its reserved integer id
    (2147483646) so files from independent implementations agree byte-wise.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PREDICTION_HEADER + "\n")
        last_checked = None
        for session_id, position, actual, predicted in rows:
            if session_id != last_checked:
                _check_session_id(session_id, extra=",")
                last_checked = session_id
            fh.write(f"{session_id},{position},{actual},{predicted}\n")


def read_predictions(path) -> list[tuple[str, int, int, int]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != PREDICTION_HEADER:
            raise DataFormatError(f"not a prediction file: {path}")
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 4:
                raise DataFormatError(f"{path}:{lineno}: expected 4 comma-separated fields")
            try:
                rows.append((fields[0], int(fields[1]), int(fields[2]), int(fields[3])))
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-integer field") from None
    return rows


def _check_session_id(session_id: str, extra: str = "") -> None:
    for forbidden in "\t\n\r" + extra:
        if forbidden in session_id:
            raise ValueError(f"session id {session_id!r} contains {forbidden!r}")


def prediction_rows(model, sequences: Sequence[EventSequence]):
    """Materialize per-position (session_id, position, actual, predicted) rows."""
    for seq in sequences:
        actual = list(seq.events) + [SEQUENCE_END]
        for position, (truth, predicted) in enumerate(
            zip(actual, model.predict_sequence(seq.events)), start=1
        ):
            yield seq.session_id, position, truth, predicted


def infer_vocab_size(sequences: Iterable[EventSequence]) -> int:
    """Smallest vocab covering every id in ``sequences`` (0 when all empty)."""
    top = -1
    for seq in sequences:
        for e in seq.events:
            if e >= RESERVED_FLOOR:
                raise ValueError(f"sequence {seq.session_id!r} holds reserved id {e}")
            if e > top:
                top = e
    return top + 1
