"""Corpus loading: group raw log lines into labeled per-session sequences.

Two loaders are provided: one for the public HDFS corpus (session = block id,
labels joined from the anomaly-label table) and one for directories holding
one run per file. Loaded corpora are plain immutable-by-convention data and
safe to share across threads; there is no mutation API.
"""

from __future__ import annotations

import csv
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

from .base import Label

log = logging.getLogger(__name__)

_BLOCK_ID_PATTERN = r"blk_-?\d+"


class RawLogRecord(NamedTuple):
    line_no: int  # 1-based, strictly increasing within a source file
    text: str  # never contains a line terminator
    session_hint: str | None = None


@dataclass
class SessionRecords:
    session_id: str
    records: list[RawLogRecord]
    label: Label


@dataclass
class SourceMeta:
    dataset: str
    paths: tuple[str, ...] = ()


@dataclass
class LabeledCorpus:
    sequences: list[SessionRecords]
    source_meta: SourceMeta
    counters: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def normal_count(self) -> int:
        return sum(1 for s in self.sequences if s.label is Label.NORMAL)

    def total_records(self) -> int:
        return sum(len(s.records) for s in self.sequences)

    def only(self, label: Label) -> "LabeledCorpus":
        kept = [s for s in self.sequences if s.label is label]
        return LabeledCorpus(kept, self.source_meta, dict(self.counters))


@dataclass
class SplitSpec:
    """Sequence-level train/test split: same (corpus, ratio, seed) in, same split out."""

    ratio: float = 0.5
    seed: int = 42
    unit: str = "sequence"

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"split ratio must be in (0, 1), got {self.ratio}")


def load_hdfs(log_path, label_path) -> LabeledCorpus:
    """Load the HDFS log, sessionized by the first block id on each line.

    Lines with no ``blk_<digits>`` token are dropped (counted under
    ``dropped_no_session``). Block ids missing from the label table are kept
    as Unlabeled and counted under ``unlabeled_sessions``.

    Materializes every record; at full-corpus scale (11M lines) that wants
    several GB, so the benchmark path uses
    :func:`loglocate.pipeline.ingest_and_parse_hdfs` instead, which parses
    while reading and keeps only event ids.
    """
    import re

    labels = _read_hdfs_labels(label_path)
    search_block = re.compile(_BLOCK_ID_PATTERN).search
    intern = sys.intern

    by_block: dict[str, list[RawLogRecord]] = {}
    dropped = 0
    with open(log_path, encoding="utf-8", errors="replace") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.rstrip("\r\n")
            match = search_block(text)
            if match is None:
                dropped += 1
                continue
            block = intern(match.group())
            records = by_block.get(block)
            if records is None:
                records = by_block[block] = []
            records.append(RawLogRecord(line_no, text, block))

    unlabeled = 0
    sequences = []
    for block, records in by_block.items():  # dict preserves first-appearance order
        label = labels.get(block)
        if label is None:
            label = Label.UNLABELED
            unlabeled += 1
        sequences.append(SessionRecords(block, records, label))
    if unlabeled:
        log.warning("%d block ids in the log are absent from the label file", unlabeled)
    if dropped:
        log.info("dropped %d lines without a block id", dropped)

    meta = SourceMeta("hdfs", (str(log_path), str(label_path)))
    counters = {"dropped_no_session": dropped, "unlabeled_sessions": unlabeled}
    return LabeledCorpus(sequences, meta, counters)


def _read_hdfs_labels(label_path) -> dict[str, Label]:
    labels: dict[str, Label] = {}
    # utf-8-sig: tolerate a BOM in front of the header row
    with open(label_path, encoding="utf-8-sig", errors="replace", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["blockid", "label"]:
            raise ValueError(f"expected 'BlockId,Label' header in {label_path}, got {header}")
        for row in reader:
            if not row:
                continue
            labels[sys.intern(row[0].strip())] = Label.from_string(row[1])
    return labels


def load_per_file(
    directory,
    label_fn: Callable[[str], Label] | None = None,
) -> LabeledCorpus:
    """Load a directory of run logs, one sequence per file (session id = file name).

    An unreadable file is recorded and skipped; the remaining files still load.
    """
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file())
    sequences = []
    errors = 0
    for path in files:
        try:
            with open(path, encoding="utf-8", errors="replace") as fh:
                records = [
                    RawLogRecord(i, line.rstrip("\r\n"))
                    for i, line in enumerate(fh, start=1)
                ]
        except OSError as exc:
            errors += 1
            log.error("skipping unreadable file %s: %s", path, exc)
            continue
        label = label_fn(path.name) if label_fn is not None else Label.NORMAL
        sequences.append(SessionRecords(path.name, records, label))

    meta = SourceMeta(directory.name, (str(directory),))
    return LabeledCorpus(sequences, meta, {"unreadable_files": errors})


def filter_min_length(corpus: LabeledCorpus, min_events: int) -> LabeledCorpus:
    """Keep only sequences with at least ``min_events`` records. Idempotent."""
    if min_events < 0:
        raise ValueError("min_events must be >= 0")
    kept = [s for s in corpus.sequences if len(s.records) >= min_events]
    dropped = len(corpus.sequences) - len(kept)
    if dropped:
        log.info("filter_min_length(%d): dropped %d of %d sequences",
                 min_events, dropped, len(corpus.sequences))
    counters = dict(corpus.counters)
    counters["dropped_short"] = counters.get("dropped_short", 0) + dropped
    return LabeledCorpus(kept, corpus.source_meta, counters)


def _split_ids(session_ids: list[str], spec: SplitSpec) -> set[str]:
    shuffled = list(session_ids)
    random.Random(spec.seed).shuffle(shuffled)
    n_train = int(len(shuffled) * spec.ratio + 0.5)
    return set(shuffled[:n_train])


def split_corpus(corpus: LabeledCorpus, spec: SplitSpec) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Deterministic seeded partition of an all-Normal corpus into train/test."""
    _require_all_normal(s.label for s in corpus.sequences)
    train_ids = _split_ids([s.session_id for s in corpus.sequences], spec)
    train = [s for s in corpus.sequences if s.session_id in train_ids]
    test = [s for s in corpus.sequences if s.session_id not in train_ids]
    return (
        LabeledCorpus(train, corpus.source_meta, dict(corpus.counters)),
        LabeledCorpus(test, corpus.source_meta, dict(corpus.counters)),
    )


def split_sequences(sequences, spec: SplitSpec):
    """Same partition contract as :func:`split_corpus`, for parsed event sequences."""
    sequences = list(sequences)
    _require_all_normal(s.label for s in sequences)
    train_ids = _split_ids([s.session_id for s in sequences], spec)
    train = [s for s in sequences if s.session_id in train_ids]
    test = [s for s in sequences if s.session_id not in train_ids]
    return train, test


def _require_all_normal(labels) -> None:
    for label in labels:
        if label is not Label.NORMAL:
            raise ValueError("split expects an all-Normal corpus; filter labels first")
