"""Counting n-gram next-event model with per-event anomaly scores.

The model is a memory of (context, next-event) counts over padded training
sequences. Its single hyperparameter is the sliding-window size ``n``: the
first ``n - 1`` events of a window form the context, the last is the event
being predicted or scored. Lookups are plain dict accesses, so prediction
and scoring run in O(1) per event, and a fitted model is immutable and safe
to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .base import (
    RESERVED_FLOOR,
    SEQUENCE_END,
    SEQUENCE_START,
    DataFormatError,
    check_events,
)

_MODEL_MAGIC = "#ngram"
_MODEL_VERSION = "v1"

Context = tuple[int, ...]


def pad(events: Sequence[int], n: int) -> list[int]:
    """Pad with n-1 start sentinels and one end sentinel.

    Every real event and the sequence termination then has a full context:
    a sequence of length L yields exactly L+1 scored positions.
    """
    if n < 2:
        raise ValueError("window size n must be >= 2")
    check_events(events)
    return [SEQUENCE_START] * (n - 1) + list(events) + [SEQUENCE_END]


class AnomalyScore(NamedTuple):
    occurrence: int  # training count of this (context, event) window
    probability: float  # occurrence / total successors of the context


@dataclass
class Prediction:
    predicted: int
    is_fallback: bool
    _successors: Mapping[int, int] | None = None

    def rank_of(self, event: int) -> float:
        """1-based rank of ``event`` under the context's count ordering
        (count descending, then smaller id). Events the context never
        preceded, and unseen contexts, rank at infinity."""
        if self._successors is None:
            return math.inf
        count = self._successors.get(event)
        if count is None:
            return math.inf
        rank = 1
        for other, other_count in self._successors.items():
            if other_count > count or (other_count == count and other < event):
                rank += 1
        return rank


@dataclass
class ScoredEvent:
    position: int  # 1-based over the unpadded sequence; termination at L+1
    event: int
    score: AnomalyScore
    prediction: Prediction


class NGramModel(BaseEstimator):
    """Next-event predictor and per-event anomaly scorer.

    Fitted attributes use the trailing-underscore convention:

    - ``context_counts_``: context -> {event -> count}
    - ``context_totals_``: context -> total successor count
    - ``winners_``: context -> argmax event (ties to the smallest id)
    - ``global_counts_``: event -> count over all training positions
    - ``fallback_event_``: globally most frequent event, or None if untrained
    - ``trained_positions_``, ``unique_ngrams_``, ``vocab_``
    """

    def __init__(self, n: int = 5):
        self.n = n

    # -- training --------------------------------------------------------

    def fit(self, sequences: Iterable[Sequence[int]], y=None) -> "NGramModel":
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"window size n must be an integer >= 2, got {self.n!r}")
        counts: dict[Context, dict[int, int]] = {}
        # Identical sequences contribute identical windows; fold duplicates
        # into weights so counts stay exact while large corpora of repeated
        # runs (HDFS-style) train in a fraction of the time.
        weights: dict[tuple[int, ...], int] = {}
        for seq in sequences:
            events = tuple(getattr(seq, "events", seq))
            weights[events] = weights.get(events, 0) + 1

        n = self.n
        for events, weight in weights.items():
            padded = pad(events, n)
            for i in range(len(padded) - n + 1):
                context = tuple(padded[i : i + n - 1])
                successors = counts.get(context)
                if successors is None:
                    successors = counts[context] = {}
                nxt = padded[i + n - 1]
                successors[nxt] = successors.get(nxt, 0) + weight

        self.context_counts_ = counts
        self.context_totals_ = {c: sum(s.values()) for c, s in counts.items()}
        self.winners_ = {c: _argmax_event(s) for c, s in counts.items()}
        global_counts: dict[int, int] = {}
        for successors in counts.values():
            for event, count in successors.items():
                global_counts[event] = global_counts.get(event, 0) + count
        self.global_counts_ = global_counts
        self.fallback_event_ = _argmax_event(global_counts) if global_counts else None
        self.trained_positions_ = sum(self.context_totals_.values())
        self.unique_ngrams_ = sum(len(s) for s in counts.values())
        self.vocab_ = frozenset(global_counts)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "context_counts_"):
            raise NotFittedError("NGramModel is not fitted; call fit() first")

    # -- prediction --------------------------------------------------------

    def predict_event(self, context: Sequence[int]) -> Prediction:
        """Most frequent successor of ``context``; falls back to the globally
        most frequent event when the context was never seen."""
        self._check_fitted()
        context = self._as_context(context)
        successors = self.context_counts_.get(context)
        if successors is not None:
            return Prediction(self.winners_[context], False, successors)
        if self.fallback_event_ is None:
            raise ValueError("untrained model: no events to fall back on")
        return Prediction(self.fallback_event_, True, None)

    def predict_sequence(self, events: Sequence[int]) -> list[int]:
        """Predicted event at each of the L+1 scored positions."""
        self._check_fitted()
        padded = pad(getattr(events, "events", events), self.n)
        n, winners = self.n, self.winners_
        fallback = self.fallback_event_
        out = []
        for i in range(len(padded) - n + 1):
            predicted = winners.get(tuple(padded[i : i + n - 1]), fallback)
            if predicted is None:
                raise ValueError("untrained model: no events to fall back on")
            out.append(predicted)
        return out

    def predict(self, contexts) -> np.ndarray:
        """Vectorized surface: one predicted event id per context row."""
        return np.array([self.predict_event(c).predicted for c in contexts], dtype=np.int64)

    # -- anomaly scoring ---------------------------------------------------

    def event_score(self, context: Sequence[int], event: int) -> AnomalyScore:
        """Occurrence count and conditional probability of ``event`` after
        ``context``; (0, 0.0) when the window or context was never seen."""
        self._check_fitted()
        context = self._as_context(context)
        successors = self.context_counts_.get(context)
        if not successors:
            return AnomalyScore(0, 0.0)
        occurrence = successors.get(event, 0)
        if occurrence == 0:
            return AnomalyScore(0, 0.0)
        return AnomalyScore(occurrence, occurrence / self.context_totals_[context])

    def score_sequence(self, events: Sequence[int]) -> list[ScoredEvent]:
        """Score every position of a padded run: L real events plus the
        termination, positions 1-based."""
        self._check_fitted()
        events = getattr(events, "events", events)
        padded = pad(events, self.n)
        n = self.n
        out = []
        for i in range(len(padded) - n + 1):
            context = tuple(padded[i : i + n - 1])
            event = padded[i + n - 1]
            out.append(
                ScoredEvent(i + 1, event, self.event_score(context, event),
                            self.predict_event(context))
            )
        return out

    def is_normal_topk(self, context: Sequence[int], event: int, k: int = 8) -> bool:
        """Treat an event as normal when it ranks among the context's top-k
        successors by count. Unseen contexts are never normal."""
        if k < 1:
            raise ValueError("k must be >= 1")
        prediction = self.predict_event(context)
        if prediction.is_fallback:
            return False
        return prediction.rank_of(event) <= k

    def score(self, sequences: Iterable[Sequence[int]], y=None) -> float:
        """Next-event prediction accuracy over all scored positions."""
        correct = total = 0
        for seq in sequences:
            events = getattr(seq, "events", seq)
            actual = list(events) + [SEQUENCE_END]
            for predicted, truth in zip(self.predict_sequence(events), actual):
                correct += predicted == truth
            total += len(actual)
        if total == 0:
            raise ValueError("no predictions: empty test set")
        return correct / total

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        """Line-oriented model file; canonical ordering makes the bytes a pure
        function of the fitted state."""
        self._check_fitted()
        header = json.dumps({"n": self.n, "vocab_size": len(self.vocab_)}, sort_keys=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{_MODEL_MAGIC} {_MODEL_VERSION} {header}\n")
            for context in sorted(self.context_counts_):
                successors = self.context_counts_[context]
                cells = ",".join(f"{e}:{c}" for e, c in sorted(successors.items()))
                fh.write(" ".join(map(str, context)) + "\t" + cells + "\n")

    @classmethod
    def load(cls, path) -> "NGramModel":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            parts = header.split(" ", 2)
            if len(parts) != 3 or parts[0] != _MODEL_MAGIC:
                raise DataFormatError(f"not a model file: {path}")
            if parts[1] != _MODEL_VERSION:
                raise DataFormatError(f"unsupported model version {parts[1]!r}")
            try:
                meta = json.loads(parts[2])
                model = cls(n=meta["n"])
                declared_vocab = meta["vocab_size"]
            except (KeyError, TypeError, ValueError) as exc:
                raise DataFormatError(f"bad model header: {exc}") from exc

            counts: dict[Context, dict[int, int]] = {}
            for raw in fh:
                line = raw.rstrip("\n")
                fields = line.split("\t")
                if len(fields) != 2:
                    raise DataFormatError(f"malformed model line: {line!r}")
                try:
                    context = tuple(int(t) for t in fields[0].split(" "))
                    successors = {}
                    for cell in fields[1].split(","):
                        event, count = cell.split(":")
                        successors[int(event)] = int(count)
                except ValueError as exc:
                    raise DataFormatError(f"malformed model line: {line!r}") from exc
                if len(context) != model.n - 1:
                    raise DataFormatError(
                        f"context length {len(context)} does not match n={model.n}"
                    )
                counts[context] = successors
        rebuilt = model._from_counts(counts)
        if len(rebuilt.vocab_) != declared_vocab:
            raise DataFormatError(
                f"vocab size mismatch: header says {declared_vocab}, "
                f"file holds {len(rebuilt.vocab_)}"
            )
        return rebuilt

    def _from_counts(self, counts: dict[Context, dict[int, int]]) -> "NGramModel":
        self.context_counts_ = counts
        self.context_totals_ = {c: sum(s.values()) for c, s in counts.items()}
        self.winners_ = {c: _argmax_event(s) for c, s in counts.items()}
        global_counts: dict[int, int] = {}
        for successors in counts.values():
            for event, count in successors.items():
                global_counts[event] = global_counts.get(event, 0) + count
        self.global_counts_ = global_counts
        self.fallback_event_ = _argmax_event(global_counts) if global_counts else None
        self.trained_positions_ = sum(self.context_totals_.values())
        self.unique_ngrams_ = sum(len(s) for s in counts.values())
        self.vocab_ = frozenset(global_counts)
        return self

    # -- helpers -----------------------------------------------------------

    def _as_context(self, context: Sequence[int]) -> Context:
        context = tuple(context)
        if len(context) != self.n - 1:
            raise ValueError(f"context must hold exactly {self.n - 1} events")
        for e in context:
            if e != SEQUENCE_START and (e < 0 or e >= RESERVED_FLOOR):
                raise ValueError(f"context contains invalid event id {e}")
        return context


def _argmax_event(counts: Mapping[int, int]) -> int:
    # Highest count wins; equal counts go to the smallest event id.
    best_event = -1
    best_count = 0
    for event, count in counts.items():
        if count > best_count or (count == best_count and event < best_event):
            best_event, best_count = event, count
    return best_event


def merge(a: NGramModel, b: NGramModel) -> NGramModel:
    """Pointwise-sum two models trained with the same window size.

    merge(fit(S1), fit(S2)) equals fit(S1 + S2); this is the supported way
    to parallelize training across shards.
    """
    a._check_fitted()
    b._check_fitted()
    if a.n != b.n:
        raise ValueError(f"cannot merge models with n={a.n} and n={b.n}")
    counts: dict[Context, dict[int, int]] = {
        c: dict(s) for c, s in a.context_counts_.items()
    }
    for context, successors in b.context_counts_.items():
        merged = counts.get(context)
        if merged is None:
            counts[context] = dict(successors)
        else:
            for event, count in successors.items():
                merged[event] = merged.get(event, 0) + count
    return NGramModel(n=a.n)._from_counts(counts)
