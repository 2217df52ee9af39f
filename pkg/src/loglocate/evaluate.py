"""Evaluation protocol: next-event accuracy, constant baseline, per-sequence
wins/ties, window-size sweeps, and wall-clock timing of train/inference."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .base import SEQUENCE_END, EventSequence
from .ngram import NGramModel, _argmax_event


@dataclass
class EvalReport:
    """One (model, dataset, n) cell of a results table."""

    dataset_id: str
    model_name: str
    n: int
    accuracy: float
    correct: int
    total_predictions: int
    unique_ngrams: int
    train_seconds: float
    infer_seconds: float
    # (session_id, correct, total) per test sequence, in test order
    per_sequence: list[tuple[str, int, int]] = field(default_factory=list, repr=False)


@dataclass
class ComparisonReport:
    """Per-sequence accuracy duel; a tie means exactly equal accuracy."""

    per_sequence: list[tuple[str, int, int, int, int]]  # sid, corr_a, tot_a, corr_b, tot_b
    wins_a: int
    wins_b: int
    ties: int


class DummyPredictor(BaseEstimator):
    """Constant predictor emitting the training set's most frequent event
    (sequence termination counts as a candidate). The accuracy floor."""

    def fit(self, sequences: Iterable[Sequence[int]], y=None) -> "DummyPredictor":
        counts: dict[int, int] = {}
        for seq in sequences:
            events = getattr(seq, "events", seq)
            for e in events:
                counts[e] = counts.get(e, 0) + 1
            counts[SEQUENCE_END] = counts.get(SEQUENCE_END, 0) + 1
        if not counts:
            raise ValueError("empty training set")
        self.most_frequent_ = _argmax_event(counts)
        return self

    def predict_sequence(self, events: Sequence[int]) -> list[int]:
        if not hasattr(self, "most_frequent_"):
            raise NotFittedError("DummyPredictor is not fitted")
        events = getattr(events, "events", events)
        return [self.most_frequent_] * (len(events) + 1)


def time_phase(thunk: Callable, *args, **kwargs):
    """Run ``thunk`` and return (result, wall-clock seconds on a monotonic clock)."""
    start = time.perf_counter()
    result = thunk(*args, **kwargs)
    return result, time.perf_counter() - start


def _accuracy_by_sequence(predictor, sequences: Sequence[EventSequence]):
    """(correct, total) per sequence, deduplicating identical event lists so
    corpora of heavily repeated runs evaluate in one pass per distinct run."""
    cache: dict[tuple[int, ...], tuple[int, int]] = {}
    out = []
    for seq in sequences:
        events = tuple(seq.events)
        cell = cache.get(events)
        if cell is None:
            actual = list(events) + [SEQUENCE_END]
            predicted = predictor.predict_sequence(list(events))
            correct = sum(p == a for p, a in zip(predicted, actual))
            cell = cache[events] = (correct, len(actual))
        out.append((seq.session_id, cell[0], cell[1]))
    return out


def evaluate(
    predictor,
    test: Sequence[EventSequence],
    *,
    dataset_id: str = "",
    model_name: str = "",
    n: int = 0,
    unique_ngrams: int = 0,
    train_seconds: float = 0.0,
) -> EvalReport:
    """Accuracy over every scored position of every test sequence.

    The prediction pass is timed; corpus loading and parsing are not part of
    the measured inference cost.
    """
    if not test:
        raise ValueError("no predictions: empty test set")
    per_sequence, infer_seconds = time_phase(_accuracy_by_sequence, predictor, test)
    correct = sum(c for _, c, _ in per_sequence)
    total = sum(t for _, _, t in per_sequence)
    return EvalReport(
        dataset_id=dataset_id,
        model_name=model_name,
        n=n,
        accuracy=correct / total,
        correct=correct,
        total_predictions=total,
        unique_ngrams=unique_ngrams,
        train_seconds=train_seconds,
        infer_seconds=infer_seconds,
        per_sequence=per_sequence,
    )


def compare(predictor_a, predictor_b, test: Sequence[EventSequence]) -> ComparisonReport:
    """Per-sequence duel between two predictors on the same test set."""
    rows_a = _accuracy_by_sequence(predictor_a, test)
    rows_b = _accuracy_by_sequence(predictor_b, test)
    merged = [
        (sid, ca, ta, cb, tb)
        for (sid, ca, ta), (_, cb, tb) in zip(rows_a, rows_b)
    ]
    return _tally(merged)


def compare_rows(
    rows_a: Sequence[tuple[str, int, int, int]],
    rows_b: Sequence[tuple[str, int, int, int]],
) -> ComparisonReport:
    """Compare two prediction-file row sets (session_id, position, actual,
    predicted). Both must cover the same (session, position, actual) cells."""
    per_session_a = _fold_rows(rows_a)
    per_session_b = _fold_rows(rows_b)
    if set(per_session_a) != set(per_session_b):
        raise ValueError("prediction files cover different sessions")
    merged = []
    for sid, (ca, ta, cells_a) in per_session_a.items():
        cb, tb, cells_b = per_session_b[sid]
        if cells_a != cells_b:
            raise ValueError(f"prediction files disagree on session {sid!r}")
        merged.append((sid, ca, ta, cb, tb))
    return _tally(merged)


def _fold_rows(rows):
    folded: dict[str, list] = {}
    for sid, position, actual, predicted in rows:
        cell = folded.get(sid)
        if cell is None:
            cell = folded[sid] = [0, 0, set()]
        cell[0] += actual == predicted
        cell[1] += 1
        cell[2].add((position, actual))
    return folded


def _tally(merged) -> ComparisonReport:
    wins_a = wins_b = ties = 0
    for _, ca, ta, cb, tb in merged:
        # Exact rational comparison: ca/ta vs cb/tb without float rounding.
        lhs, rhs = ca * tb, cb * ta
        if lhs > rhs:
            wins_a += 1
        elif lhs < rhs:
            wins_b += 1
        else:
            ties += 1
    return ComparisonReport(merged, wins_a, wins_b, ties)


def sweep(
    train: Sequence[EventSequence],
    test: Sequence[EventSequence],
    n_values: Iterable[int],
    *,
    dataset_id: str = "",
) -> list[EvalReport]:
    """Train and evaluate one model per window size; one report row per n."""
    n_values = list(n_values)
    if not n_values:
        raise ValueError("empty window-size range")
    train_events = [s.events for s in train]
    reports = []
    for n in n_values:
        model, train_seconds = time_phase(NGramModel(n=n).fit, train_events)
        reports.append(
            evaluate(
                model,
                test,
                dataset_id=dataset_id,
                model_name="ngram",
                n=n,
                unique_ngrams=model.unique_ngrams_,
                train_seconds=train_seconds,
            )
        )
    return reports
