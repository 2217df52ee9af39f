"""Seeded Markov-chain corpora for benchmarks and fixtures.

Long-run stability-test logs are proprietary, so benchmark-scale inputs are
generated instead: a first-order Markov chain over a small event vocabulary
with a dominant successor per state, which gives sequences that are largely
predictable but never trivially so. An "anomaly" run swaps in a different
chain for a window of the sequence.
"""

from __future__ import annotations

import numpy as np

from .base import EventSequence, Label


def _transition_rows(vocab_size: int, rng: np.random.Generator) -> np.ndarray:
    """Cumulative transition rows: per state, four successors weighted
    0.70/0.20/0.07/0.03 so roughly 70% of steps are the modal transition."""
    weights = np.array([0.70, 0.20, 0.07, 0.03])
    cumulative = np.zeros((vocab_size, vocab_size))
    for state in range(vocab_size):
        successors = rng.choice(vocab_size, size=4, replace=False)
        row = np.zeros(vocab_size)
        row[successors] = weights
        cumulative[state] = np.cumsum(row)
    return cumulative


def _walk(cumulative: np.ndarray, length: int, start: int, rng: np.random.Generator) -> list[int]:
    draws = rng.random(length)
    out = []
    state = start
    for u in draws:
        state = int(np.searchsorted(cumulative[state], u, side="right"))
        out.append(state)
    return out


def markov_corpus(
    n_sequences: int = 100,
    mean_length: int = 10_000,
    vocab_size: int = 60,
    seed: int = 7,
    length_jitter: int = 500,
    session_prefix: str = "run",
) -> list[EventSequence]:
    """Normal-labeled corpus of long runs drawn from one seeded chain."""
    rng = np.random.default_rng(seed)
    cumulative = _transition_rows(vocab_size, rng)
    sequences = []
    for i in range(n_sequences):
        length = mean_length + int(rng.integers(-length_jitter, length_jitter + 1))
        start = int(rng.integers(vocab_size))
        events = _walk(cumulative, length, start, rng)
        sequences.append(EventSequence(f"{session_prefix}-{i:04d}", events, Label.NORMAL))
    return sequences


def anomaly_run(
    length: int = 65_000,
    vocab_size: int = 60,
    seed: int = 7,
    anomaly_start: float = 0.55,
    anomaly_length: int = 6_000,
    session_id: str = "anomaly-run",
) -> EventSequence:
    """One long run from the normal chain with a window generated by a
    different chain spliced in, so scores collapse inside the window."""
    rng = np.random.default_rng(seed)
    normal = _transition_rows(vocab_size, rng)
    deviant = _transition_rows(vocab_size, np.random.default_rng(seed + 1))

    begin = int(length * anomaly_start)
    end = min(length, begin + anomaly_length)
    events = _walk(normal, begin, int(rng.integers(vocab_size)), rng)
    events += _walk(deviant, end - begin, events[-1] if events else 0, rng)
    events += _walk(normal, length - end, events[-1] if events else 0, rng)
    return EventSequence(session_id, events, Label.ANOMALY)
