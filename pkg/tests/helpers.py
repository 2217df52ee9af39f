import random

from loglocate import EventSequence, Label


def random_corpus(rng: random.Random, max_events=50, vocab=6, max_sequences=4):
    """Small random corpus with a bounded total event count."""
    budget = rng.randint(0, max_events)
    sequences = []
    for i in range(rng.randint(1, max_sequences)):
        if budget <= 0:
            sequences.append([])
            continue
        length = rng.randint(0, budget)
        budget -= length
        sequences.append([rng.randrange(vocab) for _ in range(length)])
    return sequences


def as_labeled(sequences, prefix="s", label=Label.NORMAL):
    return [EventSequence(f"{prefix}{i}", list(seq), label) for i, seq in enumerate(sequences)]
