import math

import pytest

from loglocate import NGramModel, merge, pad
from loglocate.base import SEQUENCE_END, SEQUENCE_START

from helpers import random_corpus
from oracle import (
    accuracy_oracle,
    global_most_frequent_oracle,
    occurrence_oracle,
    predict_oracle,
    probability_oracle,
    unique_ngrams_oracle,
)


class TestPad:
    def test_single_event_window_three(self):
        assert pad([2], 3) == [SEQUENCE_START, SEQUENCE_START, 2, SEQUENCE_END]

    def test_last_window_predicts_termination(self):
        padded = pad([5, 7], 3)
        assert tuple(padded[-3:]) == (5, 7, SEQUENCE_END)

    def test_empty_sequence_still_has_one_position(self):
        assert pad([], 2) == [SEQUENCE_START, SEQUENCE_END]

    def test_rejects_sentinels(self):
        with pytest.raises(ValueError):
            pad([1, SEQUENCE_END], 3)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            pad([1], 1)

    @pytest.mark.parametrize("length,n", [(0, 2), (1, 5), (7, 3)])
    def test_scored_positions_is_length_plus_one(self, length, n):
        padded = pad(list(range(length)), n)
        assert len(padded) - n + 1 == length + 1


class TestFit:
    def test_single_event_sequence(self):
        model = NGramModel(n=2).fit([[0]])
        assert model.context_counts_ == {
            (SEQUENCE_START,): {0: 1},
            (0,): {SEQUENCE_END: 1},
        }
        assert model.event_score((SEQUENCE_START,), 0).probability == 1.0

    def test_worked_example_100_of_which_10(self):
        # Context (1, 2) seen 100 times, followed by event 4 in 10 of them.
        train = [[1, 2, 4]] * 10 + [[1, 2, 5]] * 90
        model = NGramModel(n=3).fit(train)
        score = model.event_score((1, 2), 4)
        assert score == (10, 0.1)

    def test_empty_training_set_is_valid(self):
        model = NGramModel(n=3).fit([])
        assert model.trained_positions_ == 0
        assert model.event_score((1, 2), 3) == (0, 0.0)
        with pytest.raises(ValueError, match="untrained"):
            model.predict_event((1, 2))

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            NGramModel(n=1).fit([[1]])

    def test_count_conservation(self, rng):
        for _ in range(25):
            train = random_corpus(rng)
            n = rng.randint(2, 5)
            model = NGramModel(n=n).fit(train)
            assert model.trained_positions_ == sum(len(s) + 1 for s in train)
            assert sum(model.context_totals_.values()) == model.trained_positions_
            assert sum(model.global_counts_.values()) == model.trained_positions_

    def test_unique_ngrams_nondecreasing_in_n(self, rng):
        train = [[rng.randrange(5) for _ in range(rng.randint(10, 15))] for _ in range(4)]
        counts = [NGramModel(n=n).fit(train).unique_ngrams_ for n in range(2, 11)]
        assert counts == sorted(counts)


class TestPredict:
    def test_argmax_and_rank(self):
        model = NGramModel(n=2).fit([[0, 1], [0, 2], [0, 1], [0, 1]])
        prediction = model.predict_event((0,))
        assert prediction.predicted == 1
        assert not prediction.is_fallback
        assert prediction.rank_of(1) == 1
        assert prediction.rank_of(2) == 2
        assert prediction.rank_of(99) == math.inf

    def test_fallback_matches_most_frequent(self, rng):
        for _ in range(20):
            train = random_corpus(rng)
            if not any(train):
                continue
            n = rng.randint(2, 4)
            model = NGramModel(n=n).fit(train)
            prediction = model.predict_event(tuple(range(100, 100 + n - 1)))
            assert prediction.is_fallback
            assert prediction.predicted == global_most_frequent_oracle(train, n)

    def test_tie_breaks_to_smaller_id(self):
        model = NGramModel(n=2).fit([[0, 1], [0, 2]])
        assert model.predict_event((0,)).predicted == 1

    def test_context_length_checked(self):
        model = NGramModel(n=3).fit([[1, 2]])
        with pytest.raises(ValueError, match="exactly 2"):
            model.predict_event((1,))

    def test_vectorized_predict(self):
        model = NGramModel(n=2).fit([[0, 1], [0, 1]])
        assert list(model.predict([(0,), (1,)])) == [1, SEQUENCE_END]


class TestScore:
    def test_unseen_context_scores_zero(self):
        model = NGramModel(n=3).fit([[1, 2, 3]])
        assert model.event_score((7, 8), 9) == (0, 0.0)

    def test_seen_context_unseen_event(self):
        model = NGramModel(n=2).fit([[1, 2]])
        assert model.event_score((1,), 9) == (0, 0.0)

    def test_low_count_does_not_imply_low_probability(self):
        # A rare transition into a region can be followed by near-certain
        # transitions within it: (984, <0.005) then (977, >=0.99).
        train = (
            [[10, 20, 30]] * 977
            + [[10, 20, 40]] * 7
            + [[10, 11]] * 199_016
        )
        model = NGramModel(n=2).fit(train)
        scored = model.score_sequence([10, 20, 30])
        rare_region_entry = scored[1]
        assert rare_region_entry.score.occurrence == 984
        assert rare_region_entry.score.probability < 0.005
        inside_region = scored[2]
        assert inside_region.score.occurrence == 977
        assert inside_region.score.probability >= 0.99

    def test_score_sequence_shape_and_bounds(self, rng):
        train = random_corpus(rng)
        model = NGramModel(n=3).fit(train)
        seq = [rng.randrange(6) for _ in range(9)]
        scored = model.score_sequence(seq)
        assert len(scored) == len(seq) + 1
        assert [s.position for s in scored] == list(range(1, len(seq) + 2))
        assert scored[-1].event == SEQUENCE_END
        for s in scored:
            assert 0.0 <= s.score.probability <= 1.0
            assert s.score.occurrence >= 0

    def test_training_sequence_scores_all_positive(self, rng):
        train = [seq for seq in random_corpus(rng) if seq]
        if not train:
            train = [[1, 2, 3]]
        model = NGramModel(n=4).fit(train)
        for s in model.score_sequence(train[0]):
            assert s.score.occurrence >= 1

    def test_probability_normalizes_per_context(self, rng):
        for _ in range(10):
            train = random_corpus(rng)
            model = NGramModel(n=rng.randint(2, 4)).fit(train)
            for context, successors in model.context_counts_.items():
                total = sum(model.event_score(context, e).probability for e in successors)
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_prediction_consistent_with_scores(self, rng):
        train = random_corpus(rng)
        model = NGramModel(n=3).fit(train)
        for context, successors in model.context_counts_.items():
            best = max(successors.values())
            predicted = model.predict_event(context).predicted
            assert successors[predicted] == best


class TestTopK:
    def test_predicted_event_is_always_normal(self):
        model = NGramModel(n=2).fit([[0, 1, 2, 1, 0]])
        for context in model.context_counts_:
            predicted = model.predict_event(context).predicted
            assert model.is_normal_topk(context, predicted, k=1)

    def test_small_successor_set_all_normal(self):
        model = NGramModel(n=2).fit([[0, 1], [0, 2], [0, 3]])
        for event in (1, 2, 3):
            assert model.is_normal_topk((0,), event, k=8)
        assert not model.is_normal_topk((0,), 4, k=8)

    def test_unseen_context_never_normal(self):
        model = NGramModel(n=2).fit([[0, 1]])
        assert not model.is_normal_topk((5,), 1, k=100)

    def test_k1_equals_argmax(self, rng):
        for _ in range(10):
            train = random_corpus(rng)
            model = NGramModel(n=2).fit(train)
            for context in model.context_counts_:
                predicted = model.predict_event(context).predicted
                for event in range(6):
                    assert model.is_normal_topk(context, event, k=1) == (event == predicted)

    def test_rejects_bad_k(self):
        model = NGramModel(n=2).fit([[0]])
        with pytest.raises(ValueError):
            model.is_normal_topk((0,), 0, k=0)

    def test_rank_matches_sorted_successor_order(self, rng):
        from oracle import successor_counts_oracle

        for _ in range(15):
            train = random_corpus(rng)
            n = rng.randint(2, 4)
            model = NGramModel(n=n).fit(train)
            for context in model.context_counts_:
                counts = successor_counts_oracle(train, n, context)
                ordering = sorted(counts, key=lambda e: (-counts[e], e))
                prediction = model.predict_event(context)
                for expected_rank, event in enumerate(ordering, start=1):
                    assert prediction.rank_of(event) == expected_rank
                    for k in (1, 2, 8):
                        assert model.is_normal_topk(context, event, k=k) == (
                            expected_rank <= k
                        )


class TestMerge:
    def test_identity(self):
        a = NGramModel(n=3).fit([[1, 2, 3], [1, 2]])
        empty = NGramModel(n=3).fit([])
        merged = merge(a, empty)
        assert merged.context_counts_ == a.context_counts_
        assert merged.winners_ == a.winners_

    def test_commutative(self, rng):
        for _ in range(10):
            a = NGramModel(n=2).fit(random_corpus(rng))
            b = NGramModel(n=2).fit(random_corpus(rng))
            ab, ba = merge(a, b), merge(b, a)
            assert ab.context_counts_ == ba.context_counts_
            assert ab.winners_ == ba.winners_

    def test_equals_joint_training(self, rng):
        for _ in range(20):
            s1, s2 = random_corpus(rng), random_corpus(rng)
            n = rng.randint(2, 4)
            merged = merge(NGramModel(n=n).fit(s1), NGramModel(n=n).fit(s2))
            joint = NGramModel(n=n).fit(s1 + s2)
            assert merged.context_counts_ == joint.context_counts_
            assert merged.context_totals_ == joint.context_totals_
            assert merged.global_counts_ == joint.global_counts_
            assert merged.winners_ == joint.winners_
            assert merged.vocab_ == joint.vocab_

    def test_rejects_mismatched_n(self):
        with pytest.raises(ValueError):
            merge(NGramModel(n=2).fit([[1]]), NGramModel(n=3).fit([[1]]))


class TestPersistence:
    def test_empty_model_round_trip(self, tmp_path):
        model = NGramModel(n=4).fit([])
        path = tmp_path / "empty.model"
        model.save(path)
        loaded = NGramModel.load(path)
        assert loaded.n == 4
        assert loaded.context_counts_ == {}

    def test_tiny_model_round_trip(self, tmp_path):
        model = NGramModel(n=2).fit([[0, 1, 0], [2]])
        path = tmp_path / "tiny.model"
        model.save(path)
        loaded = NGramModel.load(path)
        assert loaded.context_counts_ == model.context_counts_
        assert loaded.winners_ == model.winners_
        assert loaded.fallback_event_ == model.fallback_event_

    def test_fuzzed_round_trip_bit_exact(self, rng, tmp_path):
        for i in range(15):
            model = NGramModel(n=rng.randint(2, 5)).fit(random_corpus(rng))
            first, second = tmp_path / f"a{i}", tmp_path / f"b{i}"
            model.save(first)
            NGramModel.load(first).save(second)
            assert first.read_bytes() == second.read_bytes()

    def test_loaded_model_scores_identically(self, rng, tmp_path):
        train = random_corpus(rng)
        model = NGramModel(n=3).fit(train)
        path = tmp_path / "m"
        model.save(path)
        loaded = NGramModel.load(path)
        for _ in range(50):
            context = (rng.randrange(8), rng.randrange(8))
            event = rng.randrange(8)
            assert loaded.event_score(context, event) == model.event_score(context, event)

    def test_corrupt_file_rejected(self, tmp_path):
        path = tmp_path / "bad"
        path.write_text("#ngram v999 {}\n")
        with pytest.raises(Exception, match="version"):
            NGramModel.load(path)
        path.write_text("not a model\n")
        with pytest.raises(Exception, match="model"):
            NGramModel.load(path)


class TestConcurrentReads:
    def test_fitted_model_is_safe_for_parallel_scoring(self, rng):
        from concurrent.futures import ThreadPoolExecutor

        train = [[rng.randrange(5) for _ in range(30)] for _ in range(10)]
        model = NGramModel(n=3).fit(train)
        queries = [[rng.randrange(5) for _ in range(20)] for _ in range(40)]
        expected = [model.predict_sequence(q) for q in queries]
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(model.predict_sequence, queries))
        assert results == expected


class TestOracleEquivalence:
    def test_counts_probabilities_predictions_accuracy(self, rng):
        for _ in range(100):
            train = random_corpus(rng)
            test = random_corpus(rng, max_events=20)
            n = rng.randint(2, 5)
            model = NGramModel(n=n).fit(train)
            assert model.unique_ngrams_ == unique_ngrams_oracle(train, n)

            for _ in range(5):
                context = tuple(rng.randrange(6) for _ in range(n - 1))
                event = rng.randrange(6)
                expected_occ = occurrence_oracle(train, n, context, event)
                expected_prob = probability_oracle(train, n, context, event)
                assert model.event_score(context, event) == (expected_occ, expected_prob)

                if any(train):
                    expected_pred, expected_fb = predict_oracle(train, n, context)
                    got = model.predict_event(context)
                    assert (got.predicted, got.is_fallback) == (expected_pred, expected_fb)

            if any(train):
                correct, total = accuracy_oracle(train, n, test)
                assert model.score(test) == correct / total
