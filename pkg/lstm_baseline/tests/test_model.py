import collections

import pytest
import torch

from lstm_baseline import LstmConfig, Sequence, predict_to_file, read_predictions, train_model, write_seqfile
from lstm_baseline.data import EOS_PUBLIC_ID, stack_windows
from lstm_baseline.train import load_artifact

FAST = LstmConfig(window_n=3, epochs=25, batch_size=16, seed=11, patience=8)


def memorizable_seqfile(tmp_path, copies=30):
    path = tmp_path / "memo.seq"
    write_seqfile(path, [Sequence(f"s{i}", "Normal", [0, 1]) for i in range(copies)], 2)
    return path


class TestTraining:
    def test_memorizes_single_repeated_sequence(self, tmp_path):
        seqfile = memorizable_seqfile(tmp_path)
        train_model(seqfile, tmp_path / "m.pt", tmp_path / "m.log", FAST)
        predict_to_file(tmp_path / "m.pt", seqfile, tmp_path / "p.csv")
        rows = read_predictions(tmp_path / "p.csv")
        assert all(actual == predicted for _, _, actual, predicted in rows)

    def test_training_log_format(self, tmp_path):
        seqfile = memorizable_seqfile(tmp_path)
        train_model(seqfile, tmp_path / "m.pt", tmp_path / "m.log", FAST)
        lines = (tmp_path / "m.log").read_text().splitlines()
        assert lines[0] == "epoch,loss,val_accuracy"
        assert len(lines) >= 2
        epoch, loss, val = lines[1].split(",")
        assert int(epoch) == 1 and float(loss) > 0 and 0 <= float(val) <= 1

    def test_same_seed_reproduces_run(self, tmp_path, toy_seqfile):
        config = LstmConfig(window_n=3, epochs=4, batch_size=32, seed=5)
        first = train_model(toy_seqfile, tmp_path / "a.pt", tmp_path / "a.log", config)
        second = train_model(toy_seqfile, tmp_path / "b.pt", tmp_path / "b.log", config)
        assert first == second
        assert (tmp_path / "a.log").read_bytes() == (tmp_path / "b.log").read_bytes()

    def test_requires_normal_sequences(self, tmp_path):
        path = tmp_path / "empty.seq"
        write_seqfile(path, [Sequence("a", "Anomaly", [0])], 2)
        with pytest.raises(Exception, match="Normal"):
            train_model(path, tmp_path / "m.pt", tmp_path / "m.log", FAST)

    def test_beats_constant_baseline_on_memorizable_data(self, tmp_path, toy_seqfile):
        from lstm_baseline import read_seqfile

        config = LstmConfig(window_n=3, epochs=20, batch_size=32, seed=5, patience=6)
        train_model(toy_seqfile, tmp_path / "m.pt", tmp_path / "m.log", config)
        predict_to_file(tmp_path / "m.pt", toy_seqfile, tmp_path / "p.csv")
        rows = read_predictions(tmp_path / "p.csv")
        lstm_accuracy = sum(a == p for _, _, a, p in rows) / len(rows)

        sequences, _ = read_seqfile(toy_seqfile)
        counts = collections.Counter()
        for seq in sequences:
            counts.update(seq.events)
            counts[EOS_PUBLIC_ID] += 1
        constant = counts.most_common(1)[0][0]
        dummy_accuracy = sum(a == constant for _, _, a, _ in rows) / len(rows)
        assert lstm_accuracy >= dummy_accuracy

    def test_artifact_round_trip(self, tmp_path):
        seqfile = memorizable_seqfile(tmp_path)
        train_model(seqfile, tmp_path / "m.pt", tmp_path / "m.log", FAST)
        model, config, vocab = load_artifact(tmp_path / "m.pt")
        assert vocab == 2
        assert config.window_n == FAST.window_n

    def test_bad_artifact_rejected(self, tmp_path):
        torch.save({"format": "other"}, tmp_path / "junk.pt")
        with pytest.raises(Exception, match="artifact"):
            load_artifact(tmp_path / "junk.pt")


class TestGoldenRun:
    def test_training_fixture_matches_committed_predictions(self, tmp_path):
        import pathlib

        data = pathlib.Path(__file__).parent / "data"
        config = LstmConfig(window_n=3, epochs=40, batch_size=16, seed=11, patience=12)
        train_model(data / "fixture.seq", tmp_path / "m.pt", tmp_path / "m.log", config)
        predict_to_file(tmp_path / "m.pt", data / "fixture.seq", tmp_path / "p.csv")
        assert (tmp_path / "p.csv").read_bytes() == (data / "golden_predictions.csv").read_bytes()


class TestPredict:
    def test_row_count_is_sum_of_lengths_plus_one(self, tmp_path, toy_seqfile):
        from lstm_baseline import read_seqfile

        config = LstmConfig(window_n=3, epochs=2, batch_size=64, seed=5)
        train_model(toy_seqfile, tmp_path / "m.pt", tmp_path / "m.log", config)
        rows = predict_to_file(tmp_path / "m.pt", toy_seqfile, tmp_path / "p.csv")
        sequences, _ = read_seqfile(toy_seqfile)
        assert rows == sum(len(s.events) + 1 for s in sequences)

    def test_vocab_mismatch_is_data_error(self, tmp_path, toy_seqfile):
        config = LstmConfig(window_n=3, epochs=1, seed=5)
        train_model(toy_seqfile, tmp_path / "m.pt", tmp_path / "m.log", config)
        other = tmp_path / "other.seq"
        write_seqfile(other, [Sequence("x", "Normal", [0])], vocab_size=3)
        with pytest.raises(Exception, match="vocab mismatch"):
            predict_to_file(tmp_path / "m.pt", other, tmp_path / "p.csv")

    def test_distribution_sums_to_one(self, tmp_path, toy_seqfile):
        from lstm_baseline import read_seqfile

        config = LstmConfig(window_n=3, epochs=2, seed=5)
        train_model(toy_seqfile, tmp_path / "m.pt", tmp_path / "m.log", config)
        model, cfg, vocab = load_artifact(tmp_path / "m.pt")
        sequences, _ = read_seqfile(toy_seqfile)
        x, _ = stack_windows(sequences[:3], cfg.window_n, vocab)
        probabilities = model.predict_proba(torch.from_numpy(x))
        sums = probabilities.sum(dim=-1)
        assert torch.allclose(sums, torch.ones_like(sums), atol=1e-5)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LstmConfig(window_n=1)
        with pytest.raises(ValueError):
            LstmConfig(val_fraction=1.0)
        with pytest.raises(ValueError):
            LstmConfig(lstm_layers=0)
