import numpy as np
import pytest

from lstm_baseline import DataError, Sequence, read_seqfile, write_seqfile
from lstm_baseline.data import EOS_PUBLIC_ID, build_windows, stack_windows, to_public_id


class TestSeqfile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "x.seq"
        sequences = [
            Sequence("a", "Normal", [0, 1, 2]),
            Sequence("b", "Anomaly", []),
        ]
        write_seqfile(path, sequences, vocab_size=3)
        loaded, vocab = read_seqfile(path)
        assert vocab == 3
        assert [(s.session_id, s.label, s.events) for s in loaded] == [
            ("a", "Normal", [0, 1, 2]),
            ("b", "Anomaly", []),
        ]

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "x.seq"
        path.write_text("nope\n")
        with pytest.raises(DataError, match="sequence file"):
            read_seqfile(path)

    def test_out_of_vocab_id_is_data_error(self, tmp_path):
        path = tmp_path / "x.seq"
        path.write_text("#seqfile v1 vocab=2\nrun\tNormal\t0 7\n")
        with pytest.raises(DataError, match="vocab"):
            read_seqfile(path)

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "x.seq"
        path.write_text("#seqfile v1 vocab=2\nrun\tWeird\t0\n")
        with pytest.raises(DataError, match="label"):
            read_seqfile(path)


class TestWindows:
    def test_count_is_length_plus_one(self):
        x, y = build_windows([3, 1, 4], n=3, vocab_size=5)
        assert x.shape == (4, 2)
        assert y.shape == (4,)

    def test_padding_indices(self):
        x, y = build_windows([2], n=4, vocab_size=6)
        sos, eos = 7, 6
        assert x.tolist() == [[sos, sos, sos], [sos, sos, 2]]
        assert y.tolist() == [2, eos]

    def test_stacked_row_count(self):
        sequences = [
            Sequence("a", "Normal", [0, 1, 2]),
            Sequence("b", "Normal", []),
            Sequence("c", "Normal", [4]),
        ]
        x, y = stack_windows(sequences, n=5, vocab_size=5)
        assert len(x) == len(y) == sum(len(s.events) + 1 for s in sequences)
        assert x.dtype == np.int64

    def test_public_id_mapping(self):
        assert to_public_id(3, vocab_size=8) == 3
        assert to_public_id(8, vocab_size=8) == EOS_PUBLIC_ID
