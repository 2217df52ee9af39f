import pytest

from lstm_baseline import write_seqfile

from toy_corpus import toy_chain_corpus


@pytest.fixture
def toy_seqfile(tmp_path):
    path = tmp_path / "toy.seq"
    write_seqfile(path, toy_chain_corpus(30, 40, 8, seed=3), vocab_size=8)
    return path
