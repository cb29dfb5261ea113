from collections import OrderedDict
import numpy as np
import pytest

from src.config import ModelConfig, TrainConfig
from src.data_ingestion.corpus import CorpusSplit, TextSummaryPair
from src.model.params import from_arrays, param_shapes

# small enough for finite differences over every parameter
TINY = ModelConfig(vocab_size=20, embed_dim=8, hidden_dim=12, gate_hidden_dim=16, srb_lambda=0.1)


def random_params(config: ModelConfig, seed: int = 0, scale: float = 0.5):
    """Parameters drawn uniform(-scale, scale), biases included, so no unit sits at a trivial point"""
    rng = np.random.default_rng(seed)
    return from_arrays(OrderedDict((name, rng.uniform(-scale, scale, size=shape))
                                   for name, shape in param_shapes(config).items()))


def random_ids(rng: np.random.Generator, vocab_size: int, low: int = 1, high: int = 6):
    """Non-reserved ids (>= 4) of random length in [low, high]"""
    return tuple(int(i) for i in rng.integers(4, vocab_size, size=rng.integers(low, high + 1)))


def copy_task(n_pairs: int = 50, alphabet: int = 6, source_len=(6, 9), summary_len: int = 5,
              seed: int = 0) -> CorpusSplit:
    """Synthetic corpus whose summary is the first summary_len characters of the source"""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        source = tuple(int(i) for i in rng.integers(4, 4 + alphabet, size=rng.integers(*source_len)))
        pairs.append(TextSummaryPair(source, source[:summary_len]))
    return CorpusSplit(pairs, 'train')


@pytest.fixture
def tiny_config():
    return TINY


@pytest.fixture
def tiny_pair():
    return TextSummaryPair((5, 9, 7, 12), (9, 14, 6), 4)


@pytest.fixture
def copy_corpus():
    return copy_task()


@pytest.fixture
def fast_train_config():
    return TrainConfig(batch_size=4, learning_rate=0.01, epochs=2, seed=3)
