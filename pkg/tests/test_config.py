import pytest

from src.config import ModelConfig, TrainConfig, load_config, dump_config, configs_from_dict, parse_key_values
from src.exceptions import ConfigError


def test_defaults():
    model, train = ModelConfig(), TrainConfig()
    assert (model.vocab_size, model.embed_dim, model.hidden_dim, model.gate_hidden_dim) == (4000, 400, 500, 1000)
    assert model.srb_lambda == 0.0001
    assert model.cell_kind == 'lstm'
    assert model.attention_dim == 500
    assert (train.batch_size, train.learning_rate, train.betas, train.eps, train.clip_norm) == \
        (32, 0.001, (0.9, 0.999), 1e-8, 5.0)


def test_load_config(tmp_path):
    path = tmp_path / 'srb.conf'
    path.write_text('# tiny model\nvocab_size=20\nembed_dim = 8\nlambda=0.1\ncell_kind=gru\nuse_gate=false\n\n'
                    'batch_size=4\nbetas=0.8,0.99\nmin_score=3\ncorpus=data/train.tsv\n')
    model, train = load_config(str(path))
    assert model == ModelConfig(vocab_size=20, embed_dim=8, srb_lambda=0.1, cell_kind='gru', use_gate=False)
    assert train.batch_size == 4
    assert train.betas == (0.8, 0.99)
    assert train.min_score == 3
    assert train.corpus == 'data/train.tsv'


def test_dump_round_trip():
    model = ModelConfig(vocab_size=33, srb_lambda=0.123456789, use_attention=False, attn_dim=7)
    train = TrainConfig(seed=9, learning_rate=3e-4, dev_corpus='dev.tsv', min_score=3)
    assert configs_from_dict(parse_key_values(dump_config(model, train))) == (model, train)


@pytest.mark.parametrize("values", [
    {'hidden_size': '10'},
    {'hidden_dim': 'ten'},
    {'hidden_dim': '0'},
    {'srb_lambda': '-1'},
    {'cell_kind': 'rnn'},
    {'use_srb': 'maybe'},
    {'batch_size': '0'},
    {'learning_rate': '0'},
    {'clip_norm': '-5'},
])
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        configs_from_dict(values)


def test_line_without_equals():
    with pytest.raises(ConfigError):
        parse_key_values('vocab_size 20')


def test_hash_inside_a_value_is_kept():
    values = parse_key_values('  # dev split\ndev_corpus=data/#1.tsv\n')
    assert values == {'dev_corpus': 'data/#1.tsv'}
    _, train = configs_from_dict(values)
    assert train.dev_corpus == 'data/#1.tsv'
