import os
import pytest

from src.constants import FINAL_CHECKPOINT_DIR, TRAIN_LOG_FILE, VOCAB_FILE
from src.data_ingestion.corpus import RawRecord
from src.data_ingestion.vocabulary import load_vocabulary
from src.evaluation.rouge import parse_report
from src.exceptions import ConsistencyError
from src.pipeline import run_train, run_summarize, run_evaluate, run_rouge, get_vocabulary, decode_options
from src.config import TrainConfig

CORPUS = ['5\t上海今天天气晴朗气温回升\t上海天气晴',
          '4\t航班上有乘客吸烟机组报警\t乘客吸烟',
          '2\t互联网公司发布新款手机\t新手机',
          '3\t北京地铁新线路今天开通\t地铁开通',
          '\t银行下调贷款利率\t银行降息']

CONFIG = """# tiny run
vocab_size=200
embed_dim=6
hidden_dim=8
gate_hidden_dim=10
lambda=0.1
batch_size=2
epochs=1
seed=5
beam=2
max_len=6
"""


@pytest.fixture
def files(tmp_path):
    corpus = tmp_path / 'train.tsv'
    corpus.write_text('\n'.join(CORPUS) + '\n', encoding='utf-8')
    config = tmp_path / 'tiny.conf'
    config.write_text(CONFIG)
    return tmp_path, str(corpus), str(config)


@pytest.fixture
def trained(files):
    tmp_path, corpus, config = files
    out = tmp_path / 'run'
    result = run_train(corpus, str(tmp_path / 'vocab.tsv'), config, str(out))
    return tmp_path, corpus, config, out, result


def test_run_train(trained):
    tmp_path, _, _, out, result = trained
    vocab = load_vocabulary(str(tmp_path / 'vocab.tsv'))

    # 5 records, batch 2, one epoch
    assert len(result.records) == 3
    assert os.path.exists(out / TRAIN_LOG_FILE)
    assert load_vocabulary(str(out / FINAL_CHECKPOINT_DIR / VOCAB_FILE)) == vocab
    manifest = (out / FINAL_CHECKPOINT_DIR / 'manifest.txt').read_text()
    # vocab_size follows the realised vocabulary
    assert f'vocab_size={len(vocab)}' in manifest


def test_run_summarize(trained):
    tmp_path, _, _, out, _ = trained
    inputs = tmp_path / 'input.txt'
    inputs.write_text('上海天气晴朗\n\n乘客吸烟\n', encoding='utf-8')

    summaries = run_summarize(str(out / FINAL_CHECKPOINT_DIR), str(inputs), beam=1, max_len=4)
    assert len(summaries) == 2
    assert all(len(s) <= 4 for s in summaries)
    assert summaries == run_summarize(str(out / FINAL_CHECKPOINT_DIR), str(inputs), beam=1, max_len=4)


def test_run_evaluate(trained):
    _, corpus, config, out, _ = trained
    result, text = run_evaluate(str(out / FINAL_CHECKPOINT_DIR), corpus, config)

    # test split keeps the records scored 3 and up
    assert result.report.pair_count == 3
    assert parse_report(text) == result.report
    assert text.splitlines()[-1].startswith('final\t')


def test_vocabulary_too_large_for_config(trained):
    tmp_path, corpus, _, _, _ = trained
    small = tmp_path / 'small.conf'
    small.write_text(CONFIG.replace('vocab_size=200', 'vocab_size=10'))
    with pytest.raises(ConsistencyError):
        run_train(corpus, str(tmp_path / 'vocab.tsv'), str(small), str(tmp_path / 'small_run'))


def test_small_config_limits_a_fresh_vocabulary(files):
    tmp_path, corpus, _ = files
    small = tmp_path / 'small.conf'
    small.write_text(CONFIG.replace('vocab_size=200', 'vocab_size=10'))
    result = run_train(corpus, None, str(small), str(tmp_path / 'run'))
    assert result.params['embedding'].shape == (10, 6)


def test_existing_vocabulary_is_reused(tmp_path):
    path = str(tmp_path / 'vocab.tsv')
    built = get_vocabulary(path, [RawRecord(3, 'abc', 'ab', 1)], 50)
    assert os.path.exists(path)
    assert get_vocabulary(path, [RawRecord(3, 'xyz', 'xy', 1)], 50) == built


def test_decode_options_override():
    options = decode_options(TrainConfig(beam=3, max_len=9, length_normalize=True), beam=1)
    assert (options.beam, options.max_len, options.length_normalize) == (1, 9, True)


def test_run_rouge(tmp_path):
    candidates, references = tmp_path / 'cand.txt', tmp_path / 'ref.txt'
    candidates.write_text('abc\n上海天气\n', encoding='utf-8')
    references.write_text('abc\n上海天气晴\n', encoding='utf-8')

    report = parse_report(run_rouge(str(candidates), str(references)))
    assert report.pair_count == 2
    assert report.rouge1.precision == 1.
    assert report.rouge1.recall == pytest.approx((1 + 4 / 5) / 2)


def test_run_rouge_misaligned(tmp_path):
    (tmp_path / 'cand.txt').write_text('a\nb\n')
    (tmp_path / 'ref.txt').write_text('a\n')
    with pytest.raises(ConsistencyError):
        run_rouge(str(tmp_path / 'cand.txt'), str(tmp_path / 'ref.txt'))
