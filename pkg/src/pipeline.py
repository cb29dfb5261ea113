"""File-level commands behind the CLI: train, summarize, evaluate, ablate, rouge."""
import os
import logging
from dataclasses import replace
from typing import List, Optional, Tuple

from .config import ModelConfig, TrainConfig, load_config
from .data_ingestion.corpus import load_raw_records, encode_corpus, load_corpus, read_lines
from .data_ingestion.vocabulary import Vocabulary, build_vocabulary, load_vocabulary, save_vocabulary, encode, decode
from .evaluation.rouge import corpus_rouge, format_report
from .exceptions import ConsistencyError
from .logging_functions import timeit
from .model.checkpoint import load_checkpoint
from .model.decoding import DecodeOptions, summarize
from .model.model_output import get_evaluation_row
from .training.trainer import train, evaluate, ablate, TrainResult, EvaluationResult


def get_configs(config_path: Optional[str]) -> Tuple[ModelConfig, TrainConfig]:
    if config_path is None:
        return ModelConfig().validate(), TrainConfig().validate()
    return load_config(config_path)


def get_vocabulary(vocab_path: Optional[str], records, max_size: int) -> Vocabulary:
    """Loads the vocabulary at vocab_path, or builds it from the records' texts and summaries and saves it there"""
    if vocab_path is not None and os.path.exists(vocab_path):
        logging.debug(f'GOT VOCABULARY: FROM FILE {vocab_path}')
        return load_vocabulary(vocab_path, max_size)

    vocab = build_vocabulary((text for r in records for text in (r.text, r.summary)), max_size)
    if vocab_path is not None:
        save_vocabulary(vocab, vocab_path)
        logging.debug(f'VOCABULARY SAVED TO FILE {vocab_path}')
    return vocab


def _fit_vocab_size(model_config: ModelConfig, vocab: Vocabulary) -> ModelConfig:
    if len(vocab) > model_config.vocab_size:
        raise ConsistencyError(f'vocabulary has {len(vocab)} entries, config allows {model_config.vocab_size}')
    if len(vocab) != model_config.vocab_size:
        logging.info(f'VOCAB SIZE SET TO {len(vocab)} (config {model_config.vocab_size})')
    return replace(model_config, vocab_size=len(vocab))


def decode_options(train_config: TrainConfig, beam: int = None, max_len: int = None) -> DecodeOptions:
    return DecodeOptions(beam if beam is not None else train_config.beam,
                         max_len if max_len is not None else train_config.max_len,
                         train_config.length_normalize)


def _prepare_training(corpus_path: str, vocab_path: Optional[str], config_path: Optional[str], seed: int = None):
    model_config, train_config = get_configs(config_path)
    if seed is not None:
        train_config = replace(train_config, seed=seed)

    records = load_raw_records(corpus_path, train_config.min_score)
    vocab = get_vocabulary(vocab_path, records, model_config.vocab_size)
    model_config = _fit_vocab_size(model_config, vocab)
    corpus = encode_corpus(vocab, records, 'train', train_config.max_source_len, train_config.max_summary_len)
    return model_config, train_config, vocab, corpus


@timeit
def run_train(corpus_path: str, vocab_path: str, config_path: str, out_dir: str, seed: int = None,
              resume: str = None) -> TrainResult:
    """Trains from a corpus file, writing checkpoints, train_log.tsv and training_curves.png to out_dir"""
    model_config, train_config, vocab, corpus = _prepare_training(corpus_path, vocab_path, config_path, seed)

    dev_corpus = None
    if train_config.dev_corpus:
        dev_corpus = load_corpus(train_config.dev_corpus, vocab, 'dev', train_config.min_score,
                                 train_config.max_source_len, train_config.max_summary_len)

    os.makedirs(out_dir, exist_ok=True)
    return train(corpus, model_config, train_config, vocab, out_dir, dev_corpus, resume)


def _load_model(checkpoint_dir: str):
    checkpoint = load_checkpoint(checkpoint_dir)
    if checkpoint.vocab is None:
        raise ConsistencyError(f'{checkpoint_dir} has no vocabulary')
    return checkpoint


@timeit
def run_summarize(checkpoint_dir: str, input_path: str, beam: int = None, max_len: int = None) -> List[str]:
    """Summarizes every non-empty line of input_path"""
    checkpoint = _load_model(checkpoint_dir)
    options = decode_options(TrainConfig(), beam, max_len)
    max_source_len = TrainConfig().max_source_len

    sources = [line.strip() for line in read_lines(input_path) if line.strip()]

    return [decode(checkpoint.vocab,
                   summarize(encode(checkpoint.vocab, text[:max_source_len]), checkpoint.params, checkpoint.config,
                             options))
            for text in sources]


@timeit
def run_evaluate(checkpoint_dir: str, corpus_path: str, config_path: str = None, beam: int = None,
                 max_len: int = None) -> Tuple[EvaluationResult, str]:
    """Scores a checkpoint on a test corpus (score >= 3 records), returns the result and its printable report"""
    checkpoint = _load_model(checkpoint_dir)
    _, train_config = get_configs(config_path)
    corpus = load_corpus(corpus_path, checkpoint.vocab, 'test', train_config.min_score,
                         train_config.max_source_len, train_config.max_summary_len)

    result = evaluate(corpus, checkpoint.params, checkpoint.config, decode_options(train_config, beam, max_len),
                      train_config.micro_average)
    text = (format_report(result.report)
            + f'relevance={result.relevance!r}\n'
            + get_evaluation_row(os.path.basename(os.path.normpath(checkpoint_dir)), result.report) + '\n')
    return result, text


@timeit
def run_ablate(corpus_path: str, out_dir: str, config_path: str = None, vocab_path: str = None,
               eval_corpus_path: str = None):
    """Trains and scores the four ablation variants, writing ablation.tsv to out_dir"""
    model_config, train_config, vocab, corpus = _prepare_training(corpus_path, vocab_path, config_path)
    eval_corpus = None
    if eval_corpus_path is not None:
        eval_corpus = load_corpus(eval_corpus_path, vocab, 'test', train_config.min_score,
                                  train_config.max_source_len, train_config.max_summary_len)

    os.makedirs(out_dir, exist_ok=True)
    return ablate(corpus, model_config, train_config, vocab, eval_corpus, out_dir, decode_options(train_config))


def run_rouge(candidates_path: str, references_path: str, micro: bool = False) -> str:
    """Scores line-aligned candidate and reference files character by character"""
    candidates = read_lines(candidates_path)
    references = read_lines(references_path)
    if len(candidates) != len(references):
        raise ConsistencyError(f'{len(candidates)} candidates but {len(references)} references')

    return format_report(corpus_rouge(list(zip(candidates, references)), micro))
