"""Training loop, corpus-level evaluation and the ablation harness."""
import os
import math
import time
import logging
from dataclasses import replace
from typing import Dict, List, NamedTuple, Optional, Sequence
import numpy as np
import pandas as pd

from ..autodiff import scale
from ..config import ModelConfig, TrainConfig
from ..constants import (
    TRAIN_LOGGER, CHECKPOINT_DIR, FINAL_CHECKPOINT_DIR, BEST_CHECKPOINT_DIR, TRAIN_LOG_FILE, TRAIN_CURVES_FILE,
    ABLATION_VARIANTS, ABLATION_TABLE_FILE)
from ..data_ingestion.corpus import CorpusSplit
from ..data_ingestion.vocabulary import Vocabulary
from ..evaluation.rouge import RougeReport, corpus_rouge
from ..exceptions import ArgumentError, ConsistencyError
from ..logging_functions import timeit
from ..model.checkpoint import save_checkpoint, load_checkpoint
from ..model.decoding import DecodeOptions, summarize
from ..model.model import srb_loss, summary_relevance
from ..model.model_output import get_training_curves, get_rouge_table, get_evaluation_row
from ..model.params import ModelParams, init_params
from .optimizer import AdamState, adam_step

train_logger = logging.getLogger(TRAIN_LOGGER)


class TrainLogRecord(NamedTuple):
    step: int
    loss: float
    nll: float
    cos: float
    seconds: float


class TrainResult(NamedTuple):
    params: ModelParams
    optimizer_state: AdamState
    records: List[TrainLogRecord]
    # mean teacher-forced dev loss after each epoch, empty without a dev corpus
    dev_losses: List[float]


class EvaluationResult(NamedTuple):
    report: RougeReport
    # mean cos(V_s, V_t) of the generated summaries, nan if none was non-empty
    relevance: float
    candidates: List[List[int]]


def format_record(record: TrainLogRecord) -> str:
    return f'{record.step}\t{record.nll:.6f}\t{record.cos:.6f}\t{record.loss:.6f}\t{record.seconds:.2f}'


def check_consistency(corpus: CorpusSplit, vocab: Vocabulary, config: ModelConfig):
    """Vocabulary, config and corpus ids must agree before any training starts"""
    if vocab is not None and len(vocab) != config.vocab_size:
        raise ConsistencyError(f'vocabulary has {len(vocab)} entries, config vocab_size is {config.vocab_size}')
    for i, pair in enumerate(corpus.pairs):
        if not pair.source_ids or not pair.summary_ids:
            raise ConsistencyError(f'pair {i} has an empty source or summary')
        largest = max(max(pair.source_ids), max(pair.summary_ids))
        if largest >= config.vocab_size:
            raise ConsistencyError(f'pair {i} uses id {largest}, config vocab_size is {config.vocab_size}')


def epoch_order(n: int, seed: int, epoch: int) -> np.ndarray:
    """Seeded permutation for one epoch, derived from (seed, epoch) so a resumed run reshuffles identically"""
    return np.random.default_rng([seed, epoch]).permutation(n)


def corpus_loss(corpus: CorpusSplit, params: ModelParams, config: ModelConfig) -> TrainLogRecord:
    """Mean teacher-forced loss, nll and cos over a corpus, no gradients"""
    outputs = [srb_loss(pair, params, config) for pair in corpus.pairs]
    return TrainLogRecord(0,
                          float(np.mean([o.loss.item() for o in outputs])),
                          float(np.mean([o.nll.item() for o in outputs])),
                          float(np.mean([o.cos.item() for o in outputs])),
                          0.)


def _save(out_dir: Optional[str], name: str, params: ModelParams, config: ModelConfig, step: int,
          vocab: Optional[Vocabulary], state: AdamState):
    if out_dir is None:
        return
    save_checkpoint(os.path.join(out_dir, name), params, config, step, vocab, state.step, state.to_arrays())


def best_dev_loss(out_dir: Optional[str], dev_corpus: Optional[CorpusSplit], config: ModelConfig) -> float:
    """Dev loss of the best checkpoint already in out_dir, inf when there is none to beat"""
    best_dir = os.path.join(out_dir, BEST_CHECKPOINT_DIR) if out_dir is not None else None
    if best_dir is None or dev_corpus is None or not len(dev_corpus) or not os.path.isdir(best_dir):
        return math.inf
    best = load_checkpoint(best_dir)
    if best.config != config:
        logging.warning(f'{best_dir} was trained with another config and will be replaced')
        return math.inf
    return corpus_loss(dev_corpus, best.params, config).loss


@timeit
def train(corpus: CorpusSplit, model_config: ModelConfig, train_config: TrainConfig, vocab: Vocabulary = None,
          out_dir: str = None, dev_corpus: CorpusSplit = None, resume: str = None) -> TrainResult:
    """Minimises the mean batch srb_loss with clipped Adam

    Batches are consecutive slices of a seeded per-epoch permutation. Every step is logged to the
    srb.train logger; checkpoints are written every checkpoint_interval steps and at the end when
    out_dir is given. With a dev corpus the dev loss is logged per epoch and the best checkpoint kept.

    Args:
        corpus (CorpusSplit): training pairs, non-empty
        model_config (ModelConfig): model configuration
        train_config (TrainConfig): optimisation settings
        vocab (Vocabulary): vocabulary, checked against the config and stored with checkpoints
        out_dir (str): output directory for checkpoints, log table and curves
        dev_corpus (CorpusSplit): development pairs for per-epoch monitoring
        resume (str): checkpoint directory to continue from

    Returns:
        TrainResult: trained parameters, optimizer state, step records and dev losses
    """
    model_config, train_config = model_config.validate(), train_config.validate()
    if len(corpus) == 0:
        raise ArgumentError('cannot train on an empty corpus')
    check_consistency(corpus, vocab, model_config)
    if dev_corpus is not None:
        check_consistency(dev_corpus, vocab, model_config)

    if resume is not None:
        checkpoint = load_checkpoint(resume)
        if checkpoint.config != model_config:
            raise ConsistencyError(f'checkpoint config {checkpoint.config} differs from {model_config}')
        params, step = checkpoint.params, checkpoint.step
        state = AdamState.from_arrays(checkpoint.optimizer_step, checkpoint.optimizer_arrays or {})
        logging.info(f'TRAINING RESUMED: {resume} at step {step}')
    else:
        params, step, state = init_params(model_config, train_config.seed), 0, AdamState()

    n, batch_size = len(corpus), train_config.batch_size
    batches_per_epoch = math.ceil(n / batch_size)
    total_steps = train_config.epochs * batches_per_epoch

    logging.info(f'TRAINING STARTED: {n} pairs, {batches_per_epoch} batches per epoch, {total_steps} steps')
    records, dev_losses = [], []
    best_dev = best_dev_loss(out_dir, dev_corpus, model_config) if resume is not None else math.inf
    order, order_epoch = None, None
    started = time.time()

    while step < total_steps:
        epoch, batch_index = divmod(step, batches_per_epoch)
        if order_epoch != epoch:
            order, order_epoch = epoch_order(n, train_config.seed, epoch), epoch
        batch = [corpus.pairs[i] for i in order[batch_index * batch_size:(batch_index + 1) * batch_size]]

        params.zero_grads()
        outputs = []
        for pair in batch:
            output = srb_loss(pair, params, model_config)
            # batch gradient is the mean over examples
            scale(output.loss, 1. / len(batch)).backward()
            outputs.append(output)
        adam_step(params, params.grads(), state, train_config)
        step += 1

        record = TrainLogRecord(step,
                                float(np.mean([o.loss.item() for o in outputs])),
                                float(np.mean([o.nll.item() for o in outputs])),
                                float(np.mean([o.cos.item() for o in outputs])),
                                time.time() - started)
        records.append(record)
        train_logger.info(format_record(record))

        if train_config.checkpoint_interval and step % train_config.checkpoint_interval == 0:
            _save(out_dir, CHECKPOINT_DIR.format(step), params, model_config, step, vocab, state)

        if dev_corpus is not None and len(dev_corpus) and batch_index == batches_per_epoch - 1:
            dev = corpus_loss(dev_corpus, params, model_config)
            dev_losses.append(dev.loss)
            logging.info(f'EPOCH {epoch + 1} DEV: loss={dev.loss:.6f} nll={dev.nll:.6f} cos={dev.cos:.6f}')
            if dev.loss < best_dev:
                best_dev = dev.loss
                _save(out_dir, BEST_CHECKPOINT_DIR, params, model_config, step, vocab, state)

    _save(out_dir, FINAL_CHECKPOINT_DIR, params, model_config, step, vocab, state)
    if out_dir is not None and records:
        log_table = pd.DataFrame(records, columns=TrainLogRecord._fields)
        log_table.to_csv(os.path.join(out_dir, TRAIN_LOG_FILE), sep='\t', index=False)
        get_training_curves(log_table).savefig(os.path.join(out_dir, TRAIN_CURVES_FILE))

    logging.info('TRAINING COMPLETE')
    return TrainResult(params, state, records, dev_losses)


@timeit
def evaluate(corpus: CorpusSplit, params: ModelParams, config: ModelConfig,
             options: DecodeOptions = DecodeOptions(), micro: bool = False, name: str = 'SRB') -> EvaluationResult:
    """Decodes every source and scores the outputs against the gold summaries

    Args:
        corpus (CorpusSplit): evaluation pairs, non-empty
        params (ModelParams): trained parameters
        config (ModelConfig): model configuration
        options (DecodeOptions): beam width, max length, length normalisation
        micro (bool): micro- instead of macro-averaged ROUGE
        name (str): system name for the logged result row

    Returns:
        EvaluationResult: ROUGE report, mean relevance of generated summaries, decoded ids
    """
    if len(corpus) == 0:
        raise ArgumentError('cannot evaluate an empty corpus')

    candidates = [summarize(pair.source_ids, params, config, options) for pair in corpus.pairs]
    report = corpus_rouge([(c, pair.summary_ids) for c, pair in zip(candidates, corpus.pairs)], micro)

    relevances = [summary_relevance(pair.source_ids, c, params, config)
                  for c, pair in zip(candidates, corpus.pairs) if c]
    relevance = float(np.mean(relevances)) if relevances else math.nan

    logging.info(f'EVALUATION: {get_evaluation_row(name, report)}\trelevance={relevance:.4f}')
    return EvaluationResult(report, relevance, candidates)


@timeit
def ablate(corpus: CorpusSplit, model_config: ModelConfig, train_config: TrainConfig, vocab: Vocabulary = None,
           eval_corpus: CorpusSplit = None, out_dir: str = None,
           options: DecodeOptions = DecodeOptions()) -> pd.DataFrame:
    """Trains the four systems (RNN, RNN context, + SRB, + gated attention) under one budget and seed

    Args:
        corpus (CorpusSplit): training pairs
        model_config (ModelConfig): base configuration, its ablation flags are overridden per variant
        train_config (TrainConfig): shared optimisation settings
        vocab (Vocabulary): vocabulary
        eval_corpus (CorpusSplit): pairs to score on, the training corpus when None
        out_dir (str): per-variant checkpoints go in sub-directories, the table in ablation.tsv
        options (DecodeOptions): decoding settings

    Returns:
        pd.DataFrame: one row per variant, ROUGE-1/2/L F columns
    """
    eval_corpus = eval_corpus if eval_corpus is not None else corpus
    reports: Dict[str, RougeReport] = {}
    for name, flags in ABLATION_VARIANTS.items():
        logging.info(f'ABLATION VARIANT: {name}')
        config = replace(model_config, **flags)
        variant_dir = os.path.join(out_dir, name.replace(' ', '_').replace('+', 'plus')) if out_dir else None
        result = train(corpus, config, train_config, vocab, variant_dir)
        reports[name] = evaluate(eval_corpus, result.params, config, options, train_config.micro_average,
                                 name).report

    table = get_rouge_table(reports)
    if out_dir is not None:
        table.to_csv(os.path.join(out_dir, ABLATION_TABLE_FILE), sep='\t', index_label='model')
    return table
