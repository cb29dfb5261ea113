"""Gated attention encoder, attentive decoder and the semantic relevance loss.

Text vector V_t is the last encoder output h_N; summary vector V_s = s_M - h_N.
Training loss = mean token nll - lambda * cos(V_s, V_t).
"""
from typing import List, NamedTuple, Optional, Sequence, Tuple

from ..autodiff import (
    DiffValue, matmul, add, sub, tanh, sigmoid, scale, softmax_rows, log_softmax_rows, concat, stack_rows, take_row,
    pick, add_n, cosine)
from ..config import ModelConfig
from ..constants import BOS_ID, EOS_ID
from ..exceptions import ArgumentError, DimensionError
from .cells import RecurrentState, cell_step, initial_state, zeros
from .params import ModelParams, GateWeights, AttentionWeights


class EncoderOutput(NamedTuple):
    states: List[DiffValue]
    # same node as states[-1]
    text_vector: DiffValue
    gate_scores: List[DiffValue]


class AttentionMemory(NamedTuple):
    """Encoder-side attention terms, computed once per source"""
    states: List[DiffValue]
    keys: List[DiffValue]
    values: DiffValue


class DecoderStep(NamedTuple):
    distribution: DiffValue
    log_probs: DiffValue
    state: RecurrentState
    context: DiffValue
    attention: Optional[DiffValue]


class DecoderOutput(NamedTuple):
    distributions: List[DiffValue]
    log_probs: List[DiffValue]
    attention: List[Optional[DiffValue]]
    final_state: DiffValue
    summary_vector: DiffValue


class LossOutput(NamedTuple):
    loss: DiffValue
    nll: DiffValue
    cos: DiffValue


def gate_score(e_t: DiffValue, h_prev: DiffValue, weights: GateWeights) -> DiffValue:
    """Importance score of one input character, sigmoid(w_out . tanh([e_t; h_prev] W_in + b_in))

    Args:
        e_t (DiffValue): character embedding [1 x embed]
        h_prev (DiffValue): previous forward encoder state [1 x hidden]
        weights (GateWeights): gate network

    Returns:
        DiffValue: scalar in (0, 1)
    """
    if e_t.shape[1] + h_prev.shape[1] != weights.w_in.shape[0]:
        raise DimensionError('gate_score', e_t.shape, h_prev.shape, weights.w_in.shape)
    hidden = tanh(add(matmul(concat([e_t, h_prev]), weights.w_in), weights.b_in))
    return sigmoid(matmul(hidden, weights.w_out))


def _check_ids(ids: Sequence[int], vocab_size: int, what: str):
    for i in ids:
        if not 0 <= i < vocab_size:
            raise ArgumentError(f'{what} id {i} out of range for vocab size {vocab_size}')


def encode(source_ids: Sequence[int], params: ModelParams, config: ModelConfig) -> EncoderOutput:
    """Runs the (optionally gated) bidirectional encoder

    Each embedding is scaled by its gate score before entering the recurrent cells; the gate reads
    the forward encoder's previous state. Direction states are joined as h_i = tanh([fwd_i; bwd_i] W_c).

    Args:
        source_ids (Sequence[int]): source character ids, non-empty
        params (ModelParams): model parameters
        config (ModelConfig): model configuration

    Returns:
        EncoderOutput: states h_1..h_N, text vector h_N and per-position gate scores
    """
    if len(source_ids) == 0:
        raise ArgumentError('cannot encode an empty source')
    _check_ids(source_ids, config.vocab_size, 'source')

    H = config.hidden_dim
    embedding = params['embedding']
    gate = params.gate()

    inputs, gate_scores, forward = [], [], []
    state = initial_state(config.cell_kind, zeros(H))
    fwd_weights = params.cell('encoder.fwd')
    for token in source_ids:
        e_t = take_row(embedding, token)
        if config.use_gate:
            beta = gate_score(e_t, state.h, gate)
            gate_scores.append(beta)
            e_t = scale(e_t, beta)
        inputs.append(e_t)
        state = cell_step(config.cell_kind, e_t, state, fwd_weights)
        forward.append(state.h)

    backward = []
    state = initial_state(config.cell_kind, zeros(H))
    bwd_weights = params.cell('encoder.bwd')
    for x in reversed(inputs):
        state = cell_step(config.cell_kind, x, state, bwd_weights)
        backward.append(state.h)
    backward.reverse()

    combine = params['encoder.combine.w']
    states = [tanh(matmul(concat([f, b]), combine)) for f, b in zip(forward, backward)]
    return EncoderOutput(states, states[-1], gate_scores)


def attention_memory(states: List[DiffValue], weights: AttentionWeights) -> AttentionMemory:
    if not states:
        raise ArgumentError('attention needs at least one encoder state')
    return AttentionMemory(states, [matmul(h, weights.w_h) for h in states], stack_rows(states))


def attention_context(s_query: DiffValue, states: List[DiffValue], weights: AttentionWeights,
                      memory: AttentionMemory = None) -> Tuple[DiffValue, DiffValue]:
    """Additive attention over encoder states

    g(s, h_i) = v . tanh(s W_s + h_i W_h),  alpha = softmax_i(g),  c = sum_i alpha_i h_i

    Args:
        s_query (DiffValue): decoder state [1 x hidden]
        states (List[DiffValue]): encoder states h_1..h_N
        weights (AttentionWeights): attention network
        memory (AttentionMemory): precomputed encoder terms for the same states, optional

    Returns:
        Tuple[DiffValue, DiffValue]: context c_t [1 x hidden], weights alpha_t [1 x N]
    """
    memory = memory or attention_memory(states, weights)
    query = matmul(s_query, weights.w_s)
    scores = [matmul(tanh(add(query, key)), weights.v) for key in memory.keys]
    alpha = softmax_rows(concat(scores))
    return matmul(alpha, memory.values), alpha


def decoder_step(prev_token: int, state: RecurrentState, memory: AttentionMemory, params: ModelParams,
                 config: ModelConfig) -> DecoderStep:
    """One decoder step: attend with s_{t-1}, feed [embed(y_{t-1}); c_t], emit softmax over [s_t; c_t]"""
    e = take_row(params['embedding'], prev_token)
    if config.use_attention:
        context, alpha = attention_context(state.h, memory.states, params.attention(), memory)
    else:
        context, alpha = zeros(config.hidden_dim), None

    new_state = cell_step(config.cell_kind, concat([e, context]), state, params.cell('decoder'))
    logits = add(matmul(concat([new_state.h, context]), params['output.w']), params['output.b'])
    return DecoderStep(softmax_rows(logits), log_softmax_rows(logits), new_state, context, alpha)


def decoder_start(enc: EncoderOutput, params: ModelParams, config: ModelConfig) -> Tuple[RecurrentState, AttentionMemory]:
    """Initial decoder state s_0 = h_N (lstm memory at zero) plus the attention memory"""
    memory = attention_memory(enc.states, params.attention()) if config.use_attention else None
    return initial_state(config.cell_kind, enc.text_vector), memory


def decode_teacher_forced(summary_ids: Sequence[int], enc: EncoderOutput, params: ModelParams,
                          config: ModelConfig) -> DecoderOutput:
    """Runs the decoder on the gold summary, BOS first, predicting the summary then EOS

    Args:
        summary_ids (Sequence[int]): gold summary ids without BOS/EOS, non-empty
        enc (EncoderOutput): encoder output for the source
        params (ModelParams): model parameters
        config (ModelConfig): model configuration

    Returns:
        DecoderOutput: one distribution per target (len(summary_ids) + 1), s_M and V_s = s_M - h_N
    """
    if len(summary_ids) == 0:
        raise ArgumentError('cannot decode an empty summary')

    state, memory = decoder_start(enc, params, config)
    distributions, log_probs, attention = [], [], []
    for prev_token in [BOS_ID, *summary_ids]:
        step = decoder_step(prev_token, state, memory, params, config)
        distributions.append(step.distribution)
        log_probs.append(step.log_probs)
        attention.append(step.attention)
        state = step.state

    return DecoderOutput(distributions, log_probs, attention, state.h, sub(state.h, enc.text_vector))


def srb_loss(pair, params: ModelParams, config: ModelConfig) -> LossOutput:
    """Loss of one text-summary pair

    nll is the mean per-token negative log-likelihood (EOS included), cos = cos(V_s, V_t),
    loss = nll - lambda * cos when the relevance term is on, else nll.

    Args:
        pair (TextSummaryPair): source and summary ids
        params (ModelParams): model parameters
        config (ModelConfig): model configuration

    Returns:
        LossOutput: (loss, nll, cos) scalar nodes
    """
    _check_ids(pair.summary_ids, config.vocab_size, 'target')
    enc = encode(pair.source_ids, params, config)
    dec = decode_teacher_forced(pair.summary_ids, enc, params, config)

    targets = [*pair.summary_ids, EOS_ID]
    target_log_probs = [pick(lp, 0, y) for lp, y in zip(dec.log_probs, targets)]
    nll = scale(add_n(target_log_probs), -1. / len(targets))
    cos = cosine(dec.summary_vector, enc.text_vector)

    loss = sub(nll, scale(cos, config.srb_lambda)) if config.use_srb else nll
    return LossOutput(loss, nll, cos)


def summary_relevance(source_ids: Sequence[int], summary_ids: Sequence[int], params: ModelParams,
                      config: ModelConfig) -> float:
    """cos(V_s, V_t) for any summary of the source, e.g. a generated one"""
    enc = encode(source_ids, params, config)
    dec = decode_teacher_forced(summary_ids, enc, params, config)
    return cosine(dec.summary_vector, enc.text_vector).item()
