"""Greedy and beam-search summary generation.

Hypothesis score is the raw sum of token log-probabilities, EOS included when emitted.
PAD and BOS are never generated. max_len bounds the number of decoding steps; a hypothesis
that reaches it without EOS is finished as is.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import numpy as np

from ..config import ModelConfig
from ..constants import PAD_ID, BOS_ID, EOS_ID, BEAM_SIZE, MAX_DECODE_LEN
from ..exceptions import ArgumentError
from .cells import RecurrentState
from .model import AttentionMemory, encode, decoder_start, decoder_step
from .params import ModelParams


@dataclass(frozen=True)
class DecodeOptions:
    beam: int = BEAM_SIZE
    max_len: int = MAX_DECODE_LEN
    length_normalize: bool = False


@dataclass(frozen=True)
class Hypothesis:
    tokens: Tuple[int, ...]
    log_prob: float
    state: RecurrentState
    finished: bool = False

    def score(self, length_normalize: bool = False) -> float:
        if length_normalize and self.tokens:
            return self.log_prob / len(self.tokens)
        return self.log_prob


def _log_probs(prev_token: int, state: RecurrentState, memory: Optional[AttentionMemory], params: ModelParams,
               config: ModelConfig) -> Tuple[np.ndarray, RecurrentState]:
    step = decoder_step(prev_token, state, memory, params, config)
    log_p = step.log_probs.data[0].copy()
    log_p[[PAD_ID, BOS_ID]] = -np.inf
    return log_p, step.state


def _start(source_ids: Sequence[int], params: ModelParams, config: ModelConfig):
    if len(source_ids) == 0:
        raise ArgumentError('cannot decode an empty source')
    return decoder_start(encode(source_ids, params, config), params, config)


def _greedy(state: RecurrentState, memory, params: ModelParams, config: ModelConfig, max_len: int) -> Hypothesis:
    tokens, log_prob, prev = [], 0., BOS_ID
    for _ in range(max_len):
        log_p, next_state = _log_probs(prev, state, memory, params, config)
        # argmax returns the lowest id on ties
        token = int(np.argmax(log_p))
        log_prob += log_p[token]
        if token == EOS_ID:
            break
        tokens.append(token)
        prev, state = token, next_state
    return Hypothesis(tuple(tokens), float(log_prob), state, True)


def greedy_decode(source_ids: Sequence[int], params: ModelParams, config: ModelConfig,
                  max_len: int = MAX_DECODE_LEN) -> List[int]:
    """Most probable token at every step until EOS or max_len

    Args:
        source_ids (Sequence[int]): source ids, non-empty
        params (ModelParams): model parameters
        config (ModelConfig): model configuration
        max_len (int): maximum decoding steps

    Returns:
        List[int]: generated ids without BOS/EOS
    """
    state, memory = _start(source_ids, params, config)
    return list(_greedy(state, memory, params, config, max_len).tokens)


def beam_decode(source_ids: Sequence[int], params: ModelParams, config: ModelConfig, beam: int = BEAM_SIZE,
                max_len: int = MAX_DECODE_LEN, length_normalize: bool = False,
                include_greedy: bool = True) -> List[int]:
    """Beam search over cumulative log-probability

    Each step keeps the `beam` best extensions of the live hypotheses; extensions ending in EOS move to the
    finished pool. Without length normalisation the search stops once the best finished score beats every
    live one, since scores only decrease. With include_greedy the greedy hypothesis is also a final candidate,
    so the result never scores below greedy_decode. beam=1 reproduces greedy_decode either way.

    Args:
        source_ids (Sequence[int]): source ids, non-empty
        params (ModelParams): model parameters
        config (ModelConfig): model configuration
        beam (int): beam width, >= 1
        max_len (int): maximum decoding steps
        length_normalize (bool): select the final hypothesis by mean instead of total log-probability
        include_greedy (bool): add the greedy hypothesis to the final candidates

    Returns:
        List[int]: best finished hypothesis, without BOS/EOS
    """
    if beam < 1:
        raise ArgumentError(f'beam must be >= 1, got {beam}')
    start_state, memory = _start(source_ids, params, config)

    alive = [Hypothesis((), 0., start_state)]
    finished: List[Hypothesis] = []
    for _ in range(max_len):
        candidates = []
        for hyp in alive:
            log_p, state = _log_probs(hyp.tokens[-1] if hyp.tokens else BOS_ID, hyp.state, memory, params, config)
            # best tokens first, lowest id on ties
            for token in np.lexsort((np.arange(len(log_p)), -log_p))[:beam]:
                if np.isneginf(log_p[token]):
                    break
                candidates.append((hyp.log_prob + log_p[token], log_p[token], hyp.tokens + (int(token),), state))

        candidates.sort(key=lambda c: (-c[0], -c[1], c[2]))
        alive = []
        for log_prob, _, tokens, state in candidates[:beam]:
            if tokens[-1] == EOS_ID:
                finished.append(Hypothesis(tokens[:-1], float(log_prob), state, True))
            else:
                alive.append(Hypothesis(tokens, float(log_prob), state))

        if not alive:
            break
        if not length_normalize and finished and max(h.log_prob for h in finished) >= alive[0].log_prob:
            alive = []
            break

    finished.extend(Hypothesis(h.tokens, h.log_prob, h.state, True) for h in alive)
    if include_greedy and beam > 1:
        finished.append(_greedy(start_state, memory, params, config, max_len))

    best = min(finished, key=lambda h: (-h.score(length_normalize), h.tokens))
    return list(best.tokens)


def sequence_score(source_ids: Sequence[int], output_ids: Sequence[int], params: ModelParams, config: ModelConfig,
                   max_len: int = MAX_DECODE_LEN) -> float:
    """Model score of a decoded output, scored the way the decoders score it

    Sum of token log-probabilities, plus the EOS term when the output is shorter than max_len.
    """
    if len(output_ids) > max_len:
        raise ArgumentError(f'output of length {len(output_ids)} exceeds max_len {max_len}')
    state, memory = _start(source_ids, params, config)

    total, prev = 0., BOS_ID
    targets = list(output_ids) + ([EOS_ID] if len(output_ids) < max_len else [])
    for token in targets:
        log_p, state = _log_probs(prev, state, memory, params, config)
        total += log_p[token]
        prev = token
    return float(total)


def summarize(source_ids: Sequence[int], params: ModelParams, config: ModelConfig,
              options: DecodeOptions = DecodeOptions()) -> List[int]:
    if options.beam == 1:
        return greedy_decode(source_ids, params, config, options.max_len)
    return beam_decode(source_ids, params, config, options.beam, options.max_len, options.length_normalize)
