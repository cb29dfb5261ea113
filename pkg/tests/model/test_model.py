from dataclasses import replace
from itertools import product
import pytest
import numpy as np

from src.autodiff import constant, parameter
from src.autodiff.gradient_check import check_gradients, gradients_match
from src.constants import EOS_ID
from src.data_ingestion.corpus import TextSummaryPair
from src.exceptions import ArgumentError, DimensionError
from src.model.model import (
    gate_score, encode, attention_context, attention_memory, decoder_start, decoder_step, decode_teacher_forced,
    srb_loss, summary_relevance)
from src.model.params import GateWeights, AttentionWeights, init_params, param_shapes

from tests.conftest import TINY, random_params

FLAG_COMBINATIONS = [dict(zip(('use_gate', 'use_attention', 'use_srb'), flags))
                     for flags in product([True, False], repeat=3)]


def gate_weights(seed: int = 0, embed: int = 3, hidden: int = 4, gate_hidden: int = 6, zero: bool = False):
    rng = np.random.default_rng(seed)

    def draw(shape):
        return parameter(np.zeros(shape) if zero else rng.normal(size=shape))
    return GateWeights(draw((embed + hidden, gate_hidden)), draw((1, gate_hidden)), draw((gate_hidden, 1)))


def test_gate_score_is_half_with_zero_weights():
    beta = gate_score(constant(np.ones((1, 3))), constant(np.ones((1, 4))), gate_weights(zero=True))
    assert beta.item() == 0.5


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gate_score_moves_away_from_half_as_output_weights_grow(seed):
    weights = gate_weights(seed)
    e_t, h_prev = constant(np.full((1, 3), 0.2)), constant(np.full((1, 4), -0.1))
    beta = gate_score(e_t, h_prev, weights).item()
    larger = gate_score(e_t, h_prev, weights._replace(w_out=parameter(3 * weights.w_out.data))).item()

    assert 0 < beta < 1
    assert abs(larger - 0.5) > abs(beta - 0.5)
    assert np.sign(larger - 0.5) == np.sign(beta - 0.5)


def test_gate_score_shape_mismatch():
    with pytest.raises(DimensionError):
        gate_score(constant(np.ones((1, 2))), constant(np.ones((1, 4))), gate_weights())


def test_encode_single_character():
    params = random_params(TINY, seed=1)
    enc = encode([7], params, TINY)
    assert len(enc.states) == 1
    assert len(enc.gate_scores) == 1
    assert enc.text_vector is enc.states[-1]
    assert enc.text_vector.shape == (1, TINY.hidden_dim)


def test_encode_is_deterministic():
    params = random_params(TINY, seed=1)
    a, b = encode([5, 9, 7, 12], params, TINY), encode([5, 9, 7, 12], params, TINY)
    for x, y in zip(a.states, b.states):
        np.testing.assert_array_equal(x.data, y.data)


def test_gate_changes_encoding():
    params = random_params(TINY, seed=1)
    gated = encode([5, 9, 7, 12], params, TINY)
    ungated = encode([5, 9, 7, 12], params, replace(TINY, use_gate=False))

    assert ungated.gate_scores == []
    assert all(0 < beta.item() < 1 for beta in gated.gate_scores)
    assert not np.allclose(gated.text_vector.data, ungated.text_vector.data)


@pytest.mark.parametrize("source", [[], [5, 20], [-1]])
def test_encode_bad_source(source):
    with pytest.raises(ArgumentError):
        encode(source, random_params(TINY), TINY)


def attention_weights(seed: int = 0) -> AttentionWeights:
    rng = np.random.default_rng(seed)
    return AttentionWeights(parameter(rng.normal(size=(4, 5))), parameter(rng.normal(size=(4, 5))),
                            parameter(rng.normal(size=(5, 1))))


def test_attention_over_one_state():
    h = constant(np.random.default_rng(0).normal(size=(1, 4)))
    context, alpha = attention_context(constant(np.ones((1, 4))), [h], attention_weights())
    np.testing.assert_array_equal(alpha.data, [[1.]])
    np.testing.assert_allclose(context.data, h.data)


def test_attention_over_identical_states_is_uniform():
    h = constant(np.random.default_rng(0).normal(size=(1, 4)))
    context, alpha = attention_context(constant(np.ones((1, 4))), [h] * 5, attention_weights())
    np.testing.assert_allclose(alpha.data, np.full((1, 5), 0.2))
    np.testing.assert_allclose(context.data, h.data)


def test_attention_weights_sum_to_one():
    rng = np.random.default_rng(4)
    states = [constant(rng.normal(size=(1, 4))) for _ in range(7)]
    weights = attention_weights(2)
    context, alpha = attention_context(constant(rng.normal(size=(1, 4))), states, weights)

    assert alpha.shape == (1, 7)
    assert alpha.data.sum() == pytest.approx(1., abs=1e-12)
    assert (alpha.data >= 0).all()
    np.testing.assert_allclose(context.data, alpha.data @ np.vstack([h.data for h in states]))

    cached, _ = attention_context(constant(np.ones((1, 4))), states, weights, attention_memory(states, weights))
    direct, _ = attention_context(constant(np.ones((1, 4))), states, weights)
    np.testing.assert_array_equal(cached.data, direct.data)


@pytest.mark.parametrize("cell_kind", ['lstm', 'gru'])
def test_teacher_forced_decoding(cell_kind, tiny_pair):
    config = replace(TINY, cell_kind=cell_kind)
    params = random_params(config, seed=5)
    enc = encode(tiny_pair.source_ids, params, config)
    dec = decode_teacher_forced(tiny_pair.summary_ids, enc, params, config)

    assert len(dec.distributions) == len(tiny_pair.summary_ids) + 1
    for p in dec.distributions:
        assert p.shape == (1, config.vocab_size)
        assert p.data.sum() == pytest.approx(1., abs=1e-12)
    for alpha in dec.attention:
        assert alpha.shape == (1, len(tiny_pair.source_ids))
    np.testing.assert_array_equal(dec.summary_vector.data, dec.final_state.data - enc.text_vector.data)


def test_decoder_without_attention_uses_zero_context():
    config = replace(TINY, use_attention=False)
    params = random_params(config, seed=5)
    state, memory = decoder_start(encode([5, 6], params, config), params, config)
    step = decoder_step(EOS_ID, state, memory, params, config)

    assert memory is None
    assert step.attention is None
    np.testing.assert_array_equal(step.context.data, np.zeros((1, config.hidden_dim)))


def test_decoder_starts_from_text_vector():
    params = random_params(TINY, seed=5)
    enc = encode([5, 6, 7], params, TINY)
    state, _ = decoder_start(enc, params, TINY)
    assert state.h is enc.text_vector
    np.testing.assert_array_equal(state.c.data, np.zeros((1, TINY.hidden_dim)))


def test_empty_summary():
    params = random_params(TINY)
    with pytest.raises(ArgumentError):
        decode_teacher_forced([], encode([5], params, TINY), params, TINY)


def test_loss_without_relevance_term_is_nll(tiny_pair):
    params = random_params(TINY, seed=2)
    out = srb_loss(tiny_pair, params, replace(TINY, srb_lambda=0.))
    assert out.loss.item() == out.nll.item()
    off = srb_loss(tiny_pair, params, replace(TINY, use_srb=False))
    assert off.loss.item() == off.nll.item()


def test_loss_components(tiny_pair):
    params = random_params(TINY, seed=2)
    out = srb_loss(tiny_pair, params, TINY)
    nll, cos = out.nll.item(), out.cos.item()

    assert nll > 0
    assert -1 <= cos <= 1
    assert nll - TINY.srb_lambda <= out.loss.item() <= nll + TINY.srb_lambda
    assert out.loss.item() == pytest.approx(nll - TINY.srb_lambda * cos, abs=1e-12)

    enc = encode(tiny_pair.source_ids, params, TINY)
    dec = decode_teacher_forced(tiny_pair.summary_ids, enc, params, TINY)
    targets = [*tiny_pair.summary_ids, EOS_ID]
    expected = -np.mean([np.log(p.data[0, y]) for p, y in zip(dec.distributions, targets)])
    assert nll == pytest.approx(expected, rel=1e-12)
    assert summary_relevance(tiny_pair.source_ids, tiny_pair.summary_ids, params, TINY) == pytest.approx(cos)


@pytest.mark.parametrize("lam_a, lam_b", [(0.1, 0.5), (0., 2.)])
def test_loss_is_linear_in_lambda(tiny_pair, lam_a, lam_b):
    params = random_params(TINY, seed=2)
    a = srb_loss(tiny_pair, params, replace(TINY, srb_lambda=lam_a))
    b = srb_loss(tiny_pair, params, replace(TINY, srb_lambda=lam_b))
    assert a.loss.item() - b.loss.item() == pytest.approx((lam_b - lam_a) * a.cos.item(), abs=1e-12)


def test_loss_target_out_of_range():
    with pytest.raises(ArgumentError):
        srb_loss(TextSummaryPair((5, 6), (7, TINY.vocab_size)), random_params(TINY), TINY)


def test_loss_stays_finite_when_a_target_probability_underflows(tiny_pair):
    params = random_params(TINY, seed=3)
    # exp(-1e4) is 0 in float64
    params['output.b'].data[0, tiny_pair.summary_ids[0]] = -1e4
    params.zero_grads()
    out = srb_loss(tiny_pair, params, TINY)
    out.loss.backward()

    assert np.isfinite(out.loss.item())
    assert out.nll.item() > 1e4 / (len(tiny_pair.summary_ids) + 1) - 10
    for name, grad in params.grads().items():
        assert np.all(np.isfinite(grad)), name


@pytest.mark.parametrize("cell_kind", ['lstm', 'gru'])
@pytest.mark.parametrize("flags", FLAG_COMBINATIONS)
def test_full_model_gradients(cell_kind, flags, tiny_pair):
    config = replace(TINY, cell_kind=cell_kind, **flags)
    params = random_params(config, seed=9)
    errors = check_gradients(lambda: srb_loss(tiny_pair, params, config).loss, dict(params.items()), max_entries=6)
    assert gradients_match(errors), errors


@pytest.mark.parametrize("flags, unused",
                         [({'use_gate': False}, 'gate.'),
                          ({'use_attention': False}, 'attention.')])
def test_disabled_components_get_no_gradient(tiny_pair, flags, unused):
    config = replace(TINY, **flags)
    params = random_params(config, seed=9)
    params.zero_grads()
    srb_loss(tiny_pair, params, config).loss.backward()

    for name, grad in params.grads().items():
        if name.startswith(unused):
            np.testing.assert_array_equal(grad, 0.)
        elif name != 'embedding':
            assert np.abs(grad).sum() > 0, name


def test_init_params():
    params = init_params(TINY, seed=4)
    assert list(params) == list(param_shapes(TINY))
    assert [tensor.name for tensor in params.items()] == list(params)
    for name, value in params.items():
        assert value.trainable
        if name.endswith('.b') or name.endswith('.b_in'):
            np.testing.assert_array_equal(value.data, 0.)
        else:
            assert np.abs(value.data).max() <= 0.08
    np.testing.assert_array_equal(init_params(TINY, seed=4)['output.w'].data, params['output.w'].data)
