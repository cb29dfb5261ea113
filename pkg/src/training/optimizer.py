from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Tuple
import logging
import numpy as np

from ..config import TrainConfig
from ..exceptions import ArgumentError, ConsistencyError
from ..model.params import ModelParams


@dataclass
class AdamState:
    """Per-parameter first and second moments plus the step count"""
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    v: Dict[str, np.ndarray] = field(default_factory=OrderedDict)

    def to_arrays(self) -> Dict[str, np.ndarray]:
        arrays = OrderedDict((f'm.{name}', value) for name, value in self.m.items())
        arrays.update((f'v.{name}', value) for name, value in self.v.items())
        return arrays

    @classmethod
    def from_arrays(cls, step: int, arrays: Dict[str, np.ndarray]) -> 'AdamState':
        state = cls(step)
        for key, value in arrays.items():
            moment, name = key.split('.', 1)
            getattr(state, moment)[name] = value.copy()
        return state


def global_norm(grads: Dict[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(np.sum(g * g) for g in grads.values())))


def clip_gradients(grads: Dict[str, np.ndarray], max_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    """Rescales all gradients together so their global L2 norm is at most max_norm

    Args:
        grads (Dict[str, np.ndarray]): gradients by parameter name
        max_norm (float): clip threshold

    Returns:
        Tuple[Dict[str, np.ndarray], float]: clipped gradients (new arrays), norm before clipping
    """
    norm = global_norm(grads)
    if not np.isfinite(norm):
        raise ArgumentError(f'non-finite gradient norm {norm}')
    factor = max_norm / norm if norm > max_norm else 1.
    return OrderedDict((name, g * factor) for name, g in grads.items()), norm


def adam_step(params: ModelParams, grads: Dict[str, np.ndarray], state: AdamState, config: TrainConfig):
    """One bias-corrected Adam update on clipped gradients, in place

    Args:
        params (ModelParams): parameters to update
        grads (Dict[str, np.ndarray]): gradient for every named parameter
        state (AdamState): moments, updated in place
        config (TrainConfig): learning rate, betas, eps and clip norm
    """
    missing = [name for name in params if name not in grads]
    if missing:
        raise ConsistencyError(f'no gradient for parameters {missing}')

    grads, norm = clip_gradients(OrderedDict((name, grads[name]) for name in params), config.clip_norm)
    if norm > config.clip_norm:
        logging.debug(f'GRADIENTS CLIPPED: norm {norm:.4f} > {config.clip_norm}')

    beta1, beta2 = config.betas
    state.step += 1
    correction1 = 1. - beta1 ** state.step
    correction2 = 1. - beta2 ** state.step

    for name, p in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)

        state.m[name] = beta1 * state.m[name] + (1. - beta1) * g
        state.v[name] = beta2 * state.v[name] + (1. - beta2) * (g * g)

        m_hat = state.m[name] / correction1
        v_hat = state.v[name] / correction2
        p.data -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)
