"""Named parameter set of the summarization model."""
from collections import OrderedDict
from typing import Dict, Iterator, List, NamedTuple, Tuple
import numpy as np

from ..autodiff import DiffValue, parameter
from ..config import ModelConfig
from ..constants import INIT_SCALE
from ..exceptions import ConsistencyError

# gate blocks fused into each recurrent weight matrix: lstm i,f,o,g  gru z,r,n
GATE_BLOCKS = {'lstm': 4, 'gru': 3}


class ParamTensor(NamedTuple):
    name: str
    value: DiffValue


class CellWeights(NamedTuple):
    w_ih: DiffValue
    w_hh: DiffValue
    b: DiffValue


class GateWeights(NamedTuple):
    w_in: DiffValue
    b_in: DiffValue
    w_out: DiffValue


class AttentionWeights(NamedTuple):
    w_s: DiffValue
    w_h: DiffValue
    v: DiffValue


def param_shapes(config: ModelConfig) -> Dict[str, Tuple[int, int]]:
    """Shape of every named parameter, in creation order

    Args:
        config (ModelConfig): model configuration

    Returns:
        Dict[str, Tuple[int, int]]: parameter name -> shape
    """
    V, E, H = config.vocab_size, config.embed_dim, config.hidden_dim
    G, A = GATE_BLOCKS[config.cell_kind] * H, config.attention_dim

    shapes = OrderedDict()
    shapes['embedding'] = (V, E)
    for direction in ('fwd', 'bwd'):
        shapes[f'encoder.{direction}.w_ih'] = (E, G)
        shapes[f'encoder.{direction}.w_hh'] = (H, G)
        shapes[f'encoder.{direction}.b'] = (1, G)
    shapes['encoder.combine.w'] = (2 * H, H)
    shapes['gate.w_in'] = (E + H, config.gate_hidden_dim)
    shapes['gate.b_in'] = (1, config.gate_hidden_dim)
    shapes['gate.w_out'] = (config.gate_hidden_dim, 1)
    shapes['attention.w_s'] = (H, A)
    shapes['attention.w_h'] = (H, A)
    shapes['attention.v'] = (A, 1)
    # decoder input is [embedding; context]
    shapes['decoder.w_ih'] = (E + H, G)
    shapes['decoder.w_hh'] = (H, G)
    shapes['decoder.b'] = (1, G)
    shapes['output.w'] = (2 * H, V)
    shapes['output.b'] = (1, V)
    return shapes


def is_bias(name: str) -> bool:
    return name.rsplit('.', 1)[-1] in ('b', 'b_in')


class ModelParams:
    """Ordered name -> trainable DiffValue map"""

    def __init__(self, values: Dict[str, DiffValue]):
        self._values = OrderedDict(values)

    def __getitem__(self, name: str) -> DiffValue:
        return self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def items(self) -> List[ParamTensor]:
        return [ParamTensor(name, value) for name, value in self._values.items()]

    def cell(self, prefix: str) -> CellWeights:
        return CellWeights(self[f'{prefix}.w_ih'], self[f'{prefix}.w_hh'], self[f'{prefix}.b'])

    def gate(self) -> GateWeights:
        return GateWeights(self['gate.w_in'], self['gate.b_in'], self['gate.w_out'])

    def attention(self) -> AttentionWeights:
        return AttentionWeights(self['attention.w_s'], self['attention.w_h'], self['attention.v'])

    def zero_grads(self):
        for value in self._values.values():
            value.zero_grad()

    def grads(self) -> Dict[str, np.ndarray]:
        return OrderedDict((name, value.grad) for name, value in self._values.items())

    def arrays(self) -> Dict[str, np.ndarray]:
        return OrderedDict((name, value.data) for name, value in self._values.items())


def from_arrays(arrays: Dict[str, np.ndarray], config: ModelConfig = None) -> ModelParams:
    """Wraps raw arrays as parameters, checking names and shapes against config when given"""
    if config is not None:
        expected = param_shapes(config)
        if list(arrays) != list(expected):
            raise ConsistencyError(f'parameter names {list(arrays)} do not match config {list(expected)}')
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise ConsistencyError(f'{name}: shape {arrays[name].shape}, config expects {shape}')
    return ModelParams(OrderedDict((name, parameter(data)) for name, data in arrays.items()))


def init_params(config: ModelConfig, seed: int = 0) -> ModelParams:
    """uniform(-0.08, 0.08) weights, zero biases, drawn in param_shapes order from one seeded generator

    Args:
        config (ModelConfig): model configuration
        seed (int): random seed

    Returns:
        ModelParams: fresh parameters
    """
    rng = np.random.default_rng(seed)
    arrays = OrderedDict()
    for name, shape in param_shapes(config.validate()).items():
        if is_bias(name):
            arrays[name] = np.zeros(shape)
        else:
            arrays[name] = rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape)
    return from_arrays(arrays)
