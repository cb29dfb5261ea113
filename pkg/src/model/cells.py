from typing import NamedTuple, Optional
import numpy as np

from ..autodiff import DiffValue, constant, matmul, add, sub, mul, tanh, sigmoid, slice_cols
from ..exceptions import DimensionError
from .params import CellWeights


class RecurrentState(NamedTuple):
    h: DiffValue
    # lstm memory cell, None for gru
    c: Optional[DiffValue] = None


def _check_state(op: str, h_prev: DiffValue, weights: CellWeights):
    hidden = weights.w_hh.shape[0]
    if h_prev.shape != (1, hidden):
        raise DimensionError(op, h_prev.shape, (1, hidden))


def lstm_cell(x: DiffValue, h_prev: DiffValue, c_prev: DiffValue, weights: CellWeights) -> RecurrentState:
    """Standard LSTM step, fused gate columns ordered i, f, o, candidate

    Args:
        x (DiffValue): input [1 x in]
        h_prev (DiffValue): previous hidden state [1 x hidden]
        c_prev (DiffValue): previous memory cell [1 x hidden]
        weights (CellWeights): w_ih [in x 4h], w_hh [h x 4h], b [1 x 4h]

    Returns:
        RecurrentState: (h, c)
    """
    _check_state('lstm_cell', h_prev, weights)
    if c_prev.shape != h_prev.shape:
        raise DimensionError('lstm_cell', c_prev.shape, h_prev.shape)
    H = h_prev.shape[1]

    z = add(add(matmul(x, weights.w_ih), matmul(h_prev, weights.w_hh)), weights.b)
    i = sigmoid(slice_cols(z, 0, H))
    f = sigmoid(slice_cols(z, H, 2 * H))
    o = sigmoid(slice_cols(z, 2 * H, 3 * H))
    candidate = tanh(slice_cols(z, 3 * H, 4 * H))

    c = add(mul(f, c_prev), mul(i, candidate))
    h = mul(o, tanh(c))
    return RecurrentState(h, c)


def gru_cell(x: DiffValue, h_prev: DiffValue, weights: CellWeights) -> DiffValue:
    """Standard GRU step, fused gate columns ordered update z, reset r, candidate n

    n = tanh(x W_n + (r * h_prev) U_n + b_n),  h = (1 - z) * h_prev + z * n
    """
    _check_state('gru_cell', h_prev, weights)
    H = h_prev.shape[1]

    x_part = add(matmul(x, weights.w_ih), weights.b)
    h_part = matmul(h_prev, slice_cols(weights.w_hh, 0, 2 * H))
    z = sigmoid(add(slice_cols(x_part, 0, H), slice_cols(h_part, 0, H)))
    r = sigmoid(add(slice_cols(x_part, H, 2 * H), slice_cols(h_part, H, 2 * H)))
    candidate = tanh(add(slice_cols(x_part, 2 * H, 3 * H),
                         matmul(mul(r, h_prev), slice_cols(weights.w_hh, 2 * H, 3 * H))))

    # (1 - z) * h_prev + z * n
    return add(h_prev, mul(z, sub(candidate, h_prev)))


def zeros(hidden: int) -> DiffValue:
    return constant(np.zeros((1, hidden)))


def initial_state(cell_kind: str, h: DiffValue) -> RecurrentState:
    """State seeded with h, lstm memory starting at zero"""
    return RecurrentState(h, zeros(h.shape[1]) if cell_kind == 'lstm' else None)


def cell_step(cell_kind: str, x: DiffValue, state: RecurrentState, weights: CellWeights) -> RecurrentState:
    if cell_kind == 'lstm':
        return lstm_cell(x, state.h, state.c, weights)
    return RecurrentState(gru_cell(x, state.h, weights))
