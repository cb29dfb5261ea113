"""Differentiable operations over DiffValue nodes.

Every op builds a new node whose backward_fn accumulates into its parents.
No broadcasting: operand shapes must match exactly.
"""
from typing import List, Sequence, Union
import numpy as np
from scipy.special import expit, softmax, log_softmax

from .value import DiffValue
from ..constants import COSINE_EPS
from ..exceptions import DimensionError, ArgumentError

Scalar = Union[float, DiffValue]


def _same_shape(op: str, a: DiffValue, b: DiffValue):
    if a.shape != b.shape:
        raise DimensionError(op, a.shape, b.shape)


def matmul(a: DiffValue, b: DiffValue) -> DiffValue:
    """[m x k] . [k x n] -> [m x n]"""
    if a.shape[1] != b.shape[0]:
        raise DimensionError('matmul', a.shape, b.shape)

    def backward_fn(g):
        a.grad += g @ b.data.T
        b.grad += a.data.T @ g

    return DiffValue(a.data @ b.data, (a, b), backward_fn)


def add(a: DiffValue, b: DiffValue) -> DiffValue:
    _same_shape('add', a, b)

    def backward_fn(g):
        a.grad += g
        b.grad += g

    return DiffValue(a.data + b.data, (a, b), backward_fn)


def sub(a: DiffValue, b: DiffValue) -> DiffValue:
    _same_shape('sub', a, b)

    def backward_fn(g):
        a.grad += g
        b.grad -= g

    return DiffValue(a.data - b.data, (a, b), backward_fn)


def mul(a: DiffValue, b: DiffValue) -> DiffValue:
    _same_shape('mul', a, b)

    def backward_fn(g):
        a.grad += g * b.data
        b.grad += g * a.data

    return DiffValue(a.data * b.data, (a, b), backward_fn)


def tanh(x: DiffValue) -> DiffValue:
    out = np.tanh(x.data)

    def backward_fn(g):
        x.grad += g * (1. - out ** 2)

    return DiffValue(out, (x,), backward_fn)


def sigmoid(x: DiffValue) -> DiffValue:
    out = expit(x.data)

    def backward_fn(g):
        x.grad += g * out * (1. - out)

    return DiffValue(out, (x,), backward_fn)


def log(x: DiffValue) -> DiffValue:
    def backward_fn(g):
        x.grad += g / x.data

    return DiffValue(np.log(x.data), (x,), backward_fn)


def scale(x: DiffValue, s: Scalar) -> DiffValue:
    """Multiplies every element of x by a python float or a 1x1 node"""
    if not isinstance(s, DiffValue):
        factor = float(s)

        def backward_fn(g):
            x.grad += g * factor

        return DiffValue(x.data * factor, (x,), backward_fn)

    if not s.is_scalar:
        raise DimensionError('scale', x.shape, s.shape)

    def backward_fn(g):
        x.grad += g * s.data[0, 0]
        s.grad += np.sum(g * x.data)

    return DiffValue(x.data * s.data[0, 0], (x, s), backward_fn)


_ELEMENTWISE = {
    'add': add,
    'sub': sub,
    'mul': mul,
    'tanh': tanh,
    'sigmoid': sigmoid,
    'log': log,
    'scale': scale,
}


def elementwise(op: str, *args) -> DiffValue:
    """Dispatches an elementwise op by tag (add, sub, mul, tanh, sigmoid, log, scale)"""
    try:
        fn = _ELEMENTWISE[op]
    except KeyError:
        raise ArgumentError(f'unknown elementwise op {op!r}, expected one of {sorted(_ELEMENTWISE)}')
    return fn(*args)


def softmax_rows(x: DiffValue) -> DiffValue:
    """Row-wise softmax, scipy subtracts the row max before exponentiating"""
    if x.shape[1] < 1:
        raise ArgumentError('softmax_rows needs at least one column')
    out = softmax(x.data, axis=1)

    def backward_fn(g):
        x.grad += out * (g - np.sum(g * out, axis=1, keepdims=True))

    return DiffValue(out, (x,), backward_fn)


def log_softmax_rows(x: DiffValue) -> DiffValue:
    """Row-wise x - logsumexp(x), finite wherever x is"""
    if x.shape[1] < 1:
        raise ArgumentError('log_softmax_rows needs at least one column')
    out = log_softmax(x.data, axis=1)
    probs = np.exp(out)

    def backward_fn(g):
        x.grad += g - probs * np.sum(g, axis=1, keepdims=True)

    return DiffValue(out, (x,), backward_fn)


def concat(parts: Sequence[DiffValue]) -> DiffValue:
    """Concatenates along columns, [m x n1], [m x n2], ... -> [m x sum(ni)]"""
    parts = list(parts)
    if not parts:
        raise ArgumentError('concat needs at least one part')
    rows = parts[0].shape[0]
    for p in parts[1:]:
        if p.shape[0] != rows:
            raise DimensionError('concat', *(q.shape for q in parts))
    if len(parts) == 1:
        return parts[0]

    bounds = np.cumsum([0] + [p.shape[1] for p in parts])

    def backward_fn(g):
        for p, start, stop in zip(parts, bounds[:-1], bounds[1:]):
            p.grad += g[:, start:stop]

    return DiffValue(np.concatenate([p.data for p in parts], axis=1), parts, backward_fn)


def stack_rows(parts: Sequence[DiffValue]) -> DiffValue:
    """Stacks [1 x n] rows into [len(parts) x n]"""
    parts = list(parts)
    if not parts:
        raise ArgumentError('stack_rows needs at least one part')
    for p in parts:
        if p.shape != (1, parts[0].shape[1]):
            raise DimensionError('stack_rows', *(q.shape for q in parts))

    def backward_fn(g):
        for i, p in enumerate(parts):
            p.grad += g[i:i + 1]

    return DiffValue(np.concatenate([p.data for p in parts], axis=0), parts, backward_fn)


def slice_cols(x: DiffValue, start: int, stop: int) -> DiffValue:
    if not 0 <= start < stop <= x.shape[1]:
        raise ArgumentError(f'slice_cols [{start}:{stop}] out of range for shape {x.shape}')

    def backward_fn(g):
        x.grad[:, start:stop] += g

    return DiffValue(x.data[:, start:stop], (x,), backward_fn)


def take_row(x: DiffValue, i: int) -> DiffValue:
    """Row lookup, used for embeddings"""
    if not 0 <= i < x.shape[0]:
        raise ArgumentError(f'row {i} out of range for shape {x.shape}')

    def backward_fn(g):
        x.grad[i:i + 1] += g

    return DiffValue(x.data[i:i + 1], (x,), backward_fn)


def pick(x: DiffValue, row: int, col: int) -> DiffValue:
    """Single element as a 1x1 node"""
    if not (0 <= row < x.shape[0] and 0 <= col < x.shape[1]):
        raise ArgumentError(f'element ({row}, {col}) out of range for shape {x.shape}')

    def backward_fn(g):
        x.grad[row, col] += g[0, 0]

    return DiffValue(x.data[row, col], (x,), backward_fn)


def sum_all(x: DiffValue) -> DiffValue:
    def backward_fn(g):
        x.grad += g[0, 0]

    return DiffValue(np.sum(x.data), (x,), backward_fn)


def add_n(values: List[DiffValue]) -> DiffValue:
    """Sum of same-shape nodes as a single graph node"""
    if not values:
        raise ArgumentError('add_n needs at least one value')
    for v in values[1:]:
        _same_shape('add_n', values[0], v)

    def backward_fn(g):
        for v in values:
            v.grad += g

    return DiffValue(np.sum([v.data for v in values], axis=0), values, backward_fn)


def cosine(u: DiffValue, v: DiffValue) -> DiffValue:
    """u.v / (|u||v|) for [1 x n] rows

    Either norm below COSINE_EPS gives 0 with no gradient.
    """
    if u.shape[0] != 1 or u.shape != v.shape:
        raise DimensionError('cosine', u.shape, v.shape)

    nu, nv = np.linalg.norm(u.data), np.linalg.norm(v.data)
    if nu < COSINE_EPS or nv < COSINE_EPS:
        return DiffValue(0., (u, v), lambda g: None)

    dot = float(np.sum(u.data * v.data))
    out = dot / (nu * nv)

    def backward_fn(g):
        g = g[0, 0]
        u.grad += g * (v.data / (nu * nv) - out * u.data / nu ** 2)
        v.grad += g * (u.data / (nu * nv) - out * v.data / nv ** 2)

    return DiffValue(out, (u, v), backward_fn)
