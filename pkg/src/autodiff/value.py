"""Graph node of the define-by-run reverse-mode engine.

A fresh graph is built on every forward pass. Parameters are long-lived leaf
nodes whose gradients accumulate across backward calls until zero_grad.
"""
from itertools import count
from typing import Callable, Optional, Sequence, Tuple
import numpy as np

from ..exceptions import ArgumentError

_ids = count()


class DiffValue:
    __slots__ = ('data', 'grad', 'parents', 'backward_fn', 'trainable', 'id')

    def __init__(self, data, parents: Sequence['DiffValue'] = (),
                 backward_fn: Optional[Callable[[np.ndarray], None]] = None, trainable: bool = False):
        data = np.array(data, dtype=np.float64)
        if data.ndim == 0:
            data = data.reshape(1, 1)
        elif data.ndim == 1:
            data = data.reshape(1, -1)
        elif data.ndim > 2:
            raise ArgumentError(f'at most rank 2 supported, got shape {data.shape}')

        self.data = data
        self.grad = np.zeros_like(data)
        self.parents: Tuple['DiffValue', ...] = tuple(parents)
        # receives this node's gradient and accumulates into the parents
        self.backward_fn = backward_fn
        self.trainable = trainable
        self.id = next(_ids)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def is_scalar(self) -> bool:
        return self.data.shape == (1, 1)

    def item(self) -> float:
        if not self.is_scalar:
            raise ArgumentError(f'item() needs a scalar, got shape {self.shape}')
        return float(self.data[0, 0])

    def zero_grad(self):
        self.grad.fill(0.)

    def backward(self):
        backward(self)

    def __repr__(self):
        return f'DiffValue(shape={self.shape}, trainable={self.trainable}, id={self.id})'


def constant(data) -> DiffValue:
    """Leaf that takes part in the graph but is never updated"""
    return DiffValue(data)


def parameter(data) -> DiffValue:
    return DiffValue(data, trainable=True)


def topological_order(root: DiffValue) -> list:
    """Nodes reachable from root, parents before children (iterative, graphs are deep)"""
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.id in visited:
            continue
        visited.add(node.id)
        stack.append((node, True))
        for parent in node.parents:
            if parent.id not in visited:
                stack.append((parent, False))
    return order


def backward(loss: DiffValue):
    """Backpropagates d loss / d node into every node reachable from a scalar loss

    Intermediate gradients are reset on every call so that repeated calls add exactly one
    more gradient into the leaves (accumulation contract). The loss grad ends up as 1.

    Args:
        loss (DiffValue): scalar node
    """
    if not loss.is_scalar:
        raise ArgumentError(f'backward needs a scalar loss, got shape {loss.shape}')

    order = topological_order(loss)
    for node in order:
        if node.parents:
            node.grad.fill(0.)
    loss.grad = np.ones_like(loss.data)

    for node in reversed(order):
        if node.backward_fn is not None:
            node.backward_fn(node.grad)
