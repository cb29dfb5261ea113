from .value import DiffValue, backward, constant, parameter
from .ops import (
    matmul, add, sub, mul, tanh, sigmoid, log, scale, elementwise, softmax_rows, log_softmax_rows, concat,
    stack_rows, slice_cols, take_row, pick, sum_all, add_n, cosine)
