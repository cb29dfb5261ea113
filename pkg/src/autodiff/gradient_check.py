"""Central finite-difference checks for backpropagated gradients."""
from typing import Callable, Dict, Iterable, Optional, Tuple
import numpy as np

from .value import DiffValue
from ..constants import FD_STEP, FD_REL_TOL, FD_ABS_TOL

Index = Tuple[int, int]


def numerical_gradient(f: Callable[[], float], x: DiffValue, indices: Iterable[Index],
                       step: float = FD_STEP) -> Dict[Index, float]:
    """Central differences of f with respect to selected entries of x.data

    Args:
        f (Callable[[], float]): rebuilds the graph and returns the scalar loss value
        x (DiffValue): node whose data is perturbed in place (and restored)
        indices (Iterable[Index]): entries to perturb
        step (float): finite-difference step

    Returns:
        Dict[Index, float]: numerical derivative per entry
    """
    grads = {}
    for idx in indices:
        original = x.data[idx]
        x.data[idx] = original + step
        f_plus = f()
        x.data[idx] = original - step
        f_minus = f()
        x.data[idx] = original
        grads[idx] = (f_plus - f_minus) / (2 * step)
    return grads


def relative_error(analytic: float, numeric: float, abs_tol: float = FD_ABS_TOL) -> float:
    """|a - n| / max(|a|, |n|), or 0 when the absolute difference is below abs_tol"""
    diff = abs(analytic - numeric)
    if diff < abs_tol:
        return 0.
    return diff / max(abs(analytic), abs(numeric))


def sample_indices(shape: Tuple[int, int], max_entries: Optional[int], rng: np.random.Generator) -> list:
    """All entries, or a random subset of at most max_entries of them"""
    entries = [(int(i), int(j)) for i, j in np.ndindex(*shape)]
    if max_entries is None or len(entries) <= max_entries:
        return entries
    chosen = rng.choice(len(entries), size=max_entries, replace=False)
    return [entries[k] for k in sorted(chosen)]


def check_gradients(loss_fn: Callable[[], DiffValue], params: Dict[str, DiffValue],
                    max_entries: Optional[int] = None, step: float = FD_STEP, seed: int = 0) -> Dict[str, float]:
    """Compares backprop against central differences for every named parameter

    Args:
        loss_fn (Callable[[], DiffValue]): builds a fresh graph and returns the scalar loss node
        params (Dict[str, DiffValue]): parameters to check by name
        max_entries (Optional[int]): entries sampled per parameter, None checks every entry
        step (float): finite-difference step
        seed (int): seed for the entry sampling

    Returns:
        Dict[str, float]: max relative error per parameter
    """
    for p in params.values():
        p.zero_grad()
    loss_fn().backward()
    analytic = {name: p.grad.copy() for name, p in params.items()}

    rng = np.random.default_rng(seed)
    errors = {}
    for name, p in params.items():
        indices = sample_indices(p.shape, max_entries, rng)
        numeric = numerical_gradient(lambda: loss_fn().item(), p, indices, step)
        errors[name] = max(relative_error(analytic[name][idx], numeric[idx]) for idx in indices)
    return errors


def gradients_match(errors: Dict[str, float], rel_tol: float = FD_REL_TOL) -> bool:
    return all(err < rel_tol for err in errors.values())
