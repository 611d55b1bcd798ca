"""
Finite-difference check of tape gradients
"""

from typing import Callable, Optional, Sequence
import numpy as np
from src.autodiff.tensor import BackwardError, Tape, Tensor


def finite_diff_check(
    expression: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    epsilon: float = 1e-5,
    abs_floor: float = 1e-7,
    max_coordinates: Optional[int] = None,
    seed: int = 0,
) -> float:
    """
    Compare tape gradients against central differences

    Args:
        expression: Re-evaluates the scalar expression from the current input values
        inputs: Tensors to differentiate with respect to; perturbed in place and restored
        epsilon: Central difference step
        abs_floor: Absolute differences at or below this count as exact
        max_coordinates: Check a seeded random subset of coordinates per input

    Returns:
        The worst relative error over checked coordinates
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    with Tape() as tape:
        out = expression()
    if out.values.size != 1:
        raise BackwardError(f"finite_diff_check needs a scalar expression, got {out.shape}")
    grads = tape.backward(out) if out.requires_grad else {}

    rng = np.random.default_rng(seed)
    worst = 0.0
    for tensor in inputs:
        analytic = grads.get(id(tensor), np.zeros_like(tensor.values)).reshape(-1)
        flat = tensor.values.reshape(-1)
        coords = np.arange(flat.size)
        if max_coordinates is not None and flat.size > max_coordinates:
            coords = np.sort(rng.choice(flat.size, size=max_coordinates, replace=False))
        for i in coords:
            saved = flat[i]
            flat[i] = saved + epsilon
            plus = expression().item()
            flat[i] = saved - epsilon
            minus = expression().item()
            flat[i] = saved
            numeric = (plus - minus) / (2.0 * epsilon)
            diff = abs(analytic[i] - numeric)
            if diff <= abs_floor:
                continue
            worst = max(worst, diff / max(abs(analytic[i]), abs(numeric)))
    return worst
