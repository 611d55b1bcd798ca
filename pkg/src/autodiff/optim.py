"""
Named parameter store and the Adam optimizer
"""

from typing import Dict, Iterator, Mapping, Tuple
import numpy as np
from src.config.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, ADAM_LR
from src.autodiff.tensor import NonFiniteError, ShapeError, Tensor


class ParameterSet(Mapping[str, Tensor]):
    """
    Named parameter tensors with Adam moment accumulators

    Names are unique; moment shapes always match their parameter.
    """

    def __init__(self):
        self._params: Dict[str, Tensor] = {}
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}
        self.step = 0

    def add(self, name: str, values) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter name {name!r}")
        tensor = Tensor(values, requires_grad=True, name=name)
        self._params[name] = tensor
        self._m[name] = np.zeros_like(tensor.values)
        self._v[name] = np.zeros_like(tensor.values)
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def moments(self, name: str) -> Tuple[np.ndarray, np.ndarray]:
        return self._m[name], self._v[name]

    def total_size(self) -> int:
        return int(np.sum([t.size for t in self._params.values()]))

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: t.values.copy() for name, t in self._params.items()}

    def load_state(self, state: Mapping[str, np.ndarray]) -> None:
        """Replace parameter values, validating names and shapes"""
        missing = sorted(set(self._params) - set(state))
        extra = sorted(set(state) - set(self._params))
        if missing or extra:
            raise ShapeError(f"parameter names differ: missing={missing} unexpected={extra}")
        for name, values in state.items():
            target = self._params[name]
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != target.shape:
                raise ShapeError(f"parameter {name!r}: stored shape {arr.shape} != model shape {target.shape}")
            target.values[...] = arr


def adam_update(
    params: ParameterSet,
    gradients: Mapping[str, np.ndarray],
    lr: float = ADAM_LR,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> ParameterSet:
    """
    One bias-corrected Adam step, applied in place

    Args:
        params: Parameters to update
        gradients: One gradient per parameter name
        lr: Learning rate

    Returns:
        The same ParameterSet, with step incremented
    """
    if set(gradients) != set(params):
        raise ShapeError(
            f"gradient names {sorted(gradients)} do not match parameters {sorted(params)}"
        )
    for name, grad in gradients.items():
        if grad.shape != params[name].shape:
            raise ShapeError(f"gradient for {name!r} has shape {grad.shape}, parameter {params[name].shape}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteError(f"non-finite gradient for parameter {name!r}")

    params.step += 1
    t = params.step
    for name, grad in gradients.items():
        m, v = params.moments(name)
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        params[name].values -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params
