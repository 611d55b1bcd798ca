"""
Reverse-mode automatic differentiation over numpy arrays

Operations record themselves on the active Tape when any input requires a
gradient. Without an active tape every operation is a plain forward
evaluation, which is how inference runs.
"""

import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple
import numpy as np


class AutodiffError(Exception):
    """Base error for the autodiff engine"""
    pass


class ShapeError(AutodiffError):
    """Operand shapes do not conform to an operation's signature"""
    pass


class BackwardError(AutodiffError):
    """Backward pass requested on an unsuitable output"""
    pass


class NonFiniteError(AutodiffError):
    """A forward value or gradient is NaN or infinite"""
    pass


class Tensor:
    """A float64 array with an optional gradient slot"""

    __slots__ = ("values", "requires_grad", "grad", "name")

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None):
        arr = np.array(values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"non-finite values in tensor {name or ''}".rstrip())
        self.values = arr
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return int(self.values.size)

    def item(self) -> float:
        if self.values.size != 1:
            raise ShapeError(f"item: tensor of shape {self.shape} is not a scalar")
        return float(self.values.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def __add__(self, other: "Tensor") -> "Tensor":
        return add(self, _as_tensor(other))

    def __radd__(self, other) -> "Tensor":
        return add(_as_tensor(other), self)

    def __mul__(self, other) -> "Tensor":
        return multiply(self, _as_tensor(other))

    def __rmul__(self, other) -> "Tensor":
        return multiply(_as_tensor(other), self)

    def __neg__(self) -> "Tensor":
        return multiply(self, constant(-1.0))

    def __sub__(self, other) -> "Tensor":
        return add(self, -_as_tensor(other))

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


GradFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass
class TapeNode:
    """One recorded operation"""
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward: GradFn


_local = threading.local()


def _tape_stack() -> List["Tape"]:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = []
        _local.stack = stack
    return stack


def current_tape() -> Optional["Tape"]:
    """The innermost active tape of this thread, if any"""
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape:
    """
    Ordered record of operations

    Nodes are appended as operations execute, so the list is topologically
    ordered. A tape is confined to the thread that entered it.
    """

    def __init__(self):
        self.nodes: List[TapeNode] = []

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, node: TapeNode) -> None:
        self.nodes.append(node)

    def backward(self, output: Tensor) -> Dict[int, np.ndarray]:
        """
        Accumulate gradients of a scalar output

        Args:
            output: Scalar tensor produced through this tape

        Returns:
            Gradients keyed by id() of every tensor reached; leaf tensors also
            get their .grad slot set
        """
        if output.values.size != 1 or output.values.ndim > 1:
            raise BackwardError(f"backward needs a scalar output, got shape {output.shape}")
        if not output.requires_grad:
            raise BackwardError("output was not produced through the tape")

        grads: Dict[int, np.ndarray] = {id(output): np.ones_like(output.values)}
        produced = set()
        leaves: Dict[int, Tensor] = {}
        for node in reversed(self.nodes):
            produced.add(id(node.output))
            g = grads.get(id(node.output))
            if g is None:
                continue
            local = node.backward(g)
            for tensor, gi in zip(node.inputs, local):
                if gi is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + gi
                else:
                    grads[key] = gi
                leaves[key] = tensor

        for key, tensor in leaves.items():
            if key not in produced:
                tensor.grad = grads[key]
        return grads


def backpropagate(tape: Tape, output: Tensor, params: Mapping[str, Tensor]) -> Dict[str, np.ndarray]:
    """
    Gradients of a scalar output with respect to named parameters

    Args:
        tape: Tape the output was recorded on
        output: Scalar loss
        params: Named parameter tensors

    Returns:
        One gradient array per parameter name (zeros where unreached)
    """
    grads = tape.backward(output)
    return {
        name: grads.get(id(tensor), np.zeros_like(tensor.values))
        for name, tensor in params.items()
    }


def constant(values) -> Tensor:
    """A tensor that never requires a gradient"""
    return Tensor(values, requires_grad=False)


def _as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else constant(value)


def _emit(op: str, inputs: Tuple[Tensor, ...], values: np.ndarray, backward: GradFn) -> Tensor:
    tape = current_tape()
    track = tape is not None and any(t.requires_grad for t in inputs)
    try:
        out = Tensor(values, requires_grad=track)
    except NonFiniteError:
        raise NonFiniteError(f"{op} produced non-finite values") from None
    if track:
        tape.record(TapeNode(op, inputs, out, backward))
    return out


def _check_broadcast(op: str, a: Tensor, b: Tensor) -> None:
    sa, sb = a.shape, b.shape
    if sa == sb or sa == () or sb == ():
        return
    if len(sa) == len(sb) + 1 and sa[1:] == sb:
        return
    if len(sb) == len(sa) + 1 and sb[1:] == sa:
        return
    raise ShapeError(f"{op}: shapes {sa} and {sb} do not broadcast over a leading batch dimension")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if shape == ():
        return np.asarray(grad.sum())
    return grad.sum(axis=0)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.values.ndim != 2 or b.values.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} do not conform")

    def backward(g):
        return g @ b.values.T, a.values.T @ g

    return _emit("matmul", (a, b), a.values @ b.values, backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_broadcast("add", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _emit("add", (a, b), a.values + b.values, backward)


def multiply(a: Tensor, b: Tensor) -> Tensor:
    _check_broadcast("multiply", a, b)

    def backward(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return _emit("multiply", (a, b), a.values * b.values, backward)


def relu(x: Tensor) -> Tensor:
    mask = x.values > 0

    def backward(g):
        return (g * mask,)

    return _emit("relu", (x,), np.where(mask, x.values, 0.0), backward)


def sigmoid(x: Tensor) -> Tensor:
    e = np.exp(-np.abs(x.values))
    out = np.where(x.values >= 0, 1.0 / (1.0 + e), e / (1.0 + e))

    def backward(g):
        return (g * out * (1.0 - out),)

    return _emit("sigmoid", (x,), out, backward)


def _softmax_values(v: np.ndarray) -> np.ndarray:
    shifted = v - v.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax(x: Tensor) -> Tensor:
    """Row-wise softmax over the last axis"""
    if x.values.ndim not in (1, 2):
        raise ShapeError(f"softmax: expected a vector or matrix, got {x.shape}")
    s = _softmax_values(x.values)

    def backward(g):
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return _emit("softmax", (x,), s, backward)


def log_softmax(x: Tensor) -> Tensor:
    """Row-wise log-softmax over the last axis"""
    if x.values.ndim not in (1, 2):
        raise ShapeError(f"log_softmax: expected a vector or matrix, got {x.shape}")
    v = x.values
    shifted = v - v.max(axis=-1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    s = np.exp(out)

    def backward(g):
        return (g - s * g.sum(axis=-1, keepdims=True),)

    return _emit("log_softmax", (x,), out, backward)


def embedding(table: Tensor, indices) -> Tensor:
    """Gather rows of a (vocab, d) table"""
    idx = np.asarray(indices, dtype=np.int64)
    if table.values.ndim != 2:
        raise ShapeError(f"embedding: table must be a matrix, got {table.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= table.shape[0]):
        raise ShapeError(f"embedding: indices outside 0..{table.shape[0] - 1} for table {table.shape}")

    def backward(g):
        gt = np.zeros_like(table.values)
        np.add.at(gt, idx, g)
        return (gt,)

    return _emit("embedding", (table,), table.values[idx], backward)


def mean(x: Tensor) -> Tensor:
    n = x.values.size
    if n == 0:
        raise ShapeError("mean: empty tensor")

    def backward(g):
        return (np.full_like(x.values, float(g) / n),)

    return _emit("mean", (x,), np.asarray(x.values.mean()), backward)


def sum(x: Tensor) -> Tensor:  # noqa: A001 - mirrors numpy naming
    def backward(g):
        return (np.full_like(x.values, float(g)),)

    return _emit("sum", (x,), np.asarray(x.values.sum()), backward)


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    tensors = tuple(tensors)
    if not tensors:
        raise ShapeError("concat: no inputs")
    ndim = tensors[0].values.ndim
    for t in tensors[1:]:
        other = [s for i, s in enumerate(t.shape) if i != axis]
        first = [s for i, s in enumerate(tensors[0].shape) if i != axis]
        if t.values.ndim != ndim or other != first:
            raise ShapeError(f"concat: shapes {tensors[0].shape} and {t.shape} differ off axis {axis}")
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _emit("concat", tensors, np.concatenate([t.values for t in tensors], axis=axis), backward)


def cross_entropy(logits: Tensor, targets) -> Tensor:
    """Mean negative log-likelihood of integer class targets under row-wise softmax"""
    tgt = np.asarray(targets, dtype=np.int64)
    if logits.values.ndim != 2 or tgt.shape != (logits.shape[0],):
        raise ShapeError(f"cross_entropy: logits {logits.shape} and targets {tgt.shape} do not conform")
    if tgt.size and (tgt.min() < 0 or tgt.max() >= logits.shape[1]):
        raise ShapeError(f"cross_entropy: targets outside 0..{logits.shape[1] - 1}")
    n = logits.shape[0]
    v = logits.values
    shifted = v - v.max(axis=1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    rows = np.arange(n)
    loss = -logp[rows, tgt].mean()

    def backward(g):
        grad = np.exp(logp)
        grad[rows, tgt] -= 1.0
        return (grad * (float(g) / n),)

    return _emit("cross_entropy", (logits,), np.asarray(loss), backward)


def square(x: Tensor) -> Tensor:
    return multiply(x, x)


def one_hot(indices, classes: int) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros((idx.size, classes))
    out[np.arange(idx.size), idx] = 1.0
    return out
