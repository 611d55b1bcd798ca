"""
Checkpoint files

Layout: the ASCII magic line, an "arch" line carrying the JSON architecture,
a "params" count line, then per parameter a header line
"param <name> <d1>x<d2>..." followed by its little-endian float64 payload.
"""

import json
from pathlib import Path
from typing import Any, BinaryIO, Dict, Tuple
import numpy as np
from src.config.constants import CHECKPOINT_MAGIC
from src.autodiff.optim import ParameterSet
from src.autodiff.tensor import AutodiffError


class CheckpointError(AutodiffError):
    """Malformed or incompatible checkpoint file"""
    pass


def _shape_token(shape: Tuple[int, ...]) -> str:
    return "x".join(str(s) for s in shape) if shape else "scalar"


def _parse_shape(token: str) -> Tuple[int, ...]:
    if token == "scalar":
        return ()
    try:
        return tuple(int(s) for s in token.split("x"))
    except ValueError:
        raise CheckpointError(f"bad shape token {token!r}") from None


def save_checkpoint(path: Path, params: ParameterSet, arch: Dict[str, Any]) -> None:
    """Write parameters and the architecture they belong to"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(f"{CHECKPOINT_MAGIC}\n".encode("ascii"))
        f.write(f"arch {json.dumps(arch, sort_keys=True)}\n".encode("ascii"))
        f.write(f"params {len(params)}\n".encode("ascii"))
        for name, tensor in params.items():
            if " " in name:
                raise CheckpointError(f"parameter name {name!r} contains a space")
            f.write(f"param {name} {_shape_token(tensor.shape)}\n".encode("ascii"))
            f.write(tensor.values.astype("<f8").tobytes())


def _read_line(f: BinaryIO) -> str:
    line = f.readline()
    if not line.endswith(b"\n"):
        raise CheckpointError("truncated checkpoint header")
    try:
        return line[:-1].decode("ascii")
    except UnicodeDecodeError:
        raise CheckpointError("non-ASCII header line") from None


def load_checkpoint(path: Path) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read a checkpoint

    Returns:
        (architecture dict, parameter arrays by name); shape validation against
        a model definition happens in ParameterSet.load_state
    """
    with open(path, "rb") as f:
        if _read_line(f) != CHECKPOINT_MAGIC:
            raise CheckpointError(f"{path}: missing {CHECKPOINT_MAGIC} magic line")
        arch_line = _read_line(f)
        if not arch_line.startswith("arch "):
            raise CheckpointError(f"{path}: expected arch line")
        arch = json.loads(arch_line[5:])
        count_line = _read_line(f).split()
        if len(count_line) != 2 or count_line[0] != "params":
            raise CheckpointError(f"{path}: expected params count line")
        state: Dict[str, np.ndarray] = {}
        for _ in range(int(count_line[1])):
            parts = _read_line(f).split()
            if len(parts) != 3 or parts[0] != "param":
                raise CheckpointError(f"{path}: malformed parameter header {parts}")
            shape = _parse_shape(parts[2])
            count = int(np.prod(shape)) if shape else 1
            payload = f.read(8 * count)
            if len(payload) != 8 * count:
                raise CheckpointError(f"{path}: truncated payload for {parts[1]}")
            state[parts[1]] = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(shape)
    return arch, state
