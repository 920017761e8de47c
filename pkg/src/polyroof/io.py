"""State files and deterministic JSON text.

Pure state: {"n_qubits": n, "amplitudes": [[re, im], ...]}
Density matrix: {"n_qubits": n, "matrix": [[[re, im], ...], ...]} (row-major)
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .quantum import DensityMatrix, PureState


class StateFormatError(ValueError):
    pass


def _complex_array(raw, shape_hint: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.shape[-1:] != (2,):
        raise StateFormatError(f"{shape_hint} entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(obj: dict) -> Union[PureState, DensityMatrix]:
    if not isinstance(obj, dict) or "n_qubits" not in obj:
        raise StateFormatError("state JSON needs an 'n_qubits' field")
    n = obj["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise StateFormatError("'n_qubits' must be a positive integer")
    try:
        if "amplitudes" in obj:
            amps = _complex_array(obj["amplitudes"], "amplitude")
            if amps.shape != (2**n,):
                raise StateFormatError(f"expected {2**n} amplitudes, got {amps.shape}")
            return PureState.from_vector(amps)
        if "matrix" in obj:
            mat = _complex_array(obj["matrix"], "matrix")
            if mat.shape != (2**n, 2**n):
                raise StateFormatError(f"expected a {2**n}x{2**n} matrix, got {mat.shape}")
            return DensityMatrix.from_matrix(mat)
    except StateFormatError:
        raise
    except ValueError as exc:
        raise StateFormatError(str(exc)) from exc
    raise StateFormatError("state JSON needs 'amplitudes' or 'matrix'")


def state_to_dict(state: Union[PureState, DensityMatrix]) -> dict:
    if isinstance(state, PureState):
        return {"n_qubits": state.n_qubits, "amplitudes": [[z.real, z.imag] for z in state.amplitudes]}
    return {
        "n_qubits": state.n_qubits,
        "matrix": [[[z.real, z.imag] for z in row] for row in state.matrix],
    }


def read_state(path) -> Union[PureState, DensityMatrix]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_dict(obj)


def write_state(path, state) -> None:
    Path(path).write_text(dumps(state_to_dict(state)) + "\n")


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits; key order preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating, str)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
