"""JSON state files.

A state file is a JSON object with ``dims_a`` and ``dims_b`` (lists of
subsystem dimensions) and ``re`` / ``im`` (row-major ``D x D`` arrays, A-major
composite index). Numbers are written with 17 significant digits, which
round-trips every double exactly. Decomposition sidecars hold ``weights`` and
the real/imaginary parts of the ``alphas`` and ``betas`` rows.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import IO, Any

import numpy as np

from .errors import DimMismatch
from .state import DensityMatrix, SeparableDecomposition, validate_density


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    text = format(x, ".17g")
    return "0" if text == "-0" else text


def _matrix(m: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(_num(v) for v in row) + "]" for row in np.atleast_2d(m)) + "]"


def _vector(v) -> str:
    return "[" + ", ".join(_num(x) for x in np.ravel(v)) + "]"


def _ints(v) -> str:
    return "[" + ", ".join(str(int(d)) for d in v) + "]"


def state_to_json(rho: DensityMatrix) -> str:
    """Serialise a bipartite state (single-line JSON text, trailing newline)."""
    data = rho.data
    return (
        "{"
        f'"dims_a": {_ints(rho.dims_a)}, "dims_b": {_ints(rho.dims_b)}, '
        f'"re": {_matrix(data.real)}, "im": {_matrix(data.imag)}'
        "}\n"
    )


def _require(obj: dict, key: str):
    if key not in obj:
        raise DimMismatch(f"state file is missing {key!r}")
    return obj[key]


def _dims_field(obj: dict, key: str) -> tuple[int, ...]:
    raw = _require(obj, key)
    if not isinstance(raw, list) or not raw or not all(isinstance(d, int) and not isinstance(d, bool) for d in raw):
        raise DimMismatch(f"{key!r} must be a non-empty list of integers")
    if any(d < 1 for d in raw):
        raise DimMismatch(f"{key!r} entries must be positive")
    return tuple(raw)


def _array_field(obj: dict, key: str, shape: tuple[int, ...]) -> np.ndarray:
    try:
        arr = np.array(_require(obj, key), dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimMismatch(f"{key!r} is not a numeric array: {exc}") from None
    if arr.shape != shape:
        raise DimMismatch(f"{key!r} has shape {arr.shape}, expected {shape}")
    return arr


def state_from_obj(obj: Any) -> DensityMatrix:
    """Parse and validate a state-file object."""
    if not isinstance(obj, dict):
        raise DimMismatch("state file must hold a JSON object")
    dims_a = _dims_field(obj, "dims_a")
    dims_b = _dims_field(obj, "dims_b")
    d = math.prod(dims_a) * math.prod(dims_b)
    re = _array_field(obj, "re", (d, d))
    im = _array_field(obj, "im", (d, d))
    return validate_density(re + 1j * im, dims_a + dims_b, len(dims_a))


def state_from_json(text: str) -> DensityMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DimMismatch(f"not valid JSON: {exc}") from None
    return state_from_obj(obj)


def read_state(path: str | Path) -> DensityMatrix:
    return state_from_json(Path(path).read_text())


def write_state(rho: DensityMatrix, target: str | Path | IO[str]) -> None:
    text = state_to_json(rho)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)


def decomposition_to_json(decomp: SeparableDecomposition) -> str:
    return (
        "{"
        f'"weights": {_vector(decomp.weights)}, '
        f'"alphas_re": {_matrix(decomp.alphas.real)}, "alphas_im": {_matrix(decomp.alphas.imag)}, '
        f'"betas_re": {_matrix(decomp.betas.real)}, "betas_im": {_matrix(decomp.betas.imag)}'
        "}\n"
    )


def decomposition_from_json(text: str) -> SeparableDecomposition:
    try:
        obj = json.loads(text)
        w = np.array(obj["weights"], dtype=float)
        a = np.array(obj["alphas_re"], dtype=float) + 1j * np.array(obj["alphas_im"], dtype=float)
        b = np.array(obj["betas_re"], dtype=float) + 1j * np.array(obj["betas_im"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DimMismatch(f"invalid decomposition file: {exc}") from None
    try:
        return SeparableDecomposition(w, a, b)
    except ValueError as exc:
        raise DimMismatch(f"invalid decomposition: {exc}") from None


def read_decomposition(path: str | Path) -> SeparableDecomposition:
    return decomposition_from_json(Path(path).read_text())


def complex_matrix_obj(m: np.ndarray) -> dict:
    """``{"re": ..., "im": ...}`` lists for embedding matrices in reports."""
    m = np.asarray(m)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}
