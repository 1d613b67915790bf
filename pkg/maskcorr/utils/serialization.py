"""
Serialization Helpers

JSON encoding of complex arrays for state, density and operator files.
Complex entries are written as [re, im] pairs with 17 significant digits
so files reload bit-exactly.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from .errors import DimensionError, InvalidStateError

PathLike = Union[str, Path]


def format_real(value: float) -> str:
    """Format a finite float as a JSON number with 17 significant digits."""
    value = float(value)
    if not np.isfinite(value):
        raise InvalidStateError(f"Cannot serialize non-finite value {value}")
    text = f"{value:.17g}"
    # keep floats recognisable as floats on reload
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def complex_pairs(values: np.ndarray) -> List[List[float]]:
    """Flatten a complex array (row-major) into [[re, im], ...]."""
    flat = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_complex(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    """Inverse of complex_pairs, returning a flat complex128 array."""
    try:
        array = np.asarray(pairs, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError(f"Malformed complex entries: {exc}") from exc
    if array.ndim != 2 or array.shape[1] != 2:
        raise InvalidStateError("Complex entries must be a list of [re, im] pairs")
    return array[:, 0] + 1j * array[:, 1]


def dump_complex_document(header: Dict[str, Any], key: str, values: np.ndarray) -> str:
    """
    Render a JSON object whose ``key`` holds complex [re, im] pairs.

    Header fields go through the json module; the pairs are formatted
    by hand to guarantee 17 significant digits.

    Args:
        header: Plain JSON-serializable fields written first
        key: Name of the complex array field
        values: Complex array, flattened row-major

    Returns:
        The JSON text, terminated by a newline
    """
    lines = ["{"]
    for name, value in header.items():
        lines.append(f"  {json.dumps(name)}: {json.dumps(value)},")
    lines.append(f"  {json.dumps(key)}: [")

    rows = [
        f"    [{format_real(re)}, {format_real(im)}]"
        for re, im in complex_pairs(values)
    ]
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    """Write text, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    return target


def read_json(path: PathLike) -> Dict[str, Any]:
    """Load a JSON object from file."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise InvalidStateError(f"{path}: expected a JSON object")
    return data


def operator_to_dict(matrix: np.ndarray) -> Dict[str, Any]:
    """Describe a square 2^n operator in the density file layout."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"Operator must be square, got shape {matrix.shape}")
    dim = matrix.shape[0]
    if dim & (dim - 1):
        raise DimensionError(f"Operator dimension must be a power of 2, got {dim}")
    return {
        "num_qubits": dim.bit_length() - 1,
        "matrix": complex_pairs(matrix),
    }


def save_operator(matrix: np.ndarray, path: PathLike) -> Path:
    """Export an operator (e.g. an encoder or decoder) for external inspection."""
    data = operator_to_dict(matrix)
    text = dump_complex_document({"num_qubits": data["num_qubits"]}, "matrix", matrix)
    return write_text(path, text)


def load_operator(path: PathLike) -> np.ndarray:
    """Read an operator written by save_operator."""
    data = read_json(path)
    try:
        n = int(data["num_qubits"])
        flat = pairs_to_complex(data["matrix"])
    except KeyError as exc:
        raise InvalidStateError(f"{path}: missing field {exc}") from exc
    dim = 2 ** n
    if flat.size != dim * dim:
        raise DimensionError(f"{path}: expected {dim * dim} entries, got {flat.size}")
    return flat.reshape(dim, dim)
