"""
Complex Linear Algebra Service

Dense complex matrix helpers for states and operators of up to a few
qubits. Everything is a complex128 numpy array; a column vector is the
single-column case, and 1-D arrays are treated as columns.
"""

from functools import reduce
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from ..utils.errors import DimensionError

ComplexMatrix = npt.NDArray[np.complex128]
ArrayLike = Union[ComplexMatrix, Sequence, complex, float]

# Default equality tolerance for every identity the simulator checks.
DEFAULT_TOL = 1e-10


def as_matrix(data: ArrayLike) -> ComplexMatrix:
    """
    Coerce input to a finite 2-D complex128 array.

    1-D input becomes a column vector, scalars become 1x1.
    """
    matrix = np.asarray(data, dtype=np.complex128)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    elif matrix.ndim != 2:
        raise DimensionError(f"Expected a vector or matrix, got {matrix.ndim} dimensions")

    if matrix.size == 0:
        raise DimensionError("Matrix must be nonempty")
    if not np.all(np.isfinite(matrix)):
        raise DimensionError("Matrix entries must be finite")
    return matrix


def tensor(a: ArrayLike, b: ArrayLike, *more: ArrayLike) -> ComplexMatrix:
    """Kronecker product, left factor = most significant index."""
    factors = [as_matrix(x) for x in (a, b, *more)]
    return reduce(np.kron, factors)


def matmul(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Matrix product with an explicit shape check."""
    left, right = as_matrix(a), as_matrix(b)
    if left.shape[1] != right.shape[0]:
        raise DimensionError(
            f"Cannot multiply {left.shape[0]}x{left.shape[1]} by {right.shape[0]}x{right.shape[1]}"
        )
    return left @ right


def dagger(a: ArrayLike) -> ComplexMatrix:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def transpose(a: ArrayLike) -> ComplexMatrix:
    """Transpose in the computational basis, without conjugation."""
    return as_matrix(a).T.copy()


def max_abs_diff(a: ArrayLike, b: ArrayLike) -> float:
    """
    Largest entrywise modulus of a - b.

    This is the equality metric for every verification in the package.
    """
    left, right = as_matrix(a), as_matrix(b)
    if left.shape != right.shape:
        raise DimensionError(f"Shape mismatch: {left.shape} vs {right.shape}")
    return float(np.max(np.abs(left - right)))


def is_square(a: ArrayLike) -> bool:
    """True when the input is a square matrix."""
    matrix = as_matrix(a)
    return matrix.shape[0] == matrix.shape[1]


def is_unitary(u: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    """
    Check U U† = I and U† U = I entrywise within tol.

    Raises:
        DimensionError: If u is not square
    """
    matrix = as_matrix(u)
    if not is_square(matrix):
        raise DimensionError(f"Unitarity needs a square matrix, got {matrix.shape}")

    eye = np.eye(matrix.shape[0], dtype=np.complex128)
    return (
        max_abs_diff(matrix @ matrix.conj().T, eye) <= tol
        and max_abs_diff(matrix.conj().T @ matrix, eye) <= tol
    )


def is_hermitian(a: ArrayLike, tol: float = DEFAULT_TOL) -> bool:
    matrix = as_matrix(a)
    return is_square(matrix) and max_abs_diff(matrix, matrix.conj().T) <= tol


def num_qubits_for_dim(dim: int) -> int:
    """Number of qubits for a 2^n dimensional space."""
    if dim <= 0 or dim & (dim - 1):
        raise DimensionError(f"Dimension must be a power of 2, got {dim}")
    return dim.bit_length() - 1


def frozen(a: ArrayLike) -> ComplexMatrix:
    """Return a read-only copy."""
    matrix = np.array(a, dtype=np.complex128, copy=True)
    matrix.setflags(write=False)
    return matrix
