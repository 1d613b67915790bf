"""
Quantum Core Service

Qubit-register states, density matrices, partial trace, local channels,
fidelity and seeded random sampling.

Bit ordering: qubit 0 is the most significant bit of the computational
basis index, i.e. registers read left to right in tensor products. Every
function in the package relies on this single convention.
"""

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ArrayLike,
    ComplexMatrix,
    as_matrix,
    frozen,
    is_hermitian,
    is_unitary,
    max_abs_diff,
    num_qubits_for_dim,
)
from ..utils.errors import (
    DimensionError,
    InvalidChannelError,
    InvalidStateError,
    NotUnitaryError,
    QubitIndexError,
)
from ..utils.serialization import (
    PathLike,
    dump_complex_document,
    pairs_to_complex,
    read_json,
    write_text,
)


# Number of random probe vectors used to test positivity of densities.
POSITIVITY_PROBES = 64
PROBE_SEED = 20240229


@lru_cache(maxsize=16)
def _probe_vectors(dim: int) -> np.ndarray:
    rng = np.random.default_rng([PROBE_SEED, dim])
    probes = rng.standard_normal((POSITIVITY_PROBES, dim)) + 1j * rng.standard_normal(
        (POSITIVITY_PROBES, dim)
    )
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    # basis vectors catch negative diagonal entries directly
    probes = np.vstack([np.eye(dim, dtype=np.complex128), probes])
    probes.setflags(write=False)
    return probes


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of a qubit register."""
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2 ** self.num_qubits:
            raise DimensionError(
                f"{self.num_qubits} qubits need {2 ** self.num_qubits} amplitudes, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("Amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > DEFAULT_TOL:
            raise InvalidStateError(f"State is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: ArrayLike, normalize: bool = False) -> "StateVector":
        """Build a state, inferring the qubit count from the vector length."""
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        n = num_qubits_for_dim(amps.size)
        if normalize:
            norm = float(np.linalg.norm(amps))
            if norm == 0.0 or not np.isfinite(norm):
                raise InvalidStateError("Cannot normalize a zero or non-finite vector")
            amps = amps / norm
        return cls(num_qubits=n, amplitudes=amps)

    @classmethod
    def basis(cls, index: int, num_qubits: int = 1) -> "StateVector":
        """Computational basis state |index>."""
        dim = 2 ** num_qubits
        if not 0 <= index < dim:
            raise QubitIndexError(f"Basis index {index} out of range for {num_qubits} qubits")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits=num_qubits, amplitudes=amps)

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    @property
    def column(self) -> ComplexMatrix:
        return self.amplitudes.reshape(-1, 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        """This register followed by other."""
        return StateVector(
            num_qubits=self.num_qubits + other.num_qubits,
            amplitudes=np.kron(self.amplitudes, other.amplitudes),
        )

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        if self.num_qubits != other.num_qubits:
            raise DimensionError("Inner product of registers with different sizes")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "num_qubits": self.num_qubits,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StateVector":
        try:
            n = int(data["num_qubits"])
            amps = pairs_to_complex(data["amplitudes"])
        except KeyError as exc:
            raise InvalidStateError(f"State file missing field {exc}") from exc
        return cls(num_qubits=n, amplitudes=amps)

    def save(self, output_path: PathLike) -> Path:
        """Save state to a JSON file."""
        text = dump_complex_document({"num_qubits": self.num_qubits}, "amplitudes", self.amplitudes)
        return write_text(output_path, text)

    @classmethod
    def load(cls, input_path: PathLike) -> "StateVector":
        """Load state from a JSON file."""
        return cls.from_dict(read_json(input_path))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, (probed) positive operator on a qubit register."""
    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.matrix)
        dim = 2 ** self.num_qubits
        if rho.shape != (dim, dim):
            raise DimensionError(f"{self.num_qubits} qubits need a {dim}x{dim} matrix, got {rho.shape}")
        if not is_hermitian(rho, DEFAULT_TOL):
            raise InvalidStateError("Density matrix is not Hermitian")
        trace = complex(np.trace(rho))
        if abs(trace - 1.0) > DEFAULT_TOL:
            raise InvalidStateError(f"Density matrix trace is {trace!r}, expected 1")

        probes = _probe_vectors(dim)
        expectations = np.einsum("ki,ij,kj->k", probes.conj(), rho, probes).real
        if np.min(expectations) < -DEFAULT_TOL:
            raise InvalidStateError(
                f"Density matrix failed positivity probe (min={float(np.min(expectations))!r})"
            )
        object.__setattr__(self, "matrix", frozen(rho))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "DensityMatrix":
        rho = as_matrix(matrix)
        return cls(num_qubits=num_qubits_for_dim(rho.shape[0]), matrix=rho)

    @classmethod
    def maximally_mixed(cls, num_qubits: int = 1) -> "DensityMatrix":
        dim = 2 ** num_qubits
        return cls(num_qubits=num_qubits, matrix=np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return 2 ** self.num_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "num_qubits": self.num_qubits,
            "matrix": [[float(z.real), float(z.imag)] for z in self.matrix.reshape(-1)],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DensityMatrix":
        try:
            n = int(data["num_qubits"])
            flat = pairs_to_complex(data["matrix"])
        except KeyError as exc:
            raise InvalidStateError(f"Density file missing field {exc}") from exc
        dim = 2 ** n
        if flat.size != dim * dim:
            raise DimensionError(f"Expected {dim * dim} matrix entries, got {flat.size}")
        return cls(num_qubits=n, matrix=flat.reshape(dim, dim))

    def save(self, output_path: PathLike) -> Path:
        """Save density matrix to a JSON file."""
        text = dump_complex_document({"num_qubits": self.num_qubits}, "matrix", self.matrix)
        return write_text(output_path, text)

    @classmethod
    def load(cls, input_path: PathLike) -> "DensityMatrix":
        """Load density matrix from a JSON file."""
        return cls.from_dict(read_json(input_path))


AnyState = Union[StateVector, DensityMatrix]


@dataclass(frozen=True)
class MeasurementBasis:
    """
    Rank-1 projective qubit basis from Bloch angles.

    |b0> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, |b1> is its orthogonal partner.
    """
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise InvalidStateError("Basis angles must be finite")
        b0, b1 = self.vectors()
        if abs(np.vdot(b0, b1)) > 1e-12:
            raise InvalidStateError("Basis vectors are not orthogonal")

    @classmethod
    def z(cls) -> "MeasurementBasis":
        return cls(theta=0.0, phi=0.0)

    @classmethod
    def x(cls) -> "MeasurementBasis":
        return cls(theta=np.pi / 2, phi=0.0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "MeasurementBasis":
        """Basis whose |b0> is uniform on the Bloch sphere."""
        theta = float(np.arccos(1.0 - 2.0 * rng.random()))
        phi = float(2.0 * np.pi * rng.random())
        return cls(theta=theta, phi=phi)

    def vectors(self) -> List[np.ndarray]:
        c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
        phase = np.exp(1j * self.phi)
        b0 = np.array([c, phase * s], dtype=np.complex128)
        b1 = np.array([s, -phase * c], dtype=np.complex128)
        return [b0, b1]

    def projectors(self) -> List[ComplexMatrix]:
        return [np.outer(b, b.conj()) for b in self.vectors()]


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """The one random generator type used by every scenario."""
    return np.random.default_rng(seed)


def to_density(psi: StateVector) -> DensityMatrix:
    """|psi><psi|."""
    return DensityMatrix(num_qubits=psi.num_qubits, matrix=np.outer(psi.amplitudes, psi.amplitudes.conj()))


def as_density(state: AnyState) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, StateVector):
        return to_density(state)
    raise InvalidStateError(f"Expected StateVector or DensityMatrix, got {type(state).__name__}")


def _check_targets(targets: Sequence[int], n: int) -> List[int]:
    targets = [int(q) for q in targets]
    for q in targets:
        if not 0 <= q < n:
            raise QubitIndexError(f"Qubit {q} out of range for a {n}-qubit register")
    if len(set(targets)) != len(targets):
        raise QubitIndexError(f"Duplicate qubit indices in {targets}")
    return targets


def partial_trace(rho: AnyState, keep: Sequence[int]) -> DensityMatrix:
    """
    Reduced state on the kept qubits.

    Kept qubits stay in their original relative order regardless of the
    order given. An empty keep list returns the trace as a 1x1 matrix.

    Raises:
        QubitIndexError: On out-of-range or duplicate indices
    """
    rho = as_density(rho)
    n = rho.num_qubits
    kept = sorted(_check_targets(keep, n))
    traced = [q for q in range(n) if q not in kept]

    tensor = rho.matrix.reshape([2] * (2 * n))
    remaining = n
    for q in reversed(traced):
        tensor = np.trace(tensor, axis1=q, axis2=q + remaining)
        remaining -= 1

    dim = 2 ** len(kept)
    return DensityMatrix(num_qubits=len(kept), matrix=np.asarray(tensor).reshape(dim, dim))


def embed(u: ArrayLike, targets: Sequence[int], n: int) -> ComplexMatrix:
    """
    Lift an operator on ``targets`` (in the given order) to the full n-qubit register.

    The result acts as u on the targets and as identity on every other qubit.
    """
    op = as_matrix(u)
    targets = _check_targets(targets, n)
    k = len(targets)
    if op.shape != (2 ** k, 2 ** k):
        raise DimensionError(f"Operator on {k} qubits must be {2 ** k}x{2 ** k}, got {op.shape}")

    rest = [q for q in range(n) if q not in targets]
    order = targets + rest
    full = np.kron(op, np.eye(2 ** len(rest), dtype=np.complex128))

    perm = list(np.argsort(order))
    full = full.reshape([2] * (2 * n)).transpose(perm + [p + n for p in perm])
    return full.reshape(2 ** n, 2 ** n)


def apply_unitary(state: AnyState, u_full: ArrayLike, tol: float = DEFAULT_TOL) -> AnyState:
    """
    U|psi> for state vectors, U rho U† for densities.

    Raises:
        DimensionError: If u does not match the state
        NotUnitaryError: If u fails is_unitary at tol
    """
    u = as_matrix(u_full)
    dim = 2 ** state.num_qubits
    if u.shape != (dim, dim):
        raise DimensionError(f"Operator shape {u.shape} does not match state dimension {dim}")
    if not is_unitary(u, tol):
        raise NotUnitaryError("Refusing to apply a non-unitary operator")

    if isinstance(state, StateVector):
        return StateVector(num_qubits=state.num_qubits, amplitudes=u @ state.amplitudes)
    rho = as_density(state)
    return DensityMatrix(num_qubits=rho.num_qubits, matrix=u @ rho.matrix @ u.conj().T)


def apply_kraus(rho: AnyState, kraus_ops: Sequence[ArrayLike], targets: Sequence[int],
                tol: float = DEFAULT_TOL) -> DensityMatrix:
    """
    Apply a local channel rho -> sum_k K_k rho K_k† on ``targets``.

    Raises:
        InvalidChannelError: If sum_k K_k† K_k != I within tol
    """
    rho = as_density(rho)
    ops = [as_matrix(k) for k in kraus_ops]
    if not ops:
        raise InvalidChannelError("A channel needs at least one Kraus operator")

    completeness = sum(k.conj().T @ k for k in ops)
    if max_abs_diff(completeness, np.eye(completeness.shape[0])) > tol:
        raise InvalidChannelError("Kraus operators are not trace preserving")

    out = np.zeros_like(rho.matrix)
    for k in ops:
        full = embed(k, targets, rho.num_qubits)
        out += full @ rho.matrix @ full.conj().T
    return DensityMatrix(num_qubits=rho.num_qubits, matrix=out)


def measure_discard(rho: AnyState, qubit: int, basis: MeasurementBasis) -> DensityMatrix:
    """Non-selective projective measurement: rho -> P0 rho P0 + P1 rho P1."""
    rho = as_density(rho)
    out = np.zeros_like(rho.matrix)
    for projector in basis.projectors():
        full = embed(projector, [qubit], rho.num_qubits)
        out += full @ rho.matrix @ full
    return DensityMatrix(num_qubits=rho.num_qubits, matrix=out)


def fidelity_pure(target: StateVector, rho: AnyState) -> float:
    """
    <target|rho|target>.

    The raw value may overshoot [0, 1] by rounding; callers clamp when reporting.
    """
    rho = as_density(rho)
    if target.num_qubits != rho.num_qubits:
        raise DimensionError(
            f"Target has {target.num_qubits} qubits, state has {rho.num_qubits}"
        )
    psi = target.amplitudes
    return float(np.real(np.vdot(psi, rho.matrix @ psi)))


def clamp_unit(value: float) -> float:
    return min(1.0, max(0.0, value))


def purity(rho: AnyState) -> float:
    """tr(rho^2)."""
    rho = as_density(rho)
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def haar_random_qubit(rng: np.random.Generator) -> StateVector:
    """a|0> + b|1> from a normalized pair of complex standard Gaussians."""
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return StateVector.from_amplitudes(z, normalize=True)


def bloch_unitary(theta: float, phi: float, lam: float) -> ComplexMatrix:
    """General single-qubit unitary from three Bloch angles (up to global phase)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=np.complex128,
    )


def random_unitary(rng: np.random.Generator) -> ComplexMatrix:
    theta = float(np.arccos(1.0 - 2.0 * rng.random()))
    phi, lam = (float(x) for x in 2.0 * np.pi * rng.random(2))
    return bloch_unitary(theta, phi, lam)


def amplitude_damping(gamma: float) -> List[ComplexMatrix]:
    """Single-qubit amplitude damping with gamma in [0, 1]."""
    g = float(gamma)
    if not 0.0 <= g <= 1.0:
        raise InvalidChannelError("gamma must be in [0,1]")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=np.complex128)
    return [k0, k1]


def depolarizing(p: float) -> List[ComplexMatrix]:
    """rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidChannelError("p must be in [0,1]")
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return [np.sqrt(1 - p) * np.eye(2, dtype=np.complex128)] + [np.sqrt(p / 3.0) * m for m in (x, y, z)]


def dephasing(p: float) -> List[ComplexMatrix]:
    """rho -> (1-p) rho + p Z rho Z."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidChannelError("p must be in [0,1]")
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return [np.sqrt(1 - p) * np.eye(2, dtype=np.complex128), np.sqrt(p) * z]


def sample_states(rng: np.random.Generator, count: int) -> List[StateVector]:
    """|0> followed by count - 1 Haar-random qubits; |0> anchors cross-trial comparisons."""
    if count < 1:
        return []
    return [StateVector.basis(0)] + [haar_random_qubit(rng) for _ in range(count - 1)]
