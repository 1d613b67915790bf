"""
Masking Scheme Service

Builds the operators and states of the three-party masking scheme and
runs the mask / decode pipelines.

Register order is (A, S1, N1, S2, N2) = qubits (0, 1, 2, 3, 4), grouped
into systems X = {A}, Y = {S1, N1} and Z = {S2, N2}.
"""

import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from .linalg import ComplexMatrix, frozen, tensor, transpose
from .quantum import (
    AnyState,
    DensityMatrix,
    StateVector,
    apply_unitary,
    as_density,
    embed,
    partial_trace,
    to_density,
)
from ..utils.errors import DimensionError

logger = logging.getLogger(__name__)


class PauliIndex(IntEnum):
    I = 0
    X = 1
    Y = 2
    Z = 3


_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

# alpha_0 = 1, alpha_1 = alpha_2 = alpha_3 = i
_ALPHAS = (1.0 + 0j, 1j, 1j, 1j)


def pauli(mu: int) -> ComplexMatrix:
    """sigma_mu, with sigma_0 = I and sigma_2 = [[0, -i], [i, 0]]."""
    return _PAULIS[PauliIndex(mu)].copy()


def alpha(mu: int) -> complex:
    """Phase paired with the Pauli of index mu."""
    return _ALPHAS[PauliIndex(mu)]


@dataclass(frozen=True)
class SystemPartition:
    """Fixed grouping of the five-qubit register into X, Y and Z."""
    labels: Tuple[str, ...] = ("A", "S1", "N1", "S2", "N2")
    x: Tuple[int, ...] = (0,)
    y: Tuple[int, ...] = (1, 2)
    z: Tuple[int, ...] = (3, 4)

    def __post_init__(self):
        everything = sorted(self.x + self.y + self.z)
        if everything != list(range(len(self.labels))):
            raise DimensionError("Systems must cover every qubit exactly once")

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def systems(self) -> Dict[str, Tuple[int, ...]]:
        return {"X": self.x, "Y": self.y, "Z": self.z}


PARTITION = SystemPartition()


class PairId(Enum):
    """Two-system pair from which the masked qubit is decoded."""
    XY = "xy"
    XZ = "xz"
    YZ = "yz"

    @classmethod
    def parse(cls, name: str) -> "PairId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"Unknown pair '{name}', expected one of xy, xz, yz") from None

    @property
    def qubits(self) -> Tuple[int, ...]:
        """Register qubits covered by the pair, ascending."""
        systems = PARTITION.systems()
        first, second = self.name
        return tuple(sorted(systems[first] + systems[second]))

    @property
    def output_qubit(self) -> int:
        """Qubit on which the decoded information appears: A for XY/XZ, S1 for YZ."""
        return PARTITION.x[0] if self is not PairId.YZ else PARTITION.y[0]


def bell_phi() -> StateVector:
    """(|00> + |11>) / sqrt(2)."""
    return StateVector(num_qubits=2, amplitudes=np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2))


def phi_mu(mu: int) -> StateVector:
    """Bell basis state (sigma_mu x I)|phi>."""
    amps = tensor(pauli(mu), np.eye(2)) @ bell_phi().amplitudes
    return StateVector(num_qubits=2, amplitudes=amps)


def bell_projector(mu: int) -> ComplexMatrix:
    """|phi_mu><phi_mu|."""
    v = phi_mu(mu).amplitudes
    return np.outer(v, v.conj())


@lru_cache(maxsize=None)
def build_u_enc() -> ComplexMatrix:
    """
    Encoding unitary on (A, S1, N1, S2, N2):

        U_enc = 1/2 sum_mu alpha_mu^-1  s_mu (x) s_mu (x) I (x) s_mu (x) I
    """
    eye = np.eye(2)
    u = sum(
        (1 / alpha(mu)) * tensor(pauli(mu), pauli(mu), eye, pauli(mu), eye)
        for mu in PauliIndex
    )
    return frozen(u / 2)


@lru_cache(maxsize=None)
def build_u_dec_yz() -> ComplexMatrix:
    """Decoder on (S1, N1, S2, N2), output on S1."""
    u = sum(
        alpha(mu) * tensor(bell_projector(mu), np.eye(2), transpose(pauli(mu)))
        for mu in PauliIndex
    )
    return frozen(u)


@lru_cache(maxsize=None)
def build_u_dec_xy() -> ComplexMatrix:
    """Decoder on (A, S1, N1), output on A."""
    u = sum(alpha(mu) * tensor(pauli(mu), bell_projector(mu)) for mu in PauliIndex)
    return frozen(u)


@lru_cache(maxsize=None)
def build_u_dec_xz() -> ComplexMatrix:
    """Decoder on (A, S2, N2), output on A. Same matrix as the XY decoder on other qubits."""
    u = sum(alpha(mu) * tensor(pauli(mu), bell_projector(mu)) for mu in PauliIndex)
    return frozen(u)


def decoder(pair: PairId) -> ComplexMatrix:
    builders = {
        PairId.XY: build_u_dec_xy,
        PairId.XZ: build_u_dec_xz,
        PairId.YZ: build_u_dec_yz,
    }
    return builders[pair]()


def operator_table() -> Dict[str, ComplexMatrix]:
    """Every operator the scheme constructs, by export name."""
    return {
        "u_enc": build_u_enc(),
        "u_dec_xy": build_u_dec_xy(),
        "u_dec_xz": build_u_dec_xz(),
        "u_dec_yz": build_u_dec_yz(),
    }


def _check_single_qubit(psi: StateVector) -> None:
    if not isinstance(psi, StateVector) or psi.num_qubits != 1:
        raise DimensionError("Masking takes a single-qubit StateVector")


def mask(psi: StateVector) -> StateVector:
    """|Gamma> = U_enc (|psi> (x) |phi> (x) |phi>)."""
    _check_single_qubit(psi)
    bell = bell_phi()
    initial = psi.tensor(bell).tensor(bell)
    return apply_unitary(initial, build_u_enc())


def closed_form_mask(psi: StateVector) -> StateVector:
    """The expanded masked state, 1/2 sum_mu alpha_mu^-1 s_mu|psi> |phi_mu> |phi_mu>, built without U_enc."""
    _check_single_qubit(psi)
    amps = sum(
        (1 / alpha(mu)) * np.kron(
            pauli(mu) @ psi.amplitudes,
            np.kron(phi_mu(mu).amplitudes, phi_mu(mu).amplitudes),
        )
        for mu in PauliIndex
    )
    return StateVector(num_qubits=PARTITION.num_qubits, amplitudes=amps / 2)


def residual_state() -> StateVector:
    """1/2 sum_mu |phi_mu>|phi_mu> on (S1, N1, S2, N2), left behind by an XY decode."""
    amps = sum(np.kron(phi_mu(mu).amplitudes, phi_mu(mu).amplitudes) for mu in PauliIndex)
    return StateVector(num_qubits=4, amplitudes=amps / 2)


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of a pair decode."""
    pair: PairId
    recovered: DensityMatrix
    post_global: DensityMatrix
    output_qubit: int


def decode(pair: PairId, state: AnyState) -> DecodeResult:
    """
    Apply the pair's decoder and trace down to its output qubit.

    Args:
        pair: Which two systems to decode from
        state: Either the full five-qubit state, or the reduced state on the
            pair's qubits (in register order)

    Returns:
        DecodeResult with the recovered single-qubit density and the full
        post-decode state (on the same qubits as the input)

    Raises:
        DimensionError: If the state covers neither the full register nor the pair
    """
    n = state.num_qubits
    if n == PARTITION.num_qubits:
        targets: List[int] = list(pair.qubits)
        output = pair.output_qubit
    elif n == len(pair.qubits):
        targets = list(range(n))
        output = pair.qubits.index(pair.output_qubit)
    else:
        raise DimensionError(
            f"Decoding {pair.name} needs a {PARTITION.num_qubits}-qubit state or the "
            f"{len(pair.qubits)}-qubit pair state, got {n} qubits"
        )

    u_full = embed(decoder(pair), targets, n)
    post = apply_unitary(state, u_full)
    post_density = to_density(post) if isinstance(post, StateVector) else as_density(post)
    recovered = partial_trace(post_density, [output])
    logger.debug("Decoded %s on %d-qubit input, output qubit %d", pair.name, n, output)

    return DecodeResult(pair=pair, recovered=recovered, post_global=post_density, output_qubit=output)
