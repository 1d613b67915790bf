"""
Teleportation Service

Standard teleportation over the same Bell pair the masking scheme uses.
It is the contrast case: until the measurement outcome is communicated,
Bob's qubit carries nothing about the input.

Register order is (A, S, N): Alice's input, Alice's half of the pair,
Bob's half.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .linalg import DEFAULT_TOL, ComplexMatrix, max_abs_diff
from .masking import PauliIndex, bell_phi, bell_projector, pauli
from .quantum import (
    DensityMatrix,
    StateVector,
    apply_unitary,
    clamp_unit,
    embed,
    fidelity_pure,
    make_rng,
    partial_trace,
    sample_states,
    to_density,
)
from .reports import VerificationReport, require_trials
from ..utils.errors import DimensionError

logger = logging.getLogger(__name__)

BOB = 2


def correction(mu: int) -> ComplexMatrix:
    """Bob's fix-up for Bell outcome phi_mu: I, X, Z X, Z."""
    table = {
        PauliIndex.I: pauli(0),
        PauliIndex.X: pauli(1),
        PauliIndex.Y: pauli(3) @ pauli(1),
        PauliIndex.Z: pauli(3),
    }
    return table[PauliIndex(mu)]


@dataclass(frozen=True)
class TeleportationRecord:
    """Outcome of one simulated teleportation."""
    pre_correction_bob: DensityMatrix
    per_outcome_fidelity: Tuple[float, float, float, float]
    average_post_fidelity: float
    outcome_probabilities: Tuple[float, float, float, float]
    sampled_outcome: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pre_correction_bob": self.pre_correction_bob.to_dict(),
            "per_outcome_fidelity": list(self.per_outcome_fidelity),
            "average_post_fidelity": self.average_post_fidelity,
            "outcome_probabilities": list(self.outcome_probabilities),
            "sampled_outcome": self.sampled_outcome,
        }


def teleportation_demo(psi: StateVector, seed: Optional[int] = None) -> TeleportationRecord:
    """
    Teleport psi from A to N with a Bell measurement on (A, S).

    The seed only picks which outcome is reported as sampled; every
    outcome branch is simulated exactly.
    """
    if psi.num_qubits != 1:
        raise DimensionError("Teleportation takes a single-qubit state")

    rho = to_density(psi.tensor(bell_phi())).matrix
    unconditioned = np.zeros((2, 2), dtype=np.complex128)
    probabilities = []
    fidelities = []

    for mu in PauliIndex:
        projector = embed(bell_projector(mu), [0, 1], 3)
        branch = projector @ rho @ projector
        p = float(np.real(np.trace(branch)))
        probabilities.append(p)

        bob = partial_trace(DensityMatrix(num_qubits=3, matrix=branch / p), [BOB])
        unconditioned += p * bob.matrix

        corrected = apply_unitary(bob, correction(mu))
        fidelities.append(clamp_unit(fidelity_pure(psi, corrected)))

    pre_correction = DensityMatrix(num_qubits=1, matrix=unconditioned)
    sampled = int(make_rng(seed).choice(4, p=np.array(probabilities) / sum(probabilities)))
    average = float(sum(p * f for p, f in zip(probabilities, fidelities)))
    logger.debug("Teleportation outcome probabilities %s", probabilities)

    return TeleportationRecord(
        pre_correction_bob=pre_correction,
        per_outcome_fidelity=tuple(fidelities),
        average_post_fidelity=average,
        outcome_probabilities=tuple(probabilities),
        sampled_outcome=sampled,
    )


def verify_teleportation(trials: int = 10, tol: float = DEFAULT_TOL, seed: int = 0) -> VerificationReport:
    """
    Bob's uncorrected state is I/2 for every input, and each corrected branch has fidelity 1.

    Deviation per trial is the worst of: distance of the uncorrected state
    from I/2, distance from the first trial's uncorrected state, and
    1 - fidelity over the four corrected outcomes.
    """
    require_trials("teleport", trials, 1)
    rng = make_rng(seed)
    mixed = DensityMatrix.maximally_mixed(1).matrix
    states = sample_states(rng, trials)

    baseline = None
    deviations = []
    details = []
    for i, psi in enumerate(states):
        record = teleportation_demo(psi, seed=int(rng.integers(2 ** 31)))
        pre = record.pre_correction_bob.matrix
        if baseline is None:
            baseline = pre
        deviation = max(
            max_abs_diff(pre, mixed),
            max_abs_diff(pre, baseline),
            max(1.0 - f for f in record.per_outcome_fidelity),
        )
        deviations.append(deviation)
        details.append({
            "trial": i,
            "pre_correction_deviation": max_abs_diff(pre, mixed),
            "min_corrected_fidelity": min(record.per_outcome_fidelity),
        })

    return VerificationReport.build("teleport", len(states), seed, tol, deviations, details)
