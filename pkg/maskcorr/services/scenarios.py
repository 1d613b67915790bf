"""
Scenario Service

Executable checks of every property of the masking scheme: hiding from
single systems, recovery from any pair, exclusivity of decoding,
dispatch by a local measurement, and no-signaling. run_all executes the
whole suite with per-scenario seeds derived from one master seed.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .linalg import DEFAULT_TOL, is_unitary, max_abs_diff
from .masking import (
    PARTITION,
    PairId,
    closed_form_mask,
    decode,
    mask,
    operator_table,
    residual_state,
)
from .quantum import (
    MeasurementBasis,
    StateVector,
    amplitude_damping,
    apply_kraus,
    apply_unitary,
    clamp_unit,
    dephasing,
    depolarizing,
    embed,
    fidelity_pure,
    make_rng,
    measure_discard,
    partial_trace,
    random_unitary,
    sample_states,
    to_density,
)
from .reports import VerificationReport, require_trials
from .teleportation import verify_teleportation
from ..utils.helpers import DEFAULT_SEED, derive_seed

logger = logging.getLogger(__name__)

YZ_QUBITS = list(PARTITION.y + PARTITION.z)

# Local channels applied to A by the no-signaling battery.
KRAUS_FAMILIES = (amplitude_damping, depolarizing, dephasing)

# Largest tolerance the closed-form check ever runs at.
CLOSED_FORM_TOL = 1e-12


def _states(rng: np.random.Generator, trials: int, states: Optional[Sequence[StateVector]]) -> List[StateVector]:
    return list(states) if states is not None else sample_states(rng, trials)


def verify_unitarity(trials: int = 1, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> VerificationReport:
    """Every operator the scheme builds satisfies U U† = U† U = I."""
    deviations = []
    details = []
    for name, u in operator_table().items():
        eye = np.eye(u.shape[0])
        deviation = max(max_abs_diff(u @ u.conj().T, eye), max_abs_diff(u.conj().T @ u, eye))
        deviations.append(deviation)
        details.append({"operator": name, "deviation": deviation, "unitary": is_unitary(u, tol)})
    return VerificationReport.build("unitarity", len(deviations), seed, tol, deviations, details)


def verify_closed_form(trials: int = 100, tol: float = CLOSED_FORM_TOL, seed: int = DEFAULT_SEED,
                       states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """mask(psi) agrees with the expanded sum over Bell sectors."""
    require_trials("closed-form", trials, 1)
    rng = make_rng(seed)
    deviations = [
        max_abs_diff(mask(psi).amplitudes, closed_form_mask(psi).amplitudes)
        for psi in _states(rng, trials, states)
    ]
    return VerificationReport.build("closed-form", len(deviations), seed, tol, deviations)


def verify_masking(trials: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                   states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """
    No single system holds the masked qubit.

    The reduced states of X, Y and Z are compared against those of the
    first trial; the worst entrywise difference is the deviation.
    """
    rng = make_rng(seed)
    psis = _states(rng, trials, states)
    require_trials("masking", len(psis), 2)

    systems = PARTITION.systems()
    baseline = None
    deviations = []
    details = []
    for i, psi in enumerate(psis):
        rho = to_density(mask(psi))
        reduced = {label: partial_trace(rho, qubits).matrix for label, qubits in systems.items()}
        if baseline is None:
            baseline = reduced
            continue
        per_system = {label: max_abs_diff(reduced[label], baseline[label]) for label in systems}
        deviations.append(max(per_system.values()))
        details.append({"trial": i, **per_system})
        logger.debug("masking trial %d: %s", i, per_system)

    return VerificationReport.build("masking", len(psis), seed, tol, deviations, details)


def verify_recovery(pair: PairId, trials: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                    states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """
    The pair recovers the masked qubit, both from the full pure state and
    from the pair's reduced density with the third system traced out.

    Deviation per trial is 1 - fidelity, worst of the two paths.
    """
    rng = make_rng(seed)
    psis = _states(rng, trials, states)
    require_trials(f"recovery-{pair.value}", len(psis), 1)

    deviations = []
    details = []
    for i, psi in enumerate(psis):
        gamma = mask(psi)
        from_full = decode(pair, gamma).recovered
        from_pair = decode(pair, partial_trace(to_density(gamma), pair.qubits)).recovered

        f_full = clamp_unit(fidelity_pure(psi, from_full))
        f_pair = clamp_unit(fidelity_pure(psi, from_pair))
        deviations.append(max(1.0 - f_full, 1.0 - f_pair))
        details.append({"trial": i, "fidelity_full": f_full, "fidelity_reduced": f_pair})

    return VerificationReport.build(f"recovery-{pair.value}", len(psis), seed, tol, deviations, details)


def verify_exclusivity(trials: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                       states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """
    After an XY decode, a YZ decode gets nothing that depends on psi.

    Checked per trial: the YZ-recovered state equals the first trial's,
    and the state left on (S1, N1, S2, N2) equals the fixed residual
    1/2 sum_mu |phi_mu>|phi_mu>. The YZ fidelity to psi is recorded only.
    """
    rng = make_rng(seed)
    psis = _states(rng, trials, states)
    require_trials("exclusivity", len(psis), 2)

    residual = to_density(residual_state()).matrix
    baseline = None
    deviations = []
    details = []
    for i, psi in enumerate(psis):
        first = decode(PairId.XY, mask(psi))
        second = decode(PairId.YZ, first.post_global).recovered
        residual_deviation = max_abs_diff(partial_trace(first.post_global, YZ_QUBITS).matrix, residual)
        if baseline is None:
            baseline = second.matrix

        yz_spread = max_abs_diff(second.matrix, baseline)
        deviations.append(max(yz_spread, residual_deviation))
        details.append({
            "trial": i,
            "yz_spread": yz_spread,
            "residual_deviation": residual_deviation,
            "yz_fidelity": clamp_unit(fidelity_pure(psi, second)),
        })

    return VerificationReport.build("exclusivity", len(psis), seed, tol, deviations, details)


def verify_dispatch(basis: Optional[MeasurementBasis] = None, trials: int = 100, tol: float = DEFAULT_TOL,
                    seed: int = DEFAULT_SEED, states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """
    Measuring A and discarding the outcome leaves the qubit decodable from YZ.

    With basis=None a fresh random basis is drawn per trial. Deviation per
    trial is the worst of 1 - fidelity and the gap to the fidelity of an
    undisturbed YZ decode. The XY decode after the measurement is reported
    in diagnostics without being asserted.
    """
    rng = make_rng(seed)
    psis = _states(rng, trials, states)
    require_trials("dispatch", len(psis), 1)

    deviations = []
    details = []
    xy_states = []
    xy_fidelities = []
    for i, psi in enumerate(psis):
        trial_basis = basis if basis is not None else MeasurementBasis.random(rng)
        gamma = mask(psi)
        dispatched = measure_discard(to_density(gamma), PARTITION.x[0], trial_basis)

        fidelity = clamp_unit(fidelity_pure(psi, decode(PairId.YZ, dispatched).recovered))
        undisturbed = clamp_unit(fidelity_pure(psi, decode(PairId.YZ, gamma).recovered))
        deviations.append(max(1.0 - fidelity, abs(fidelity - undisturbed)))

        xy = decode(PairId.XY, dispatched).recovered
        xy_states.append(xy.matrix)
        xy_fidelities.append(clamp_unit(fidelity_pure(psi, xy)))
        details.append({
            "trial": i,
            "theta": trial_basis.theta,
            "phi": trial_basis.phi,
            "fidelity": fidelity,
            "undisturbed_fidelity": undisturbed,
            "xy_fidelity": xy_fidelities[-1],
        })

    diagnostics = {
        "xy_min_fidelity": min(xy_fidelities),
        "xy_max_fidelity": max(xy_fidelities),
        "xy_state_spread": max(max_abs_diff(m, xy_states[0]) for m in xy_states),
    }
    logger.info("dispatch diagnostics: %s", diagnostics)
    return VerificationReport.build("dispatch", len(psis), seed, tol, deviations, details, diagnostics)


def verify_no_signaling(trials: int = 100, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                        num_measurements: int = 2, num_unitaries: int = 2, num_channels: int = 1,
                        states: Optional[Sequence[StateVector]] = None) -> VerificationReport:
    """
    No local action on X changes the reduced state of Y and Z.

    The battery per trial is: identity, measure-and-discard in random
    bases, random unitaries, and each Kraus family (amplitude damping,
    depolarizing, dephasing) with random strength, num_channels times.
    Every pair of resulting YZ states is compared.
    """
    rng = make_rng(seed)
    psis = _states(rng, trials, states)
    require_trials("nosignal", len(psis), 1)
    if 1 + num_measurements + num_unitaries + num_channels < 2:
        raise ValueError("nosignal needs at least one action besides identity")

    a = PARTITION.x[0]
    deviations = []
    details = []
    for i, psi in enumerate(psis):
        rho = to_density(mask(psi))
        outcomes = [rho]
        outcomes += [measure_discard(rho, a, MeasurementBasis.random(rng)) for _ in range(num_measurements)]
        outcomes += [
            apply_unitary(rho, embed(random_unitary(rng), [a], PARTITION.num_qubits))
            for _ in range(num_unitaries)
        ]
        outcomes += [
            apply_kraus(rho, family(rng.random()), [a])
            for _ in range(num_channels)
            for family in KRAUS_FAMILIES
        ]

        remote = [partial_trace(state, YZ_QUBITS).matrix for state in outcomes]
        pairwise = [max_abs_diff(left, right) for left, right in combinations(remote, 2)]
        deviations.append(max(pairwise))
        details.append({
            "trial": i,
            "actions": len(outcomes),
            "comparisons": len(pairwise),
            "max_deviation": max(pairwise),
        })

    return VerificationReport.build("nosignal", len(psis), seed, tol, deviations, details)


ScenarioFn = Callable[[int, float, int], VerificationReport]

# Ordered registry; the order is the order of run_all's output.
SCENARIOS: Dict[str, ScenarioFn] = {
    "unitarity": verify_unitarity,
    "closed-form": lambda trials, tol, seed: verify_closed_form(trials, min(tol, CLOSED_FORM_TOL), seed),
    "masking": verify_masking,
    "recovery-xy": lambda trials, tol, seed: verify_recovery(PairId.XY, trials, tol, seed),
    "recovery-xz": lambda trials, tol, seed: verify_recovery(PairId.XZ, trials, tol, seed),
    "recovery-yz": lambda trials, tol, seed: verify_recovery(PairId.YZ, trials, tol, seed),
    "exclusivity": verify_exclusivity,
    "dispatch": lambda trials, tol, seed: verify_dispatch(None, trials, tol, seed),
    "nosignal": verify_no_signaling,
    "teleport": verify_teleportation,
}

MIN_TRIALS: Dict[str, int] = {"masking": 2, "exclusivity": 2}

# The three recovery runs share a seed so they see the same input states.
SEED_KEYS: Dict[str, str] = {
    "recovery-xy": "recovery",
    "recovery-xz": "recovery",
    "recovery-yz": "recovery",
}


def scenario_seed(master_seed: int, name: str) -> int:
    return derive_seed(master_seed, SEED_KEYS.get(name, name))


def check_trials(names: Sequence[str], trials: int) -> None:
    """Fail early, before running anything, if a selected scenario cannot use ``trials``."""
    for name in names:
        require_trials(name, trials, MIN_TRIALS.get(name, 1))


class RunConfig(BaseModel):
    """Settings for a suite run."""
    trials: int = Field(100, ge=1)
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    workers: int = Field(1, ge=1)
    scenarios: List[str] = Field(default_factory=lambda: list(SCENARIOS))

    @field_validator("scenarios")
    @classmethod
    def _known_scenarios(cls, names: List[str]) -> List[str]:
        unknown = [n for n in names if n not in SCENARIOS]
        if unknown:
            raise ValueError(f"Unknown scenario(s): {', '.join(unknown)}")
        return names


def run_scenario(name: str, config: RunConfig) -> VerificationReport:
    """Run one registered scenario; exceptions become a failed report."""
    seed = scenario_seed(config.seed, name)
    logger.info("Running %s (trials=%d, seed=%d)", name, config.trials, seed)
    try:
        report = SCENARIOS[name](config.trials, config.tol, seed)
    except Exception as exc:
        logger.exception("Scenario %s raised", name)
        return VerificationReport.failed(name, config.trials, seed, config.tol, f"{type(exc).__name__}: {exc}")

    logger.info("%s: max_deviation=%.3g pass=%s", name, report.max_deviation, report.passed)
    return report


def run_all(config: Optional[RunConfig] = None) -> List[VerificationReport]:
    """
    Run the selected scenarios and return their reports in registry order.

    Each scenario owns a generator seeded from (master seed, scenario
    name), so results do not depend on worker count or scheduling.
    """
    config = config or RunConfig()
    names = [n for n in SCENARIOS if n in config.scenarios]

    if config.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda n: run_scenario(n, config), names))
    return [run_scenario(n, config) for n in names]
