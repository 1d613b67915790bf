import numpy as np
import pytest

from maskcorr.services.quantum import StateVector, haar_random_qubit

SEED = 20240611


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def haar_states(rng):
    return [haar_random_qubit(rng) for _ in range(8)]


@pytest.fixture
def plus_state():
    return StateVector(num_qubits=1, amplitudes=np.array([1, 1]) / np.sqrt(2))


@pytest.fixture
def sample_qubits(haar_states):
    """Fixed inputs plus a handful of Haar-random ones."""
    fixed = [
        StateVector.basis(0),
        StateVector.basis(1),
        StateVector(num_qubits=1, amplitudes=np.array([1, 1j]) / np.sqrt(2)),
        StateVector(num_qubits=1, amplitudes=np.array([0.6, 0.8j])),
    ]
    return fixed + haar_states
