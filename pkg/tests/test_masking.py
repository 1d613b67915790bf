import numpy as np
import pytest
from numpy.testing import assert_allclose

from maskcorr.services.linalg import is_unitary, max_abs_diff
from maskcorr.services.masking import (
    PARTITION,
    PairId,
    PauliIndex,
    alpha,
    bell_projector,
    build_u_dec_xy,
    build_u_dec_xz,
    build_u_enc,
    closed_form_mask,
    decode,
    mask,
    operator_table,
    pauli,
    phi_mu,
    residual_state,
)
from maskcorr.services.quantum import (
    DensityMatrix,
    StateVector,
    clamp_unit,
    fidelity_pure,
    partial_trace,
    purity,
    to_density,
)
from maskcorr.utils.errors import DimensionError


def test_pauli_conventions():
    assert_allclose(pauli(2), [[0, -1j], [1j, 0]])
    assert [alpha(mu) for mu in PauliIndex] == [1, 1j, 1j, 1j]
    for mu in PauliIndex:
        assert_allclose(pauli(mu) @ pauli(mu), np.eye(2))


def test_bell_basis_is_orthonormal():
    gram = np.array([[phi_mu(a).inner(phi_mu(b)) for b in PauliIndex] for a in PauliIndex])
    assert_allclose(gram, np.eye(4), atol=1e-12)
    assert_allclose(sum(bell_projector(mu) for mu in PauliIndex), np.eye(4), atol=1e-12)


def test_partition():
    assert PARTITION.systems() == {"X": (0,), "Y": (1, 2), "Z": (3, 4)}
    assert PairId.XY.qubits == (0, 1, 2)
    assert PairId.XZ.qubits == (0, 3, 4)
    assert PairId.YZ.qubits == (1, 2, 3, 4)
    assert PairId.YZ.output_qubit == 1
    assert PairId.parse(" XZ ") is PairId.XZ
    with pytest.raises(ValueError):
        PairId.parse("xx")


@pytest.mark.parametrize("name", ["u_enc", "u_dec_xy", "u_dec_xz", "u_dec_yz"])
def test_operators_are_unitary(name):
    assert is_unitary(operator_table()[name], 1e-12)


def test_u_enc_vacuum_entry():
    assert build_u_enc()[0, 0] == pytest.approx((1 - 1j) / 2)


def test_operators_are_read_only():
    with pytest.raises(ValueError):
        build_u_enc()[0, 0] = 0


def test_xz_decoder_matches_xy():
    assert max_abs_diff(build_u_dec_xy(), build_u_dec_xz()) == 0.0


def test_mask_of_zero_leading_amplitude():
    gamma = mask(StateVector.basis(0))
    assert gamma.num_qubits == 5
    assert gamma.amplitudes[0] == pytest.approx((1 - 1j) / 4)


def test_mask_matches_closed_form(sample_qubits):
    for psi in sample_qubits:
        assert max_abs_diff(mask(psi).amplitudes, closed_form_mask(psi).amplitudes) <= 1e-12


def test_mask_rejects_multi_qubit():
    with pytest.raises(DimensionError):
        mask(StateVector.basis(0, 2))


@pytest.mark.parametrize("system", ["X", "Y", "Z"])
def test_single_systems_see_nothing(system, sample_qubits):
    qubits = list(PARTITION.systems()[system])
    reduced = [partial_trace(mask(psi), qubits).matrix for psi in sample_qubits]
    expected = np.eye(2 ** len(qubits)) / 2 ** len(qubits)
    for rho in reduced:
        assert max_abs_diff(rho, expected) <= 1e-10


@pytest.mark.parametrize("pair", list(PairId))
def test_every_pair_recovers(pair, sample_qubits):
    for psi in sample_qubits:
        result = decode(pair, mask(psi))
        assert result.output_qubit == pair.output_qubit
        assert clamp_unit(fidelity_pure(psi, result.recovered)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("pair", list(PairId))
def test_decode_from_reduced_pair_state(pair, haar_states):
    psi = haar_states[0]
    reduced = partial_trace(mask(psi), list(pair.qubits))
    result = decode(pair, reduced)
    assert result.post_global.num_qubits == len(pair.qubits)
    assert fidelity_pure(psi, result.recovered) == pytest.approx(1.0, abs=1e-10)


def test_decode_rejects_wrong_size():
    with pytest.raises(DimensionError):
        decode(PairId.XY, DensityMatrix.maximally_mixed(2))


def test_xy_decode_leaves_residual(haar_states):
    psi = haar_states[1]
    post = decode(PairId.XY, mask(psi)).post_global
    expected = np.kron(to_density(psi).matrix, to_density(residual_state()).matrix)
    assert max_abs_diff(post.matrix, expected) <= 1e-10


def test_yz_after_xy_decode_is_input_independent(sample_qubits):
    outputs = []
    for psi in sample_qubits:
        post = decode(PairId.XY, mask(psi)).post_global
        outputs.append(decode(PairId.YZ, partial_trace(post, [1, 2, 3, 4])).recovered.matrix)
    for rho in outputs[1:]:
        assert max_abs_diff(rho, outputs[0]) <= 1e-10


def test_xy_decode_leaves_a_pure(haar_states):
    post = decode(PairId.XY, mask(haar_states[3])).post_global
    assert purity(partial_trace(post, [0])) == pytest.approx(1.0, abs=1e-10)


def test_classical_bits_mask_and_recover():
    for bit in (0, 1):
        psi = StateVector.basis(bit)
        recovered = decode(PairId.XZ, mask(psi)).recovered
        assert recovered.matrix[bit, bit] == pytest.approx(1.0, abs=1e-10)
