"""Tests for the probe/ancilla state catalog."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.quantum.qstate import (
    ParameterDomainError,
    PureState,
    StateFamily,
    ancilla_pair,
    basis_state,
    bell_basis,
    density,
    fixed,
    generic_two_qubit,
    make_family,
    make_state,
    noon,
    single,
)

HALF = 1.0 / math.sqrt(2.0)


@pytest.mark.unit
class TestFamilies:
    def test_single_amplitudes(self):
        psi = make_state(single(0.6, math.pi / 2))
        assert psi.n_qubits == 1
        assert np.allclose(psi.amplitudes, [0.6, 0.8j])

    def test_plus(self):
        assert np.allclose(make_state(fixed("plus")).amplitudes, [HALF, HALF])

    def test_ancilla_pair(self):
        psi = make_state(ancilla_pair(0.6))
        assert np.allclose(psi.amplitudes, [0.6, 0, 0, 0.8])

    def test_max_entangled_matches_balanced_pair(self):
        a = make_state(fixed("max_entangled")).amplitudes
        b = make_state(ancilla_pair(HALF)).amplitudes
        assert np.allclose(a, b)

    def test_noon(self):
        psi = make_state(noon(3))
        assert psi.n_qubits == 3
        assert psi.amplitudes[0] == pytest.approx(HALF)
        assert psi.amplitudes[7] == pytest.approx(HALF)
        assert np.count_nonzero(np.abs(psi.amplitudes) > 1e-15) == 2

    def test_four_qubit_noon(self):
        assert fixed("four_qubit_noon").n_qubits == 4
        assert make_state(fixed("four_qubit_noon")).amplitudes.size == 16

    def test_generic_zero_angles_is_ground_state(self):
        psi = make_state(generic_two_qubit([0, 0, 0, 0, 0, 0]))
        assert np.allclose(psi.amplitudes, [1, 0, 0, 0])

    def test_generic_first_amplitude_non_negative(self):
        psi = make_state(generic_two_qubit([math.pi, 0, 0, 1.0, 2.0, 3.0]))
        assert psi.amplitudes[0].real >= 0.0
        assert abs(psi.amplitudes[0].imag) < 1e-15

    def test_generic_random_states_are_normalized(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            params = list(rng.uniform(0, math.pi, 3)) + list(rng.uniform(0, 2 * math.pi, 3))
            psi = make_state(generic_two_qubit(params))
            assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.unit
class TestDomain:
    @pytest.mark.parametrize("eps", [-0.1, 1.5, float("nan")])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(ParameterDomainError):
            single(eps)

    def test_alpha_out_of_range(self):
        with pytest.raises(ParameterDomainError):
            single(0.5, 2 * math.pi)

    def test_gamma_out_of_range(self):
        with pytest.raises(ParameterDomainError):
            ancilla_pair(1.2)

    def test_noon_needs_positive_n(self):
        with pytest.raises(ParameterDomainError):
            noon(0)

    def test_generic_needs_six(self):
        with pytest.raises(ParameterDomainError):
            generic_two_qubit([0.1, 0.2])

    def test_make_family_unknown_tag(self):
        with pytest.raises(ParameterDomainError):
            make_family(tag="w_state")

    def test_direct_model_raises_validation_error(self):
        with pytest.raises(ValidationError):
            StateFamily(tag="single", eps=2.0)


@pytest.mark.unit
class TestPureState:
    def test_norm_checked(self):
        with pytest.raises(ValidationError):
            PureState(n_qubits=1, amplitudes=[1.0, 1.0])

    def test_size_checked(self):
        with pytest.raises(ValidationError):
            PureState(n_qubits=2, amplitudes=[1.0, 0.0])

    def test_from_amplitudes_normalizes(self):
        psi = PureState.from_amplitudes([3.0, 4.0])
        assert np.allclose(psi.amplitudes, [0.6, 0.8])

    def test_zero_vector(self):
        with pytest.raises(ParameterDomainError):
            PureState.from_amplitudes([0.0, 0.0])

    def test_basis_state_index(self):
        psi = basis_state("0011")
        assert psi.n_qubits == 4
        assert psi.amplitudes[3] == 1.0

    def test_bell_basis_orthonormal(self):
        basis = bell_basis()
        gram = np.array([[a.overlap(b) for b in basis] for a in basis])
        assert np.allclose(gram, np.eye(4))

    def test_density_is_projector(self):
        rho = density(make_state(single(0.3, 1.0)))
        assert np.allclose(rho @ rho, rho)
        assert np.trace(rho).real == pytest.approx(1.0)
