"""Tests for noise channels, layouts and phase encoding."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.quantum.channel import (
    KrausChannel,
    Layout,
    PhaseScenario,
    amplitude_damping,
    default_layout,
    dephasing,
    depolarizing,
    identity,
    make_channel,
    mix_channels,
    output_derivative,
    output_state,
    pauli,
    pauli_probabilities,
    pure_output,
    scenario,
)
from src.quantum.qstate import (
    ParameterDomainError,
    ancilla_pair,
    fixed,
    generic_two_qubit,
    make_state,
    noon,
    single,
)

HALF = 1.0 / math.sqrt(2.0)


def _make_density(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _make_random_scenario(rng: np.random.Generator) -> PhaseScenario:
    kind = int(rng.integers(0, 4))
    if kind == 0:
        ch = amplitude_damping(float(rng.uniform()))
    elif kind == 1:
        p = rng.dirichlet([1, 1, 1, 1])
        ch = pauli(float(p[1]), float(p[2]), float(p[3]))
    elif kind == 2:
        ch = depolarizing(float(rng.uniform()))
    else:
        ch = dephasing(float(rng.uniform()))
    families = [
        single(float(rng.uniform()), float(rng.uniform(0, 2 * math.pi))),
        ancilla_pair(float(rng.uniform())),
        fixed("max_entangled"),
        noon(2),
        fixed("four_qubit_noon"),
        generic_two_qubit(list(rng.uniform(0, math.pi, 3)) + list(rng.uniform(0, 2 * math.pi, 3))),
    ]
    family = families[int(rng.integers(0, len(families)))]
    return scenario(ch, family, float(rng.uniform(0, 2 * math.pi)))


# ---------- Unit tests: channels ----------

@pytest.mark.unit
class TestChannels:
    @pytest.mark.parametrize("ch", [
        amplitude_damping(0.3),
        pauli(0.1, 0.2, 0.3),
        pauli(1.0, 0.0, 0.0),
        dephasing(0.25),
        depolarizing(0.4),
        identity(),
    ])
    def test_completeness(self, ch):
        total = sum(k.conj().T @ k for k in ch.kraus)
        assert np.abs(total - np.eye(2)).max() <= 1e-12

    def test_amplitude_damping_decays_excited_state(self):
        rho = np.diag([0.0, 1.0]).astype(complex)
        out = amplitude_damping(0.3).apply(rho)
        assert np.allclose(out, np.diag([0.3, 0.7]))

    def test_bit_flip(self):
        out = pauli(1.0, 0.0, 0.0).apply(np.diag([1.0, 0.0]).astype(complex))
        assert np.allclose(out, np.diag([0.0, 1.0]))

    def test_full_depolarizing_replaces_state(self):
        rho = _make_density(np.random.default_rng(1))
        assert np.allclose(depolarizing(1.0).apply(rho), np.eye(2) / 2)

    def test_time_sharing_reproduces_depolarizing(self):
        rng = np.random.default_rng(2)
        p = 0.35
        mixture = mix_channels(identity(), depolarizing(1.0), 1.0 - p)
        assert mixture.model == "mixture"
        for _ in range(5):
            rho = _make_density(rng)
            assert np.allclose(mixture.apply(rho), depolarizing(p).apply(rho), atol=1e-12)

    def test_apply_on_second_qubit(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[1, 1] = 1.0  # |01>
        out = amplitude_damping(1.0).apply(rho, target=1, n_qubits=2)
        assert out[0, 0].real == pytest.approx(1.0)

    @pytest.mark.parametrize("model,params", [
        ("amplitude_damping", {"eta": 1.5}),
        ("pauli", {"p1": 0.5, "p2": 0.4, "p3": 0.3}),
        ("depolarizing", {"p": -0.1}),
        ("dephasing", {"p3": float("nan")}),
        ("thermal", {}),
    ])
    def test_domain_errors(self, model, params):
        with pytest.raises(ParameterDomainError):
            make_channel(model, params)

    def test_simplex_edge_is_accepted(self):
        ch = pauli(0.2, 0.3, 0.5)
        assert pauli_probabilities(ch) == pytest.approx((0.0, 0.2, 0.3, 0.5))

    def test_incomplete_kraus_rejected(self):
        with pytest.raises(ValidationError):
            KrausChannel(model="identity", kraus=(0.5 * np.eye(2),))

    def test_labels(self):
        assert identity().label() == "identity"
        assert amplitude_damping(0.5).label() == "amplitude_damping(eta=0.5)"

    def test_pauli_probabilities_of_depolarizing(self):
        assert pauli_probabilities(depolarizing(0.4)) == pytest.approx((0.7, 0.1, 0.1, 0.1))

    def test_pauli_probabilities_rejects_damping(self):
        with pytest.raises(ParameterDomainError):
            pauli_probabilities(amplitude_damping(0.1))


# ---------- Unit tests: layouts ----------

@pytest.mark.unit
class TestLayout:
    def test_generator_counts(self):
        assert list(Layout(n_total=2, probes=(0,), ancillas=(1,)).generator_counts()) == [0, 0, 1, 1]
        assert list(Layout(n_total=2, probes=(0, 1)).generator_counts()) == [0, 1, 1, 2]

    def test_partition_checked(self):
        with pytest.raises(ValidationError):
            Layout(n_total=3, probes=(0,), ancillas=(1,))
        with pytest.raises(ValidationError):
            Layout(n_total=2, probes=(), ancillas=(0, 1))

    def test_default_layouts(self):
        assert default_layout(single(0.5)).probes == (0,)
        pair = default_layout(fixed("max_entangled"))
        assert pair.probes == (0,) and pair.ancillas == (1,)
        four = default_layout(fixed("four_qubit_noon"))
        assert four.probes == (0, 1) and four.ancillas == (2, 3)
        assert default_layout(noon(3)).probes == (0, 1, 2)

    def test_scenario_size_mismatch(self):
        with pytest.raises(ValidationError):
            PhaseScenario(channel=identity(), state=make_state(single(0.5)),
                          layout=Layout(n_total=2, probes=(0, 1)))


# ---------- Unit tests: encoding ----------

@pytest.mark.unit
class TestEncoding:
    def test_noiseless_phase_on_plus(self):
        rho = output_state(scenario(identity(), fixed("plus"), math.pi / 3))
        assert rho[1, 0] == pytest.approx(0.5 * np.exp(1j * math.pi / 3))

    def test_output_is_a_state(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            rho = output_state(_make_random_scenario(rng))
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
            assert np.abs(rho - rho.conj().T).max() <= 1e-12
            assert np.linalg.eigvalsh(rho).min() >= -1e-12

    @pytest.mark.parametrize("ch", [amplitude_damping(0.4), depolarizing(0.3), dephasing(0.2)])
    def test_phase_covariant_noise_commutes(self, ch):
        s = scenario(ch, ancilla_pair(0.6), 0.9)
        assert np.allclose(output_state(s), output_state(s, noise_first=True), atol=1e-12)

    def test_pure_output_matches_density(self):
        s = scenario(identity(), noon(3), 0.4)
        psi, _ = pure_output(s)
        assert np.allclose(np.outer(psi.amplitudes, psi.amplitudes.conj()), output_state(s))

    def test_at_changes_only_phase(self):
        s = scenario(identity(), fixed("plus"), 0.1)
        assert s.at(0.7).phi == 0.7
        assert s.at(0.7).state is s.state


@pytest.mark.acceptance
class TestDerivativeAcceptance:
    def test_analytic_matches_finite_difference(self):
        rng = np.random.default_rng(77)
        h = 1e-6
        worst = 0.0
        for _ in range(200):
            s = _make_random_scenario(rng)
            fd = (output_state(s.at(s.phi + h)) - output_state(s.at(s.phi - h))) / (2 * h)
            worst = max(worst, float(np.abs(fd - output_derivative(s)).max()))
        assert worst <= 1e-8
