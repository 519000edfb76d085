"""Tests for numeric QFI, the closed-form catalog and the audits."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.linalg.matcore import DimensionMismatchError
from src.metrology.fisher import (
    ClosedFormId,
    closed_form,
    closed_form_id,
    matching_closed_form,
    noon4_audit,
    noon4_qfi,
    optimal_ancilla_weight,
    pauli_na_audit,
    pauli_na_optimized,
    qfi,
    qfi_family,
    qfi_pure,
    qfi_scenario,
    time_sharing_report,
)
from src.quantum.channel import (
    amplitude_damping,
    dephasing,
    depolarizing,
    identity,
    pauli,
    pure_output,
    scenario,
)
from src.quantum.qstate import (
    ParameterDomainError,
    ancilla_pair,
    fixed,
    generic_two_qubit,
    noon,
    single,
)

HALF = 1.0 / math.sqrt(2.0)
GRID = np.linspace(0.0, 0.98, 50)


def _make_simplex_points(n: int, seed: int) -> np.ndarray:
    """(p1, p2, p3) drawn uniformly from the probability simplex."""
    return np.random.default_rng(seed).dirichlet([1, 1, 1, 1], size=n)[:, 1:]


def _cf(tag: str, **params) -> float:
    return closed_form(closed_form_id(tag, **params))


# ---------- Unit tests: numeric QFI ----------

@pytest.mark.unit
class TestNumericQfi:
    def test_noiseless_plus_is_one(self):
        assert qfi_family(identity(), fixed("plus")) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_noiseless_noon_is_heisenberg(self, n):
        assert qfi_family(identity(), noon(n)) == pytest.approx(n * n, abs=1e-10)

    def test_basis_state_has_no_information(self):
        assert qfi_family(amplitude_damping(0.3), single(1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_pure_formula_matches_mixed(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            params = list(rng.uniform(0, math.pi, 3)) + list(rng.uniform(0, 2 * math.pi, 3))
            s = scenario(identity(), generic_two_qubit(params), float(rng.uniform(0, 6)))
            psi, dpsi = pure_output(s)
            assert qfi_pure(psi, dpsi) == pytest.approx(qfi_scenario(s), abs=1e-9)

    def test_phase_independent_under_covariant_noise(self):
        values = [qfi_family(amplitude_damping(0.4), ancilla_pair(0.6), phi)
                  for phi in (0.1, 1.0, 2.5)]
        assert max(values) - min(values) <= 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            qfi(np.eye(2) / 2, np.zeros((4, 4)))


# ---------- Unit tests: closed forms ----------

@pytest.mark.unit
class TestClosedForms:
    def test_values_at_known_points(self):
        assert _cf("ad_single", eta=0.25) == pytest.approx(0.75)
        assert _cf("ad_gamma_half", eta=0.5) == pytest.approx(2 / 3)
        assert _cf("ad_gamma_opt", eta=0.75) == pytest.approx(4 / 9)
        assert _cf("dephasing", p3=0.25) == pytest.approx(0.25)
        assert _cf("depolarizing_single", p=0.4) == pytest.approx(0.36)
        assert _cf("depolarizing_ancilla", p=0.4) == pytest.approx(0.45)
        assert _cf("durkin_bound", eta=0.5, n=2) == pytest.approx(2.0)

    def test_durkin_bound_pole(self):
        assert _cf("durkin_bound", eta=0.0, n=2) == math.inf

    def test_pauli_ancilla_zero_denominators(self):
        assert _cf("pauli_ancilla", p1=0.0, p2=0.0, p3=0.0) == pytest.approx(1.0)
        assert _cf("pauli_ancilla", p1=0.5, p2=0.5, p3=0.0) == pytest.approx(0.0)

    def test_domain_errors(self):
        with pytest.raises(ParameterDomainError):
            closed_form_id("ad_single", eta=1.5)
        with pytest.raises(ParameterDomainError):
            closed_form_id("pauli_ancilla", p1=0.6, p2=0.6)
        with pytest.raises(ParameterDomainError):
            closed_form_id("durkin_bound", eta=0.5, n=0)

    def test_direct_model_raises_validation_error(self):
        with pytest.raises(ValidationError):
            ClosedFormId(tag="ad_single", eta=-0.1)

    def test_optimal_ancilla_weight(self):
        assert optimal_ancilla_weight(0.0) == pytest.approx(HALF)
        assert optimal_ancilla_weight(1.0) == 0.0
        with pytest.raises(ParameterDomainError):
            optimal_ancilla_weight(2.0)

    def test_optimal_weight_beats_neighbours(self):
        eta = 0.6
        g = optimal_ancilla_weight(eta)
        best = qfi_family(amplitude_damping(eta), ancilla_pair(g))
        for dg in (-0.02, 0.02):
            assert qfi_family(amplitude_damping(eta), ancilla_pair(g + dg)) < best

    def test_pauli_na_optimized_is_best_axis(self):
        for p1, p2, p3 in _make_simplex_points(20, seed=8):
            a = 1 - 2 * p2 - 2 * p3
            b = 1 - 2 * p1 - 2 * p3
            assert pauli_na_optimized(p1, p2, p3) == pytest.approx(max(a * a, b * b), abs=1e-12)


# ---------- Unit tests: scenario matching ----------

@pytest.mark.unit
class TestMatching:
    def test_balanced_pair_under_damping(self):
        s = scenario(amplitude_damping(0.5), ancilla_pair(HALF))
        cf = matching_closed_form(s, ancilla_pair(HALF))
        assert cf.tag == "ad_gamma_half"

    def test_optimal_pair_under_damping(self):
        fam = ancilla_pair(optimal_ancilla_weight(0.3))
        cf = matching_closed_form(scenario(amplitude_damping(0.3), fam), fam)
        assert cf.tag == "ad_gamma_opt"

    def test_four_decimal_weight_matches(self):
        fam = ancilla_pair(0.7071)
        cf = matching_closed_form(scenario(amplitude_damping(0.5), fam), fam)
        assert cf.tag == "ad_gamma_half"
        fam = single(0.7071)
        assert matching_closed_form(scenario(dephasing(0.25), fam), fam).tag == "dephasing"

    def test_nearby_weight_has_no_formula(self):
        fam = ancilla_pair(0.707)
        assert matching_closed_form(scenario(amplitude_damping(0.5), fam), fam) is None

    def test_unbalanced_single_has_no_formula(self):
        fam = single(0.3)
        assert matching_closed_form(scenario(amplitude_damping(0.3), fam), fam) is None

    def test_pauli_single(self):
        fam = single(HALF, 0.4)
        cf = matching_closed_form(scenario(pauli(0.1, 0.1, 0.2), fam, 0.3), fam)
        assert cf.tag == "pauli_na"
        assert cf.alpha == 0.4 and cf.phi == 0.3


# ---------- Unit tests: audits ----------

@pytest.mark.unit
class TestAudits:
    def test_noon4_numeric_value(self):
        for eta in (0.0, 0.3, 0.7):
            a = 1 - eta
            assert noon4_qfi(eta, 0.5) == pytest.approx(8 * a * a / (1 + a * a), abs=1e-10)

    def test_noon4_audit_reports_discrepancy(self):
        report = noon4_audit([0.0], [0.0, math.pi / 8])
        assert report.kind == "noon4"
        assert report.rows[0].agrees
        assert not report.rows[1].agrees
        assert report.max_discrepancy == pytest.approx(4.0, abs=1e-9)
        assert not report.all_agree

    def test_noon4_discrepancy_formula(self):
        report = noon4_audit([0.4], [math.pi / 8])
        a = 0.6
        assert report.rows[0].difference == pytest.approx(32 * a ** 4 / (1 + a * a) ** 3, abs=1e-9)

    def test_pauli_na_audit_agrees_when_p1_equals_p2(self):
        report = pauli_na_audit([(0.1, 0.1, 0.3, HALF, 0.2, 0.5), (0.2, 0.2, 0.1, 0.4, 1.0, 2.0)])
        assert report.all_agree

    def test_pauli_na_audit_flags_disagreement(self):
        report = pauli_na_audit([(0.3, 0.0, 0.0, HALF, 0.0, 0.0)])
        assert not report.all_agree
        assert report.max_discrepancy > 1e-3

    def test_time_sharing(self):
        report = time_sharing_report(0.5)
        assert report.noiseless_single == pytest.approx(1.0)
        assert report.noiseless_ancilla == pytest.approx(1.0)
        assert report.replacement_single == pytest.approx(0.0, abs=1e-12)
        assert report.replacement_ancilla == pytest.approx(0.0, abs=1e-12)
        assert report.mixture_single == pytest.approx(0.25)
        assert report.mixture_ancilla == pytest.approx(1 / 3)
        assert report.ancilla_gain > 0


# ---------- Acceptance: closed-form oracle suite ----------

@pytest.mark.acceptance
class TestOracleSuite:
    @pytest.mark.parametrize("tag,family", [
        ("ad_single", single(HALF)),
        ("ad_gamma_half", ancilla_pair(HALF)),
    ])
    def test_amplitude_damping(self, tag, family):
        for eta in GRID:
            numeric = qfi_family(amplitude_damping(eta), family)
            assert abs(numeric - _cf(tag, eta=eta)) <= 1e-9

    def test_amplitude_damping_optimal_weight(self):
        for eta in GRID:
            numeric = qfi_family(amplitude_damping(eta), ancilla_pair(optimal_ancilla_weight(eta)))
            assert abs(numeric - _cf("ad_gamma_opt", eta=eta)) <= 1e-9

    def test_dephasing(self):
        for p3 in GRID:
            assert abs(qfi_family(dephasing(p3), single(HALF)) - _cf("dephasing", p3=p3)) <= 1e-9

    def test_depolarizing(self):
        for p in GRID:
            assert abs(qfi_family(depolarizing(p), fixed("plus"))
                       - _cf("depolarizing_single", p=p)) <= 1e-9
            assert abs(qfi_family(depolarizing(p), fixed("max_entangled"))
                       - _cf("depolarizing_ancilla", p=p)) <= 1e-9

    def test_pauli_no_ancilla_on_its_agreement_set(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            p1 = float(rng.uniform(0, 0.5))
            p3 = float(rng.uniform(0, 1 - 2 * p1))
            eps = float(rng.uniform())
            alpha, phi = (float(x) for x in rng.uniform(0, 2 * math.pi, 2))
            numeric = qfi_family(pauli(p1, p1, p3), single(eps, alpha), phi)
            printed = _cf("pauli_na", p1=p1, p2=p1, p3=p3, eps=eps, alpha=alpha, phi=phi)
            assert abs(numeric - printed) <= 1e-9

    def test_pauli_ancilla(self):
        for p1, p2, p3 in _make_simplex_points(50, seed=21):
            numeric = qfi_family(pauli(p1, p2, p3), fixed("max_entangled"))
            printed = _cf("pauli_ancilla", p1=p1, p2=p2, p3=p3)
            assert abs(numeric - printed) <= 1e-9


@pytest.mark.acceptance
@pytest.mark.slow
class TestPauliAncillaAdvantage:
    def test_ancilla_never_loses(self):
        worst = math.inf
        for p1, p2, p3 in _make_simplex_points(10_000, seed=99):
            gap = _cf("pauli_ancilla", p1=p1, p2=p2, p3=p3) - pauli_na_optimized(p1, p2, p3)
            worst = min(worst, gap)
        assert worst >= -1e-9

    @pytest.mark.parametrize("p1,p2,p3", [
        (0.0, 0.3, 0.7), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0),
        (0.4, 0.0, 0.6), (1.0, 0.0, 0.0),
    ])
    def test_orthogonal_noise_gives_unit_qfi(self, p1, p2, p3):
        assert abs(_cf("pauli_ancilla", p1=p1, p2=p2, p3=p3) - 1.0) <= 1e-12
        assert abs(qfi_family(pauli(p1, p2, p3), fixed("max_entangled")) - 1.0) <= 1e-9


@pytest.mark.acceptance
class TestFigure2aOrdering:
    def test_ancilla_curves_dominate(self):
        from src.cli.figures import fig2a

        table = fig2a()
        for eta, single_q, half_q, opt_q in table.rows:
            assert half_q >= single_q - 1e-9
            assert opt_q >= half_q - 1e-9
            if 0.0 < eta < 1.0:
                assert half_q > single_q
        row = next(r for r in table.rows if r[0] == 0.75)
        assert row[3] == pytest.approx(4 / 9, abs=1e-9)
