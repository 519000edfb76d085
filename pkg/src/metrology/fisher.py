"""Quantum Fisher information.

Mixed states use the spectral form

    J = sum_{j,k : l_j + l_k > cutoff} 2 |<j|drho|k>|^2 / (l_j + l_k)

over the eigenpairs (l_j, |j>) of rho, with cutoff = 1e-12 * max(1, l_max).
Pure states use 4(<d psi|d psi> - |<psi|d psi>|^2).

The closed-form catalog holds the printed expressions used as oracles. Two
of them only agree with the numeric value on part of their domain:

  * ad_noon4 carries a cos(8 phi) term; the numeric QFI of the 4-qubit NOON
    state under amplitude damping is phi-independent and equals the printed
    value only where cos(8 phi) = 1.
  * pauli_na at eps = 1/sqrt(2) equals A^2 cos^2(t) + B^2 sin^2(t), with
    t = alpha + phi, A = 1 - 2p2 - 2p3, B = 1 - 2p1 - 2p3. The numeric value
    agrees at t = 0, pi/2 (mod pi) up to swapping the two, and everywhere
    when p1 = p2; both share the maximum over alpha, max(A^2, B^2).

``noon4_audit`` and ``pauli_na_audit`` report the comparison instead of
assuming either side.
"""

import math
from typing import Iterable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.linalg.matcore import CMat, DimensionMismatchError, eigh
from src.quantum.channel import (
    KrausChannel,
    Layout,
    PhaseScenario,
    amplitude_damping,
    default_layout,
    depolarizing,
    identity,
    mix_channels,
    output_derivative,
    output_state,
    pauli,
    scenario,
)
from src.quantum.qstate import (
    ParameterDomainError,
    PureState,
    StateFamily,
    fixed,
    single,
)
from src.schemas.results import (
    AuditReport,
    NoonAuditRow,
    PauliNaAuditRow,
    TimeSharingReport,
)
from src.utils.logging import log, get_logger
from src.utils.search import golden_minimize

MODULE = "fisher"
logger = get_logger()

PAIR_CUTOFF = 1e-12
AUDIT_TOL = 1e-6
MATCH_TOL = 1e-9
# State weights typed at four decimals (0.7071) still select the printed formula
WEIGHT_TOL = 1e-4

ClosedFormTag = Literal[
    "ad_single",
    "ad_gamma_half",
    "ad_gamma_opt",
    "ad_noon4",
    "dephasing",
    "depolarizing_single",
    "depolarizing_ancilla",
    "pauli_na",
    "pauli_ancilla",
    "durkin_bound",
]


# =============================================================================
# NUMERIC QFI
# =============================================================================

def qfi(rho: CMat, drho: CMat) -> float:
    """QFI of ``rho`` for the parameter whose derivative is ``drho``.

    Raises:
        DimensionMismatchError: rho and drho differ in shape.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    drho = np.asarray(drho, dtype=np.complex128)
    if rho.shape != drho.shape:
        raise DimensionMismatchError(f"rho {rho.shape} vs drho {drho.shape}")

    dec = eigh(rho)
    lam = dec.eigenvalues
    v = dec.eigenvectors
    d = v.conj().T @ drho @ v

    sums = lam[:, None] + lam[None, :]
    cutoff = PAIR_CUTOFF * max(1.0, float(lam.max()))
    mask = sums > cutoff
    terms = np.zeros_like(sums)
    terms[mask] = 2.0 * np.abs(d[mask]) ** 2 / sums[mask]
    return max(float(terms.sum()), 0.0)


def qfi_pure(psi: PureState, dpsi: np.ndarray) -> float:
    """4(<psi'|psi'> - |<psi|psi'>|^2)."""
    a = psi.amplitudes
    dpsi = np.asarray(dpsi, dtype=np.complex128)
    if dpsi.shape != a.shape:
        raise DimensionMismatchError(f"state {a.shape} vs derivative {dpsi.shape}")
    value = 4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(a, dpsi)) ** 2)
    return max(float(value), 0.0)


def qfi_scenario(s: PhaseScenario) -> float:
    return qfi(output_state(s), output_derivative(s))


def qfi_family(
    channel: KrausChannel,
    family: StateFamily,
    phi: float = math.pi / 2.0,
    layout: Optional[Layout] = None,
) -> float:
    """QFI of a state family under ``channel`` with its default layout."""
    return qfi_scenario(scenario(channel, family, phi, layout))


# =============================================================================
# CLOSED FORMS
# =============================================================================

class ClosedFormId(BaseModel):
    """A printed QFI expression and the point it is evaluated at."""

    model_config = ConfigDict(frozen=True)

    tag: ClosedFormTag
    eta: float = 0.0
    p: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    eps: float = 1.0 / math.sqrt(2.0)
    alpha: float = 0.0
    phi: float = 0.0
    n: int = 1

    @model_validator(mode="after")
    def check_domain(self) -> "ClosedFormId":
        for name in ("eta", "p", "p1", "p2", "p3", "eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.p1 + self.p2 + self.p3 > 1.0 + MATCH_TOL:
            raise ValueError(f"p1+p2+p3={self.p1 + self.p2 + self.p3} exceeds 1")
        if self.n < 1:
            raise ValueError(f"N={self.n} must be positive")
        if not (math.isfinite(self.alpha) and math.isfinite(self.phi)):
            raise ValueError("alpha and phi must be finite")
        return self


def closed_form_id(tag: str, **params: float) -> ClosedFormId:
    """Build a ClosedFormId, raising ParameterDomainError on bad input."""
    try:
        return ClosedFormId(tag=tag, **params)
    except ValidationError as e:
        raise ParameterDomainError(
            "; ".join(err["msg"] for err in e.errors())
        ) from e


def _noon4_printed(eta: float, phi: float) -> float:
    q = (eta - 2.0) * eta + 2.0
    inner = 2.0 * (eta - 1.0) ** 2 * math.cos(8.0 * phi) + (eta - 2.0) * eta * q + 2.0
    return 8.0 * (eta - 1.0) ** 2 * inner / q ** 3


def _pauli_na_printed(p1: float, p2: float, p3: float, eps: float, theta: float) -> float:
    bracket = (
        p1 * (2.0 - 4.0 * p3)
        + 4.0 * p3
        - 4.0 * p3 * (p2 + p3)
        - 1.0
        - 2.0 * p1 ** 2
        - 2.0 * (p2 - 1.0) * p2
        + 2.0 * (p1 - p2) * math.cos(2.0 * theta) * (p1 + p2 + 2.0 * p3 - 1.0)
    )
    return 4.0 * eps ** 2 * (eps ** 2 - 1.0) * bracket


def _pauli_ancilla(p1: float, p2: float, p3: float) -> float:
    flip = p1 + p2
    first = (p1 - p2) ** 2 / flip if flip > 0.0 else 0.0
    rest = 1.0 - p1 - p2
    second = (p1 + p2 + 2.0 * p3 - 1.0) ** 2 / rest if rest > 0.0 else 0.0
    return first + second


def closed_form(cf: ClosedFormId) -> float:
    """Value of the printed expression ``cf.tag`` at ``cf``'s parameters.

    ``durkin_bound`` is an upper bound on the QFI, not a QFI; at eta = 0 it
    is returned as +inf.
    """
    tag = cf.tag
    a = 1.0 - cf.eta
    if tag == "ad_single":
        return a
    if tag == "ad_gamma_half":
        return 2.0 * a / (2.0 - cf.eta)
    if tag == "ad_gamma_opt":
        return 4.0 * a / (math.sqrt(a) + 1.0) ** 2
    if tag == "ad_noon4":
        return _noon4_printed(cf.eta, cf.phi)
    if tag == "dephasing":
        return (1.0 - 2.0 * cf.p3) ** 2
    if tag == "depolarizing_single":
        return (1.0 - cf.p) ** 2
    if tag == "depolarizing_ancilla":
        return 2.0 * (1.0 - cf.p) ** 2 / (2.0 - cf.p)
    if tag == "pauli_na":
        return _pauli_na_printed(cf.p1, cf.p2, cf.p3, cf.eps, cf.alpha + cf.phi)
    if tag == "pauli_ancilla":
        return _pauli_ancilla(cf.p1, cf.p2, cf.p3)
    # durkin_bound
    if cf.eta == 0.0:
        log.debug(logger, MODULE, "durkin_pole", "Bound is infinite at eta=0", n=cf.n)
        return math.inf
    return cf.n * a / cf.eta


def optimal_ancilla_weight(eta: float) -> float:
    """gamma maximizing the QFI of gamma|00> + sqrt(1-gamma^2)|11> under damping."""
    if not 0.0 <= eta <= 1.0:
        raise ParameterDomainError(f"eta={eta} outside [0, 1]")
    r = math.sqrt(1.0 - eta)
    return math.sqrt(r / (1.0 + r))


def pauli_na_optimized(p1: float, p2: float, p3: float) -> float:
    """max over alpha of the no-ancilla expression at eps = 1/sqrt(2).

    The expression is affine in cos(2(alpha + phi)), so the stationary points
    cos = +1 and cos = -1 are compared with a golden-section search on alpha
    in [0, pi].
    """
    cf = closed_form_id("pauli_na", p1=p1, p2=p2, p3=p3)
    eps = 1.0 / math.sqrt(2.0)

    def neg(alpha: float) -> float:
        return -_pauli_na_printed(cf.p1, cf.p2, cf.p3, eps, alpha)

    _, best = golden_minimize(neg, 0.0, math.pi)
    candidates = [-neg(0.0), -neg(0.5 * math.pi), -best]
    return max(candidates)


# =============================================================================
# SCENARIO MATCHING
# =============================================================================

def _close(x: float, y: float) -> bool:
    return abs(x - y) <= WEIGHT_TOL


def matching_closed_form(s: PhaseScenario, family: StateFamily) -> Optional[ClosedFormId]:
    """Printed expression describing ``s`` when one exists."""
    ch = s.channel
    model = ch.model
    layout = s.layout
    if layout != default_layout(family):
        return None

    half = 1.0 / math.sqrt(2.0)
    is_balanced_single = family.tag == "plus" or (
        family.tag == "single" and _close(family.eps, half)
    )
    is_bell = family.tag == "max_entangled" or (
        family.tag == "ancilla_pair" and _close(family.gamma, half)
    )

    if model == "amplitude_damping":
        eta = ch.params["eta"]
        if is_balanced_single:
            return closed_form_id("ad_single", eta=eta)
        if is_bell:
            return closed_form_id("ad_gamma_half", eta=eta)
        if family.tag == "ancilla_pair" and _close(family.gamma, optimal_ancilla_weight(eta)):
            return closed_form_id("ad_gamma_opt", eta=eta)
        if family.tag == "four_qubit_noon":
            return closed_form_id("ad_noon4", eta=eta, phi=s.phi)
    elif model == "dephasing" and (is_balanced_single or is_bell):
        return closed_form_id("dephasing", p3=ch.params["p3"])
    elif model == "depolarizing":
        if is_balanced_single:
            return closed_form_id("depolarizing_single", p=ch.params["p"])
        if family.tag == "max_entangled":
            return closed_form_id("depolarizing_ancilla", p=ch.params["p"])
    elif model == "pauli":
        p1, p2, p3 = ch.params["p1"], ch.params["p2"], ch.params["p3"]
        if family.tag == "single":
            return closed_form_id("pauli_na", p1=p1, p2=p2, p3=p3, eps=family.eps,
                                  alpha=family.alpha, phi=s.phi)
        if family.tag == "max_entangled":
            return closed_form_id("pauli_ancilla", p1=p1, p2=p2, p3=p3)
    return None


# =============================================================================
# AUDITS
# =============================================================================

def noon4_qfi(eta: float, phi: float) -> float:
    """Numeric QFI of (|0000> + |1111>)/sqrt(2) with damping on qubits 0 and 1."""
    return qfi_family(amplitude_damping(eta), fixed("four_qubit_noon"), phi)


def noon4_audit(etas: Iterable[float], phis: Iterable[float]) -> AuditReport:
    """Numeric vs printed 4-qubit NOON QFI over an (eta, phi) grid."""
    phis = list(phis)
    rows = []
    for eta in etas:
        for phi in phis:
            numeric = noon4_qfi(eta, phi)
            printed = _noon4_printed(eta, phi)
            diff = numeric - printed
            rows.append(NoonAuditRow(
                eta=eta, phi=phi, numeric=numeric, printed=printed,
                difference=diff, agrees=abs(diff) <= AUDIT_TOL,
            ))
    report = AuditReport(
        kind="noon4",
        tolerance=AUDIT_TOL,
        rows=rows,
        max_discrepancy=max((abs(r.difference) for r in rows), default=0.0),
        all_agree=all(r.agrees for r in rows),
    )
    log.info(logger, MODULE, "noon4_audit_done", "4-qubit NOON comparison finished",
             points=len(rows), max_discrepancy=report.max_discrepancy,
             all_agree=report.all_agree)
    return report


def pauli_na_audit(points: Iterable[tuple[float, float, float, float, float, float]]) -> AuditReport:
    """Numeric vs printed single-probe Pauli QFI at (p1, p2, p3, eps, alpha, phi) points."""
    rows = []
    for p1, p2, p3, eps, alpha, phi in points:
        numeric = qfi_family(pauli(p1, p2, p3), single(eps, alpha), phi)
        printed = _pauli_na_printed(p1, p2, p3, eps, alpha + phi)
        diff = numeric - printed
        rows.append(PauliNaAuditRow(
            p1=p1, p2=p2, p3=p3, eps=eps, alpha=alpha, phi=phi,
            numeric=numeric, printed=printed, difference=diff,
            agrees=abs(diff) <= AUDIT_TOL,
        ))
    report = AuditReport(
        kind="pauli-na",
        tolerance=AUDIT_TOL,
        rows=rows,
        max_discrepancy=max((abs(r.difference) for r in rows), default=0.0),
        all_agree=all(r.agrees for r in rows),
    )
    log.info(logger, MODULE, "pauli_na_audit_done", "Single-probe Pauli comparison finished",
             points=len(rows), max_discrepancy=report.max_discrepancy,
             all_agree=report.all_agree)
    return report


def time_sharing_report(p: float) -> TimeSharingReport:
    """QFIs of depolarizing(p) and of the two channels it time-shares.

    depolarizing(p) = (1 - p) * identity + p * depolarizing(1), and
    depolarizing(1) replaces the probe with I/2.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterDomainError(f"p={p} outside [0, 1]")
    plus = fixed("plus")
    bell = fixed("max_entangled")
    replacement = depolarizing(1.0)
    mixture = mix_channels(identity(), replacement, 1.0 - p)
    return TimeSharingReport(
        p=p,
        noiseless_single=qfi_family(identity(), plus),
        noiseless_ancilla=qfi_family(identity(), bell),
        replacement_single=qfi_family(replacement, plus),
        replacement_ancilla=qfi_family(replacement, bell),
        mixture_single=qfi_family(mixture, plus),
        mixture_ancilla=qfi_family(mixture, bell),
    )
