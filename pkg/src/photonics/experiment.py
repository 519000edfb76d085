"""Single-photon polarization/path experiment.

Basis order is (Ha, Va, Hb, Vb): index = 2 * path + polarization. The
polarization plays the probe (qubit 0) and the path the ancilla (qubit 1),
so the optical index maps onto the qubit index through the permutation
(0, 2, 1, 3).

  prepare   (|H> + |V>)/sqrt(2) in path a; PBS1 sends V into path b, acting
            as a CNOT from polarization onto path: (|Ha> + |Vb>)/sqrt(2)
  evolve    phase e^{i phi} on V, then the noise on polarization only
  detect    PBS2/PBS3 and the beam splitters project onto
            BS1+- = (|Ha> +- |Vb>)/sqrt(2), BS2+- = (|Va> +- |Hb>)/sqrt(2)

Losses, dark counts and detector inefficiency are not modelled.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.linalg.matcore import CMat, dagger, tensor
from src.metrology.estimate import classical_fisher, draw_counts
from src.metrology.fisher import qfi_scenario
from src.quantum.channel import KrausChannel, scenario
from src.quantum.qstate import fixed
from src.schemas.results import ClickDistribution, ExperimentReport
from src.utils.logging import log, get_logger
from src.utils.search import golden_minimize

MODULE = "photonics"
logger = get_logger()

BASIS = ("Ha", "Va", "Hb", "Vb")
DETECTORS = ("BS1+", "BS1-", "BS2+", "BS2-")
# Optical index -> qubit index (polarization = qubit 0, path = qubit 1)
TO_QUBITS = (0, 2, 1, 3)
TRACE_TOL = 1e-12

# PBS1: swap |Va> <-> |Vb>
PBS = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]],
    dtype=np.complex128,
)
# Phase generator: number of V photons
GENERATOR = np.array([0.0, 1.0, 0.0, 1.0])

_S = 1.0 / math.sqrt(2.0)
# Rows are the detector projection vectors in optical order
DETECT_BASIS = np.array(
    [[_S, 0, 0, _S],
     [_S, 0, 0, -_S],
     [0, _S, _S, 0],
     [0, _S, -_S, 0]],
    dtype=np.complex128,
)


class OpticalState(BaseModel):
    """4x4 density matrix over (Ha, Va, Hb, Vb)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rho: np.ndarray

    @field_validator("rho")
    @classmethod
    def unit_trace(cls, v) -> np.ndarray:
        v = np.array(v, dtype=np.complex128)
        if v.shape != (4, 4):
            raise ValueError(f"optical state must be 4x4, got {v.shape}")
        tr = np.trace(v).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"optical state has trace {tr}")
        v.flags.writeable = False
        return v

    @classmethod
    def pure(cls, amplitudes) -> "OpticalState":
        a = np.asarray(amplitudes, dtype=np.complex128)
        return cls(rho=np.outer(a, a.conj()))

    def amplitude(self, label: str) -> float:
        """|<label|psi>| of a pure state."""
        k = BASIS.index(label)
        return math.sqrt(max(self.rho[k, k].real, 0.0))

    def to_qubits(self) -> CMat:
        """Same operator in big-endian (polarization, path) qubit order."""
        idx = list(TO_QUBITS)
        return self.rho[np.ix_(idx, idx)]


def prepare() -> OpticalState:
    """Diagonal polarization in path a, sent through PBS1."""
    photon = np.array([_S, _S, 0.0, 0.0], dtype=np.complex128)
    return OpticalState.pure(PBS @ photon)


def _noise_on_polarization(rho: CMat, noise: KrausChannel) -> CMat:
    out = np.zeros((4, 4), dtype=np.complex128)
    for k in noise.kraus:
        big = tensor(np.eye(2), k)
        out += big @ rho @ dagger(big)
    return out


def _phase(rho: CMat, phi: float) -> CMat:
    u = np.exp(1j * phi * GENERATOR)
    return rho * np.outer(u, u.conj())


def evolve(state: OpticalState, phi: float, noise: KrausChannel) -> OpticalState:
    """U_phi on polarization, then ``noise`` on polarization."""
    return OpticalState(rho=_noise_on_polarization(_phase(state.rho, phi), noise))


def evolve_derivative(state: OpticalState, phi: float, noise: KrausChannel) -> CMat:
    """d/dphi of the evolved density matrix."""
    encoded = _phase(state.rho, phi)
    commutator = 1j * (GENERATOR[:, None] - GENERATOR[None, :]) * encoded
    return _noise_on_polarization(commutator, noise)


def _projections(rho: CMat) -> np.ndarray:
    return np.real(np.einsum("ki,ij,kj->k", DETECT_BASIS.conj(), rho, DETECT_BASIS))


def detect(state: OpticalState) -> ClickDistribution:
    """Click probabilities of the four detectors."""
    p = _projections(state.rho)
    return ClickDistribution(p=tuple(float(x) for x in p))


def click_fisher(noise: KrausChannel, phi: float) -> float:
    """Classical Fisher information of the four-detector click statistics."""
    start = prepare()
    p = _projections(evolve(start, phi, noise).rho)
    dp = _projections(evolve_derivative(start, phi, noise))
    return classical_fisher(p, dp)


def click_sweet_spot(noise: KrausChannel) -> float:
    """Phase in (0, pi) maximizing the click Fisher information."""
    phi, _ = golden_minimize(lambda x: -click_fisher(noise, x), 0.0, math.pi,
                             open_interval=True)
    return phi


def equivalent_qfi(noise: KrausChannel, phi: float) -> float:
    """QFI of the matching probe-ancilla scenario: max-entangled pair, noise on the probe."""
    return qfi_scenario(scenario(noise, fixed("max_entangled"), phi))


def run_experiment(
    noise: KrausChannel,
    phi: Optional[float] = None,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
) -> ExperimentReport:
    """Click distribution, click Fisher information and optional sampled counts.

    ``phi=None`` runs at the click sweet spot.
    """
    if phi is None:
        phi = click_sweet_spot(noise)
    clicks = detect(evolve(prepare(), phi, noise))
    counts = None
    if shots is not None:
        counts = [int(c) for c in draw_counts(np.array(clicks.p), shots, seed or 0)]
    report = ExperimentReport(
        noise=noise.label(),
        phi=phi,
        clicks=clicks,
        click_fisher=click_fisher(noise, phi),
        qfi=equivalent_qfi(noise, phi),
        shots=shots,
        seed=seed if shots is not None else None,
        counts=counts,
    )
    log.info(logger, MODULE, "experiment_done", "Photonic experiment simulated",
             noise=report.noise, phi=phi, click_fisher=report.click_fisher, qfi=report.qfi)
    return report
