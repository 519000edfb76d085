"""Noise channels, phase encoding and the probe/ancilla layout.

The encoded output is rho_phi = E^{(x) probes}(U_phi rho U_phi^dagger) with
U_phi = |0><0| + e^{i phi}|1><1| on every probe and the identity on every
ancilla. U_phi is diagonal in the computational basis, so encoding is an
element-wise phase: entry (j, l) picks up exp(i phi (g_j - g_l)), where g_x
counts the probe bits set in basis index x.
"""

import math
from typing import Literal, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.linalg.matcore import CMat, DimensionMismatchError, embed, dagger
from src.quantum.qstate import ParameterDomainError, PureState, StateFamily, density, make_state
from src.utils.logging import log, get_logger

MODULE = "channel"
logger = get_logger()

COMPLETENESS_TOL = 1e-12
# Slack on probability sums before p0 = 1 - p1 - p2 - p3 is declared negative
SIMPLEX_TOL = 1e-12

ChannelModel = Literal[
    "amplitude_damping",
    "pauli",
    "dephasing",
    "depolarizing",
    "identity",
    "mixture",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)


# =============================================================================
# CHANNELS
# =============================================================================

class KrausChannel(BaseModel):
    """Single-qubit CPTP map rho -> sum_i A_i rho A_i^dagger."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: ChannelModel
    params: dict[str, float] = {}
    kraus: tuple[np.ndarray, ...]

    @field_validator("kraus")
    @classmethod
    def complex_2x2(cls, v) -> tuple[np.ndarray, ...]:
        ops = []
        for a in v:
            a = np.array(a, dtype=np.complex128)
            if a.shape != (2, 2):
                raise ValueError(f"Kraus operator of shape {a.shape}, expected (2, 2)")
            a.flags.writeable = False
            ops.append(a)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        return tuple(ops)

    @model_validator(mode="after")
    def check_completeness(self) -> "KrausChannel":
        total = sum(dagger(a) @ a for a in self.kraus)
        err = float(np.abs(total - IDENTITY).max())
        if err > COMPLETENESS_TOL:
            raise ValueError(f"Kraus operators violate completeness by {err:.3e}")
        return self

    def apply(self, rho: CMat, target: int = 0, n_qubits: int = 1) -> CMat:
        """Act on qubit ``target`` of an n-qubit operator (linear, so any matrix works)."""
        out = np.zeros_like(rho, dtype=np.complex128)
        for a in self.kraus:
            big = embed(a, target, n_qubits) if n_qubits > 1 else a
            out += big @ rho @ dagger(big)
        return out

    def label(self) -> str:
        if not self.params:
            return self.model
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.model}({inner})"


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ParameterDomainError(f"{name}={value} outside [0, 1]")
    return value


def _pauli_kraus(p1: float, p2: float, p3: float) -> tuple[np.ndarray, ...]:
    total = p1 + p2 + p3
    if total > 1.0 + SIMPLEX_TOL:
        raise ParameterDomainError(f"p1+p2+p3={total} exceeds 1")
    p0 = max(1.0 - total, 0.0)
    return (
        math.sqrt(p0) * IDENTITY,
        math.sqrt(p1) * SIGMA_X,
        math.sqrt(p2) * SIGMA_Y,
        math.sqrt(p3) * SIGMA_Z,
    )


def _renormalized(kraus: tuple[np.ndarray, ...]) -> tuple[np.ndarray, ...]:
    # p0 clipped at the simplex edge leaves sum A^dagger A = (1 + delta) I
    total = sum(dagger(a) @ a for a in kraus)
    scale = float(np.real(total[0, 0]))
    if abs(scale - 1.0) <= SIMPLEX_TOL:
        return tuple(a / math.sqrt(scale) for a in kraus)
    return kraus


def make_channel(model: str, params: Optional[Mapping[str, float]] = None) -> KrausChannel:
    """Build a named noise model.

    Parameters by model:
        amplitude_damping: eta (decay probability)
        pauli: p1, p2, p3 (sigma_x, sigma_y, sigma_z probabilities)
        dephasing: p3
        depolarizing: p (pauli with p1 = p2 = p3 = p/4)
        identity: none

    Raises:
        ParameterDomainError: unknown model or parameter outside its domain.
    """
    params = dict(params or {})
    if model == "amplitude_damping":
        eta = _check_prob("eta", params.get("eta", 0.0))
        kraus = (
            np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - eta)]]),
            np.array([[0.0, math.sqrt(eta)], [0.0, 0.0]]),
        )
        clean = {"eta": eta}
    elif model == "pauli":
        p1, p2, p3 = (_check_prob(k, params.get(k, 0.0)) for k in ("p1", "p2", "p3"))
        kraus = _renormalized(_pauli_kraus(p1, p2, p3))
        clean = {"p1": p1, "p2": p2, "p3": p3}
    elif model == "dephasing":
        p3 = _check_prob("p3", params.get("p3", 0.0))
        kraus = _pauli_kraus(0.0, 0.0, p3)
        clean = {"p3": p3}
    elif model == "depolarizing":
        p = _check_prob("p", params.get("p", 0.0))
        kraus = _pauli_kraus(p / 4.0, p / 4.0, p / 4.0)
        clean = {"p": p}
    elif model == "identity":
        kraus = (IDENTITY,)
        clean = {}
    else:
        raise ParameterDomainError(f"unknown channel model {model!r}")

    return KrausChannel(model=model, params=clean, kraus=kraus)


def amplitude_damping(eta: float) -> KrausChannel:
    return make_channel("amplitude_damping", {"eta": eta})


def pauli(p1: float, p2: float, p3: float) -> KrausChannel:
    return make_channel("pauli", {"p1": p1, "p2": p2, "p3": p3})


def dephasing(p3: float) -> KrausChannel:
    return make_channel("dephasing", {"p3": p3})


def depolarizing(p: float) -> KrausChannel:
    return make_channel("depolarizing", {"p": p})


def identity() -> KrausChannel:
    return make_channel("identity")


def mix_channels(first: KrausChannel, second: KrausChannel, weight: float) -> KrausChannel:
    """Random time-sharing: ``first`` with probability ``weight``, else ``second``."""
    w = _check_prob("weight", weight)
    kraus = tuple(math.sqrt(w) * a for a in first.kraus) + tuple(
        math.sqrt(1.0 - w) * b for b in second.kraus
    )
    return KrausChannel(model="mixture", params={"weight": w}, kraus=kraus)


def pauli_probabilities(channel: KrausChannel) -> tuple[float, float, float, float]:
    """(p0, p1, p2, p3) of a Pauli-diagonal channel."""
    p = channel.params
    if channel.model == "pauli":
        p1, p2, p3 = p["p1"], p["p2"], p["p3"]
    elif channel.model == "dephasing":
        p1, p2, p3 = 0.0, 0.0, p["p3"]
    elif channel.model == "depolarizing":
        p1 = p2 = p3 = p["p"] / 4.0
    elif channel.model == "identity":
        p1 = p2 = p3 = 0.0
    else:
        raise ParameterDomainError(f"{channel.model} is not a Pauli channel")
    return max(1.0 - p1 - p2 - p3, 0.0), p1, p2, p3


# =============================================================================
# LAYOUT AND SCENARIO
# =============================================================================

class Layout(BaseModel):
    """Which qubits see U_phi and the noise (probes) and which do not (ancillas)."""

    model_config = ConfigDict(frozen=True)

    n_total: int
    probes: tuple[int, ...]
    ancillas: tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_partition(self) -> "Layout":
        if not self.probes:
            raise ValueError("a layout needs at least one probe")
        both = sorted(self.probes + self.ancillas)
        if both != list(range(self.n_total)):
            raise ValueError(
                f"probes {self.probes} and ancillas {self.ancillas} "
                f"do not partition {self.n_total} qubits"
            )
        return self

    def generator_counts(self) -> np.ndarray:
        """g_x: number of probe bits set in each basis index (big-endian)."""
        idx = np.arange(2 ** self.n_total)
        g = np.zeros(idx.size, dtype=np.int64)
        for q in self.probes:
            g += (idx >> (self.n_total - 1 - q)) & 1
        return g

    def phase_differences(self) -> np.ndarray:
        """Matrix of g_j - g_l."""
        g = self.generator_counts()
        return g[:, None] - g[None, :]


def default_layout(family: StateFamily) -> Layout:
    """Conventional probe/ancilla split for each state family."""
    tag = family.tag
    if tag in ("single", "plus"):
        return Layout(n_total=1, probes=(0,))
    if tag in ("ancilla_pair", "max_entangled"):
        return Layout(n_total=2, probes=(0,), ancillas=(1,))
    if tag == "four_qubit_noon":
        return Layout(n_total=4, probes=(0, 1), ancillas=(2, 3))
    n = family.n_qubits
    return Layout(n_total=n, probes=tuple(range(n)))


class PhaseScenario(BaseModel):
    """Everything needed to produce rho_phi and its phi-derivative."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    channel: KrausChannel
    state: PureState
    layout: Layout
    phi: float = math.pi / 2.0

    @model_validator(mode="after")
    def check_sizes(self) -> "PhaseScenario":
        if self.state.n_qubits != self.layout.n_total:
            raise ValueError(
                f"state has {self.state.n_qubits} qubits, layout {self.layout.n_total}"
            )
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")
        return self

    def at(self, phi: float) -> "PhaseScenario":
        """Same scenario at another phase."""
        return self.model_copy(update={"phi": float(phi)})


# =============================================================================
# ENCODING
# =============================================================================

def encode(rho: CMat, layout: Layout, phi: float) -> CMat:
    """U_phi rho U_phi^dagger on the probes."""
    return rho * np.exp(1j * phi * layout.phase_differences())


def apply_noise(rho: CMat, channel: KrausChannel, layout: Layout) -> CMat:
    """Apply ``channel`` independently to every probe qubit."""
    if rho.shape != (2 ** layout.n_total,) * 2:
        raise DimensionMismatchError(
            f"operator of shape {rho.shape} on a {layout.n_total}-qubit layout"
        )
    if channel.model == "identity":
        return np.array(rho, dtype=np.complex128)
    out = rho
    for q in layout.probes:
        out = channel.apply(out, q, layout.n_total)
    return out


def output_state(s: PhaseScenario, noise_first: bool = False) -> CMat:
    """rho_phi. ``noise_first`` swaps the order (for commutation checks only)."""
    rho = density(s.state)
    if noise_first:
        return encode(apply_noise(rho, s.channel, s.layout), s.layout, s.phi)
    return apply_noise(encode(rho, s.layout, s.phi), s.channel, s.layout)


def output_derivative(s: PhaseScenario) -> CMat:
    """d rho_phi / d phi = E( i [G, U rho U^dagger] ), G the probe excitation count."""
    d = s.layout.phase_differences()
    encoded = encode(density(s.state), s.layout, s.phi)
    return apply_noise(1j * d * encoded, s.channel, s.layout)


def pure_output(s: PhaseScenario) -> tuple[PureState, np.ndarray]:
    """Encoded amplitudes and their phi-derivative; ignores the channel."""
    g = s.layout.generator_counts()
    phases = np.exp(1j * s.phi * g)
    amps = s.state.amplitudes * phases
    if s.channel.model != "identity":
        log.debug(logger, MODULE, "pure_output_skipped_noise",
                  "Noiseless shortcut ignores the channel",
                  channel=s.channel.label())
    return PureState(n_qubits=s.state.n_qubits, amplitudes=amps), 1j * g * amps


def scenario(
    channel: KrausChannel,
    family: StateFamily,
    phi: float = math.pi / 2.0,
    layout: Optional[Layout] = None,
) -> PhaseScenario:
    """Scenario from a state family, defaulting to its conventional layout."""
    return PhaseScenario(
        channel=channel,
        state=make_state(family),
        layout=layout or default_layout(family),
        phi=phi,
    )
