"""Probe/ancilla state catalog.

State families:
  single(eps, alpha)       eps|0> + sqrt(1-eps^2) e^{i alpha}|1>
  ancilla_pair(gamma)      gamma|00> + sqrt(1-gamma^2)|11>
  max_entangled            |Phi+> = (|00> + |11>)/sqrt(2)
  plus                     (|0> + |1>)/sqrt(2)
  noon(n)                  (|0...0> + |1...1>)/sqrt(2) over n qubits
  four_qubit_noon          noon(4)
  generic_two_qubit(6)     3 hypersphere angles for the magnitudes,
                           3 relative phases; amplitude 0 real >= 0

Density matrices are plain complex arrays; their qubit count is
log2 of the dimension.
"""

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from src.linalg.matcore import CMat

NORM_TOL = 1e-12

FamilyTag = Literal[
    "single",
    "ancilla_pair",
    "max_entangled",
    "plus",
    "noon",
    "four_qubit_noon",
    "generic_two_qubit",
]

# Qubit count per family (noon is parametric)
FAMILY_QUBITS = {
    "single": 1,
    "plus": 1,
    "ancilla_pair": 2,
    "max_entangled": 2,
    "generic_two_qubit": 2,
    "four_qubit_noon": 4,
}


class ParameterDomainError(ValueError):
    """Raised when a state, channel or formula parameter is out of domain."""


class PureState(BaseModel):
    """Normalized amplitude vector over n qubits (big-endian basis order)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_qubits: int
    amplitudes: np.ndarray

    @field_validator("amplitudes")
    @classmethod
    def complex_vector(cls, v) -> np.ndarray:
        v = np.array(v, dtype=np.complex128).reshape(-1)
        v.flags.writeable = False
        return v

    @model_validator(mode="after")
    def check_shape_and_norm(self) -> "PureState":
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if self.amplitudes.size != 2 ** self.n_qubits:
            raise ValueError(
                f"{self.amplitudes.size} amplitudes for {self.n_qubits} qubits"
            )
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1")
        return self

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        """Normalize and wrap raw amplitudes."""
        a = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        n = int(round(math.log2(a.size))) if a.size else 0
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ParameterDomainError("zero vector is not a state")
        return cls(n_qubits=n, amplitudes=a / norm)

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


class StateFamily(BaseModel):
    """Tagged parameter bundle for ``make_state``."""

    model_config = ConfigDict(frozen=True)

    tag: FamilyTag
    eps: float = 1.0 / math.sqrt(2.0)
    alpha: float = 0.0
    gamma: float = 1.0 / math.sqrt(2.0)
    n: Optional[int] = None
    params: tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_domain(self) -> "StateFamily":
        if self.tag == "single":
            _check_unit("eps", self.eps)
            if not 0.0 <= self.alpha < 2.0 * math.pi:
                raise ValueError(f"alpha={self.alpha} outside [0, 2pi)")
        elif self.tag == "ancilla_pair":
            _check_unit("gamma", self.gamma)
        elif self.tag == "noon":
            if self.n is None or self.n < 1:
                raise ValueError("noon needs a positive qubit count n")
        elif self.tag == "generic_two_qubit":
            if len(self.params) != 6:
                raise ValueError(
                    f"generic_two_qubit needs 6 parameters, got {len(self.params)}"
                )
            if not all(math.isfinite(x) for x in self.params):
                raise ValueError("generic_two_qubit parameters must be finite")
        return self

    @property
    def n_qubits(self) -> int:
        if self.tag == "noon":
            return int(self.n)
        return FAMILY_QUBITS[self.tag]


def _check_unit(name: str, value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValueError(f"{name}={value} outside [0, 1]")


def make_family(**fields) -> StateFamily:
    try:
        return StateFamily(**fields)
    except ValidationError as e:
        raise ParameterDomainError(
            "; ".join(err["msg"] for err in e.errors())
        ) from e


def single(eps: float, alpha: float = 0.0) -> StateFamily:
    return make_family(tag="single", eps=eps, alpha=alpha)


def ancilla_pair(gamma: float) -> StateFamily:
    return make_family(tag="ancilla_pair", gamma=gamma)


def noon(n: int) -> StateFamily:
    return make_family(tag="noon", n=n)


def generic_two_qubit(params) -> StateFamily:
    return make_family(tag="generic_two_qubit", params=tuple(float(x) for x in params))


def fixed(tag: str) -> StateFamily:
    """Parameter-free families: max_entangled, plus, four_qubit_noon."""
    return make_family(tag=tag)


def _generic_amplitudes(params: tuple[float, ...]) -> np.ndarray:
    t1, t2, t3, f1, f2, f3 = params
    mags = np.array([
        math.cos(t1),
        math.sin(t1) * math.cos(t2),
        math.sin(t1) * math.sin(t2) * math.cos(t3),
        math.sin(t1) * math.sin(t2) * math.sin(t3),
    ])
    phases = np.exp(1j * np.array([0.0, f1, f2, f3]))
    amps = mags * phases
    if mags[0] < 0.0:
        amps = -amps
    return amps


def make_state(family: StateFamily) -> PureState:
    """Build the normalized amplitude vector of a state family."""
    tag = family.tag
    if tag == "single":
        eps = family.eps
        amps = [eps, math.sqrt(max(1.0 - eps * eps, 0.0)) * np.exp(1j * family.alpha)]
    elif tag == "plus":
        amps = [1.0, 1.0]
    elif tag == "ancilla_pair":
        g = family.gamma
        amps = [g, 0.0, 0.0, math.sqrt(max(1.0 - g * g, 0.0))]
    elif tag in ("max_entangled", "noon", "four_qubit_noon"):
        n = family.n_qubits
        amps = np.zeros(2 ** n, dtype=np.complex128)
        amps[0] = amps[-1] = 1.0
    else:
        amps = _generic_amplitudes(family.params)
    return PureState.from_amplitudes(amps)


def density(psi: PureState) -> CMat:
    """Rank-1 projector |psi><psi|."""
    a = psi.amplitudes
    return np.outer(a, a.conj())


def basis_state(bits: str) -> PureState:
    """Computational basis state from a bit string, e.g. '0011'."""
    amps = np.zeros(2 ** len(bits), dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return PureState(n_qubits=len(bits), amplitudes=amps)


def bell_basis() -> tuple[PureState, PureState, PureState, PureState]:
    """(Phi+, Phi-, Psi+, Psi-) in that order."""
    s = 1.0 / math.sqrt(2.0)
    return (
        PureState.from_amplitudes([s, 0, 0, s]),
        PureState.from_amplitudes([s, 0, 0, -s]),
        PureState.from_amplitudes([0, s, s, 0]),
        PureState.from_amplitudes([0, s, -s, 0]),
    )
