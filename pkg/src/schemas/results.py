"""Pydantic schemas for computed results and reports.

Every report the CLI writes is one of these models, dumped with
``model_dump(mode="json")``. None of them carries a timestamp, so the same
inputs always serialize to the same bytes.
"""

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

# Simplex slack for outcome distributions
PROB_TOL = 1e-10


# =============================================================================
# QFI
# =============================================================================

class QfiReport(BaseModel):
    """Numeric QFI of one scenario next to its closed form, if one applies."""
    channel: str
    state: str
    probes: list[int]
    ancillas: list[int]
    phi: float
    qfi: float = Field(..., ge=0.0)
    closed_form_tag: Optional[str] = None
    closed_form: Optional[float] = Field(None, description="Printed expression at the same point")
    difference: Optional[float] = Field(None, description="qfi - closed_form")


class NoonAuditRow(BaseModel):
    eta: float
    phi: float
    numeric: float
    printed: float
    difference: float
    agrees: bool


class PauliNaAuditRow(BaseModel):
    p1: float
    p2: float
    p3: float
    eps: float
    alpha: float
    phi: float
    numeric: float
    printed: float
    difference: float
    agrees: bool


class AuditReport(BaseModel):
    """Side-by-side comparison of numeric QFI against a printed expression."""
    kind: Literal["noon4", "pauli-na"]
    tolerance: float
    rows: list[NoonAuditRow] | list[PauliNaAuditRow]
    max_discrepancy: float = Field(..., ge=0.0)
    all_agree: bool


class TimeSharingReport(BaseModel):
    """Depolarizing noise as random time-sharing of two ancilla-indifferent channels."""
    p: float
    noiseless_single: float
    noiseless_ancilla: float
    replacement_single: float
    replacement_ancilla: float
    mixture_single: float
    mixture_ancilla: float

    @property
    def ancilla_gain(self) -> float:
        return self.mixture_ancilla - self.mixture_single


# =============================================================================
# OPTIMIZATION
# =============================================================================

class OptResult(BaseModel):
    """Best point of a state-parameter search."""
    family: Literal["single", "ancilla_pair", "generic_two_qubit"]
    channel: str
    phi: float
    best_params: list[float]
    best_qfi: float
    evaluations: int = Field(..., ge=0)
    converged: bool
    seed_best_qfi: float = Field(..., description="Best QFI among the grid seeds")

    @model_validator(mode="after")
    def improves_on_seeds(self) -> "OptResult":
        if self.best_qfi < self.seed_best_qfi:
            raise ValueError(
                f"best_qfi {self.best_qfi} below best seed {self.seed_best_qfi}"
            )
        return self


class CrossingReport(BaseModel):
    """Noise level where two QFI curves meet, bracketed by bisection."""
    eta: float
    lower: float
    upper: float
    qfi: float
    iterations: int


# =============================================================================
# ESTIMATION
# =============================================================================

class EstimationRun(BaseModel):
    """Seeded Monte Carlo record of an adaptive estimation."""
    seed: int = Field(..., ge=0, lt=2 ** 64)
    nu: int = Field(..., ge=1, description="Total repetitions")
    observable: str
    phi_true: float
    rounds: int = Field(..., ge=1)
    batch_size: int = Field(..., ge=1)
    counts: list[list[int]] = Field(..., description="Outcome counts per round")
    feedback_phases: list[float] = Field(..., description="Control phase used in each round")
    estimate: float
    sample_variance: float = Field(..., ge=0.0)
    batches: int = Field(..., ge=1)
    clipped_batches: int = Field(0, ge=0, description="Batch means outside the branch range")
    low_nu: bool = False
    qcr_bound: Optional[float] = None
    variance_ratio: Optional[float] = None

    @model_validator(mode="after")
    def counts_sum_to_nu(self) -> "EstimationRun":
        total = sum(sum(row) for row in self.counts)
        if total != self.nu:
            raise ValueError(f"counts sum to {total}, expected nu={self.nu}")
        if len(self.counts) != self.rounds or len(self.feedback_phases) != self.rounds:
            raise ValueError("one counts row and one feedback phase per round")
        return self


class ClickDistribution(BaseModel):
    """Detector click probabilities (BS1+, BS1-, BS2+, BS2-)."""
    p: tuple[float, float, float, float]

    @field_validator("p")
    @classmethod
    def on_simplex(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(x < -PROB_TOL or not math.isfinite(x) for x in v):
            raise ValueError(f"negative or non-finite probability in {v}")
        if abs(sum(v) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {sum(v)}")
        return tuple(max(x, 0.0) for x in v)


class ExperimentReport(BaseModel):
    noise: str
    phi: float
    clicks: ClickDistribution
    click_fisher: float = Field(..., ge=0.0)
    qfi: float = Field(..., ge=0.0, description="QFI of the equivalent probe-ancilla scenario")
    shots: Optional[int] = None
    seed: Optional[int] = None
    counts: Optional[list[int]] = None
