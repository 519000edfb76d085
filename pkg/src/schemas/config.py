"""Pydantic schemas for run configuration.

The CLI parses its flags with argparse and validates the namespace into a
RunConfig; range violations surface as pydantic ValidationError, which the
CLI reports with exit code 2.
"""

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

Command = Literal["qfi", "fig", "simulate", "experiment", "sweep", "optimize", "audit"]
ChannelName = Literal["ad", "pauli", "dephasing", "depolarizing", "identity"]
StateName = Literal["single", "ancilla-pair", "max-entangled", "noon2", "noon4", "generic2"]
SweepParam = Literal["eta", "p", "p1", "p2", "p3", "phi", "eps", "alpha", "gamma"]
ObservableName = Literal["ad_ancilla", "depolarizing_single", "pauli_ancilla", "ad_noon4", "bell"]


class GridSpec(BaseModel):
    """Evenly spaced grid ``start:stop:steps`` (both ends included)."""
    start: float
    stop: float
    steps: int = Field(..., ge=2, description="Number of grid points")

    @field_validator("start", "stop")
    @classmethod
    def finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("grid bounds must be finite")
        return v

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like start:stop:steps, got {text!r}")
        start, stop, steps = parts
        return cls(start=float(start), stop=float(stop), steps=int(steps))

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


class RunConfig(BaseModel):
    """Validated command-line configuration."""
    command: Command

    # Channel
    channel: ChannelName = "identity"
    eta: float = Field(0.0, ge=0.0, le=1.0, description="Amplitude-damping decay probability")
    p: float = Field(0.0, ge=0.0, le=1.0, description="Depolarizing probability")
    p1: float = Field(0.0, ge=0.0, le=1.0)
    p2: float = Field(0.0, ge=0.0, le=1.0)
    p3: float = Field(0.0, ge=0.0, le=1.0)

    # State
    state: StateName = "single"
    eps: float = Field(1.0 / math.sqrt(2.0), ge=0.0, le=1.0)
    alpha: float = Field(0.0, ge=0.0, lt=2.0 * math.pi)
    gamma: float = Field(1.0 / math.sqrt(2.0), ge=0.0, le=1.0)
    params: Optional[list[float]] = Field(None, description="Six generic two-qubit parameters")

    # Phase and sampling
    phi: Optional[float] = Field(None, description="Phase in radians; command-specific default")
    nu: int = Field(100_000, ge=1, description="Total repetitions")
    rounds: int = Field(10, ge=1)
    batch_size: int = Field(50, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    shots: Optional[int] = Field(None, ge=1, description="Sampled clicks for the experiment")

    # Command-specific
    grid: Optional[GridSpec] = None
    sweep_param: Optional[SweepParam] = None
    figure: Optional[Literal["2a", "2b", "3"]] = None
    audit: Optional[Literal["noon4", "pauli-na", "time-sharing"]] = None
    family: Optional[Literal["single", "ancilla-pair", "generic2"]] = None
    observable: Optional[ObservableName] = None
    crossing: bool = False

    # Output
    out: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None

    @field_validator("grid", mode="before")
    @classmethod
    def parse_grid(cls, v):
        if isinstance(v, str):
            return GridSpec.parse(v)
        return v

    @model_validator(mode="after")
    def check_combination(self) -> "RunConfig":
        if self.p1 + self.p2 + self.p3 > 1.0 + 1e-12:
            raise ValueError(f"p1+p2+p3={self.p1 + self.p2 + self.p3} exceeds 1")
        if self.phi is not None and not math.isfinite(self.phi):
            raise ValueError("phi must be finite")
        if self.params is not None and (
            len(self.params) != 6 or not all(math.isfinite(x) for x in self.params)
        ):
            raise ValueError("--params needs six finite numbers")
        if self.command == "sweep" and (self.grid is None or self.sweep_param is None):
            raise ValueError("sweep needs --sweep-param and --grid")
        if self.command == "fig" and self.figure is None:
            raise ValueError("fig needs a figure id (2a, 2b or 3)")
        if self.command == "audit" and self.audit is None:
            raise ValueError("audit needs a kind (noon4, pauli-na or time-sharing)")
        if self.state == "generic2" and self.params is None:
            raise ValueError("--state generic2 needs --params")
        return self

    def output_format(self) -> str:
        """Explicit --format, else CSV for tables and JSON for single results."""
        if self.format:
            return self.format
        return "csv" if self.command in ("fig", "sweep") else "json"
