"""Pydantic schemas for structured data validation.

This package contains:
- config.py: run configuration validated from the command line
- results.py: every report the library hands back or the CLI writes

Command-line input is validated against these models BEFORE anything is
computed, so range violations fail early as ValidationError.
"""

from src.schemas.config import (
    GridSpec,
    RunConfig,
)

from src.schemas.results import (
    # QFI
    QfiReport,
    NoonAuditRow,
    PauliNaAuditRow,
    AuditReport,
    TimeSharingReport,
    # Optimization
    OptResult,
    CrossingReport,
    # Estimation
    EstimationRun,
    # Photonics
    ClickDistribution,
    ExperimentReport,
)

__all__ = [
    "GridSpec",
    "RunConfig",
    "QfiReport",
    "NoonAuditRow",
    "PauliNaAuditRow",
    "AuditReport",
    "TimeSharingReport",
    "OptResult",
    "CrossingReport",
    "EstimationRun",
    "ClickDistribution",
    "ExperimentReport",
]
