"""Polarization/path single-photon realization of the probe-ancilla scheme."""

from src.photonics.experiment import (
    OpticalState,
    click_fisher,
    click_sweet_spot,
    detect,
    evolve,
    prepare,
    run_experiment,
)

__all__ = [
    "OpticalState",
    "click_fisher",
    "click_sweet_spot",
    "detect",
    "evolve",
    "prepare",
    "run_experiment",
]
