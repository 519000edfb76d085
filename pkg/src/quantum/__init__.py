"""States, noise channels and phase encoding."""

from src.quantum.qstate import (
    ParameterDomainError,
    PureState,
    StateFamily,
    ancilla_pair,
    basis_state,
    make_family,
    bell_basis,
    density,
    fixed,
    generic_two_qubit,
    make_state,
    noon,
    single,
)
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
    scenario,
)

__all__ = [
    "ParameterDomainError",
    "PureState",
    "StateFamily",
    "ancilla_pair",
    "basis_state",
    "make_family",
    "bell_basis",
    "density",
    "fixed",
    "generic_two_qubit",
    "make_state",
    "noon",
    "single",
    "KrausChannel",
    "Layout",
    "PhaseScenario",
    "amplitude_damping",
    "default_layout",
    "dephasing",
    "depolarizing",
    "identity",
    "make_channel",
    "mix_channels",
    "output_derivative",
    "output_state",
    "pauli",
    "scenario",
]
