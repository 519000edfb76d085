"""Command implementations: RunConfig in, report or table out."""

import math
from typing import Union

from src.cli.figures import figure
from src.cli.output import Table
from src.metrology.estimate import adaptive_run, observable_catalog, split_shots
from src.metrology.fisher import (
    closed_form,
    matching_closed_form,
    noon4_audit,
    pauli_na_audit,
    qfi_scenario,
    time_sharing_report,
)
from src.metrology.optimize import noon_crossing, optimize_family, optimize_two_probes
from src.photonics.experiment import run_experiment
from src.quantum.channel import (
    KrausChannel,
    PhaseScenario,
    amplitude_damping,
    dephasing,
    depolarizing,
    identity,
    pauli,
    scenario,
)
from src.quantum.qstate import (
    ParameterDomainError,
    StateFamily,
    ancilla_pair,
    fixed,
    generic_two_qubit,
    noon,
    single,
)
from src.schemas.config import RunConfig
from src.schemas.results import (
    AuditReport,
    CrossingReport,
    EstimationRun,
    ExperimentReport,
    OptResult,
    QfiReport,
    TimeSharingReport,
)
from src.utils.logging import log, get_logger
from src.utils.parallel import parallel_map

MODULE = "commands"
logger = get_logger()

DEFAULT_PHI = math.pi / 2.0
HALF = 1.0 / math.sqrt(2.0)

# Default observable per (channel, state) for simulate
DEFAULT_OBSERVABLES = {
    ("ad", "max-entangled"): "ad_ancilla",
    ("ad", "ancilla-pair"): "ad_ancilla",
    ("ad", "noon4"): "ad_noon4",
    ("depolarizing", "single"): "depolarizing_single",
    ("identity", "single"): "depolarizing_single",
    ("dephasing", "single"): "depolarizing_single",
    ("pauli", "max-entangled"): "bell",
    ("pauli", "ancilla-pair"): "bell",
    ("dephasing", "max-entangled"): "bell",
    ("depolarizing", "max-entangled"): "bell",
    ("identity", "max-entangled"): "bell",
}


# =============================================================================
# BUILDERS
# =============================================================================

def build_channel(cfg: RunConfig) -> KrausChannel:
    if cfg.channel == "ad":
        return amplitude_damping(cfg.eta)
    if cfg.channel == "pauli":
        return pauli(cfg.p1, cfg.p2, cfg.p3)
    if cfg.channel == "dephasing":
        return dephasing(cfg.p3)
    if cfg.channel == "depolarizing":
        return depolarizing(cfg.p)
    return identity()


def build_family(cfg: RunConfig) -> StateFamily:
    if cfg.state == "single":
        return single(cfg.eps, cfg.alpha)
    if cfg.state == "ancilla-pair":
        return ancilla_pair(cfg.gamma)
    if cfg.state == "max-entangled":
        return fixed("max_entangled")
    if cfg.state == "noon2":
        return noon(2)
    if cfg.state == "noon4":
        return fixed("four_qubit_noon")
    return generic_two_qubit(cfg.params)


def build_scenario(cfg: RunConfig) -> tuple[PhaseScenario, StateFamily]:
    family = build_family(cfg)
    phi = DEFAULT_PHI if cfg.phi is None else cfg.phi
    return scenario(build_channel(cfg), family, phi), family


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_qfi(cfg: RunConfig) -> QfiReport:
    """Numeric QFI, with the matching printed expression when one applies."""
    s, family = build_scenario(cfg)
    value = qfi_scenario(s)
    cf = matching_closed_form(s, family)
    printed = closed_form(cf) if cf is not None else None
    return QfiReport(
        channel=s.channel.label(),
        state=cfg.state,
        probes=list(s.layout.probes),
        ancillas=list(s.layout.ancillas),
        phi=s.phi,
        qfi=value,
        closed_form_tag=cf.tag if cf is not None else None,
        closed_form=printed,
        difference=value - printed if printed is not None else None,
    )


def cmd_fig(cfg: RunConfig) -> Table:
    return figure(cfg.figure)


def cmd_simulate(cfg: RunConfig) -> EstimationRun:
    """Seeded adaptive estimation; identical seeds give identical reports."""
    s, family = build_scenario(cfg)
    name = cfg.observable or DEFAULT_OBSERVABLES.get((cfg.channel, cfg.state))
    if name is None:
        raise ParameterDomainError(
            f"no default observable for channel={cfg.channel} state={cfg.state}; pass --observable"
        )
    o = observable_catalog(name)
    if o.dim != 2 ** family.n_qubits:
        raise ParameterDomainError(
            f"observable {name} acts on dimension {o.dim}, state has {2 ** family.n_qubits}"
        )
    rounds = cfg.rounds
    if rounds > cfg.nu:
        log.warning(logger, MODULE, "rounds_fallback", "Fewer shots than rounds, one shot per round",
                    nu=cfg.nu, rounds=rounds)
        rounds = cfg.nu
    return adaptive_run(s, o, rounds, split_shots(cfg.nu, rounds), cfg.seed,
                        batch_size=cfg.batch_size)


def cmd_experiment(cfg: RunConfig) -> ExperimentReport:
    return run_experiment(build_channel(cfg), cfg.phi, cfg.shots,
                          cfg.seed if cfg.shots is not None else None)


def _sweep_row(cfg: RunConfig) -> list:
    report = cmd_qfi(cfg)
    return [getattr(cfg, cfg.sweep_param), report.qfi, report.closed_form]


def cmd_sweep(cfg: RunConfig) -> Table:
    """QFI over one parameter on the grid, one row per grid point."""
    base = cfg.model_dump()
    # Validate every point up front so a bad grid fails before any work
    points = [
        RunConfig.model_validate({**base, cfg.sweep_param: float(v)})
        for v in cfg.grid.values()
    ]
    log.info(logger, MODULE, "sweep_start", "Parameter sweep",
             param=cfg.sweep_param, points=len(points))
    rows = parallel_map(_sweep_row, points)
    return Table(columns=[cfg.sweep_param, "qfi", "closed_form"], rows=rows)


def cmd_optimize(cfg: RunConfig) -> Union[OptResult, CrossingReport]:
    """Best state of a family, or the NOON crossing with ``crossing``."""
    if cfg.crossing:
        return noon_crossing()
    channel = build_channel(cfg)
    phi = DEFAULT_PHI if cfg.phi is None else cfg.phi
    family = cfg.family or (cfg.state if cfg.state in ("single", "ancilla-pair", "generic2") else "single")
    if family == "generic2":
        return optimize_two_probes(channel, phi)
    return optimize_family(channel, "ancilla_pair" if family == "ancilla-pair" else "single", phi)


def _pauli_na_points() -> list[tuple[float, float, float, float, float, float]]:
    points = []
    for i in range(5):
        for j in range(5 - i):
            for k in range(5 - i - j):
                for phi in (0.0, math.pi / 8.0, math.pi / 4.0):
                    points.append((i / 4, j / 4, k / 4, HALF, 0.0, phi))
    return points


def cmd_audit(cfg: RunConfig) -> Union[AuditReport, TimeSharingReport]:
    if cfg.audit == "noon4":
        etas = cfg.grid.values() if cfg.grid is not None else [i / 10 for i in range(11)]
        phis = [k * math.pi / 32.0 for k in range(9)]
        return noon4_audit([float(e) for e in etas], phis)
    if cfg.audit == "pauli-na":
        return pauli_na_audit(_pauli_na_points())
    return time_sharing_report(cfg.p)


COMMANDS = {
    "qfi": cmd_qfi,
    "fig": cmd_fig,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "audit": cmd_audit,
}
