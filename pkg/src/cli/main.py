"""qfi-lab command line.

  qfi-lab qfi --channel ad --eta 0.5 --state ancilla-pair --gamma 0.7071
  qfi-lab fig 2a --out fig2a.csv
  qfi-lab simulate --channel ad --eta 0.5 --state max-entangled --nu 100000 --seed 42
  qfi-lab experiment --channel depolarizing --p 0.4
  qfi-lab sweep --channel ad --state single --sweep-param eta --grid 0:1:11
  qfi-lab optimize --channel ad --eta 0.3 --family ancilla-pair
  qfi-lab audit noon4 --format csv

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
Reports go to stdout (or --out); logs go to stderr.
"""

import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from src.cli.commands import COMMANDS
from src.cli.output import emit
from src.linalg.matcore import DimensionMismatchError, EigenConvergenceError
from src.metrology.estimate import (
    BranchInversionError,
    StationaryPointError,
    ZeroInformationError,
)
from src.quantum.qstate import ParameterDomainError
from src.schemas.config import RunConfig
from src.utils.logging import configure_logging, log, get_logger

MODULE = "cli"
logger = get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CONFIG_ERRORS = (ValidationError, ParameterDomainError, DimensionMismatchError)
NUMERIC_ERRORS = (
    EigenConvergenceError,
    StationaryPointError,
    ZeroInformationError,
    BranchInversionError,
)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    ch = p.add_argument_group("channel")
    ch.add_argument("--channel", choices=["ad", "pauli", "dephasing", "depolarizing", "identity"])
    ch.add_argument("--eta", type=float, help="amplitude-damping probability")
    ch.add_argument("--p", type=float, help="depolarizing probability")
    ch.add_argument("--p1", type=float)
    ch.add_argument("--p2", type=float)
    ch.add_argument("--p3", type=float)

    st = p.add_argument_group("state")
    st.add_argument("--state",
                    choices=["single", "ancilla-pair", "max-entangled", "noon2", "noon4", "generic2"])
    st.add_argument("--eps", type=float)
    st.add_argument("--alpha", type=float)
    st.add_argument("--gamma", type=float)
    st.add_argument("--params", type=float, nargs=6, metavar="X",
                    help="generic2: three hypersphere angles then three phases")

    run = p.add_argument_group("run")
    run.add_argument("--phi", type=float)
    run.add_argument("--nu", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--grid", metavar="START:STOP:STEPS")
    run.add_argument("--out", metavar="PATH")
    run.add_argument("--format", choices=["csv", "json"])
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfi-lab",
        description="Quantum Fisher information of noisy phase estimation with and without ancillas",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common()]

    sub.add_parser("qfi", parents=common, help="QFI of one scenario")

    fig = sub.add_parser("fig", parents=common, help="figure dataset (CSV)")
    fig.add_argument("figure", choices=["2a", "2b", "3"])

    sim = sub.add_parser("simulate", parents=common, help="adaptive Monte Carlo estimation")
    sim.add_argument("--rounds", type=int)
    sim.add_argument("--batch-size", type=int)
    sim.add_argument("--observable",
                     choices=["ad_ancilla", "depolarizing_single", "pauli_ancilla", "ad_noon4", "bell"])

    exp = sub.add_parser("experiment", parents=common, help="photonic click statistics")
    exp.add_argument("--shots", type=int)

    sweep = sub.add_parser("sweep", parents=common, help="QFI over a parameter grid (CSV)")
    sweep.add_argument("--sweep-param",
                       choices=["eta", "p", "p1", "p2", "p3", "phi", "eps", "alpha", "gamma"])

    opt = sub.add_parser("optimize", parents=common, help="best probe state")
    opt.add_argument("--family", choices=["single", "ancilla-pair", "generic2"])
    opt.add_argument("--crossing", action="store_true",
                     help="damping level where the 4-qubit NOON state stops winning")

    audit = sub.add_parser("audit", parents=common, help="numeric vs printed expressions")
    audit.add_argument("audit", choices=["noon4", "pauli-na", "time-sharing"])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validate parsed flags; unset flags fall back to RunConfig defaults."""
    raw = {k: v for k, v in vars(args).items() if v is not None}
    if raw.get("crossing") is False:
        raw.pop("crossing")
    return RunConfig.model_validate(raw)


def _describe(e: Exception) -> str:
    if isinstance(e, ValidationError):
        return "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
    return str(e)


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    try:
        cfg = config_from_args(args)
        log.info(logger, MODULE, "command_start", "Running command", command=cfg.command,
                 channel=cfg.channel, state=cfg.state, seed=cfg.seed)
        payload = COMMANDS[cfg.command](cfg)
        emit(payload, cfg.output_format(), cfg.out)
    except CONFIG_ERRORS as e:
        log.error(logger, MODULE, "command_failed", "Invalid configuration",
                  error=_describe(e), error_type=type(e).__name__)
        print(f"qfi-lab: invalid configuration: {_describe(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as e:
        log.error(logger, MODULE, "command_failed", "Numerical failure",
                  error=str(e), error_type=type(e).__name__)
        print(f"qfi-lab: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    log.info(logger, MODULE, "command_done", "Command finished", command=cfg.command)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
