"""Datasets behind the three QFI figures.

  2a  amplitude damping, eta in [0, 1] step 0.01: no ancilla, balanced
      probe-ancilla pair, and the pair at its optimal weight
  2b  amplitude damping, eta in [0, 1] step 0.05: 2-qubit NOON, best
      two-probe state, 4-qubit NOON (2 probes, 2 ancillas) and the
      N = 2 upper bound
  3   Pauli noise with p1 = 0, (p2, p3) on a 0.02 grid: best no-ancilla
      QFI over alpha and the maximally entangled ancilla QFI; points
      outside the simplex stay empty

Rows are computed in parallel and always come back in grid order.
"""

import math
from typing import Optional

from src.cli.output import Table
from src.metrology.fisher import (
    closed_form,
    closed_form_id,
    noon4_qfi,
    optimal_ancilla_weight,
    pauli_na_optimized,
    qfi_family,
)
from src.metrology.optimize import optimize_two_probes
from src.quantum.channel import amplitude_damping
from src.quantum.qstate import ancilla_pair, noon, single
from src.utils.logging import log, get_logger
from src.utils.parallel import parallel_map

MODULE = "figures"
logger = get_logger()

HALF = 1.0 / math.sqrt(2.0)
FIG2A_STEPS = 100
FIG2B_STEPS = 20
FIG3_STEPS = 50


def _fig2a_row(eta: float) -> list[Optional[float]]:
    ch = amplitude_damping(eta)
    return [
        eta,
        qfi_family(ch, single(HALF)),
        qfi_family(ch, ancilla_pair(HALF)),
        qfi_family(ch, ancilla_pair(optimal_ancilla_weight(eta))),
    ]


def fig2a() -> Table:
    etas = [i / FIG2A_STEPS for i in range(FIG2A_STEPS + 1)]
    return Table(columns=["eta", "qfi_single", "qfi_gamma_half", "qfi_gamma_opt"],
                 rows=parallel_map(_fig2a_row, etas))


def _fig2b_row(eta: float) -> list[Optional[float]]:
    ch = amplitude_damping(eta)
    return [
        eta,
        qfi_family(ch, noon(2)),
        optimize_two_probes(ch).best_qfi,
        noon4_qfi(eta, math.pi / 4.0),
        closed_form(closed_form_id("durkin_bound", eta=eta, n=2)),
    ]


def fig2b() -> Table:
    etas = [i / FIG2B_STEPS for i in range(FIG2B_STEPS + 1)]
    return Table(columns=["eta", "qfi_noon2", "qfi_opt2", "qfi_noon4", "durkin_bound"],
                 rows=parallel_map(_fig2b_row, etas))


def _fig3_row(i: int) -> list[list[Optional[float]]]:
    p2 = i / FIG3_STEPS
    rows = []
    for j in range(FIG3_STEPS + 1):
        p3 = j / FIG3_STEPS
        if i + j > FIG3_STEPS:
            rows.append([p2, p3, None, None])
            continue
        j_a = closed_form(closed_form_id("pauli_ancilla", p1=0.0, p2=p2, p3=p3))
        rows.append([p2, p3, pauli_na_optimized(0.0, p2, p3), j_a])
    return rows


def fig3() -> Table:
    blocks = parallel_map(_fig3_row, range(FIG3_STEPS + 1))
    return Table(columns=["p2", "p3", "j_na_opt", "j_a"],
                 rows=[row for block in blocks for row in block])


FIGURES = {"2a": fig2a, "2b": fig2b, "3": fig3}


def figure(figure_id: str) -> Table:
    log.info(logger, MODULE, "figure_start", "Building figure dataset", figure=figure_id)
    table = FIGURES[figure_id]()
    log.info(logger, MODULE, "figure_done", "Figure dataset built",
             figure=figure_id, rows=len(table.rows))
    return table
