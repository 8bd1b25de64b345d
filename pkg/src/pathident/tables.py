"""Reproduction of the published state table, visibility table and the
concurrence-vs-S/N line, with per-cell pass/fail."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detect import concurrence_from_visibility, ppt_from_visibility, visibility_set
from .entmeas import (
    MixedStateParams,
    build_rho,
    concurrence_exact,
    concurrence_numeric,
    ppt_criterion,
)
from .interf import SetupParams, consistent_xi

CELL_TOL = 0.005
EXACT_TOL = 1e-10

# Delta xi = xi_VH - xi_HV = pi/4; phase-consistent two-source states need
# Delta xi = 2 phi, hence phi = pi/8 for every state of the table
TABLE_PHI = math.pi / 8

TABLE_SETUP = SetupParams.from_probabilities(
    0.55, t_h=0.9, t_v=0.85, theta=math.pi / 4, xi=consistent_xi(TABLE_PHI))

# coherence is irrelevant for rho1 (I_V = 0); 0 is used
STATES = {
    "rho1": MixedStateParams(1.0, 0.0, TABLE_PHI),
    "rho2": MixedStateParams(0.5, 0.0, TABLE_PHI),
    "rho3": MixedStateParams(0.5, 0.32, TABLE_PHI),
    "rho4": MixedStateParams(0.5, 0.5, TABLE_PHI),
    "rho5": MixedStateParams(0.5, 1.0, TABLE_PHI),
}

PRINTED_CONCURRENCE = {"rho1": 0.0, "rho2": 0.0, "rho3": 0.32, "rho4": 0.5, "rho5": 1.0}

# (V_D, V_A, V_R, V_L, verdict)
PRINTED_VISIBILITY = {
    "rho1": (0.0, 0.0, 0.0, 0.0, "separable"),
    "rho2": (0.0, 0.0, 0.0, 0.0, "separable"),
    "rho3": (0.76, 0.76, 0.31, 0.31, "entangled"),
    "rho4": (0.40, 0.40, 0.17, 0.17, "entangled"),
    "rho5": (0.80, 0.80, 0.33, 0.33, "entangled"),
}

# the printed rho3 row matches coherence ~0.95, not 0.32; these are the
# values the visibility formulas give at 0.32
FLAGGED = {"rho3": (0.26, 0.26, 0.11, 0.11)}

VIS_COLUMNS = ("V_D", "V_A", "V_R", "V_L")


@dataclass(frozen=True)
class Table1Row:
    state: str
    i_h: float
    i_v: float
    coh: float
    printed: float
    exact: float
    numeric: float
    ppt_min_eigenvalue: float
    verdict: str

    @property
    def passed(self) -> bool:
        return abs(self.exact - self.printed) < EXACT_TOL and abs(self.numeric - self.printed) < EXACT_TOL


@dataclass(frozen=True)
class Table2Row:
    state: str
    derived: tuple
    printed: tuple
    verdict: str
    printed_verdict: str
    flagged: bool
    cells_pass: tuple
    verdict_pass: bool

    @property
    def passed(self) -> bool:
        return all(self.cells_pass) and self.verdict_pass


@dataclass(frozen=True)
class Fig3Point:
    state: str
    concurrence: float
    s: float
    n: float
    s_over_n: float

    @property
    def error(self) -> float:
        return abs(self.concurrence - self.s_over_n)


def reproduce_table1(tol: float = 1e-10) -> list[Table1Row]:
    rows = []
    for name, p in STATES.items():
        rho = build_rho(p)
        ev, ent = ppt_criterion(rho, tol)
        rows.append(Table1Row(
            name, p.i_h, p.i_v, p.coh, PRINTED_CONCURRENCE[name],
            concurrence_exact(p), concurrence_numeric(rho), float(ev[-1]),
            "entangled" if ent else "separable"))
    return rows


def reproduce_table2(setup: SetupParams = TABLE_SETUP, tol: float = 1e-10) -> list[Table2Row]:
    rows = []
    for name, p in STATES.items():
        vs = visibility_set(p, setup)
        derived = (vs.v_d_45, vs.v_a_45, vs.v_r_45, vs.v_l_45)
        verdict = "entangled" if ppt_from_visibility(vs, tol) else "separable"
        *printed, printed_verdict = PRINTED_VISIBILITY[name]
        target = FLAGGED.get(name, printed)
        cell_tol = EXACT_TOL if max(target) == 0 else CELL_TOL
        cells = tuple(abs(d - t) <= cell_tol for d, t in zip(derived, target))
        rows.append(Table2Row(name, derived, tuple(printed), verdict, printed_verdict,
                              name in FLAGGED, cells, verdict == printed_verdict))
    return rows


def fig3_points(setup: SetupParams = TABLE_SETUP) -> list[Fig3Point]:
    pts = []
    for name, p in STATES.items():
        vs = visibility_set(p, setup)
        pts.append(Fig3Point(name, concurrence_exact(p), vs.s, vs.n,
                             concurrence_from_visibility(vs)))
    return pts
