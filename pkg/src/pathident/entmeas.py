"""Entanglement diagnostics for the two-photon polarisation family

    rho = I_H |HH><HH| + I_V |VV><VV| + (e^{-i phi} coh sqrt(I_H I_V) |HH><VV| + h.c.)

with I_V = 1 - I_H. Closed forms are cross-checked against the generic
numeric path in :mod:`pathident.opalg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .opalg import (
    STRUCT_TOL,
    Basis,
    Operator,
    Particle,
    check_density,
    hermitian_eigenvalues,
    mode,
    partial_transpose,
)

# clamp threshold for eigenvalues of rho * rho_tilde; anything below -CLAMP_FAIL is a bug
CLAMP_TOL = 1e-12
CLAMP_FAIL = 1e-9


class NumericalValidityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class MixedStateParams:
    """Parameters (I_H, coherence, phi) of the mixed-state family."""

    i_h: float
    coh: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("i_h", "coh"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0) or math.isnan(v):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")

    @property
    def i_v(self) -> float:
        return 1.0 - self.i_h

    def intensity(self, pol: str) -> float:
        return self.i_h if pol == "H" else self.i_v

    @property
    def kappa(self) -> float:
        """The PPT quantity coh * sqrt(I_H I_V)."""
        return self.coh * math.sqrt(self.i_h * self.i_v)

    def coh_matrix(self, mu: str, nu: str) -> float:
        """1 on the polarisation diagonal, ``coh`` off it."""
        return 1.0 if mu == nu else self.coh

    def phase(self, mu: str, nu: str) -> float:
        """phi_{mu nu}: 0 on the diagonal, phi_HV = -phi_VH = -phi."""
        if mu == nu:
            return 0.0
        return -self.phi if mu == "H" else self.phi


@dataclass(frozen=True)
class EntanglementReport:
    ppt_eigenvalues: tuple
    ppt_min_eigenvalue: float
    is_entangled: bool
    concurrence_exact: float
    concurrence_numeric: float
    tol: float

    def as_dict(self) -> dict:
        return {
            "ppt_eigenvalues": list(self.ppt_eigenvalues),
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
            "verdict": "entangled" if self.is_entangled else "separable",
            "concurrence_exact": self.concurrence_exact,
            "concurrence_numeric": self.concurrence_numeric,
            "tol": self.tol,
        }


POLS = ("H", "V")

TWO_QUBIT_BASIS = Basis(tuple(
    (mode("alpha", 1, a), mode("beta", 1, b)) for a in POLS for b in POLS))

SIGMA_Y = np.array([[0, -1j], [1j, 0]])


def build_rho(p: MixedStateParams, basis: Basis = TWO_QUBIT_BASIS) -> Operator:
    """Density operator on {HH, HV, VH, VV} (alpha polarisation first)."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = p.i_h
    m[3, 3] = p.i_v
    m[0, 3] = np.exp(-1j * p.phi) * p.kappa
    m[3, 0] = np.conj(m[0, 3])
    return Operator(basis, m)


def ppt_criterion(rho: Operator, tol: float = STRUCT_TOL) -> tuple[np.ndarray, bool]:
    """Eigenvalues of the alpha partial transpose and the entanglement verdict.

    The verdict uses a signed tolerance (min eigenvalue < -tol), so states on
    the separable boundary come out separable.
    """
    if rho.dim != 4:
        raise ValueError("PPT test here is for two-qubit (4x4) operators")
    check_density(rho, tol)
    ev = hermitian_eigenvalues(partial_transpose(rho, Particle.ALPHA))
    return ev, bool(ev[-1] < -tol)


def spin_flip(rho: Operator) -> Operator:
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    return Operator(rho.basis, yy @ rho.matrix.conj() @ yy)


def concurrence_numeric(rho: Operator) -> float:
    """Wootters concurrence from the spin-flipped operator."""
    if rho.dim != 4:
        raise ValueError("concurrence is defined here for 4x4 operators")
    check_density(rho)
    # rho * rho_tilde is not Hermitian but is similar to a PSD matrix
    ev = np.linalg.eigvals(rho.matrix @ spin_flip(rho).matrix)
    if np.max(np.abs(ev.imag)) > 1e-9:
        raise NumericalValidityError(f"complex eigenvalues of rho*rho_tilde: {ev}")
    ev = ev.real
    if ev.min() < -CLAMP_FAIL:
        raise NumericalValidityError(f"eigenvalue {ev.min():.3g} of rho*rho_tilde is negative")
    # sqrt(eig(rho rho~)) = singular values of A^T Y A for rho = A A^dag; this
    # avoids square roots of roundoff-level eigenvalues of rho rho~
    w, v = np.linalg.eigh(rho.matrix)
    a = v * np.sqrt(np.clip(w, 0.0, None))
    lam = np.linalg.svd(a.T @ np.kron(SIGMA_Y, SIGMA_Y) @ a, compute_uv=False)
    lam = np.where(lam < CLAMP_TOL, 0.0, lam)
    return float(min(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0), 1.0))


def concurrence_exact(p: MixedStateParams) -> float:
    return 2.0 * p.coh * math.sqrt(p.i_h * (1.0 - p.i_h))


def ppt_eigenvalues_exact(p: MixedStateParams) -> np.ndarray:
    """Closed-form eigenvalues of the partial transpose, descending."""
    k = p.kappa
    return np.sort(np.array([p.i_h, p.i_v, k, -k]))[::-1]


def entanglement_report(p: MixedStateParams, tol: float = STRUCT_TOL) -> EntanglementReport:
    rho = build_rho(p)
    ev, ent = ppt_criterion(rho, tol)
    return EntanglementReport(
        ppt_eigenvalues=tuple(float(x) for x in ev),
        ppt_min_eigenvalue=float(ev[-1]),
        is_entangled=ent,
        concurrence_exact=concurrence_exact(p),
        concurrence_numeric=concurrence_numeric(rho),
        tol=tol,
    )
