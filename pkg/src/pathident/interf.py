"""Two-source biphoton state, the half-wave-plate + loss map on photon alpha,
and the reduced state of the detected photon beta.

Two independent routes to the final state are provided. :func:`final_rho`
pushes every source-2 alpha ket through :func:`hwp_loss_ket_transform` and
conjugates the two-source operator with the resulting map.
:func:`final_rho_explicit` and :func:`reduced_beta_explicit` write the same
operators down term by term.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .entmeas import POLS, MixedStateParams, build_rho
from .opalg import (
    EQ_TOL,
    STRUCT_TOL,
    Basis,
    Ket,
    Operator,
    Particle,
    check_density,
    density_defects,
    hermitian_eigenvalues,
    mode,
    partial_trace,
)

SOURCES = (1, 2)
XI_KEYS = (("H", "H"), ("V", "V"), ("H", "V"), ("V", "H"))

# |mu_a^j, nu_b^j>, source-major; the HV and VH states are never emitted but
# keep the ordering of the 8x8 positivity matrix
SOURCE_BASIS = Basis(tuple(
    (mode("alpha", j, a), mode("beta", j, b))
    for j in SOURCES for a in POLS for b in POLS))

ALPHA_IN = Basis.single(mode("alpha", j, m) for j in SOURCES for m in POLS)
ALPHA_OUT = Basis.single(
    [mode("alpha", 1, m) for m in POLS] + [mode("loss", 0, m) for m in POLS])
ALPHA_SOURCE2 = Basis.single(mode("alpha", 2, m) for m in POLS)
BETA_BASIS = Basis.single(mode("beta", j, m) for j in SOURCES for m in POLS)
FINAL_BASIS = ALPHA_OUT.product(BETA_BASIS)


def consistent_xi(phi: float, chi: float = 0.0) -> tuple:
    """Cross-source phases (HH, VV, HV, VH) compatible with state phase ``phi``.

    With nonzero coherence the two-source operator is only positive when the
    four phases are (chi, chi, chi - phi, chi + phi); ``chi`` is a common
    inter-source phase that merely shifts the fringes.
    """
    return (chi, chi, chi - phi, chi + phi)


@dataclass(frozen=True)
class SetupParams:
    """Interferometer settings and imperfections.

    ``xi`` holds the four independent cross-source phases for source 1 -> 2
    in the order (HH, VV, HV, VH); the 2 -> 1 phases are their negatives.
    """

    b1: complex = 1 / math.sqrt(2)
    b2: complex = 1 / math.sqrt(2)
    t_h: float = 1.0
    t_v: float = 1.0
    theta: float = math.pi / 4
    xi: tuple = (0.0, 0.0, 0.0, 0.0)
    phi_alpha: float = 0.0
    phi_beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "b1", complex(self.b1))
        object.__setattr__(self, "b2", complex(self.b2))
        object.__setattr__(self, "xi", tuple(float(x) for x in self.xi))
        if len(self.xi) != 4:
            raise ValueError("xi needs four phases (HH, VV, HV, VH)")
        norm = abs(self.b1) ** 2 + abs(self.b2) ** 2
        if abs(norm - 1.0) >= EQ_TOL:
            raise ValueError(f"|b1|^2 + |b2|^2 must be 1, got {norm!r}")
        for name in ("t_h", "t_v"):
            t = getattr(self, name)
            if not (0.0 < t <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {t}")
        values = (self.theta, self.phi_alpha, self.phi_beta) + self.xi
        if not all(math.isfinite(v) for v in values):
            raise ValueError("phases and angles must be finite")

    @classmethod
    def from_probabilities(cls, p1: float, **kw) -> "SetupParams":
        """Real emission amplitudes from the source-1 emission probability."""
        return cls(b1=math.sqrt(p1), b2=math.sqrt(1.0 - p1), **kw)

    def transmission(self, pol: str) -> float:
        return self.t_h if pol == "H" else self.t_v

    def loss(self, pol: str) -> float:
        """Loss amplitude sqrt(1 - T^2)."""
        return math.sqrt(max(0.0, 1.0 - self.transmission(pol) ** 2))

    def hwp(self, mu: str, lam: str) -> float:
        """HWP-with-transmission coefficient Lambda_{mu lam}(theta)."""
        c, s = math.cos(2 * self.theta), math.sin(2 * self.theta)
        t = self.transmission(mu)
        if mu == "H":
            return t * (c if lam == "H" else s)
        return t * (s if lam == "H" else -c)

    def xi12(self, mu: str, nu: str) -> float:
        return self.xi[XI_KEYS.index((mu, nu))]

    @property
    def delta_xi(self) -> float:
        """xi_VH - xi_HV, the only phase the D/R visibilities depend on."""
        return self.xi12("V", "H") - self.xi12("H", "V")

    @property
    def phase_offset(self) -> float:
        """phi_alpha + arg b1 - arg b2: the part of phi_in carried by the state."""
        return self.phi_alpha + cmath.phase(self.b1) - cmath.phase(self.b2)

    @property
    def phi_in(self) -> float:
        return self.phase_offset - self.phi_beta

    def amp(self, j: int) -> complex:
        return self.b1 if j == 1 else self.b2

    def with_theta(self, theta: float) -> "SetupParams":
        return replace(self, theta=theta)


@dataclass(frozen=True)
class GeneralTwoSourceCoeffs:
    """Coherence magnitudes P and phases xi keyed by (mu, j, nu, k)."""

    p: dict = field(hash=False)
    xi: dict = field(hash=False)

    @classmethod
    def build(cls, state: MixedStateParams, setup: SetupParams,
              cross: dict | None = None) -> "GeneralTwoSourceCoeffs":
        """Fill in all 16 entries from the four source-1 -> source-2 magnitudes.

        ``cross`` maps (mu, nu) to P_{mu^1}^{nu^2}; missing entries default to
        the coherent values (1 for equal polarisations, ``coh`` otherwise).
        Same-source entries follow the single-source state; reversed
        cross-source entries follow the Hermiticity relations.
        """
        cross = dict(cross or {})
        p, xi = {}, {}
        for mu, j, nu, k in itertools.product(POLS, SOURCES, POLS, SOURCES):
            if j == k:
                p[mu, j, nu, k] = state.coh_matrix(mu, nu)
                xi[mu, j, nu, k] = state.phase(mu, nu)
            elif j == 1:
                p[mu, j, nu, k] = cross.get((mu, nu), state.coh_matrix(mu, nu))
                xi[mu, j, nu, k] = setup.xi12(mu, nu)
            else:
                p[mu, j, nu, k] = cross.get((nu, mu), state.coh_matrix(nu, mu))
                xi[mu, j, nu, k] = -setup.xi12(nu, mu)
        return cls(p, xi)

    def cross(self) -> dict:
        return {(mu, nu): self.p[mu, 1, nu, 2] for mu in POLS for nu in POLS}


def _wrap(x: float) -> float:
    return math.remainder(x, 2 * math.pi)


def check_coeffs(state: MixedStateParams, g: GeneralTwoSourceCoeffs,
                 tol: float = STRUCT_TOL) -> None:
    """Raise ValueError unless ``g`` obeys the symmetry and single-source relations."""
    errors = []
    for mu, j, nu, k in itertools.product(POLS, SOURCES, POLS, SOURCES):
        key, rev = (mu, j, nu, k), (nu, k, mu, j)
        pv = g.p[key]
        if not (-tol <= pv <= 1 + tol):
            errors.append(f"P{key} = {pv} outside [0, 1]")
        if abs(pv - g.p[rev]) > tol:
            errors.append(f"P{key} != P{rev}")
        if abs(_wrap(g.xi[key] + g.xi[rev])) > tol:
            errors.append(f"xi{key} != -xi{rev}")
        if j == k:
            if abs(pv - state.coh_matrix(mu, nu)) > tol:
                errors.append(f"P{key} = {pv} differs from the single-source coherence")
            if abs(_wrap(g.xi[key] - state.phase(mu, nu))) > tol:
                errors.append(f"xi{key} differs from the single-source phase")
    if errors:
        raise ValueError("invalid two-source coefficients: " + "; ".join(errors))


def single_source_rho(p: MixedStateParams, j: int) -> Operator:
    """The state of one source, on its own modes {mu_a^j mu_b^j}."""
    basis = Basis(tuple((mode("alpha", j, a), mode("beta", j, b))
                        for a in POLS for b in POLS))
    return build_rho(p, basis)


def general_two_source_rho(p: MixedStateParams, s: SetupParams,
                           g: GeneralTwoSourceCoeffs) -> Operator:
    """Most general one-pair state of two identical sources, on SOURCE_BASIS."""
    check_coeffs(p, g)
    m = np.zeros((SOURCE_BASIS.dim, SOURCE_BASIS.dim), dtype=complex)
    for mu, j, nu, k in itertools.product(POLS, SOURCES, POLS, SOURCES):
        row = SOURCE_BASIS.index((mode("alpha", j, mu), mode("beta", j, mu)))
        col = SOURCE_BASIS.index((mode("alpha", k, nu), mode("beta", k, nu)))
        m[row, col] = (s.amp(j) * s.amp(k).conjugate()
                       * math.sqrt(p.intensity(mu) * p.intensity(nu))
                       * g.p[mu, j, nu, k] * cmath.exp(1j * g.xi[mu, j, nu, k]))
    return Operator(SOURCE_BASIS, m)


def enforce_coherence(p: MixedStateParams, g: GeneralTwoSourceCoeffs,
                      tol: float = STRUCT_TOL) -> GeneralTwoSourceCoeffs:
    """Coefficients after imposing full same-polarisation cross-source coherence.

    Requires P_{mu^1}^{mu^2} = 1 on input; every cross term is then set to the
    value positivity forces on it. :func:`coherence_check` demonstrates why.
    """
    for mu in POLS:
        if abs(g.p[mu, 1, mu, 2] - 1.0) > tol:
            raise ValueError(
                f"same-polarisation cross-source coherence P[{mu}1,{mu}2] = "
                f"{g.p[mu, 1, mu, 2]} is not 1")
    p_new = dict(g.p)
    for mu, j, nu, k in itertools.product(POLS, SOURCES, POLS, SOURCES):
        p_new[mu, j, nu, k] = p.coh_matrix(mu, nu)
    return GeneralTwoSourceCoeffs(p_new, dict(g.xi))


@dataclass(frozen=True)
class CoherenceCheck:
    """Positivity of the symmetric 8x8 two-source matrix for trial cross coherences.

    ``c2``, ``c3``, ``c4`` are the coefficients of the characteristic
    polynomial x^8 - x^7 + c2 x^6 - c3 x^5 + c4 x^4; ``deviation`` is
    (P_HV - coh)^2 + (P_VH - coh)^2, which must vanish for c3 >= 0.
    """

    coh: float
    p_hv: float
    p_vh: float
    eigenvalues: tuple
    min_eigenvalue: float
    psd: bool
    c2: float
    c3: float
    c4: float
    deviation: float


def positivity_matrix(coh: float, p_hv: float, p_vh: float) -> Operator:
    """Two-source operator at b1 = b2 = 1/sqrt2, I_H = 1/2, all phases zero,
    with full same-polarisation coherence and trial cross coherences."""
    state = MixedStateParams(0.5, coh, 0.0)
    setup = SetupParams()
    g = GeneralTwoSourceCoeffs.build(
        state, setup, {("H", "H"): 1.0, ("V", "V"): 1.0,
                       ("H", "V"): p_hv, ("V", "H"): p_vh})
    return general_two_source_rho(state, setup, g)


def coherence_check(coh: float, p_hv: float, p_vh: float,
                    tol: float = STRUCT_TOL) -> CoherenceCheck:
    m = positivity_matrix(coh, p_hv, p_vh)
    ev = hermitian_eigenvalues(m)
    poly = np.real(np.poly(ev))
    return CoherenceCheck(
        coh=coh, p_hv=p_hv, p_vh=p_vh,
        eigenvalues=tuple(float(x) for x in ev),
        min_eigenvalue=float(ev[-1]),
        psd=bool(ev[-1] >= -tol),
        c2=float(poly[2]), c3=float(-poly[3]), c4=float(poly[4]),
        deviation=(p_hv - coh) ** 2 + (p_vh - coh) ** 2,
    )


def coherent_two_source_rho(p: MixedStateParams, s: SetupParams) -> Operator:
    """Two-source state with every cross coherence fixed to its coherent value."""
    g = enforce_coherence(p, GeneralTwoSourceCoeffs.build(p, s))
    rho = general_two_source_rho(p, s, g)
    problems = density_defects(rho)
    if problems:
        raise ValueError(
            "two-source state is unphysical (" + "; ".join(problems) + "); with "
            "nonzero coherence the cross-source phases must be consistent_xi(phi, chi)")
    return rho


def hwp_loss_ket_transform(k: Ket, s: SetupParams) -> Ket:
    """Map a photon-alpha ket on source-2 modes to source-1 modes plus loss modes.

    |mu_a^2> -> exp(-i phi_alpha) [sum_lam Lambda_{mu lam} |lam_a^1> + R_mu |mu>_0]
    """
    out = np.zeros(ALPHA_OUT.dim, dtype=complex)
    for (m,), amp in zip(k.basis.states, k.amplitudes):
        if m.particle is not Particle.ALPHA or m.path != 2:
            raise ValueError(f"transform acts on source-2 alpha modes, got {m}")
        mu = m.polarization.value
        for lam in POLS:
            out[ALPHA_OUT.index(mode("alpha", 1, lam))] += amp * s.hwp(mu, lam)
        out[ALPHA_OUT.index(mode("loss", 0, mu))] += amp * s.loss(mu)
    return Ket(ALPHA_OUT, cmath.exp(-1j * s.phi_alpha) * out)


def alpha_transfer_matrix(s: SetupParams) -> np.ndarray:
    """Columns are the images of the ALPHA_IN modes in ALPHA_OUT."""
    cols = []
    for (m,) in ALPHA_IN.states:
        if m.path == 1:
            v = np.zeros(ALPHA_OUT.dim, dtype=complex)
            v[ALPHA_OUT.index(m)] = 1.0
        else:
            v = np.zeros(ALPHA_SOURCE2.dim, dtype=complex)
            v[ALPHA_SOURCE2.index(m)] = 1.0
            v = hwp_loss_ket_transform(Ket(ALPHA_SOURCE2, v), s).amplitudes
        cols.append(v)
    return np.stack(cols, axis=1)


def final_rho(p: MixedStateParams, s: SetupParams) -> Operator:
    """Biphoton state after the HWP and loss, on FINAL_BASIS (16 states)."""
    rho2 = coherent_two_source_rho(p, s)
    prod = ALPHA_IN.product(BETA_BASIS)
    idx = [prod.index(st) for st in SOURCE_BASIS.states]
    big = np.zeros((prod.dim, prod.dim), dtype=complex)
    big[np.ix_(idx, idx)] = rho2.matrix
    u = np.kron(alpha_transfer_matrix(s), np.eye(BETA_BASIS.dim))
    return check_density(Operator(FINAL_BASIS, u @ big @ u.conj().T))


def reduced_beta_rho(rho_f: Operator) -> Operator:
    """Trace out photon alpha and the loss modes."""
    return partial_trace(rho_f, keep=Particle.BETA)


def final_rho_explicit(p: MixedStateParams, s: SetupParams) -> Operator:
    """Term-by-term expansion of the final biphoton state.

    Besides the loss-mode cross terms, the source-1/source-2 cross terms also
    carry the Lambda-weighted alpha^1 components, without which the reduced
    state would lose its inter-source coherences.
    """
    m = np.zeros((FINAL_BASIS.dim, FINAL_BASIS.dim), dtype=complex)

    def add(a_ket, b_ket, a_bra, b_bra, val):
        m[FINAL_BASIS.index((a_ket, b_ket)), FINAL_BASIS.index((a_bra, b_bra))] += val

    b1, b2 = s.b1, s.b2
    e = cmath.exp(1j * s.phi_alpha)
    for mu, nu in itertools.product(POLS, POLS):
        w = math.sqrt(p.intensity(mu) * p.intensity(nu)) * p.coh_matrix(mu, nu)
        a1 = lambda x: mode("alpha", 1, x)
        l0 = lambda x: mode("loss", 0, x)
        bj = lambda x, j: mode("beta", j, x)
        # source 1 with itself
        add(a1(mu), bj(mu, 1), a1(nu), bj(nu, 1),
            abs(b1) ** 2 * w * cmath.exp(1j * p.phase(mu, nu)))
        # source 1 ket, source 2 bra
        c12 = b1 * b2.conjugate() * w * cmath.exp(1j * s.xi12(mu, nu)) * e
        add(a1(mu), bj(mu, 1), l0(nu), bj(nu, 2), c12 * s.loss(nu))
        for eps in POLS:
            add(a1(mu), bj(mu, 1), a1(eps), bj(nu, 2), c12 * s.hwp(nu, eps))
        # source 2 ket, source 1 bra; xi_{mu^2}^{nu^1} = -xi_{nu^1}^{mu^2}
        c21 = b1.conjugate() * b2 * w * cmath.exp(1j * (-s.xi12(nu, mu))) / e
        add(l0(mu), bj(mu, 2), a1(nu), bj(nu, 1), c21 * s.loss(mu))
        for lam in POLS:
            add(a1(lam), bj(mu, 2), a1(nu), bj(nu, 1), c21 * s.hwp(mu, lam))
        # source 2 with itself
        c22 = abs(b2) ** 2 * w * cmath.exp(1j * p.phase(mu, nu))
        add(l0(mu), bj(mu, 2), l0(nu), bj(nu, 2), c22 * s.loss(mu) * s.loss(nu))
        for lam in POLS:
            add(a1(lam), bj(mu, 2), l0(nu), bj(nu, 2), c22 * s.loss(nu) * s.hwp(mu, lam))
            add(l0(mu), bj(mu, 2), a1(lam), bj(nu, 2), c22 * s.loss(mu) * s.hwp(nu, lam))
            for eps in POLS:
                add(a1(lam), bj(mu, 2), a1(eps), bj(nu, 2),
                    c22 * s.hwp(mu, lam) * s.hwp(nu, eps))
    return Operator(FINAL_BASIS, m)


def reduced_beta_explicit(p: MixedStateParams, s: SetupParams) -> Operator:
    """Closed form of the detected-photon state on {H_b^1, V_b^1, H_b^2, V_b^2}."""
    def idx(pol, j):
        return BETA_BASIS.index(mode("beta", j, pol))

    m = np.zeros((4, 4), dtype=complex)
    for j in SOURCES:
        for pol in POLS:
            m[idx(pol, j), idx(pol, j)] = abs(s.amp(j)) ** 2 * p.intensity(pol)
    c, sn = math.cos(2 * s.theta), math.sin(2 * s.theta)
    pre = s.b1 * s.b2.conjugate()
    ph = lambda mu, nu: cmath.exp(1j * (s.phi_alpha + s.xi12(mu, nu)))
    terms = {
        ("H", "H"): pre * c * p.i_h * s.t_h * ph("H", "H"),
        ("V", "V"): -pre * c * p.i_v * s.t_v * ph("V", "V"),
        ("H", "V"): pre * p.kappa * sn * s.t_v * ph("H", "V"),
        ("V", "H"): pre * p.kappa * sn * s.t_h * ph("V", "H"),
    }
    for (mu, nu), v in terms.items():
        m[idx(mu, 1), idx(nu, 2)] += v
        m[idx(nu, 2), idx(mu, 1)] += np.conj(v)
    return Operator(BETA_BASIS, m)
