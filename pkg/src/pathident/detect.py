"""Single-photon counting rates, phase scans, visibilities and the
visibility-based entanglement test and concurrence estimator."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .entmeas import MixedStateParams
from .interf import SetupParams, final_rho, reduced_beta_rho
from .opalg import Operator, Particle

QUARTER = math.pi / 4
DEFAULT_N_PHASES = 256
DEFAULT_SPAN = 4 * math.pi
FIT_RESIDUAL_TOL = 1e-8
ANALYTIC_TOL = 1e-6


class NonSinusoidalScanError(RuntimeError):
    """A scan does not follow a + b sin(phi + c); signals a pipeline bug."""


class EstimationError(ValueError):
    pass


_S2 = 1 / math.sqrt(2)


class AnalyzerSetting(str, enum.Enum):
    H = "H"
    V = "V"
    D = "D"
    A = "A"
    R = "R"
    L = "L"

    @property
    def jones(self) -> np.ndarray:
        """Polarisation vector in the (H, V) basis."""
        return {
            "H": np.array([1, 0], dtype=complex),
            "V": np.array([0, 1], dtype=complex),
            "D": np.array([_S2, _S2], dtype=complex),
            "A": np.array([-_S2, _S2], dtype=complex),
            "R": np.array([_S2, -1j * _S2]),
            "L": np.array([_S2, 1j * _S2]),
        }[self.value]


SETTINGS = tuple(AnalyzerSetting)
# HWP angle used for each setting when building a visibility set
SETTING_THETA = {"H": 0.0, "V": 0.0, "D": QUARTER, "A": QUARTER, "R": QUARTER, "L": QUARTER}


def _detector_vector(basis, setting: AnalyzerSetting, phi_beta: float) -> np.ndarray:
    # field E+ = a_1 + i e^{i phi_beta} a_2 projected on the analyser polarisation;
    # the rate is <w|rho|w> with w = conj(path factor) * polarisation amplitude
    e = AnalyzerSetting(setting).jones
    path = {1: 1.0, 2: (1j * cmath.exp(1j * phi_beta)).conjugate()}
    w = np.empty(basis.dim, dtype=complex)
    for i, (m,) in enumerate(basis.states):
        if m.particle is not Particle.BETA:
            raise ValueError(f"detector acts on photon beta only, got {m}")
        w[i] = path[m.path] * e[0 if m.polarization.value == "H" else 1]
    return w


def counting_rate(rho_beta: Operator, setting, phi_in: float, offset: float = 0.0) -> float:
    """Rate tr(rho_beta E^- E^+) at interferometric phase ``phi_in``.

    ``offset`` is the part of phi_in already carried by ``rho_beta``
    (``SetupParams.phase_offset``); the detector-arm phase is set to
    offset - phi_in.
    """
    w = _detector_vector(rho_beta.basis, setting, offset - phi_in)
    return float(np.real(np.vdot(w, rho_beta.matrix @ w)))


def counting_rates(rho_beta: Operator, setting, phases, offset: float = 0.0) -> np.ndarray:
    return np.array([counting_rate(rho_beta, setting, x, offset) for x in np.asarray(phases)])


def _require_quarter(s: SetupParams, setting) -> None:
    if abs(s.theta - QUARTER) > 1e-12:
        raise ValueError(
            f"closed form for setting {setting} holds only at theta = pi/4, got {s.theta}")


def modulation_d(p: MixedStateParams, s: SetupParams) -> complex:
    """Complex fringe amplitude of the D rate at theta = pi/4 (|.| = visibility)."""
    d = s.delta_xi
    return (2 * p.kappa * abs(s.b1 * s.b2)
            * (s.t_v + s.t_h * cmath.exp(1j * d)))


def modulation_r(p: MixedStateParams, s: SetupParams) -> complex:
    d = s.delta_xi
    return (2 * p.kappa * abs(s.b1 * s.b2)
            * (s.t_h * cmath.exp(1j * d) - s.t_v))


def analytic_rate(p: MixedStateParams, s: SetupParams, setting, phi_in: float) -> float:
    """Closed-form counting rates.

    H, V and D hold at any HWP angle; A, R and L are the theta = pi/4 forms.
    Fringe phases are measured from phi_in + xi_HV for D/A/R/L.
    """
    setting = AnalyzerSetting(setting)
    bb = abs(s.b1 * s.b2)
    c, sn = math.cos(2 * s.theta), math.sin(2 * s.theta)
    xi = s.xi12
    if setting is AnalyzerSetting.H:
        return p.i_h * (1 + 2 * bb * s.t_h * c * math.sin(phi_in + xi("H", "H")))
    if setting is AnalyzerSetting.V:
        return p.i_v * (1 - 2 * bb * s.t_v * c * math.sin(phi_in + xi("V", "V")))
    if setting is AnalyzerSetting.D:
        return 0.5 * (
            1
            + 2 * bb * c * (p.i_h * s.t_h * math.sin(phi_in + xi("H", "H"))
                            - p.i_v * s.t_v * math.sin(phi_in + xi("V", "V")))
            + 2 * p.kappa * bb * sn * (s.t_v * math.sin(phi_in + xi("H", "V"))
                                       + s.t_h * math.sin(phi_in + xi("V", "H"))))
    _require_quarter(s, setting)
    return quarter_rate(p, s, setting, phi_in)


def quarter_rate(p: MixedStateParams, s: SetupParams, setting, phi_in: float) -> float:
    """D/A/R/L rates at theta = pi/4 as single sinusoids, phases from xi_HV."""
    setting = AnalyzerSetting(setting)
    _require_quarter(s, setting)
    y = phi_in + s.xi12("H", "V")
    if setting in (AnalyzerSetting.D, AnalyzerSetting.A):
        z = modulation_d(p, s)
        sign = 1.0 if setting is AnalyzerSetting.D else -1.0
        return 0.5 * (1 + sign * abs(z) * math.sin(y + cmath.phase(z)))
    if setting in (AnalyzerSetting.R, AnalyzerSetting.L):
        z = modulation_r(p, s)
        # quarter-period shift relative to the D fringe comes from the -i in |R>
        zeta_r = math.pi / 2 - cmath.phase(z)
        sign = -1.0 if setting is AnalyzerSetting.R else 1.0
        return 0.5 * (1 + sign * abs(z) * math.sin(y - zeta_r))
    raise ValueError(f"no theta = pi/4 closed form for setting {setting.value}")


def analytic_visibility(p: MixedStateParams, s: SetupParams, setting) -> float:
    """Closed-form visibility at the angle the setting is scanned at."""
    setting = AnalyzerSetting(setting)
    bb = abs(s.b1 * s.b2)
    if setting is AnalyzerSetting.H:
        return 2 * bb * s.t_h
    if setting is AnalyzerSetting.V:
        return 2 * bb * s.t_v
    if setting in (AnalyzerSetting.D, AnalyzerSetting.A):
        return abs(modulation_d(p, s))
    return abs(modulation_r(p, s))


@dataclass(frozen=True)
class PhaseScan:
    setting: AnalyzerSetting
    theta: float
    phases: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        ph = np.array(self.phases, dtype=float)
        r = np.array(self.rates, dtype=float)
        if ph.shape != r.shape or ph.ndim != 1:
            raise ValueError("phases and rates must be 1-d and of equal length")
        if np.any(np.diff(ph) <= 0):
            raise ValueError("phases must be strictly increasing")
        if np.any(r < -1e-12):
            raise ValueError("rates must be nonnegative")
        ph.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "setting", AnalyzerSetting(self.setting))
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "rates", r)

    @property
    def span(self) -> float:
        """Phase range covered, counting the last sample's own step."""
        return float(self.phases[-1] - self.phases[0] + np.median(np.diff(self.phases)))


def scan_phases(n: int = DEFAULT_N_PHASES, span: float = DEFAULT_SPAN) -> np.ndarray:
    return np.linspace(0.0, span, n, endpoint=False)


def phase_scan(p: MixedStateParams, s: SetupParams, setting, phases=None) -> PhaseScan:
    """Rates from the full density-operator pipeline over a range of phi_in."""
    phases = scan_phases() if phases is None else np.asarray(phases, dtype=float)
    rho_b = reduced_beta_rho(final_rho(p, s))
    return PhaseScan(setting, s.theta, phases,
                     np.clip(counting_rates(rho_b, setting, phases, s.phase_offset), 0.0, None))


def fit_sinusoid(phases, values, weights=None) -> tuple[np.ndarray, np.ndarray]:
    """Least squares for values ~ a + bs sin(phi) + bc cos(phi).

    The fringe frequency is known, so the model is linear. Returns the
    coefficients (a, bs, bc) and the residuals.
    """
    x = np.column_stack([np.ones_like(phases), np.sin(phases), np.cos(phases)])
    y = np.asarray(values, dtype=float)
    if weights is None:
        coef = np.linalg.lstsq(x, y, rcond=None)[0]
    else:
        sw = np.sqrt(weights)
        coef = np.linalg.lstsq(x * sw[:, None], y * sw, rcond=None)[0]
    return coef, y - x @ coef


class NoSignalError(EstimationError):
    pass


def visibility(scan: PhaseScan, resid_tol: float = FIT_RESIDUAL_TOL) -> float:
    """Fringe visibility (R_max - R_min) / (R_max + R_min) of a noiseless scan.

    A coarse grid max/min is refined by a sinusoid fit; the fitted
    amplitude/offset is returned.
    """
    if len(scan.rates) < 64:
        raise ValueError("need at least 64 samples")
    if scan.span < 2 * math.pi - 1e-9:
        raise ValueError(f"scan must cover a full period, covers {scan.span:.4g}")
    r = scan.rates
    hi, lo = float(r.max()), float(r.min())
    if hi <= 0.0:
        raise NoSignalError(f"scan for setting {scan.setting.value} has no counts")
    (a, bs, bc), resid = fit_sinusoid(scan.phases, r)
    amp = math.hypot(bs, bc)
    if np.max(np.abs(resid)) > resid_tol * hi:
        raise NonSinusoidalScanError(
            f"max fit residual {np.max(np.abs(resid)):.3g} for setting {scan.setting.value}")
    step = float(np.max(np.diff(scan.phases)))
    slack = 2 * step ** 2 * amp + resid_tol * hi
    if abs(hi - (a + amp)) > slack or abs(lo - (a - amp)) > slack:
        raise NonSinusoidalScanError("grid extrema disagree with the fitted sinusoid")
    return float(amp / a)


@dataclass(frozen=True)
class VisibilitySet:
    """Visibilities for H, V at theta = 0 and D, A, R, L at theta = pi/4.

    ``dark`` lists settings whose scan carried no light at all; their
    visibility is recorded as 0.
    """

    v_h_theta0: float
    v_v_theta0: float
    v_d_45: float
    v_a_45: float
    v_r_45: float
    v_l_45: float
    dark: tuple = ()

    def __post_init__(self):
        for name in ("v_h_theta0", "v_v_theta0", "v_d_45", "v_a_45", "v_r_45", "v_l_45"):
            v = getattr(self, name)
            if not (-1e-9 <= v <= 1 + 1e-9):
                raise ValueError(f"{name} = {v} outside [0, 1]")

    def by_setting(self) -> dict:
        return {"H": self.v_h_theta0, "V": self.v_v_theta0, "D": self.v_d_45,
                "A": self.v_a_45, "R": self.v_r_45, "L": self.v_l_45}

    @property
    def s(self) -> float:
        """Entanglement signal sqrt(V_D^2 + V_R^2)."""
        return math.hypot(self.v_d_45, self.v_r_45)

    @property
    def n(self) -> float:
        """Loss/imbalance normaliser sqrt((V_H^2 + V_V^2)/2)."""
        return math.sqrt((self.v_h_theta0 ** 2 + self.v_v_theta0 ** 2) / 2)


def setting_scans(p: MixedStateParams, s: SetupParams, phases=None) -> dict:
    """One numeric scan per analyser setting at its designated HWP angle."""
    return {st.value: phase_scan(p, s.with_theta(SETTING_THETA[st.value]), st, phases)
            for st in SETTINGS}


def visibility_set(p: MixedStateParams, s: SetupParams, phases=None,
                   scans: dict | None = None, check_tol: float = ANALYTIC_TOL) -> VisibilitySet:
    """All six visibilities from numeric scans, each checked against its closed form."""
    scans = scans if scans is not None else setting_scans(p, s, phases)
    vis, dark = {}, []
    for key, scan in scans.items():
        try:
            v = visibility(scan)
        except NoSignalError:
            vis[key] = 0.0
            dark.append(key)
            continue
        expect = analytic_visibility(p, s.with_theta(SETTING_THETA[key]), key)
        if abs(v - expect) > check_tol:
            raise NonSinusoidalScanError(
                f"visibility {v:.12g} for {key} disagrees with closed form {expect:.12g}")
        vis[key] = v
    return VisibilitySet(vis["H"], vis["V"], vis["D"], vis["A"], vis["R"], vis["L"],
                         tuple(dark))


def ppt_from_visibility(vs: VisibilitySet, tol: float = 1e-10,
                        consistency_tol: float = 1e-6) -> bool:
    """Entangled iff the D and R fringes are not both flat."""
    if abs(vs.v_d_45 - vs.v_a_45) > consistency_tol or abs(vs.v_r_45 - vs.v_l_45) > consistency_tol:
        raise ValueError("inconsistent visibility set: V_D != V_A or V_R != V_L")
    return vs.s > tol


def concurrence_from_visibility(vs: VisibilitySet) -> float:
    """Concurrence estimate S/N."""
    if vs.v_h_theta0 < 1e-9 and vs.v_v_theta0 < 1e-9:
        raise EstimationError("no reference fringe in H or V; concurrence cannot be estimated")
    return vs.s / vs.n
