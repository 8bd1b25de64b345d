"""Poisson shot noise on phase scans and visibility estimation from counts.

Counts are drawn with numpy's ``Generator(PCG64)`` seeded from the integer
seed, so a (parameters, phases, exposure, seed) tuple always reproduces the
same counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import AnalyzerSetting, EstimationError, fit_sinusoid, phase_scan, scan_phases
from .entmeas import MixedStateParams
from .interf import SetupParams


@dataclass(frozen=True)
class CountScan:
    setting: AnalyzerSetting
    phases: np.ndarray
    counts: np.ndarray
    exposure: float
    seed: int

    def __post_init__(self):
        ph = np.array(self.phases, dtype=float)
        c = np.array(self.counts, dtype=np.int64)
        if ph.shape != c.shape:
            raise ValueError("counts and phases differ in length")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        if not self.exposure > 0:
            raise ValueError(f"exposure must be positive, got {self.exposure}")
        ph.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "setting", AnalyzerSetting(self.setting))
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "counts", c)


def expected_counts(p: MixedStateParams, s: SetupParams, setting, phases, exposure: float):
    return exposure * phase_scan(p, s, setting, phases).rates


def sample_counts(p: MixedStateParams, s: SetupParams, setting, phases=None,
                  exposure: float = 1e5, seed: int = 0, *, mean=None) -> CountScan:
    """Poisson counts with mean exposure * rate at every phase.

    ``mean`` may carry precomputed expectations to skip the density-operator
    pipeline in replication loops.
    """
    phases = scan_phases() if phases is None else np.asarray(phases, dtype=float)
    if mean is None:
        mean = expected_counts(p, s, setting, phases, exposure)
    rng = np.random.default_rng(seed)
    return CountScan(setting, phases, rng.poisson(mean), exposure, seed)


def estimate_visibility(cs: CountScan, counts=None) -> tuple[float, float]:
    """Visibility estimate and its standard error from a count scan.

    Starts from the discrete Fourier component at the fringe frequency, then
    does two rounds of Poisson-weighted least squares with variances taken
    from the current model. ``counts`` overrides the integer counts (used to
    feed exact expectations in the noiseless limit).
    """
    y = np.asarray(cs.counts if counts is None else counts, dtype=float)
    if y.sum() <= 0:
        raise EstimationError("all counts are zero")
    ph = cs.phases
    x = np.column_stack([np.ones_like(ph), np.sin(ph), np.cos(ph)])
    # DFT start: exact for whole periods on a uniform grid, close otherwise
    coef = np.array([y.mean(), 2 * np.mean(y * np.sin(ph)), 2 * np.mean(y * np.cos(ph))])
    for _ in range(2):
        var = np.clip(x @ coef, 1.0, None)
        coef, _ = fit_sinusoid(ph, y, 1.0 / var)
    var = np.clip(x @ coef, 1.0, None)
    cov = np.linalg.inv(x.T @ (x / var[:, None]))
    a, bs, bc = coef
    amp = math.hypot(bs, bc)
    v = amp / a
    if amp > 0:
        grad = np.array([-amp / a ** 2, bs / (amp * a), bc / (amp * a)])
        sigma = math.sqrt(float(grad @ cov @ grad))
    else:
        sigma = math.sqrt(cov[1, 1]) / a
    return float(v), float(sigma)


@dataclass(frozen=True)
class Replications:
    v_true: float
    v_hat: np.ndarray
    sigma: np.ndarray
    seeds: np.ndarray

    @property
    def covered(self) -> np.ndarray:
        return np.abs(self.v_hat - self.v_true) <= 3 * self.sigma

    @property
    def coverage(self) -> float:
        return float(np.mean(self.covered))

    @property
    def bias(self) -> float:
        return float(np.mean(self.v_hat) - self.v_true)

    def summary(self) -> dict:
        return {
            "v_true": self.v_true,
            "v_hat_mean": float(np.mean(self.v_hat)),
            "v_hat_std": float(np.std(self.v_hat, ddof=1)) if len(self.v_hat) > 1 else 0.0,
            "sigma_mean": float(np.mean(self.sigma)),
            "bias": self.bias,
            "coverage_3sigma": self.coverage,
            "replications": int(len(self.v_hat)),
        }


def replication_seeds(seed: int, n: int) -> np.ndarray:
    """Independent per-replication seeds derived from one master seed."""
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint32).astype(np.int64)


def replicate(p: MixedStateParams, s: SetupParams, setting, exposure: float,
              seed: int, replications: int, phases=None) -> Replications:
    from .detect import analytic_visibility

    phases = scan_phases() if phases is None else np.asarray(phases, dtype=float)
    mean = expected_counts(p, s, setting, phases, exposure)
    seeds = replication_seeds(seed, replications)
    est = [estimate_visibility(sample_counts(p, s, setting, phases, exposure, int(k), mean=mean))
           for k in seeds]
    v_true = analytic_visibility(p, s, setting)
    return Replications(v_true, np.array([e[0] for e in est]),
                        np.array([e[1] for e in est]), seeds)
