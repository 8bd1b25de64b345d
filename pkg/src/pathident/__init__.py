"""Verifying and measuring two-photon mixed-state entanglement from
single-photon interference in a two-source (path identity) interferometer.

Modules
-------
opalg     labelled-basis dense linear algebra (tensor, partial trace/transpose, eigenvalues)
entmeas   the mixed-state family, PPT test, concurrence
interf    two-source state, HWP + loss map, final and reduced states
detect    counting rates, phase scans, visibilities, S/N estimator
mc        Poisson shot noise and visibility estimation from counts
tables    reproduction of the published tables and concurrence line
cli       command-line front end
"""

from .detect import (
    AnalyzerSetting,
    PhaseScan,
    VisibilitySet,
    analytic_rate,
    concurrence_from_visibility,
    counting_rate,
    phase_scan,
    ppt_from_visibility,
    visibility,
    visibility_set,
)
from .entmeas import (
    EntanglementReport,
    MixedStateParams,
    build_rho,
    concurrence_exact,
    concurrence_numeric,
    entanglement_report,
    ppt_criterion,
    spin_flip,
)
from .interf import (
    SetupParams,
    coherent_two_source_rho,
    consistent_xi,
    final_rho,
    reduced_beta_rho,
)

__version__ = "0.1.0"
