"""From the two-source state to the state of the detected photon.

Photon alpha of source 2 passes a lossy half-wave plate and is merged with
the alpha path of source 1, which makes the two sources indistinguishable
for photon alpha. Tracing out alpha (and the loss modes) leaves photon beta
in a state whose inter-source coherences carry the entanglement.
"""

import numpy as np

from pathident.interf import (
    coherent_two_source_rho,
    final_rho,
    final_rho_explicit,
    reduced_beta_explicit,
    reduced_beta_rho,
)
from pathident.tables import STATES, TABLE_SETUP

np.set_printoptions(precision=4, suppress=True, linewidth=110)
p, s = STATES["rho5"], TABLE_SETUP

rho2 = coherent_two_source_rho(p, s)
print("two-source state: purity", round(rho2.purity(), 12))

rf = final_rho(p, s)
print("final state: dim", rf.dim, "trace", round(rf.trace().real, 12))
print("term-by-term expansion agrees to",
      f"{np.max(np.abs(rf.matrix - final_rho_explicit(p, s).matrix)):.1e}")

rb = reduced_beta_rho(rf)
print("\ndetected-photon state on", [str(st[0]) for st in rb.basis.states])
print(rb.matrix)
print("closed form agrees to", f"{np.max(np.abs(rb.matrix - reduced_beta_explicit(p, s).matrix)):.1e}")

# without coherence the H/V cross terms between sources vanish
rb0 = reduced_beta_rho(final_rho(STATES["rho2"], s))
print("\nrho2 cross-polarisation coherence |<H1|rho|V2>| =", abs(rb0.matrix[0, 3]))
