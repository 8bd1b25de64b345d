"""PPT test and concurrence for the five mixed states of the state table.

The partial-transpose spectrum of every member of the family is
{I_H, I_V, +k, -k} with k = coh * sqrt(I_H I_V), so a state is entangled
exactly when k > 0. The Wootters concurrence is 2k.
"""

from pathident.entmeas import build_rho, concurrence_numeric, entanglement_report
from pathident.tables import STATES

print(f"{'state':6s} {'I_H':>5s} {'coh':>5s} {'min PT eig':>11s} {'C exact':>8s} "
      f"{'C numeric':>10s}  verdict")
for name, p in STATES.items():
    rep = entanglement_report(p)
    print(f"{name:6s} {p.i_h:5.2f} {p.coh:5.2f} {rep.ppt_min_eigenvalue:11.4f} "
          f"{rep.concurrence_exact:8.4f} {concurrence_numeric(build_rho(p)):10.4f}  "
          f"{'entangled' if rep.is_entangled else 'separable'}")

# the phase of the coherence never changes the amount of entanglement
p = STATES["rho4"]
for phi in (0.0, 1.0, 2.5):
    q = type(p)(p.i_h, p.coh, phi)
    print(f"rho4 with phi = {phi:.1f}: C = {concurrence_numeric(build_rho(q)):.12f}")
