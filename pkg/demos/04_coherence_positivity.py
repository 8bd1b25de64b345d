"""Why the cross-source coherences must equal the single-source coherence.

With equal source amplitudes, balanced intensities and zero phases, the
two-source density matrix is an 8x8 real symmetric matrix. Trying cross
coherences P_HV, P_VH different from the state's coherence makes it lose
positivity: the x^5 coefficient of the characteristic polynomial is
-[(P_HV - coh)^2 + (P_VH - coh)^2]/32.
"""

import numpy as np

from pathident.interf import coherence_check

coh = 0.5
print("coh = 0.5; min eigenvalue over trial P_HV (rows) and P_VH (columns)")
grid = np.linspace(0, 1, 5)
print("       " + " ".join(f"{x:9.2f}" for x in grid))
for p1 in grid:
    row = [coherence_check(coh, p1, p2).min_eigenvalue for p2 in grid]
    print(f"{p1:6.2f} " + " ".join(f"{v:9.5f}" for v in row))

for p1, p2 in ((0.5, 0.5), (0.9, 0.5), (0.3, 0.7)):
    c = coherence_check(coh, p1, p2)
    print(f"P = ({p1}, {p2}): c3 = {c.c3:+.5f}, -deviation/32 = {-c.deviation / 32:+.5f}, "
          f"PSD {c.psd}")
