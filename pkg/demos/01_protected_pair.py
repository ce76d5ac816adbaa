"""A nonorthogonal state pair on the Bloch sphere, and what dephasing does to it.

Run:  python3 demos/01_protected_pair.py
"""

import math

import numpy as np

from qprotect import dephase, overlap, prepare_pair, purity, to_bloch

theta = 1.0155
phi = 0.8976

pair = prepare_pair(theta, phi)
print("opening angle theta = %.4f, phase phi = %.4f" % (theta, phi))
print("overlap <psi_+|psi_-> = %.6f   (cos theta = %.6f)" % (overlap(pair).real, math.cos(theta)))

bp = to_bloch(pair.rho_plus)
bm = to_bloch(pair.rho_minus)
print("\nBloch vectors")
print("  psi_+ : (% .6f, % .6f, % .6f)" % (bp.x, bp.y, bp.z))
print("  psi_- : (% .6f, % .6f, % .6f)" % (bm.x, bm.y, bm.z))
print("the pair shares its x component and mirrors in y and z")

print("\nphase flips with probability p shrink the x and y components by (1 - 2p):")
for p in (0.0, 0.1, 0.25, 0.4, 0.5):
    noisy = dephase(pair.rho_plus, p)
    nb = to_bloch(noisy)
    print(
        "  p = %.2f : (% .4f, % .4f, % .4f)  |r| = %.4f  purity = %.4f"
        % (p, nb.x, nb.y, nb.z, nb.length, purity(noisy))
    )
print("z survives untouched; at p = 0.5 the transverse plane is gone entirely")

# the same shrinkage, seen as loss of distinguishability from the clean state
clean = pair.rho_plus
print("\ninput-output fidelity of doing nothing, straight from the matrices:")
for p in (0.1, 0.25, 0.4):
    noisy = dephase(clean, p)
    f = float(np.real(np.trace(clean @ noisy)))
    print("  p = %.2f : F = %.6f" % (p, f))
