"""Joint optimization of the measurement and feedback, over one state and many.

Run:  python3 demos/04_optimizing_the_controls.py        (about a minute)
"""

import math
import os

import numpy as np

from qprotect import baselines, curve_over_p, optimize_point, sweep_surface

theta, phi, p = 1.0155, 0.8976, 0.18

result = optimize_point(theta, phi, p)
print("state pair (theta, phi) = (%.4f, %.4f) at p = %.2f" % (theta, phi, p))
print("best controls: chi = %.6f, eta = %.6f, beta = %.6f" % (result.chi_opt, result.eta_opt, result.beta_opt))
print("fidelity %.9f, %.2e above the best phase-free run" % (result.f_opt, result.delta_f))
base = baselines(theta, phi, p)
print("baselines: do nothing %.6f, projective %.6f -> improvement %.2e"
      % (base.f_dn, base.f_h, result.f_imp))

print("\ngain surface over the state space at p = 0.18 (coarse 9x9 grid):")
records = sweep_surface(0.18, (0.0, math.pi / 2), (0.0, math.pi / 2), (9, 9))
grid = np.array([rec.result.delta_f for rec in records]).reshape(9, 9)
print("      " + "".join("phi=%.2f " % rec.phi for rec in records[:9]))
for i in range(9):
    print("th=%.2f" % records[i * 9].theta + "".join(" %.5f " % v for v in grid[i]))
k = int(np.argmax(grid))
print("coarse maximum %.5f at theta = %.3f, phi = %.3f"
      % (float(grid.flat[k]), records[k].theta, records[k].phi))

print("\ntracing the surface maximum against the noise level (21 steps):")
points = curve_over_p((0.0, 0.5), 21, "delta_f", grid_counts=(24, 24))
for pp, value, t_arg, f_arg in points[::4]:
    print("  p = %.3f : max delta_f = %.6f at (%.3f, %.3f)" % (pp, value, t_arg, f_arg))
kk = int(np.argmax([v for _, v, *_ in points]))
print("peak of the curve: %.6f at p = %.3f" % (points[kk][1], points[kk][0]))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
    os.makedirs(out_dir, exist_ok=True)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    im = ax1.imshow(grid, origin="lower", extent=(0, math.pi / 2, 0, math.pi / 2), aspect="auto")
    ax1.set_xlabel("phi")
    ax1.set_ylabel("theta")
    ax1.set_title("delta_f at p = 0.18")
    fig.colorbar(im, ax=ax1)
    ax2.plot([q[0] for q in points], [q[1] for q in points], marker="o", ms=3)
    ax2.set_xlabel("p")
    ax2.set_ylabel("max delta_f")
    fig.tight_layout()
    path = os.path.join(out_dir, "optimizer_surfaces.png")
    fig.savefig(path, dpi=150)
    print("\nwrote", path)
else:
    print("\nmatplotlib not installed; skipping the plots")
