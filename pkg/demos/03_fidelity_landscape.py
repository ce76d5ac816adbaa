"""The fidelity as a function of the control angles, and its stationary points.

For fixed state pair and noise level the average fidelity is a sinusoid in
the correction angle eta, with the best eta and its value available in
closed form.  The measurement phase beta has its own stationary angle that
does not depend on the noise level or strength at all.

Run:  python3 demos/03_fidelity_landscape.py
"""

import math

import numpy as np

from qprotect import (
    ControlParams,
    beta_critical,
    eta_opt,
    eta_terms,
    fidelity_closed,
    fidelity_eta_opt,
)

theta, phi, p, chi, beta = 1.0155, 0.8976, 0.18, 0.8583, 5.8905

etas = np.linspace(-math.pi, math.pi, 721)[1:]
values = [
    fidelity_closed(ControlParams(theta=theta, phi=phi, p=p, chi=chi, eta=float(e), beta=beta))
    for e in etas
]
k = int(np.argmax(values))
best_eta = eta_opt(theta, p, chi, phi, beta)
best_val = fidelity_eta_opt(theta, p, chi, phi, beta)

print("scanning eta over 720 points: best %.6f at eta = %.6f" % (values[k], etas[k]))
print("closed-form optimum          : best %.12f at eta = %.6f" % (best_val, best_eta))
a, b = eta_terms(theta, p, chi, phi, beta)
print("sinusoid terms (A, B) = (%.6f, %.6f), amplitude %.6f" % (a, b, math.hypot(a, b) / 2))

bc = beta_critical(theta, phi, best_eta)
print("\nstationary measurement phase beta_c = %.6f" % bc)
print("it is the same for every (p, chi):")
for pp, cc in ((0.05, 0.2), (0.18, 0.8583), (0.45, 1.4)):
    h = 1e-6
    up = fidelity_closed(ControlParams(theta=theta, phi=phi, p=pp, chi=cc, eta=best_eta, beta=(bc + h) % (2 * math.pi)))
    dn = fidelity_closed(ControlParams(theta=theta, phi=phi, p=pp, chi=cc, eta=best_eta, beta=(bc - h) % (2 * math.pi)))
    print("  p = %.2f, chi = %.4f : dF/dbeta = %+.2e" % (pp, cc, (up - dn) / (2 * h)))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    import os

    out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
    os.makedirs(out_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(etas, values, lw=1.2)
    ax.axvline(best_eta, color="tab:red", ls="--", lw=1, label="closed-form optimum")
    ax.set_xlabel("correction angle eta")
    ax.set_ylabel("average fidelity")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(out_dir, "fidelity_vs_eta.png")
    fig.savefig(path, dpi=150)
    print("\nwrote", path)
else:
    print("\nmatplotlib not installed; skipping the plot")
