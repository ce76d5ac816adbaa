"""Writing the reference-figure datasets and running the invariant suite.

Uses reduced grids so the whole script finishes in about half a minute;
drop the grid_counts/p_steps overrides to get the full-resolution tables
(or use the command line: qprotect figure --figure 4 --out fig4.csv).

Run:  python3 demos/05_reproduce_figures.py
"""

import os

from qprotect import figure_dataset, render_csv, run_checks, write_text

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(out_dir, exist_ok=True)

for fig in (2, 3, 4, 5, 6, 7):
    metadata, columns, rows = figure_dataset(fig, grid_counts=(16, 16), p_steps=11)
    path = os.path.join(out_dir, "figure%d.csv" % fig)
    write_text(path, render_csv(metadata, columns, rows))
    print("figure %d: %4d rows, columns %s -> %s" % (fig, len(rows), ",".join(columns), path))

print("\nfigure 7 is the stage table; its rows:")
metadata, columns, rows = figure_dataset(7)
for row in rows:
    print("  %-24s weight %.4f  (% .4f, % .4f, % .4f)" % row)
print("beta-extended fidelity %.6f vs phase-free %.6f"
      % (metadata["fidelity"], metadata["fidelity_beta_zero"]))

print("\ninvariant suite:")
for check in run_checks(samples=120):
    print("  %s %-24s max deviation %.2e (tolerance %.0e)"
          % ("PASS" if check.passed else "FAIL", check.name, check.deviation, check.tolerance))
