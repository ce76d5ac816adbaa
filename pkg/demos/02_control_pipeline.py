"""Following one state through measurement and feedback, stage by stage.

The + member of the pair is dephased, measured weakly, and rotated back
conditioned on the outcome.  The stage table shows how the conditional
branch first lengthens the Bloch vector and the correction then swings it
back toward the input.

Run:  python3 demos/02_control_pipeline.py
"""

import numpy as np

from qprotect import ControlParams, fidelity_closed, fidelity_simulated, pipeline_trace

params = ControlParams(theta=1.0155, phi=0.8976, p=0.18, chi=0.8583, eta=0.7913, beta=5.8905)
print("control parameters:", params)

trace = pipeline_trace(params)
print("\n%-24s %8s %9s %9s %9s %7s" % ("stage", "weight", "x", "y", "z", "|r|"))
for name in ("initial", "post_noise", "post_measurement_plus", "post_correction_plus", "final_normalized"):
    b = getattr(trace, name)
    print("%-24s %8.4f %9.4f %9.4f %9.4f %7.4f" % (name, b.weight, b.x, b.y, b.z, b.length))

print("\nthe + outcome arrives with probability %.4f;" % trace.post_measurement_plus.weight)
print("its branch vector is longer than the noisy one: %.4f vs %.4f"
      % (trace.post_measurement_plus.length, trace.post_noise.length))

initial = np.array([trace.initial.x, trace.initial.y, trace.initial.z])
final = np.array([trace.final_normalized.x, trace.final_normalized.y, trace.final_normalized.z])
print("\ndistance from the input: noisy %.4f, corrected %.4f"
      % (
          float(np.linalg.norm(initial - np.array([trace.post_noise.x, trace.post_noise.y, trace.post_noise.z]))),
          float(np.linalg.norm(initial - final)),
      ))

breakdown = fidelity_simulated(params)
print("\naverage fidelity, matrix pipeline : %.12f" % breakdown.f_avg)
print("average fidelity, closed form     : %.12f" % fidelity_closed(params))
print("per-member fidelities are equal by symmetry: %.12f / %.12f"
      % (breakdown.f_plus, breakdown.f_minus))
