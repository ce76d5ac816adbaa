"""Datasets behind the reference figures.

Each figure id maps to one reproducible table:

* 2, 3, 5: optimizer surfaces over the state space (theta, phi) at four
  noise levels, for the feedback gain delta_f, the optimal measurement
  phase beta_opt, and the improvement over the passive baselines f_imp.
* 4, 6: the surface maximum of delta_f and f_imp traced against the
  noise level, with the state that attains it.
* 7: a stage-by-stage Bloch breakdown of the control pipeline at one
  operating point, plus the final state the phase-free protocol reaches
  at the same point for comparison.
"""

from __future__ import annotations

import numpy as np

from .channel import ControlParams, pipeline_trace
from .fidelity import fidelity_closed
from .optimize import (
    OptimizationConfig,
    _optimize_arrays,
    curve_over_p,
    sweep_surface,
)

__all__ = ["FIGURE_IDS", "SHOWCASE_POINT", "figure_dataset"]

_HALF_PI = float(np.pi / 2.0)

FIGURE_IDS = (2, 3, 4, 5, 6, 7)

# operating point used for the stage-table figure
SHOWCASE_POINT = ControlParams(
    theta=1.0155, phi=0.8976, p=0.18, chi=0.8583, eta=0.7913, beta=5.8905
)

_SURFACE_QUANTITY = {2: "delta_f", 3: "beta_opt", 5: "f_imp"}
_CURVE_QUANTITY = {4: "delta_f", 6: "f_imp"}
_SURFACE_P_VALUES = (0.10, 0.20, 0.30, 0.40)
_DEFAULT_GRID = (64, 64)
_DEFAULT_P_STEPS = 101


def _config_metadata(cfg: OptimizationConfig) -> dict:
    return {
        "chi_grid": cfg.chi_grid,
        "beta_grid": cfg.beta_grid,
        "refine_tol": cfg.refine_tol,
        "max_refine_iters": cfg.max_refine_iters,
    }


def _surface_dataset(figure_id, grid_counts, cfg, jobs):
    quantity = _SURFACE_QUANTITY[figure_id]
    rows = []
    for p in _SURFACE_P_VALUES:
        records = sweep_surface(
            p,
            (0.0, _HALF_PI),
            (0.0, _HALF_PI),
            grid_counts,
            quantity=quantity,
            config=cfg,
            jobs=jobs,
        )
        rows.extend(
            (rec.theta, rec.phi, rec.p, getattr(rec.result, quantity)) for rec in records
        )
    rows.sort(key=lambda row: (row[0], row[1], row[2]))
    metadata = {
        "figure": figure_id,
        "quantity": quantity,
        "p_values": " ".join("%.2f" % p for p in _SURFACE_P_VALUES),
        "grid_theta": int(grid_counts[0]),
        "grid_phi": int(grid_counts[1]),
        "theta_min": 0.0,
        "theta_max": _HALF_PI,
        "phi_min": 0.0,
        "phi_max": _HALF_PI,
    }
    metadata.update(_config_metadata(cfg))
    return metadata, ["theta", "phi", "p", quantity], rows


def _curve_dataset(figure_id, grid_counts, p_steps, cfg, jobs):
    quantity = _CURVE_QUANTITY[figure_id]
    points = curve_over_p(
        (0.0, 0.5),
        p_steps,
        quantity,
        cfg,
        grid_counts=grid_counts,
        jobs=jobs,
    )
    rows = [(p, value, t_arg, f_arg) for (p, value, t_arg, f_arg) in points]
    metadata = {
        "figure": figure_id,
        "quantity": quantity,
        "p_min": 0.0,
        "p_max": 0.5,
        "p_steps": int(p_steps),
        "grid_theta": int(grid_counts[0]),
        "grid_phi": int(grid_counts[1]),
    }
    metadata.update(_config_metadata(cfg))
    return metadata, ["p", quantity, "theta_argmax", "phi_argmax"], rows


def _stage_dataset(cfg):
    point = SHOWCASE_POINT
    trace = pipeline_trace(point)
    stages = [
        ("initial", trace.initial),
        ("post_noise", trace.post_noise),
        ("post_measurement_plus", trace.post_measurement_plus),
        ("post_correction_plus", trace.post_correction_plus),
        ("final_normalized", trace.final_normalized),
    ]

    # phase-free reference: best (chi, eta) with beta pinned to zero for
    # the same state pair and noise level
    fields = _optimize_arrays(
        np.array([point.theta]), np.array([point.phi]), point.p, cfg
    )
    chi_b0 = float(fields["chi_opt_beta0"][0])
    eta_b0 = float(fields["eta_opt_beta0"][0])
    point_b0 = ControlParams(
        theta=point.theta, phi=point.phi, p=point.p, chi=chi_b0, eta=eta_b0, beta=0.0
    )
    stages.append(("final_beta_zero", pipeline_trace(point_b0).final_normalized))

    rows = [
        (name, bloch.weight, bloch.x, bloch.y, bloch.z) for name, bloch in stages
    ]

    metadata = {
        "figure": 7,
        "theta": point.theta,
        "phi": point.phi,
        "p": point.p,
        "chi": point.chi,
        "eta": point.eta,
        "beta": point.beta,
        "chi_beta_zero": chi_b0,
        "eta_beta_zero": eta_b0,
        "fidelity": fidelity_closed(point),
        "fidelity_beta_zero": fidelity_closed(point_b0),
    }
    return metadata, ["stage", "weight", "x", "y", "z"], rows


def figure_dataset(
    figure_id: int,
    *,
    grid_counts: tuple[int, int] | None = None,
    p_steps: int | None = None,
    config: OptimizationConfig | None = None,
    jobs: int = 1,
) -> tuple[dict, list[str], list[tuple]]:
    """Table for one figure id: (metadata, column names, rows).

    ``grid_counts`` applies to figures 2 through 6 and ``p_steps`` to the
    curves 4 and 6; both fall back to the published resolution.  Row
    content is independent of ``jobs``.
    """
    figure_id = int(figure_id)
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"figure id must be one of {FIGURE_IDS}, got {figure_id}")
    grid = tuple(grid_counts) if grid_counts is not None else _DEFAULT_GRID
    steps = int(p_steps) if p_steps is not None else _DEFAULT_P_STEPS
    cfg = config or OptimizationConfig()

    if figure_id in _SURFACE_QUANTITY:
        return _surface_dataset(figure_id, grid, cfg, jobs)
    if figure_id in _CURVE_QUANTITY:
        return _curve_dataset(figure_id, grid, steps, cfg, jobs)
    return _stage_dataset(cfg)
