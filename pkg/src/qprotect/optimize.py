"""Deterministic maximization of the protected-pair fidelity.

The correction angle is eliminated analytically, so the search space per
state is the (chi, beta) rectangle.  Every optimum is found the same
way: exhaustive coarse grid, first-maximum argmax, then alternating
per-coordinate golden-section contraction.  No randomness anywhere, and
all argmax decisions resolve ties toward the earliest grid point, so
identical inputs always produce identical outputs, bit for bit,
regardless of how work is scheduled across threads.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .fidelity import (
    ATOL_DEGENERATE,
    _closed_terms,
    _dn_value,
    _helstrom_value,
    _state_coeffs,
    _terms_from_coeffs,
)

__all__ = [
    "OptResult",
    "OptimizationConfig",
    "SweepRecord",
    "curve_over_p",
    "optimize_point",
    "sweep_surface",
]

_HALF_PI = math.pi / 2
_TWO_PI = 2 * math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# Golden-section iterations per coordinate pass.  The bracket is one
# coarse-grid cell wide; 56 contractions shrink it below 1e-13 rad.
_GOLDEN_ITERS = 56

# Cap on elements per scan buffer; scans are chunked beyond this.
_SCAN_BLOCK = 2_000_000

# curve_over_p stages: cheap first pass over the whole state grid, exact
# re-optimization of the leading cells, then a zooming local (theta,
# phi) grid around the winner.
_STAGE_CHI = 17
_STAGE_BETA = 48
_STAGE_GOLDEN_ITERS = 16
_STAGE_SWEEPS = 2
_CANDIDATE_MARGIN = 3e-3
_CANDIDATE_CAP = 12
_ZOOM_ROUNDS = 3
_ZOOM_POINTS = 9
_ZOOM_SHRINK = 6.0

# f_imp subtracts max(f_dn, f_h); its maximum rides the crossing curve
# f_dn = f_h where that envelope has a kink, which no smooth grid
# resolves.  The crossing is found by bisection and searched directly.
_KINK_SAMPLES = 65
_KINK_ROUNDS = 2
_KINK_BISECTIONS = 80

_SURFACE_QUANTITIES = ("delta_f", "beta_opt", "f_imp")
_CURVE_QUANTITIES = ("delta_f", "f_imp")


@dataclasses.dataclass(frozen=True)
class OptimizationConfig:
    """Grid densities and stopping rule for the (chi, beta) search."""

    chi_grid: int = 129
    beta_grid: int = 256
    refine_tol: float = 1e-10
    max_refine_iters: int = 200

    def __post_init__(self) -> None:
        if self.chi_grid < 8 or self.beta_grid < 8:
            raise ValueError("chi_grid and beta_grid need at least 8 points")
        if not (self.refine_tol > 0.0):
            raise ValueError("refine_tol must be positive")
        if self.max_refine_iters < 1:
            raise ValueError("max_refine_iters must be at least 1")


@dataclasses.dataclass(frozen=True)
class OptResult:
    """Optimized operating point and the comparison fidelities.

    When the optimum is a plateau, (chi_opt, beta_opt) is the
    representative with the smallest chi, then the smallest beta, among
    candidates within refine_tol of the best fidelity; f_opt itself is
    always the exact maximum found, so the dominance inequalities
    against the beta=0 scheme and both baselines hold by construction.
    """

    chi_opt: float
    eta_opt: float
    beta_opt: float
    f_opt: float
    f_opt_beta0: float
    delta_f: float
    f_dn: float
    f_h: float
    f_imp: float
    degenerate: bool


@dataclasses.dataclass(frozen=True)
class SweepRecord:
    """One (theta, phi, p) grid cell and its optimization result."""

    theta: float
    phi: float
    p: float
    result: OptResult


def _check_in(name: str, value: float, lo: float, hi: float, *, closed_hi: bool = True) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if value < lo or (value > hi if closed_hi else value >= hi):
        raise ValueError(f"{name}={value!r} outside allowed range")
    return value


def _value_at(coeffs, sx, cx, sb, cb):
    """Eta-optimized fidelity from state coefficients and probe trig."""
    c0, a, b = _terms_from_coeffs(coeffs, sx, cx, sb, cb)
    return c0 + 0.5 * np.hypot(a, b)


def _scan(theta, phi, p, chi_nodes, beta_nodes):
    """First-maximum exhaustive scan over the node product, per cell.

    The flat argmax runs in chi-major, beta-minor order with
    strictly-improving updates, so grid ties land on the smallest chi,
    then the smallest beta; cell blocking cannot change the outcome.
    """
    n = theta.shape[0]
    nb = beta_nodes.shape[0]
    coeffs = _state_coeffs(theta, p, phi)
    sx = np.sin(chi_nodes)[:, None]
    cx = np.cos(chi_nodes)[:, None]
    sb = np.sin(beta_nodes)[None, :]
    cb = np.cos(beta_nodes)[None, :]

    best_f = np.full(n, -np.inf)
    best_chi = np.zeros(n)
    best_beta = np.zeros(n)
    cells_per_block = max(1, _SCAN_BLOCK // max(1, nb * chi_nodes.shape[0]))
    for c0 in range(0, n, cells_per_block):
        c1 = min(c0 + cells_per_block, n)
        block = tuple(c[c0:c1][:, None, None] for c in coeffs)
        vals = _value_at(block, sx, cx, sb, cb)
        flat = vals.reshape(c1 - c0, -1)
        loc = np.argmax(flat, axis=1)
        cand = flat[np.arange(c1 - c0), loc]
        take = cand > best_f[c0:c1]
        sl = slice(c0, c1)
        best_f[sl] = np.where(take, cand, best_f[sl])
        best_chi[sl] = np.where(take, chi_nodes[loc // nb], best_chi[sl])
        best_beta[sl] = np.where(take, beta_nodes[loc % nb], best_beta[sl])
    return best_chi, best_beta, best_f


def _golden(fun, lo, hi, iters):
    """Vectorized golden-section maximization over [lo, hi] per lane.

    Ties keep the left subinterval, so plateaus resolve toward the
    smaller coordinate.  Returns the better final probe per lane.
    """
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = fun(x1)
    f2 = fun(x2)
    for _ in range(iters):
        take_left = f1 >= f2
        b = np.where(take_left, x2, b)
        a = np.where(take_left, a, x1)
        xs = np.where(take_left, x1, x2)
        fs = np.where(take_left, f1, f2)
        x_new = np.where(take_left, b - _GOLDEN * (b - a), a + _GOLDEN * (b - a))
        f_new = fun(x_new)
        x1 = np.where(take_left, x_new, xs)
        f1 = np.where(take_left, f_new, fs)
        x2 = np.where(take_left, xs, x_new)
        f2 = np.where(take_left, fs, f_new)
    pick = f1 >= f2
    return np.where(pick, x1, x2), np.where(pick, f1, f2)


def _refine(theta, phi, p, chi, beta, f, dchi, dbeta, cfg, *, freeze_beta, golden_iters, max_sweeps):
    """Alternating per-coordinate golden contraction around (chi, beta).

    Each sweep re-brackets one grid step around the incumbent, so the
    optimum can migrate across cells.  A sweep's result is kept only if
    it strictly improves the fidelity; iteration stops when a full
    sweep gains less than refine_tol everywhere.
    """
    chi = chi.copy()
    beta = beta.copy()
    f = f.copy()
    coeffs = _state_coeffs(theta, p, phi)
    for _ in range(max_sweeps):
        f_before = f.copy()

        sb, cb = np.sin(beta), np.cos(beta)
        lo = np.clip(chi - dchi, 0.0, _HALF_PI)
        hi = np.clip(chi + dchi, 0.0, _HALF_PI)
        x, fx = _golden(
            lambda c: _value_at(coeffs, np.sin(c), np.cos(c), sb, cb), lo, hi, golden_iters
        )
        better = fx > f
        chi = np.where(better, x, chi)
        f = np.where(better, fx, f)

        if not freeze_beta:
            sx, cx = np.sin(chi), np.cos(chi)
            x, fx = _golden(
                lambda bb: _value_at(coeffs, sx, cx, np.sin(bb), np.cos(bb)),
                beta - dbeta,
                beta + dbeta,
                golden_iters,
            )
            better = fx > f
            beta = np.where(better, x, beta)
            f = np.where(better, fx, f)

        if np.max(f - f_before) < cfg.refine_tol:
            break
    return chi, np.mod(beta, _TWO_PI), f


def _optimize_arrays(theta, phi, p, cfg, *, scan_chi=None, scan_beta=None,
                     golden_iters=_GOLDEN_ITERS, max_sweeps=None):
    """Full per-cell optimization for 1-D cell arrays at scalar p.

    Returns a dict of arrays keyed by OptResult field names.  The
    optional scan_* / golden / sweep overrides run the same machinery
    at reduced density for the cheap first pass of curve_over_p.
    """
    n_chi = scan_chi or cfg.chi_grid
    n_beta = scan_beta or cfg.beta_grid
    sweeps = max_sweeps or cfg.max_refine_iters
    chi_nodes = np.linspace(0.0, _HALF_PI, n_chi)
    beta_nodes = np.linspace(0.0, _TWO_PI, n_beta, endpoint=False)
    dchi = chi_nodes[1] - chi_nodes[0]
    dbeta = beta_nodes[1] - beta_nodes[0]
    zeros = np.zeros_like(theta)

    chi_j, beta_j, f_j = _scan(theta, phi, p, chi_nodes, beta_nodes)
    chi_j, beta_j, f_j = _refine(
        theta, phi, p, chi_j, beta_j, f_j, dchi, dbeta, cfg,
        freeze_beta=False, golden_iters=golden_iters, max_sweeps=sweeps,
    )

    chi_0, _, f_0 = _scan(theta, phi, p, chi_nodes, np.zeros(1))
    chi_0, _, f_0 = _refine(
        theta, phi, p, chi_0, zeros, f_0, dchi, dbeta, cfg,
        freeze_beta=True, golden_iters=golden_iters, max_sweeps=sweeps,
    )

    f_dn = np.broadcast_to(np.asarray(_dn_value(theta, p, phi), dtype=float), theta.shape)
    f_h = np.broadcast_to(np.asarray(_helstrom_value(theta, phi), dtype=float), theta.shape)

    # The exact maximum over every candidate; chi = 0 realizes f_h and
    # the frozen-beta run contains the chi = pi/2 do-nothing point, so
    # all dominance inequalities hold with no slack.
    f_opt = np.maximum(np.maximum(f_j, f_0), f_h)
    f_b0 = np.maximum(f_0, f_h)

    # Reported operating point: lexicographically smallest (chi, beta)
    # among candidates within refine_tol of the maximum.
    chi_opt = chi_j.copy()
    beta_opt = beta_j.copy()
    for f_c, chi_c, beta_c in ((f_0, chi_0, zeros), (f_h, zeros, zeros)):
        near = f_c >= f_opt - cfg.refine_tol
        smaller = (chi_c < chi_opt) | ((chi_c == chi_opt) & (beta_c < beta_opt))
        take = near & smaller
        chi_opt = np.where(take, chi_c, chi_opt)
        beta_opt = np.where(take, beta_c, beta_opt)

    def _eta_at(chi_at, beta_at):
        _, a, b = _closed_terms(theta, p, chi_at, phi, beta_at)
        a = np.broadcast_to(np.asarray(a, dtype=float), theta.shape)
        b = np.broadcast_to(np.asarray(b, dtype=float), theta.shape)
        degen = np.hypot(a, b) < ATOL_DEGENERATE
        eta = np.where(degen, 0.0, np.arctan2(a, b))
        # arctan2 can land on -pi exactly; the contract range is (-pi, pi]
        return np.where(eta == -np.pi, np.pi, eta), degen

    eta, degenerate = _eta_at(chi_opt, beta_opt)

    # beta = 0 representative point, same plateau rule (chi = 0 realizes
    # f_h there as well)
    chi_b0 = np.where((f_h >= f_b0 - cfg.refine_tol) & (chi_0 > 0.0), 0.0, chi_0)
    eta_b0, _ = _eta_at(chi_b0, 0.0)

    return {
        "chi_opt": chi_opt,
        "eta_opt": eta,
        "beta_opt": beta_opt,
        "f_opt": f_opt,
        "f_opt_beta0": f_b0,
        "delta_f": f_opt - f_b0,
        "f_dn": f_dn,
        "f_h": f_h,
        "f_imp": f_opt - np.maximum(f_dn, f_h),
        "degenerate": degenerate,
        "chi_opt_beta0": chi_b0,
        "eta_opt_beta0": eta_b0,
    }


def _result_from_arrays(fields, i) -> OptResult:
    return OptResult(
        chi_opt=float(fields["chi_opt"][i]),
        eta_opt=float(fields["eta_opt"][i]),
        beta_opt=float(fields["beta_opt"][i]),
        f_opt=float(fields["f_opt"][i]),
        f_opt_beta0=float(fields["f_opt_beta0"][i]),
        delta_f=float(fields["delta_f"][i]),
        f_dn=float(fields["f_dn"][i]),
        f_h=float(fields["f_h"][i]),
        f_imp=float(fields["f_imp"][i]),
        degenerate=bool(fields["degenerate"][i]),
    )


def optimize_point(
    theta: float, phi: float, p: float, config: OptimizationConfig | None = None
) -> OptResult:
    """Best (chi, eta, beta) for one state pair and noise level."""
    cfg = config or OptimizationConfig()
    theta = _check_in("theta", theta, 0.0, _HALF_PI)
    phi = _check_in("phi", phi, 0.0, _TWO_PI, closed_hi=False)
    p = _check_in("p", p, 0.0, 0.5)
    fields = _optimize_arrays(np.array([theta]), np.array([phi]), p, cfg)
    return _result_from_arrays(fields, 0)


def _grid_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 2:
        raise ValueError("grid counts must be at least 2")
    if hi < lo:
        raise ValueError("range must be ordered low to high")
    return np.linspace(lo, hi, count)


def _run_blocks(tasks, worker, jobs):
    """Run worker over an indexed task list with results in task order.

    The task partitioning never depends on ``jobs``; threads only change
    scheduling, so outputs are identical for any worker count.
    """
    if jobs <= 1:
        return [worker(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def sweep_surface(
    p: float,
    theta_range: tuple[float, float],
    phi_range: tuple[float, float],
    grid_counts: tuple[int, int],
    quantity: str = "delta_f",
    config: OptimizationConfig | None = None,
    *,
    jobs: int = 1,
) -> list[SweepRecord]:
    """Optimize every cell of a (theta, phi) grid at fixed noise level.

    Records are row-major (theta outer, phi inner).  ``quantity`` names
    the surface being reproduced (delta_f, beta_opt or f_imp) and is
    validated here; every record carries the full result either way.
    """
    if quantity not in _SURFACE_QUANTITIES:
        raise ValueError(f"quantity must be one of {_SURFACE_QUANTITIES}, got {quantity!r}")
    cfg = config or OptimizationConfig()
    p = _check_in("p", p, 0.0, 0.5)
    t_lo = _check_in("theta_range[0]", theta_range[0], 0.0, _HALF_PI)
    t_hi = _check_in("theta_range[1]", theta_range[1], 0.0, _HALF_PI)
    f_lo = _check_in("phi_range[0]", phi_range[0], 0.0, _TWO_PI, closed_hi=False)
    f_hi = _check_in("phi_range[1]", phi_range[1], 0.0, _TWO_PI, closed_hi=False)
    theta_nodes = _grid_nodes(t_lo, t_hi, int(grid_counts[0]))
    phi_nodes = _grid_nodes(f_lo, f_hi, int(grid_counts[1]))

    def row(i):
        theta = np.full(phi_nodes.shape, theta_nodes[i])
        return _optimize_arrays(theta, phi_nodes, p, cfg)

    per_row = _run_blocks(range(theta_nodes.shape[0]), row, jobs)
    records = []
    for i, fields in enumerate(per_row):
        for j in range(phi_nodes.shape[0]):
            records.append(
                SweepRecord(
                    theta=float(theta_nodes[i]),
                    phi=float(phi_nodes[j]),
                    p=p,
                    result=_result_from_arrays(fields, j),
                )
            )
    return records


def _kink_theta(phi, p, t_lo, t_hi):
    """Theta where the baselines cross (f_h above for smaller theta).

    Vectorized bisection over phi.  Where no crossing exists inside the
    range, the result collapses to an endpoint, which is harmless for
    the candidate search it feeds.
    """
    lo = np.full_like(phi, t_lo, dtype=float)
    hi = np.full_like(phi, t_hi, dtype=float)
    for _ in range(_KINK_BISECTIONS):
        mid = 0.5 * (lo + hi)
        h_above = _helstrom_value(mid, phi) > _dn_value(mid, p, phi)
        lo = np.where(h_above, mid, lo)
        hi = np.where(h_above, hi, mid)
    return 0.5 * (lo + hi)


def _max_on_kink(p, cfg, t_lo, t_hi, phi_lo, phi_hi):
    """Best f_imp along the baseline-crossing curve, with local zoom."""
    phis = np.linspace(phi_lo, phi_hi, _KINK_SAMPLES)
    thetas = np.clip(_kink_theta(phis, p, t_lo, t_hi), t_lo, t_hi)
    fields = _optimize_arrays(thetas, phis, p, cfg)
    k = int(np.argmax(fields["f_imp"]))
    best = (float(fields["f_imp"][k]), float(thetas[k]), float(phis[k]))
    step = (phi_hi - phi_lo) / (_KINK_SAMPLES - 1) if _KINK_SAMPLES > 1 else 0.0
    for _ in range(_KINK_ROUNDS):
        if step == 0.0:
            break
        p_loc = np.clip(np.linspace(best[2] - step, best[2] + step, _ZOOM_POINTS), phi_lo, phi_hi)
        t_loc = np.clip(_kink_theta(p_loc, p, t_lo, t_hi), t_lo, t_hi)
        local = _optimize_arrays(t_loc, p_loc, p, cfg)
        k = int(np.argmax(local["f_imp"]))
        if float(local["f_imp"][k]) > best[0]:
            best = (float(local["f_imp"][k]), float(t_loc[k]), float(p_loc[k]))
        step /= _ZOOM_SHRINK
    return best


def _maximize_state_grid(p, quantity, cfg, theta_nodes, phi_nodes):
    """Largest quantity value over the state grid, with local zoom.

    Cheap pass over every cell, exact re-optimization of the leading
    candidates, then a shrinking local grid around the winner; the final
    grid step is a small fraction of the original, far below the value
    tolerances the curves are read at.  For f_imp the baseline-crossing
    curve is searched as well, since the true maximum rides it.
    """
    tt, ff = np.meshgrid(theta_nodes, phi_nodes, indexing="ij")
    theta = tt.ravel()
    phi = ff.ravel()

    coarse = _optimize_arrays(
        theta, phi, p, cfg,
        scan_chi=_STAGE_CHI, scan_beta=_STAGE_BETA,
        golden_iters=_STAGE_GOLDEN_ITERS, max_sweeps=_STAGE_SWEEPS,
    )
    qty = coarse[quantity]
    order = np.argsort(-qty, kind="stable")
    sel = order[:_CANDIDATE_CAP]
    sel = sel[qty[sel] >= qty[sel[0]] - _CANDIDATE_MARGIN]

    exact = _optimize_arrays(theta[sel], phi[sel], p, cfg)
    k = int(np.argmax(exact[quantity]))
    best_val = float(exact[quantity][k])
    best_theta = float(theta[sel][k])
    best_phi = float(phi[sel][k])

    t_step = theta_nodes[-1] - theta_nodes[0]
    t_step = t_step / (theta_nodes.shape[0] - 1) if theta_nodes.shape[0] > 1 else 0.0
    f_step = phi_nodes[-1] - phi_nodes[0]
    f_step = f_step / (phi_nodes.shape[0] - 1) if phi_nodes.shape[0] > 1 else 0.0
    for _ in range(_ZOOM_ROUNDS):
        if t_step == 0.0 and f_step == 0.0:
            break
        t_loc = np.clip(
            np.linspace(best_theta - t_step, best_theta + t_step, _ZOOM_POINTS),
            theta_nodes[0], theta_nodes[-1],
        )
        f_loc = np.clip(
            np.linspace(best_phi - f_step, best_phi + f_step, _ZOOM_POINTS),
            phi_nodes[0], phi_nodes[-1],
        )
        lt, lf = np.meshgrid(t_loc, f_loc, indexing="ij")
        local = _optimize_arrays(lt.ravel(), lf.ravel(), p, cfg)
        k = int(np.argmax(local[quantity]))
        if float(local[quantity][k]) > best_val:
            best_val = float(local[quantity][k])
            best_theta = float(lt.ravel()[k])
            best_phi = float(lf.ravel()[k])
        t_step /= _ZOOM_SHRINK
        f_step /= _ZOOM_SHRINK

    if quantity == "f_imp":
        kink_val, kink_theta, kink_phi = _max_on_kink(
            p, cfg, theta_nodes[0], theta_nodes[-1], phi_nodes[0], phi_nodes[-1]
        )
        if kink_val > best_val:
            best_val, best_theta, best_phi = kink_val, kink_theta, kink_phi
    return best_val, best_theta, best_phi


def curve_over_p(
    p_range: tuple[float, float],
    p_steps: int,
    quantity: str = "delta_f",
    config: OptimizationConfig | None = None,
    *,
    theta_range: tuple[float, float] = (0.0, _HALF_PI),
    phi_range: tuple[float, float] = (0.0, _HALF_PI),
    grid_counts: tuple[int, int] = (64, 64),
    jobs: int = 1,
) -> list[tuple[float, float, float, float]]:
    """Maximum of a quantity over states, traced against the noise level.

    Returns (p, value, argmax theta, argmax phi) per step, p ascending.
    """
    if quantity not in _CURVE_QUANTITIES:
        raise ValueError(f"quantity must be one of {_CURVE_QUANTITIES}, got {quantity!r}")
    cfg = config or OptimizationConfig()
    p_lo = _check_in("p_range[0]", p_range[0], 0.0, 0.5)
    p_hi = _check_in("p_range[1]", p_range[1], 0.0, 0.5)
    if p_steps < 2:
        raise ValueError("p_steps must be at least 2")
    t_lo = _check_in("theta_range[0]", theta_range[0], 0.0, _HALF_PI)
    t_hi = _check_in("theta_range[1]", theta_range[1], 0.0, _HALF_PI)
    f_lo = _check_in("phi_range[0]", phi_range[0], 0.0, _TWO_PI, closed_hi=False)
    f_hi = _check_in("phi_range[1]", phi_range[1], 0.0, _TWO_PI, closed_hi=False)
    p_nodes = _grid_nodes(p_lo, p_hi, int(p_steps))
    theta_nodes = _grid_nodes(t_lo, t_hi, int(grid_counts[0]))
    phi_nodes = _grid_nodes(f_lo, f_hi, int(grid_counts[1]))

    def at_p(i):
        val, th, ph = _maximize_state_grid(float(p_nodes[i]), quantity, cfg, theta_nodes, phi_nodes)
        return (float(p_nodes[i]), val, th, ph)

    return _run_blocks(range(p_nodes.shape[0]), at_p, jobs)
