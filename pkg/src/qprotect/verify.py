"""Cross-checks between independent computation routes.

Every analytic result in the package has a second route: the closed-form
fidelity against the explicit matrix pipeline, optimized angles against
finite differences, operator identities against direct multiplication.
This module runs those comparisons over a deterministic parameter lattice
and reports the worst deviation per check.

No randomness anywhere: the sample points come from an additive lattice
(coordinate d of point k is frac((k+1) sqrt(prime_d))), so two runs see
exactly the same inputs and a rerun of the whole suite is reproducible
bit for bit.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .channel import (
    ATOL_COMPLETENESS,
    ATOL_TRACE_PRESERVED,
    ControlParams,
    control_map,
    correction,
    dephase,
    rotated_frame_check,
    snapshot_closed_forms,
    weak_measurements,
)
from .core import dagger, pauli, prepare_pair
from .fidelity import (
    ATOL_ORACLE,
    beta_critical,
    eta_opt,
    fidelity_closed,
    fidelity_eta_opt,
    fidelity_simulated,
)
from .optimize import OptimizationConfig, optimize_point, sweep_surface

__all__ = ["CheckResult", "run_checks", "unit_lattice"]

_HALF_PI = math.pi / 2
_TWO_PI = 2.0 * math.pi
_PRIMES = (2, 3, 5, 7, 11, 13)

# finite-difference step and the slack it leaves for a true stationary point
_FD_STEP = 1e-6
_FD_TOL = 1e-8

_DETERMINISM_POINTS = ((0.9, 0.7, 0.15), (1.2, 2.4, 0.32), (0.3, 4.9, 0.05))


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """Outcome of one invariant check."""

    name: str
    deviation: float
    tolerance: float
    passed: bool
    samples: int


def unit_lattice(n: int, dims: int) -> np.ndarray:
    """(n, dims) deterministic low-discrepancy points in [0, 1).

    Additive lattice over irrational strides sqrt(2), sqrt(3), ...; well
    spread for the handful of dimensions used here and reproducible by
    construction.
    """
    if not 1 <= dims <= len(_PRIMES):
        raise ValueError(f"dims must be in [1, {len(_PRIMES)}], got {dims}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    k = np.arange(1, n + 1, dtype=float)[:, None]
    strides = np.sqrt(np.array(_PRIMES[:dims], dtype=float))
    return (k * strides) % 1.0


def _param_lattice(n: int) -> list[ControlParams]:
    """n full parameter tuples covering all six ranges."""
    u = unit_lattice(n, 6)
    out = []
    for row in u:
        out.append(
            ControlParams(
                theta=row[0] * _HALF_PI,
                phi=row[1] * _TWO_PI,
                p=row[2] * 0.5,
                chi=row[3] * _HALF_PI,
                eta=math.pi - row[4] * _TWO_PI,
                beta=row[5] * _TWO_PI,
            )
        )
    return out


def _wrap_eta(eta: float) -> float:
    eta = (eta + math.pi) % _TWO_PI - math.pi
    return math.pi if eta == -math.pi else eta


def _result(name: str, deviation: float, tolerance: float, samples: int) -> CheckResult:
    deviation = float(deviation)
    return CheckResult(
        name=name,
        deviation=deviation,
        tolerance=tolerance,
        passed=deviation <= tolerance,
        samples=samples,
    )


def _check_closed_vs_simulated(n: int) -> CheckResult:
    worst = 0.0
    for params in _param_lattice(n):
        sim = fidelity_simulated(params).f_avg
        worst = max(worst, abs(fidelity_closed(params) - sim))
    return _result("closed_vs_simulated", worst, ATOL_ORACLE, n)


def _check_fidelity_in_range(n: int) -> CheckResult:
    worst = 0.0
    for params in _param_lattice(n):
        f = fidelity_closed(params)
        worst = max(worst, -f, f - 1.0)
    return _result("fidelity_in_range", max(worst, 0.0), ATOL_ORACLE, n)


def _check_eta_stationarity(n: int) -> CheckResult:
    worst = 0.0
    u = unit_lattice(n, 5)
    for row in u:
        theta, phi = row[0] * _HALF_PI, row[1] * _TWO_PI
        p, chi, beta = row[2] * 0.5, row[3] * _HALF_PI, row[4] * _TWO_PI
        eta = eta_opt(theta, p, chi, phi, beta)

        def value(e: float) -> float:
            return fidelity_closed(
                ControlParams(theta=theta, phi=phi, p=p, chi=chi, eta=_wrap_eta(e), beta=beta)
            )

        slope = (value(eta + _FD_STEP) - value(eta - _FD_STEP)) / (2.0 * _FD_STEP)
        worst = max(worst, abs(slope))
    return _result("eta_stationarity", worst, _FD_TOL, n)


def _check_eta_dominance(n: int) -> CheckResult:
    worst = 0.0
    etas = np.linspace(-math.pi, math.pi, 361)[1:]
    u = unit_lattice(n, 5)
    for row in u:
        theta, phi = row[0] * _HALF_PI, row[1] * _TWO_PI
        p, chi, beta = row[2] * 0.5, row[3] * _HALF_PI, row[4] * _TWO_PI
        best = fidelity_eta_opt(theta, p, chi, phi, beta)
        for eta in etas:
            f = fidelity_closed(
                ControlParams(theta=theta, phi=phi, p=p, chi=chi, eta=float(eta), beta=beta)
            )
            worst = max(worst, f - best)
    return _result("eta_dominance", max(worst, 0.0), ATOL_ORACLE, n)


def _check_beta_stationarity(n: int) -> CheckResult:
    worst = 0.0
    u = unit_lattice(n, 5)
    for row in u:
        theta, phi = row[0] * _HALF_PI, row[1] * _TWO_PI
        p, chi = row[2] * 0.5, row[3] * _HALF_PI
        eta = math.pi - row[4] * _TWO_PI
        beta = beta_critical(theta, phi, eta)

        def value(b: float) -> float:
            return fidelity_closed(
                ControlParams(theta=theta, phi=phi, p=p, chi=chi, eta=eta, beta=b % _TWO_PI)
            )

        slope = (value(beta + _FD_STEP) - value(beta - _FD_STEP)) / (2.0 * _FD_STEP)
        worst = max(worst, abs(slope))
    return _result("beta_stationarity", worst, _FD_TOL, n)


def _check_povm_completeness(n: int) -> CheckResult:
    worst = 0.0
    eye = np.eye(2, dtype=complex)
    z = pauli("Z")
    u = unit_lattice(n, 2)
    for row in u:
        chi, beta = row[0] * _HALF_PI, row[1] * _TWO_PI
        meas = weak_measurements(chi, beta)
        pi_plus = dagger(meas.m_plus) @ meas.m_plus
        pi_minus = dagger(meas.m_minus) @ meas.m_minus
        worst = max(worst, float(np.max(np.abs(pi_plus + pi_minus - eye))))
        expected = 0.5 * (eye + math.cos(chi) * z)
        worst = max(worst, float(np.max(np.abs(pi_plus - expected))))
    return _result("povm_completeness", worst, ATOL_COMPLETENESS, n)


def _check_trace_preservation(n: int) -> CheckResult:
    worst = 0.0
    for params in _param_lattice(n):
        pair = prepare_pair(params.theta, params.phi)
        for rho in (pair.rho_plus, pair.rho_minus):
            noisy = dephase(rho, params.p)
            out = control_map(noisy, params.chi, params.beta, params.eta)
            worst = max(worst, abs(float(np.trace(out).real) - 1.0))
    return _result("trace_preservation", worst, ATOL_TRACE_PRESERVED, n)


def _check_rotated_frame(n: int) -> CheckResult:
    worst = 0.0
    for params in _param_lattice(n):
        worst = max(worst, rotated_frame_check(params))
    return _result("rotated_frame", worst, 1e-12, n)


def _check_snapshot_consistency(n: int) -> CheckResult:
    worst = 0.0
    sigma = {"x": pauli("X"), "y": pauli("Y"), "z": pauli("Z")}

    def moments(m: np.ndarray) -> tuple[float, float, float, float]:
        return (
            float(np.trace(m).real),
            float(np.trace(sigma["x"] @ m).real),
            float(np.trace(sigma["y"] @ m).real),
            float(np.trace(sigma["z"] @ m).real),
        )

    u = unit_lattice(n, 5)
    for row in u:
        theta, p = row[0] * _HALF_PI, row[1] * 0.5
        chi = row[2] * _HALF_PI
        eta = math.pi - row[3] * _TWO_PI
        beta = row[4] * _TWO_PI

        rho = prepare_pair(theta, math.pi / 4).rho_plus
        noisy = dephase(rho, p)
        meas = weak_measurements(chi, beta)
        measured = meas.m_plus @ noisy @ dagger(meas.m_plus)
        r_plus = correction(eta, 1)
        corrected = r_plus @ measured @ dagger(r_plus)
        stages = {
            "initial": rho,
            "post_noise": noisy,
            "post_measurement_plus": measured,
            "post_correction_plus": corrected,
        }

        closed = snapshot_closed_forms(theta, p, chi, eta, beta)
        for name, matrix in stages.items():
            got = moments(matrix)
            want = closed[name]
            worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
    return _result("snapshot_consistency", worst, 1e-13, n)


def _result_tuple(result) -> tuple:
    return tuple(
        float(getattr(result, f.name)) for f in dataclasses.fields(result)
    )


def _check_determinism() -> CheckResult:
    worst = 0.0
    runs = 0
    for theta, phi, p in _DETERMINISM_POINTS:
        first = _result_tuple(optimize_point(theta, phi, p))
        second = _result_tuple(optimize_point(theta, phi, p))
        worst = max(worst, max(abs(a - b) for a, b in zip(first, second)))
        runs += 2

    cfg = OptimizationConfig()
    grid = (6, 5)
    baseline = None
    for jobs in (1, 1, 2):
        records = sweep_surface(
            0.3, (0.0, _HALF_PI), (0.0, _HALF_PI), grid, config=cfg, jobs=jobs
        )
        flat = [
            (rec.theta, rec.phi, rec.p) + _result_tuple(rec.result) for rec in records
        ]
        if baseline is None:
            baseline = flat
        else:
            for a, b in zip(baseline, flat):
                worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
        runs += 1
    return _result("determinism", worst, 0.0, runs)


def run_checks(samples: int = 400) -> list[CheckResult]:
    """Run the full invariant suite; one CheckResult per invariant.

    ``samples`` scales the lattice sizes.  Checks that loop a dense grid
    per sample use a proportionally smaller point count.
    """
    samples = int(samples)
    if samples < 10:
        raise ValueError(f"samples must be at least 10, got {samples}")
    dense = max(10, samples // 6)
    return [
        _check_closed_vs_simulated(samples),
        _check_fidelity_in_range(samples),
        _check_eta_stationarity(samples),
        _check_eta_dominance(dense),
        _check_beta_stationarity(samples),
        _check_povm_completeness(samples),
        _check_trace_preservation(dense),
        _check_rotated_frame(dense),
        _check_snapshot_consistency(dense),
        _check_determinism(),
    ]
