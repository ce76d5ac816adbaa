"""Acceptance gate: the eleven external criteria, one test each.

Each test reports one PASS/FAIL line with the measured numbers before
asserting; the lines are replayed in a terminal-summary block after the
run so stdout capture never hides them.
"""

import math
import time

import numpy as np
import pytest

import conftest
from conftest import HALF_PI, TWO_PI, draw_columns, params_from_columns
from qprotect import (
    ControlParams,
    correction,
    dagger,
    dephase,
    control_map,
    curve_over_p,
    eta_opt,
    fidelity_closed,
    fidelity_eta_opt,
    fidelity_simulated,
    optimize_point,
    pauli,
    prepare_pair,
    rotated_frame_check,
    snapshot_closed_forms,
    weak_measurements,
)
from qprotect.cli import main
from qprotect.fidelity import _closed_value

# frozen copy of the showcase operating point (deliberately not imported
# from the package, so edits there cannot silently move this gate)
SHOWCASE = ControlParams(theta=1.0155, phi=0.8976, p=0.18, chi=0.8583, eta=0.7913, beta=5.8905)


def report(criterion: int, passed: bool, detail: str) -> None:
    line = "CRITERION %d: %s  %s" % (criterion, "PASS" if passed else "FAIL", detail)
    print(line)
    conftest.CRITERION_LINES[criterion] = line


def test_criterion_01_oracle_equivalence():
    n = 10_000
    cols = draw_columns(np.random.default_rng(101), n)
    start = time.perf_counter()
    worst = 0.0
    for i in range(n):
        params = params_from_columns(cols, i)
        diff = abs(fidelity_closed(params) - fidelity_simulated(params).f_avg)
        if diff > worst:
            worst = diff
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 5.0
    report(1, ok, "max |closed - simulated| = %.3e over %d tuples in %.2f s" % (worst, n, elapsed))
    assert worst < 1e-12
    assert elapsed < 5.0


def test_criterion_02_eta_opt_consistency():
    n = 1000
    cols = draw_columns(np.random.default_rng(102), n)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    grid = np.linspace(-math.pi, math.pi, 721)[1:]
    step = grid[1] - grid[0]
    h = 1e-6
    worst_match = 0.0
    worst_slope = 0.0
    for i in range(n):
        theta, phi = float(cols["theta"][i]), float(cols["phi"][i])
        p, chi, beta = float(cols["p"][i]), float(cols["chi"][i]), float(cols["beta"][i])

        def value(eta: float) -> float:
            return float(_closed_value(theta, p, chi, eta, phi, beta))

        k = int(np.argmax(_closed_value(theta, p, chi, grid, phi, beta)))
        lo, hi = grid[k] - step, grid[k] + step
        x1 = hi - golden * (hi - lo)
        x2 = lo + golden * (hi - lo)
        f1, f2 = value(x1), value(x2)
        for _ in range(60):
            if f1 >= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - golden * (hi - lo)
                f1 = value(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + golden * (hi - lo)
                f2 = value(x2)
        refined = max(f1, f2)
        worst_match = max(worst_match, abs(refined - fidelity_eta_opt(theta, p, chi, phi, beta)))

        best_eta = eta_opt(theta, p, chi, phi, beta)
        slope = (value(best_eta + h) - value(best_eta - h)) / (2.0 * h)
        worst_slope = max(worst_slope, abs(slope))
    ok = worst_match < 1e-9 and worst_slope < 1e-8
    report(2, ok, "grid+refine match %.3e (tol 1e-9), stationarity %.3e (tol 1e-8), %d tuples"
           % (worst_match, worst_slope, n))
    assert worst_match < 1e-9
    assert worst_slope < 1e-8


def test_criterion_03_phi_zero_regression():
    worst_beta = 0.0
    worst_delta = 0.0
    for theta in np.linspace(0.0, HALF_PI, 33):
        for p in np.linspace(0.0, 0.5, 11):
            result = optimize_point(float(theta), 0.0, float(p))
            circ = min(result.beta_opt, TWO_PI - result.beta_opt)
            worst_beta = max(worst_beta, circ)
            worst_delta = max(worst_delta, result.delta_f)
    ok = worst_beta < 1e-3 and worst_delta < 1e-6
    report(3, ok, "max |beta_opt mod 2pi| = %.3e (tol 1e-3), max delta_f = %.3e (tol 1e-6), 33x11 grid"
           % (worst_beta, worst_delta))
    assert worst_beta < 1e-3
    assert worst_delta < 1e-6


def test_criterion_04_degenerate_edges():
    rng = np.random.default_rng(104)
    n = 25
    worst = {}
    thetas = rng.uniform(0.0, HALF_PI, n)
    phis = rng.uniform(0.0, TWO_PI, n)
    ps = rng.uniform(0.0, 0.5, n)
    cases = {
        "theta=0": [(0.0, float(phis[i]), float(ps[i])) for i in range(n)],
        "theta=pi/2": [(HALF_PI, float(phis[i]), float(ps[i])) for i in range(n)],
        "phi=pi/2": [(float(thetas[i]), HALF_PI, float(ps[i])) for i in range(n)],
        "p=0": [(float(thetas[i]), float(phis[i]), 0.0) for i in range(n)],
        "p=0.5": [(float(thetas[i]), float(phis[i]), 0.5) for i in range(n)],
    }
    for name, points in cases.items():
        worst[name] = max(optimize_point(*point).delta_f for point in points)
    overall = max(worst.values())
    ok = overall < 1e-6
    report(4, ok, "max delta_f per edge: " + ", ".join("%s %.2e" % kv for kv in worst.items()))
    assert overall < 1e-6


def test_criterion_05_peak_of_delta_f_curve():
    start = time.perf_counter()
    points = curve_over_p((0.0, 0.5), 101, "delta_f")
    elapsed = time.perf_counter() - start
    k = int(np.argmax([value for _, value, *_ in points]))
    p_star, v_star = points[k][0], points[k][1]
    ok = abs(v_star - 0.0102) <= 0.001 and abs(p_star - 0.180) <= 0.01 and elapsed < 60.0
    report(5, ok, "peak delta_f = %.6f at p = %.3f (target 0.0102+-0.001 at 0.180+-0.01), %.1f s"
           % (v_star, p_star, elapsed))
    assert abs(v_star - 0.0102) <= 0.001
    assert abs(p_star - 0.180) <= 0.01
    assert elapsed < 60.0


def test_criterion_06_peak_of_improvement_curve():
    start = time.perf_counter()
    points = curve_over_p((0.0, 0.5), 101, "f_imp")
    elapsed = time.perf_counter() - start
    k = int(np.argmax([value for _, value, *_ in points]))
    p_star, v_star = points[k][0], points[k][1]
    ok = abs(v_star - 0.0662) <= 0.002 and abs(p_star - 0.2501) <= 0.01 and elapsed < 60.0
    report(6, ok, "peak f_imp = %.6f at p = %.3f (target 0.0662+-0.002 at 0.2501+-0.01), %.1f s"
           % (v_star, p_star, elapsed))
    assert abs(v_star - 0.0662) <= 0.002
    assert abs(p_star - 0.2501) <= 0.01
    assert elapsed < 60.0


def test_criterion_07_showcase_point_regression():
    result = optimize_point(SHOWCASE.theta, SHOWCASE.phi, SHOWCASE.p)
    showcase_value = fidelity_closed(SHOWCASE)
    d_f = abs(result.f_opt - showcase_value)
    d_chi = abs(result.chi_opt - SHOWCASE.chi)
    d_eta = abs(result.eta_opt - SHOWCASE.eta)
    d_beta = min(abs(result.beta_opt - SHOWCASE.beta), TWO_PI - abs(result.beta_opt - SHOWCASE.beta))
    ok = d_f < 1e-3 and d_chi <= 0.02 and d_eta <= 0.02 and d_beta <= 0.02
    report(
        7,
        ok,
        "f_opt %.9f vs showcase value %.9f (|diff| %.1e, tol 1e-3); "
        "|chi - 0.8583| = %.4f, |eta - 0.7913| = %.4f, |beta - 5.8905| = %.4f (tol 0.02 each); "
        "found optimum (%.6f, %.6f, %.6f)"
        % (result.f_opt, showcase_value, d_f, d_chi, d_eta, d_beta,
           result.chi_opt, result.eta_opt, result.beta_opt),
    )
    assert d_f < 1e-3
    assert d_chi <= 0.02
    assert d_eta <= 0.02
    # the found beta is 0.0235 from the quoted one while beating its
    # fidelity by 4.2e-5; the quoted tuple is not the argmax to this
    # precision, so an honest optimizer cannot land within 0.02
    assert d_beta <= 0.02, (
        "beta deviates by %.4f > 0.02: optimizer found (%.6f, %.6f, %.6f) with f_opt %.9f, "
        "which exceeds the quoted tuple's fidelity %.9f by %.1e"
        % (d_beta, result.chi_opt, result.eta_opt, result.beta_opt,
           result.f_opt, showcase_value, result.f_opt - showcase_value)
    )


def test_criterion_08_rotated_frame_identity():
    n = 1000
    cols = draw_columns(np.random.default_rng(108), n)
    worst = max(rotated_frame_check(params_from_columns(cols, i)) for i in range(n))
    ok = worst < 1e-12
    report(8, ok, "max entrywise deviation = %.3e over %d tuples (tol 1e-12)" % (worst, n))
    assert worst < 1e-12


def test_criterion_09_snapshot_closed_forms():
    n = 400
    rng = np.random.default_rng(109)
    sigma = [pauli("X"), pauli("Y"), pauli("Z")]
    worst = 0.0
    for _ in range(n):
        theta = float(rng.uniform(0.0, HALF_PI))
        p = float(rng.uniform(0.0, 0.5))
        chi = float(rng.uniform(0.0, HALF_PI))
        eta = float(math.pi - rng.uniform(0.0, TWO_PI))
        beta = float(rng.uniform(0.0, TWO_PI))
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
            got = (float(np.trace(matrix).real),) + tuple(
                float(np.trace(s @ matrix).real) for s in sigma
            )
            worst = max(worst, max(abs(g - w) for g, w in zip(got, closed[name])))
    ok = worst < 1e-13
    report(9, ok, "max Pauli-coefficient deviation = %.3e over %d tuples (tol 1e-13)" % (worst, n))
    assert worst < 1e-13


def test_criterion_10_povm_completeness_and_trace():
    eye = np.eye(2, dtype=complex)
    worst_povm = 0.0
    chis = np.concatenate([np.linspace(0.0, HALF_PI, 41), [0.0, HALF_PI]])
    betas = np.linspace(0.0, TWO_PI, 37, endpoint=False)
    for chi in chis:
        for beta in betas:
            meas = weak_measurements(float(chi), float(beta))
            total = dagger(meas.m_plus) @ meas.m_plus + dagger(meas.m_minus) @ meas.m_minus
            worst_povm = max(worst_povm, float(np.max(np.abs(total - eye))))

    n = 400
    cols = draw_columns(np.random.default_rng(110), n)
    worst_trace = 0.0
    for i in range(n):
        params = params_from_columns(cols, i)
        pair = prepare_pair(params.theta, params.phi)
        for rho in (pair.rho_plus, pair.rho_minus):
            noisy = dephase(rho, params.p)
            out = control_map(noisy, params.chi, params.beta, params.eta)
            worst_trace = max(worst_trace, abs(float(np.trace(out).real) - 1.0))
    ok = worst_povm < 1e-14 and worst_trace < 1e-13
    report(10, ok, "POVM completeness %.3e (tol 1e-14), trace preservation %.3e (tol 1e-13)"
           % (worst_povm, worst_trace))
    assert worst_povm < 1e-14
    assert worst_trace < 1e-13


def test_criterion_11_figure_runs_are_bitwise_deterministic(tmp_path):
    shrink = ["--grid-theta", "9", "--grid-phi", "8", "--p-steps", "7"]
    all_ok = True
    for fig in (2, 3, 4, 5, 6, 7):
        outputs = []
        for tag, jobs in (("a", 1), ("b", 1), ("c", 2)):
            out = tmp_path / f"fig{fig}-{tag}.csv"
            code = main(["figure", "--figure", str(fig), "--jobs", str(jobs),
                         "--out", str(out)] + shrink)
            assert code == 0
            outputs.append(out.read_bytes())
        same = outputs[0] == outputs[1] == outputs[2]
        all_ok = all_ok and same
        assert same, f"figure {fig} output differs between runs or worker counts"
    report(11, all_ok, "figures 2..7, repeat runs and jobs 1 vs 2, byte-identical files")
    assert all_ok
