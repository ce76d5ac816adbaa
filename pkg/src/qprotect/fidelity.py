"""Average-fidelity formulas, their simulation oracle, and baselines.

The closed form below was derived by eliminating the matrix pipeline by
hand; :func:`fidelity_simulated` keeps the matrix pipeline alive as an
independent oracle, and the two are required to agree to 1e-12.  The
correction angle eta enters only through sin/cos, so the fidelity is
C0 + (A sin eta + B cos eta)/2 and the optimal eta drops out
analytically; that reduction powers everything in
:mod:`qprotect.optimize`.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .channel import ControlParams, control_map, dephase
from .core import prepare_pair

__all__ = [
    "ATOL_DEGENERATE",
    "ATOL_ORACLE",
    "BaselineFidelities",
    "FidelityBreakdown",
    "baselines",
    "beta_critical",
    "eta_opt",
    "eta_terms",
    "fidelity_closed",
    "fidelity_eta_opt",
    "fidelity_phi0",
    "fidelity_simulated",
]

# Closed form vs matrix simulation must agree to this everywhere.
ATOL_ORACLE = 1e-12
# Below this, the (A, B) pair is treated as degenerate (eta irrelevant).
ATOL_DEGENERATE = 1e-12


@dataclasses.dataclass(frozen=True)
class FidelityBreakdown:
    """Per-state and average input-output fidelities."""

    f_plus: float
    f_minus: float
    f_avg: float


@dataclasses.dataclass(frozen=True)
class BaselineFidelities:
    """Fidelities of the two comparison schemes and their maximum."""

    f_dn: float
    f_h: float
    f_best_baseline: float


def _check_range(name: str, value: float, lo: float, hi: float, *, closed_hi: bool = True) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if value < lo or (value > hi if closed_hi else value >= hi):
        raise ValueError(f"{name}={value!r} outside allowed range")
    return value


def _validate(theta: float, p: float, chi: float, phi: float, beta: float) -> tuple[float, ...]:
    theta = _check_range("theta", theta, 0.0, math.pi / 2)
    p = _check_range("p", p, 0.0, 0.5)
    chi = _check_range("chi", chi, 0.0, math.pi / 2)
    phi = _check_range("phi", phi, 0.0, 2 * math.pi, closed_hi=False)
    beta = _check_range("beta", beta, 0.0, 2 * math.pi, closed_hi=False)
    return theta, p, chi, phi, beta


def _state_coeffs(theta, p, phi):
    """Per-state coefficients of the closed form, vectorized.

    The fidelity is C0 + (A sin eta + B cos eta)/2 with

        C0 = 1/2 + c0u * sin(chi) cos(beta)
        A  = act * cos(chi) - avu * sin(beta) sin(chi)
        B  = bc + bu * sin(chi) cos(beta)

    so scans over (chi, beta) at fixed states only need the returned
    five coefficient arrays plus trig of the probe angles.
    """
    k = 1.0 - 2.0 * np.asarray(p, dtype=float)
    st = np.sin(theta)
    ct = np.cos(theta)
    st2 = st * st
    ct2 = ct * ct
    cp = np.cos(phi)
    sp = np.sin(phi)
    c0u = 0.5 * k * st2 * (sp * sp)
    act = ct
    avu = 0.5 * k * st2 * (2.0 * sp * cp)
    bc = (cp * cp) * st2
    bu = k * ct2
    return c0u, act, avu, bc, bu


def _terms_from_coeffs(coeffs, sx, cx, sb, cb):
    """(C0, A, B) from state coefficients and probe-angle trig values."""
    c0u, act, avu, bc, bu = coeffs
    sxcb = sx * cb
    c0 = 0.5 + c0u * sxcb
    a = act * cx - avu * (sb * sx)
    b = bc + bu * sxcb
    return c0, a, b


def _closed_terms(theta, p, chi, phi, beta):
    """Vectorized (C0, A, B) with fidelity = C0 + (A sin eta + B cos eta)/2.

    No range validation; broadcasting over any mix of scalars/arrays.
    """
    coeffs = _state_coeffs(theta, p, phi)
    return _terms_from_coeffs(coeffs, np.sin(chi), np.cos(chi), np.sin(beta), np.cos(beta))


def _closed_value(theta, p, chi, eta, phi, beta):
    c0, a, b = _closed_terms(theta, p, chi, phi, beta)
    return c0 + 0.5 * (a * np.sin(eta) + b * np.cos(eta))


def _eta_opt_value(theta, p, chi, phi, beta):
    c0, a, b = _closed_terms(theta, p, chi, phi, beta)
    return c0 + 0.5 * np.hypot(a, b)


def fidelity_closed(params: ControlParams) -> float:
    """Closed-form average fidelity of the full six-parameter channel."""
    return float(
        _closed_value(params.theta, params.p, params.chi, params.eta, params.phi, params.beta)
    )


def fidelity_simulated(params: ControlParams) -> FidelityBreakdown:
    """Average fidelity by explicit matrix pipeline; the closed form's oracle.

    Prepares the pair, dephases each member, pushes it through the
    measurement-feedback map, and overlaps with the noiseless input.
    """
    pair = prepare_pair(params.theta, params.phi)
    fids = []
    for psi, rho in ((pair.psi_plus, pair.rho_plus), (pair.psi_minus, pair.rho_minus)):
        noisy = dephase(rho, params.p)
        out = control_map(noisy, params.chi, params.beta, params.eta)
        fids.append(float(np.real(np.vdot(psi, out @ psi))))
    return FidelityBreakdown(fids[0], fids[1], 0.5 * (fids[0] + fids[1]))


def eta_terms(theta: float, p: float, chi: float, phi: float, beta: float) -> tuple[float, float]:
    """The (A, B) pair with fidelity = C0 + (A sin eta + B cos eta)/2.

    Both zero means the fidelity does not depend on eta at all (for
    example theta = pi/2 with chi = 0).
    """
    theta, p, chi, phi, beta = _validate(theta, p, chi, phi, beta)
    _, a, b = _closed_terms(theta, p, chi, phi, beta)
    return float(a), float(b)


def eta_opt(theta: float, p: float, chi: float, phi: float, beta: float) -> float:
    """Correction angle maximizing the average fidelity, in (-pi, pi].

    atan2(A, B) lands on the maximizing branch directly.  In the
    degenerate case A = B = 0 the angle is irrelevant and 0.0 is
    returned; use hypot(*eta_terms(...)) < ATOL_DEGENERATE to detect it.
    """
    a, b = eta_terms(theta, p, chi, phi, beta)
    if math.hypot(a, b) < ATOL_DEGENERATE:
        return 0.0
    return math.atan2(a, b)


def fidelity_eta_opt(theta: float, p: float, chi: float, phi: float, beta: float) -> float:
    """Average fidelity with the correction angle already optimized.

    Substituting eta = atan2(A, B) turns A sin eta + B cos eta into
    +sqrt(A^2 + B^2), so the maximum is C0 + hypot(A, B)/2.
    """
    theta, p, chi, phi, beta = _validate(theta, p, chi, phi, beta)
    return float(_eta_opt_value(theta, p, chi, phi, beta))


def fidelity_phi0(theta: float, p: float, chi: float, beta: float) -> float:
    """Eta-optimized fidelity restricted to the xz-plane (phi = 0).

        1/2 + 1/2 sqrt(cos^2 theta cos^2 chi
                       + (sin^2 theta + (1-2p) cos^2 theta sin chi cos beta)^2)

    Kept as its own expression (not a call into fidelity_eta_opt) so the
    two can cross-check each other; they must agree to 1e-12.
    """
    theta = _check_range("theta", theta, 0.0, math.pi / 2)
    p = _check_range("p", p, 0.0, 0.5)
    chi = _check_range("chi", chi, 0.0, math.pi / 2)
    beta = _check_range("beta", beta, 0.0, 2 * math.pi, closed_hi=False)
    st2 = math.sin(theta) ** 2
    ct2 = math.cos(theta) ** 2
    inner = st2 + (1.0 - 2.0 * p) * ct2 * math.sin(chi) * math.cos(beta)
    return 0.5 + 0.5 * math.hypot(math.cos(theta) * math.cos(chi), inner)


def beta_critical(theta: float, phi: float, eta: float) -> float:
    """Stationary measurement phase for a given correction angle, in [0, 2 pi).

    The beta-dependent part of the fidelity is proportional to
    2 D cos beta + N sin beta with D = cos eta cos^2 theta
    + sin^2 theta sin^2 phi and N = -sin eta sin^2 theta sin 2 phi, so
    atan2(N, 2D) picks the maximizing one of the two stationary angles
    whenever the proportionality factor (1-2p) sin chi is positive.
    Degenerate N = D = 0 returns 0.0.
    """
    theta = _check_range("theta", theta, 0.0, math.pi / 2)
    phi = _check_range("phi", phi, 0.0, 2 * math.pi, closed_hi=False)
    eta = float(eta)
    if not (-math.pi < eta <= math.pi):
        raise ValueError(f"eta={eta!r} outside (-pi, pi]")
    st2 = math.sin(theta) ** 2
    num = -math.sin(eta) * st2 * math.sin(2 * phi)
    den = 2.0 * (math.cos(eta) * math.cos(theta) ** 2 + st2 * math.sin(phi) ** 2)
    if math.hypot(num, den) < ATOL_DEGENERATE:
        return 0.0
    return math.atan2(num, den) % (2 * math.pi)


def _dn_value(theta, p, phi):
    st = np.sin(theta)
    cp = np.cos(phi)
    return 1.0 - p + p * st * st * cp * cp


def _helstrom_value(theta, phi):
    ct = np.cos(theta)
    st = np.sin(theta)
    cp = np.cos(phi)
    return 0.5 + 0.5 * np.hypot(ct, (cp * cp) * (st * st))


def baselines(theta: float, phi: float, p: float) -> BaselineFidelities:
    """Fidelities of the two comparison schemes.

    Do nothing: zero-strength measurement (chi = pi/2) and no
    correction, giving 1 - p + p sin^2 theta cos^2 phi.  Discrimination:
    projective measurement (chi = 0) with optimized correction, giving
    1/2 + 1/2 sqrt(cos^2 theta + cos^4 phi sin^4 theta), independent of
    p and beta.
    """
    theta = _check_range("theta", theta, 0.0, math.pi / 2)
    phi = _check_range("phi", phi, 0.0, 2 * math.pi, closed_hi=False)
    p = _check_range("p", p, 0.0, 0.5)
    f_dn = float(_dn_value(theta, p, phi))
    f_h = float(_helstrom_value(theta, phi))
    return BaselineFidelities(f_dn, f_h, max(f_dn, f_h))
