"""Dephasing noise, tunable weak measurements, and the feedback channel.

The protection scheme is measure-then-correct: after the qubit passes a
phase-flip channel, a two-outcome weak measurement with strength knob
``chi`` and phase knob ``beta`` is performed, and each outcome triggers
an opposite y-axis rotation by ``eta``.  Summing the two corrected
branches gives the trace-preserving map applied to the noisy state.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .core import (
    BlochVector,
    check_density_matrix,
    dagger,
    pauli,
    prepare_pair,
    to_bloch,
)

__all__ = [
    "ATOL_COMPLETENESS",
    "ATOL_TRACE_PRESERVED",
    "ControlParams",
    "MeasurementPair",
    "PipelineTrace",
    "control_map",
    "correction",
    "dephase",
    "frame_rotation",
    "pipeline_trace",
    "rotated_frame_check",
    "snapshot_closed_forms",
    "weak_measurements",
]

ATOL_COMPLETENESS = 1e-14
ATOL_TRACE_PRESERVED = 1e-13

_Z = pauli("Z")


@dataclasses.dataclass(frozen=True)
class ControlParams:
    """Full parameter tuple of one protection run.

    Ranges: theta in [0, pi/2], phi in [0, 2 pi), p in [0, 0.5],
    chi in [0, pi/2], eta in (-pi, pi], beta in [0, 2 pi).
    """

    theta: float
    phi: float
    p: float
    chi: float
    eta: float
    beta: float

    def __post_init__(self) -> None:
        checks = (
            ("theta", self.theta, 0.0, math.pi / 2, True, True),
            ("phi", self.phi, 0.0, 2 * math.pi, True, False),
            ("p", self.p, 0.0, 0.5, True, True),
            ("chi", self.chi, 0.0, math.pi / 2, True, True),
            ("eta", self.eta, -math.pi, math.pi, False, True),
            ("beta", self.beta, 0.0, 2 * math.pi, True, False),
        )
        for name, value, lo, hi, closed_lo, closed_hi in checks:
            v = float(value)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {value!r}")
            low_ok = v >= lo if closed_lo else v > lo
            high_ok = v <= hi if closed_hi else v < hi
            if not (low_ok and high_ok):
                raise ValueError(
                    f"{name}={value!r} outside "
                    f"{'[' if closed_lo else '('}{lo:.6g}, {hi:.6g}{']' if closed_hi else ')'}"
                )


@dataclasses.dataclass(frozen=True)
class MeasurementPair:
    """The two measurement operators; both diagonal in the logical basis."""

    m_plus: np.ndarray
    m_minus: np.ndarray

    def __post_init__(self) -> None:
        self.m_plus.setflags(write=False)
        self.m_minus.setflags(write=False)


@dataclasses.dataclass(frozen=True)
class PipelineTrace:
    """Stage-by-stage Bloch records for the + input state.

    The two mid-pipeline stages are conditional (unnormalized) branch
    states; their branch probability lives in BlochVector.weight while
    the components stay normalized.
    """

    initial: BlochVector
    post_noise: BlochVector
    post_measurement_plus: BlochVector
    post_correction_plus: BlochVector
    final_normalized: BlochVector


def dephase(rho: np.ndarray, p: float) -> np.ndarray:
    """Phase-flip channel (1-p) rho + p Z rho Z.

    Off-diagonal entries shrink by (1-2p); diagonal entries are copied
    untouched, so the z Bloch component is preserved bit for bit.
    """
    p = float(p)
    if not (0.0 <= p <= 0.5):
        raise ValueError(f"p={p!r} outside [0, 0.5]")
    rho = np.asarray(rho, dtype=complex)
    out = rho.copy()
    k = 1.0 - 2.0 * p
    out[0, 1] *= k
    out[1, 0] *= k
    return out


def weak_measurements(chi: float, beta: float) -> MeasurementPair:
    """Two-outcome measurement of tunable strength chi and phase beta.

        M'_+ = diag(cos(chi/2), e^{i beta} sin(chi/2))
        M'_- = diag(e^{i beta} sin(chi/2), cos(chi/2))

    chi=0 is the projective limit, chi=pi/2 extracts nothing (both
    operators proportional to the identity at beta=0).  The POVM
    elements are M'pm^dag M'pm = (I pm cos(chi) Z)/2 for every beta.
    """
    chi = float(chi)
    if not (0.0 <= chi <= math.pi / 2):
        raise ValueError(f"chi={chi!r} outside [0, pi/2]")
    c = math.cos(chi / 2)
    s = math.sin(chi / 2)
    w = s * complex(math.cos(beta), math.sin(beta))
    m_plus = np.array([[c, 0.0], [0.0, w]], dtype=complex)
    m_minus = np.array([[w, 0.0], [0.0, c]], dtype=complex)
    return MeasurementPair(m_plus, m_minus)


def correction(eta: float, sign: int) -> np.ndarray:
    """Outcome-conditioned y-axis rotation by angle eta.

    The + outcome gets cos(eta/2) I - i sin(eta/2) Y, the - outcome its
    inverse.  On the Bloch sphere the + branch sends
    (x, z) -> (x cos eta + z sin eta, z cos eta - x sin eta).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    c = math.cos(eta / 2)
    s = math.sin(eta / 2) * sign
    return np.array([[c, -s], [s, c]], dtype=complex)


def control_map(noisy: np.ndarray, chi: float, beta: float, eta: float) -> np.ndarray:
    """Apply measurement plus feedback to a normalized state.

    C(rho) = R_+ M'_+ rho M'_+^dag R_+^dag + R_- M'_- rho M'_-^dag R_-^dag.
    Completeness of the measurement pair and unitarity of the
    corrections make the map trace preserving.
    """
    noisy = np.asarray(noisy, dtype=complex)
    check_density_matrix(noisy)
    meas = weak_measurements(chi, beta)
    out = np.zeros((2, 2), dtype=complex)
    for m, sign in ((meas.m_plus, 1), (meas.m_minus, -1)):
        r = correction(eta, sign)
        branch = r @ (m @ noisy @ dagger(m)) @ dagger(r)
        out += branch
    return out


def pipeline_trace(params: ControlParams) -> PipelineTrace:
    """Bloch snapshots of every stage the + state passes through."""
    pair = prepare_pair(params.theta, params.phi)
    rho = pair.rho_plus
    noisy = dephase(rho, params.p)
    meas = weak_measurements(params.chi, params.beta)
    measured = meas.m_plus @ noisy @ dagger(meas.m_plus)
    r_plus = correction(params.eta, 1)
    corrected = r_plus @ measured @ dagger(r_plus)
    final = control_map(noisy, params.chi, params.beta, params.eta)
    return PipelineTrace(
        initial=to_bloch(rho),
        post_noise=to_bloch(noisy),
        post_measurement_plus=to_bloch(measured),
        post_correction_plus=to_bloch(corrected),
        final_normalized=to_bloch(final),
    )


def frame_rotation(phi: float) -> np.ndarray:
    """x-axis rotation by phi: cos(phi/2) I - i sin(phi/2) X.

    Conjugating the phi=0 state pair with this unitary yields the
    phi pair, for both members.
    """
    c = math.cos(phi / 2)
    s = math.sin(phi / 2)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=complex)


def rotated_frame_check(params: ControlParams) -> float:
    """Entrywise deviation of the channel from its rotated-frame form.

    The whole pipeline can be conjugated into the frame where phi = 0:
    with U = frame_rotation(phi) and tilde(A) = U^dag A U, applying the
    tilde-dressed noise, measurements and corrections to the phi=0
    states and rotating back must reproduce C(rho') exactly.  Returns
    the maximum absolute entry difference over both pair members.
    """
    u = frame_rotation(params.phi)
    ud = dagger(u)
    pair = prepare_pair(params.theta, params.phi)
    pair0 = prepare_pair(params.theta, 0.0)
    meas = weak_measurements(params.chi, params.beta)
    z_t = ud @ _Z @ u
    worst = 0.0
    for rho, rho0 in ((pair.rho_plus, pair0.rho_plus), (pair.rho_minus, pair0.rho_minus)):
        lhs = control_map(dephase(rho, params.p), params.chi, params.beta, params.eta)
        noisy_t = (1.0 - params.p) * rho0 + params.p * (z_t @ rho0 @ z_t)
        acc = np.zeros((2, 2), dtype=complex)
        for m, sign in ((meas.m_plus, 1), (meas.m_minus, -1)):
            m_t = ud @ m @ u
            r_t = ud @ correction(params.eta, sign) @ u
            acc += r_t @ (m_t @ noisy_t @ dagger(m_t)) @ dagger(r_t)
        rhs = u @ acc @ ud
        dev = float(np.max(np.abs(lhs - rhs)))
        worst = max(worst, dev)
    return worst


def snapshot_closed_forms(
    theta: float, p: float, chi: float, eta: float, beta: float
) -> dict[str, tuple[float, float, float, float]]:
    """Reference Pauli coefficients for the phi = pi/4 pipeline stages.

    Returns, per stage, the unnormalized tuple
    (Tr rho, Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) for the +
    input state, written out in closed form.  These are the expressions
    the matrix pipeline must reproduce.
    """
    k = 1.0 - 2.0 * p
    st, ct = math.sin(theta), math.cos(theta)
    h = math.sqrt(2.0) / 2.0
    sx, cx = math.sin(chi), math.cos(chi)
    sb, cb = math.sin(beta), math.cos(beta)
    se, ce = math.sin(eta), math.cos(eta)

    noisy = (1.0, k * ct, -k * h * st, h * st)
    w_m = 0.5 * (1.0 + h * cx * st)
    x_m = 0.5 * k * sx * (cb * ct + h * sb * st)
    y_m = 0.5 * k * sx * (sb * ct - h * cb * st)
    z_m = 0.5 * (cx + h * st)
    measured = (w_m, x_m, y_m, z_m)
    corrected = (w_m, ce * x_m + se * z_m, y_m, ce * z_m - se * x_m)
    return {
        "initial": (1.0, ct, -h * st, h * st),
        "post_noise": noisy,
        "post_measurement_plus": measured,
        "post_correction_plus": corrected,
    }
