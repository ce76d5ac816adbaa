"""Qubit states, Pauli algebra, and Bloch-vector conversions.

The package works with a one-parameter family of nonorthogonal state
pairs.  Both members live in the X-basis: starting from (|0> +- |1>)/sqrt(2)
the pair is opened up by a polar angle ``theta`` and given opposite
azimuthal phases ``+-phi``.  Their overlap is cos(theta), so ``theta``
dials the distinguishability and ``phi`` orients the pair around the
Bloch x-axis.

States are plain 2x2 complex ndarrays (density matrices).  Pure-state
vectors appear only inside :func:`prepare_pair`; everything downstream
consumes density matrices or :class:`BlochVector` records.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

__all__ = [
    "ATOL_HERMITIAN",
    "ATOL_PURITY",
    "ATOL_TRACE",
    "BlochVector",
    "IDENTITY",
    "StatePair",
    "bloch_length",
    "check_density_matrix",
    "dagger",
    "from_bloch",
    "overlap",
    "pauli",
    "prepare_pair",
    "purity",
    "state_eigenvalues",
    "to_bloch",
]

# Numerical tolerances for state validation.  Trace and Hermiticity are
# exact up to rounding for everything this package constructs; purity of
# prepared pairs must hold to 1e-13.
ATOL_TRACE = 1e-12
ATOL_HERMITIAN = 1e-12
ATOL_PURITY = 1e-13

IDENTITY = np.eye(2, dtype=complex)

_PAULI = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "I": IDENTITY,
}


def pauli(which: str) -> np.ndarray:
    """Return a copy of the Pauli matrix named by ``which`` (X, Y, Z or I)."""
    key = which.upper()
    if key not in _PAULI:
        raise ValueError(f"unknown Pauli label {which!r}; expected X, Y, Z or I")
    return _PAULI[key].copy()


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


@dataclasses.dataclass(frozen=True)
class BlochVector:
    """Bloch components of a (possibly subnormalized) qubit operator.

    ``weight`` is the trace.  For a normalized state weight == 1 and
    (x, y, z) is the usual Bloch vector; conditional branch states keep
    their branch probability in ``weight`` while (x, y, z) stay the
    *normalized* components, so weight * (1 + r.sigma)/2 reconstructs
    the subnormalized operator.
    """

    x: float
    y: float
    z: float
    weight: float = 1.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def length(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclasses.dataclass(frozen=True)
class StatePair:
    """The two protected states and the angles that produced them."""

    theta: float
    phi: float
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    rho_plus: np.ndarray
    rho_minus: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.psi_plus, self.psi_minus, self.rho_plus, self.rho_minus):
            arr.setflags(write=False)


def _check_angle(name: str, value: float, lo: float, hi: float, *, closed_hi: bool) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if value < lo or (value > hi if closed_hi else value >= hi):
        span = f"[{lo:.6g}, {hi:.6g}{']' if closed_hi else ')'}"
        raise ValueError(f"{name}={value!r} outside {span}")
    return value


def prepare_pair(theta: float, phi: float) -> StatePair:
    """Build the protected pair for opening angle ``theta`` and phase ``phi``.

    With |+-> = (|0> +- |1>)/sqrt(2), the members are

        |psi_+-> = cos(theta/2)|+>  +-  e^{i phi} sin(theta/2)|->

    so <psi_+|psi_-> = cos(theta).  The global phase is fixed by keeping
    the |+> amplitude real and nonnegative.  theta is restricted to
    [0, pi/2] (overlap cos(theta) >= 0), phi to [0, 2 pi).
    """
    theta = _check_angle("theta", theta, 0.0, math.pi / 2, closed_hi=True)
    phi = _check_angle("phi", phi, 0.0, 2 * math.pi, closed_hi=False)

    c, s = math.cos(theta / 2), math.sin(theta / 2)
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
    phase = complex(math.cos(phi), math.sin(phi))

    psi_plus = c * plus + phase * s * minus
    psi_minus = c * plus - phase * s * minus
    rho_plus = np.outer(psi_plus, psi_plus.conj())
    rho_minus = np.outer(psi_minus, psi_minus.conj())
    return StatePair(theta, phi, psi_plus, psi_minus, rho_plus, rho_minus)


def overlap(pair: StatePair) -> complex:
    """Inner product <psi_+|psi_->; equals cos(theta) for prepared pairs."""
    return complex(np.vdot(pair.psi_plus, pair.psi_minus))


def to_bloch(rho: np.ndarray) -> BlochVector:
    """Bloch decomposition of a 2x2 operator.

    Returns normalized (x, y, z) together with ``weight`` = Tr(rho).  A
    weight of zero leaves the direction components at zero rather than
    dividing by it.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {rho.shape}")
    w = rho[0, 0].real + rho[1, 1].real
    x = (rho[0, 1] + rho[1, 0]).real
    y = (rho[1, 0] - rho[0, 1]).imag
    z = (rho[0, 0] - rho[1, 1]).real
    if w != 0.0:
        x, y, z = x / w, y / w, z / w
    return BlochVector(x, y, z, w)


def from_bloch(v: BlochVector | tuple[float, float, float]) -> np.ndarray:
    """Inverse of :func:`to_bloch`: weight * (I + r.sigma) / 2."""
    if isinstance(v, BlochVector):
        x, y, z, w = v.x, v.y, v.z, v.weight
    else:
        x, y, z = v
        w = 1.0
    return (
        w
        * 0.5
        * np.array(
            [[1.0 + z, x - 1.0j * y], [x + 1.0j * y, 1.0 - z]],
            dtype=complex,
        )
    )


def bloch_length(rho: np.ndarray) -> float:
    """Length of the normalized Bloch vector of ``rho``."""
    return to_bloch(rho).length


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2), computed without forming the product matrix."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.sum(rho * rho.T).real)


def state_eigenvalues(rho: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a Hermitian 2x2 operator, descending, in closed form.

    For trace t and determinant d the pair is (t +- sqrt(t^2 - 4d)) / 2.
    The discriminant is clamped at zero so a maximally mixed state never
    sprouts a tiny imaginary part from rounding.
    """
    rho = np.asarray(rho, dtype=complex)
    t = (rho[0, 0] + rho[1, 1]).real
    d = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    disc = max(t * t - 4.0 * d, 0.0)
    half = math.sqrt(disc) / 2.0
    return (t / 2.0 + half, t / 2.0 - half)


def check_density_matrix(rho: np.ndarray, *, normalized: bool = True) -> None:
    """Validate Hermiticity, positivity and (optionally) unit trace.

    Raises ValueError naming the violated property.  Positivity is
    checked through the closed-form eigenvalues with the Hermitian
    tolerance as slack.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {rho.shape}")
    if not np.all(np.isfinite(rho.view(float))):
        raise ValueError("state contains non-finite entries")
    if abs(rho[0, 1] - rho[1, 0].conjugate()) > ATOL_HERMITIAN or (
        abs(rho[0, 0].imag) > ATOL_HERMITIAN or abs(rho[1, 1].imag) > ATOL_HERMITIAN
    ):
        raise ValueError("state is not Hermitian within tolerance")
    if normalized:
        tr = (rho[0, 0] + rho[1, 1]).real
        if abs(tr - 1.0) > ATOL_TRACE:
            raise ValueError(f"state trace {tr!r} is not 1 within tolerance")
    lo = state_eigenvalues(rho)[1]
    if lo < -ATOL_HERMITIAN:
        raise ValueError(f"state has negative eigenvalue {lo!r}")
