"""Two-photon quadrature algebra for the entangled signal/idler source.

Conventions used throughout the package:

* Quadrature pairs are (amplitude, phase) = (c1, c2); a general quadrature is
  c_zeta = c1 cos(zeta) + c2 sin(zeta).
* Spectral densities are single-sided and normalized so that vacuum = 1.
  Squeeze "dB" means 10*log10(e^{2r}).
* Joint spectra of the signal/idler pair live in a 4x4 Hermitian matrix over
  the basis (a1, a2, b1, b2); the signal beam is `a`, the idler `b`.

All functions here are pure and safe to map over frequency grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateIdler

DB_PER_NEPER = 10.0 / np.log(10.0)


def squeeze_db_to_r(db: float) -> float:
    """Convert a squeeze level in dB (10*log10 e^{2r}) to the squeeze factor r."""
    return float(db) / (2.0 * DB_PER_NEPER)


def r_to_squeeze_db(r: float) -> float:
    return 2.0 * DB_PER_NEPER * float(r)


@dataclass(frozen=True)
class QuadratureVector:
    """Complex coefficients of a field in the (amplitude, phase) quadrature basis.

    c1, c2 are dimensionless; omega is the sideband frequency in rad/s and must
    be non-negative (single-sided convention).
    """

    c1: complex
    c2: complex
    omega: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be >= 0 (single-sided spectra)")

    def at_angle(self, zeta: float) -> complex:
        return self.c1 * np.cos(zeta) + self.c2 * np.sin(zeta)


@dataclass(frozen=True)
class SpectralMatrix:
    """2x2 Hermitian single-sided PSD of one quadrature pair (vacuum = 1)."""

    s11: float
    s22: float
    s12: complex = 0.0

    def __post_init__(self):
        if self.s11 < 0 or self.s22 < 0:
            raise ValueError("diagonal spectra must be non-negative")
        if self.s11 * self.s22 - abs(self.s12) ** 2 < -1e-9:
            raise ValueError("spectral matrix must be positive semidefinite")

    @property
    def s21(self) -> complex:
        return np.conj(self.s12)

    def det(self) -> float:
        return self.s11 * self.s22 - abs(self.s12) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)

    @classmethod
    def from_array(cls, m: np.ndarray) -> "SpectralMatrix":
        return cls(s11=float(m[0, 0].real), s22=float(m[1, 1].real), s12=complex(m[0, 1]))


@dataclass(frozen=True)
class EprSource:
    """Idler-detuned parametric source producing entangled signal/idler beams.

    r is the squeeze factor of the amplifier, delta the idler carrier offset in
    rad/s (signed), theta an optional squeeze-angle reference applied to both
    output beams.
    """

    r: float
    delta: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeeze factor r must be >= 0")

    @property
    def mu(self) -> float:
        return np.cosh(self.r)

    @property
    def nu(self) -> float:
        return np.sinh(self.r)

    @property
    def squeeze_db(self) -> float:
        return r_to_squeeze_db(self.r)


def rotation(angle):
    """2x2 rotation matrix R(angle) = [[cos, -sin], [sin, cos]].

    Accepts scalars or arrays; for an array of shape (...,) returns (..., 2, 2).
    """
    a = np.asarray(angle, dtype=float)
    c, s = np.cos(a), np.sin(a)
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def epr_joint_spectrum(src: EprSource) -> np.ndarray:
    """Joint 4x4 PSD of (a1, a2, b1, b2) for the detuned parametric source.

    The sum/difference quadratures (a1 +- b1)/sqrt(2) and (a2 +- b2)/sqrt(2)
    are uncorrelated with spectra e^{+-2r} and e^{-+2r}; equivalently all four
    diagonal entries equal cosh(2r) with cross spectra S_a1b1 = sinh(2r) and
    S_a2b2 = -sinh(2r).
    """
    c2 = np.cosh(2.0 * src.r)
    s2 = np.sinh(2.0 * src.r)
    s = np.array(
        [
            [c2, 0.0, s2, 0.0],
            [0.0, c2, 0.0, -s2],
            [s2, 0.0, c2, 0.0],
            [0.0, -s2, 0.0, c2],
        ],
        dtype=complex,
    )
    if src.theta != 0.0:
        s = quadrature_rotate(s, -src.theta, -src.theta)
    return s


def quadrature_rotate(joint: np.ndarray, phi_a: float, phi_b: float) -> np.ndarray:
    """Re-express a joint spectrum in rotated quadrature bases.

    The new first element of each block is the quadrature at angle phi
    (a'_1 = a_{phi_a}, b'_1 = b_{phi_b}), so the congruence uses R(-phi).
    Works on a single 4x4 or a stack (..., 4, 4).
    """
    r4 = np.zeros(np.shape(joint)[:-2] + (4, 4))
    r4[..., :2, :2] = rotation(-phi_a)
    r4[..., 2:, 2:] = rotation(-phi_b)
    return r4 @ joint @ np.swapaxes(r4, -1, -2)


def condition_gaussian(
    joint: np.ndarray, measured_idler_angle: float, read_signal_angle: float
) -> tuple[complex, float]:
    """Optimal linear subtraction of the measured idler from the read signal.

    Reads A = a_{read_signal_angle} and B = b_{measured_idler_angle} from the
    joint spectrum and returns (g_opt, S_cond) with g_opt = S_AB / S_BB and
    S_cond = S_AA - |S_AB|^2 / S_BB, the residual variance after subtracting
    g_opt * B from A.

    Raises DegenerateIdler when the idler variance is below 1e-15.
    """
    va = np.array([np.cos(read_signal_angle), np.sin(read_signal_angle)])
    vb = np.array([np.cos(measured_idler_angle), np.sin(measured_idler_angle)])
    s_aa = float(np.real(va @ joint[:2, :2] @ va))
    s_bb = float(np.real(vb @ joint[2:, 2:] @ vb))
    s_ab = complex(va @ joint[:2, 2:] @ vb)
    if s_bb < 1e-15:
        raise DegenerateIdler(f"idler quadrature variance {s_bb!r} is degenerate")
    g_opt = s_ab / s_bb
    s_cond = s_aa - abs(s_ab) ** 2 / s_bb
    return g_opt, s_cond


def conditional_variance(s_aa, s_bb, s_ab):
    """Vectorized residual variance S_AA - |S_AB|^2 / S_BB.

    Inputs are arrays of the already-read quadrature spectra; raises
    DegenerateIdler if any idler bin is below 1e-15.
    """
    s_aa = np.asarray(s_aa, dtype=float)
    s_bb = np.asarray(s_bb, dtype=float)
    s_ab = np.asarray(s_ab, dtype=complex)
    if np.any(s_bb < 1e-15):
        raise DegenerateIdler("idler quadrature variance below 1e-15 in grid")
    return s_aa - np.abs(s_ab) ** 2 / s_bb


def min_eigenvalue(joint: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian joint spectrum (physicality check)."""
    return float(np.min(np.linalg.eigvalsh(joint)))
