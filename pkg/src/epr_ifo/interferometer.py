"""Frequency response of the dual-recycled interferometer to both beams.

The signal beam (carrier band) sees the usual single-mode ponderomotive
input-output relation with detection bandwidth gamma; the idler beam (offset
by delta, several MHz) sees the interferometer as a detuned effective cavity
and is treated with the exact sideband reflectivity, including the full arm
propagation phase.

Macroscopic cavity lengths are snapped to an exact integer number of carrier
half-wavelengths and stored as integer counts; the microscopic length tunings
(dl_arm, dl_src) must themselves be integer half-wavelength multiples so the
carrier stays resonant and the signal channel is untouched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, hbar

from .errors import NonPositiveFrequency
from .twophoton import rotation


def _wrap_pi(x):
    """Wrap angle(s) to (-pi, pi]."""
    return -((-np.asarray(x) + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass(frozen=True)
class IfoParams:
    """Interferometer parameter record.

    lambda0        carrier wavelength [m]
    t_srm, t_itm   power transmissivities of the recycling and input mirrors
    l_arm, l_src   macroscopic cavity lengths [m]; snapped to half-wavelengths
    m_mirror       test mass [kg]
    i_c            arm circulating power [W]
    delta          idler carrier offset [rad/s], signed
    dl_arm, dl_src length tunings [m]; must be integer half-wavelength multiples
    phi_c          optional override of the quoted homodyne compensation [rad]
    """

    lambda0: float = 1.064e-6
    t_srm: float = 0.35
    t_itm: float = 0.014
    l_arm: float = 4000.0
    l_src: float = 50.0
    m_mirror: float = 40.0
    i_c: float = 650e3
    delta: float = -2.0 * np.pi * 15.3e6
    dl_arm: float = 0.0
    dl_src: float = 0.0
    phi_c: float | None = None

    def __post_init__(self):
        for name in ("t_srm", "t_itm"):
            t = getattr(self, name)
            if not 0.0 < t <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {t}")
        for name in ("lambda0", "l_arm", "l_src", "m_mirror", "i_c"):
            v = getattr(self, name)
            if v <= 0:
                raise ValueError(f"{name} must be positive, got {v}")
        half = self.lambda0 / 2.0
        for name in ("dl_arm", "dl_src"):
            d = getattr(self, name)
            n = round(d / half)
            if abs(d - n * half) > 1e-6 * max(abs(d), half):
                raise ValueError(
                    f"{name} = {d} m is not an integer multiple of lambda0/2"
                )

    # -- exact length bookkeeping -------------------------------------------

    @property
    def n_arm_half(self) -> int:
        """Base arm length in integer half-wavelengths."""
        return round(self.l_arm / (self.lambda0 / 2.0))

    @property
    def n_src_half(self) -> int:
        return round(self.l_src / (self.lambda0 / 2.0))

    @property
    def q_arm(self) -> int:
        """Arm tuning in integer half-wavelengths."""
        return round(self.dl_arm / (self.lambda0 / 2.0))

    @property
    def p_src(self) -> int:
        return round(self.dl_src / (self.lambda0 / 2.0))

    @property
    def l_arm_base(self) -> float:
        return self.n_arm_half * self.lambda0 / 2.0

    @property
    def l_src_base(self) -> float:
        return self.n_src_half * self.lambda0 / 2.0

    @property
    def l_arm_total(self) -> float:
        return (self.n_arm_half + self.q_arm) * self.lambda0 / 2.0

    @property
    def l_src_total(self) -> float:
        return (self.n_src_half + self.p_src) * self.lambda0 / 2.0

    # -- derived rates --------------------------------------------------------

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi * c / self.lambda0

    @property
    def r_srm(self) -> float:
        return 1.0 - self.t_srm

    @property
    def r_itm(self) -> float:
        return 1.0 - self.t_itm

    @property
    def gamma_itm(self) -> float:
        """Arm cavity half-bandwidth with no recycling mirror [rad/s]."""
        return c * self.t_itm / (4.0 * self.l_arm_base)

    @property
    def gamma(self) -> float:
        return derived_bandwidth(self)

    @property
    def theta(self) -> float:
        """Optomechanical coupling rate Theta = [8 w0 Ic / (m L c)]^(1/3) [rad/s]."""
        return (8.0 * self.omega0 * self.i_c / (self.m_mirror * self.l_arm_base * c)) ** (
            1.0 / 3.0
        )

    @property
    def fsr_src(self) -> float:
        """Free spectral range of the recycling cavity [Hz]."""
        return c / (2.0 * self.l_src_total)

    @property
    def phi_src(self) -> float:
        """One-way recycling-cavity phase of the idler carrier, delta * L / c."""
        return self.delta * self.l_src_total / c

    def retuned(self, delta: float, q_arm: int, p_src: int) -> "IfoParams":
        """Copy with a new idler offset and integer length tunings."""
        half = self.lambda0 / 2.0
        return IfoParams(
            lambda0=self.lambda0,
            t_srm=self.t_srm,
            t_itm=self.t_itm,
            l_arm=self.l_arm,
            l_src=self.l_src,
            m_mirror=self.m_mirror,
            i_c=self.i_c,
            delta=delta,
            dl_arm=q_arm * half,
            dl_src=p_src * half,
            phi_c=self.phi_c,
        )


def derived_bandwidth(p: IfoParams) -> float:
    """Detection bandwidth of the signal channel [rad/s].

    The recycling mirror broadens the arm bandwidth by the resonant extraction
    factor (1 + sqrt(R_SRM)) / (1 - sqrt(R_SRM)); with t_srm = 1 this reduces
    to the bare arm value.
    """
    rs = np.sqrt(p.r_srm)
    return p.gamma_itm * (1.0 + rs) / (1.0 - rs)


def kimble_coupling(p: IfoParams, omega) -> np.ndarray:
    """Frequency-dependent ponderomotive coupling K(Omega), dimensionless."""
    om = np.asarray(omega, dtype=float)
    g = p.gamma
    return 2.0 * p.theta**3 * g / (om**2 * (om**2 + g**2))


def strain_sql(p: IfoParams, omega) -> np.ndarray:
    """Free-mass standard quantum limit power spectral density [1/Hz]."""
    om = np.asarray(omega, dtype=float)
    return 8.0 * hbar / (p.m_mirror * om**2 * p.l_arm_base**2)


def required_rotation(p: IfoParams, omega) -> np.ndarray:
    """Idler quadrature rotation arctan(K) needed for matched conditioning."""
    om = np.asarray(omega, dtype=float)
    if np.any(om <= 0):
        raise NonPositiveFrequency("required_rotation needs omega > 0")
    return np.arctan(kimble_coupling(p, om))


@dataclass(frozen=True)
class SignalResponse:
    """Signal-channel response on a frequency grid.

    transfer maps input (a1, a2) to output (A1, A2); signal_gain is the complex
    response of A2 to h / h_SQL.
    """

    omega: np.ndarray
    beta: np.ndarray
    kappa: np.ndarray
    h_sql: np.ndarray
    transfer: np.ndarray  # (N, 2, 2) complex
    signal_gain: np.ndarray  # (N,) complex


def signal_response(p: IfoParams, omega) -> SignalResponse:
    """Ponderomotive input-output relation of the signal beam.

    A = e^{2i beta} [[1, 0], [-K, 1]] a  +  signal, with the signal entering
    the phase quadrature as sqrt(2K) e^{i beta} h / h_SQL.
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(om <= 0):
        raise NonPositiveFrequency("signal_response needs omega > 0")
    g = p.gamma
    beta = np.arctan(om / g)
    kappa = kimble_coupling(p, om)
    h_sql = np.sqrt(strain_sql(p, om))
    phase = np.exp(2j * beta)
    transfer = np.zeros(om.shape + (2, 2), dtype=complex)
    transfer[..., 0, 0] = phase
    transfer[..., 1, 0] = -kappa * phase
    transfer[..., 1, 1] = phase
    gain = np.sqrt(2.0 * kappa) * np.exp(1j * beta) / h_sql
    return SignalResponse(
        omega=om, beta=beta, kappa=kappa, h_sql=h_sql, transfer=transfer, signal_gain=gain
    )


@dataclass(frozen=True)
class SrcMirror:
    """Compound reflectivity/transmissivity of the recycling cavity + input mirror.

    rho is the reflectionseen from outside the recycling mirror, rho_tilde the
    reflection seen from the arm side, tau = tau_tilde the through coefficient.
    The lossless identities |tau^2 - rho*rho_tilde| = 1 and
    rho_tilde^* / rho = -1 / (tau^2 - rho*rho_tilde) hold.
    """

    rho: complex
    rho_tilde: complex
    tau: complex
    tau_tilde: complex
    phi_src: float

    @property
    def discriminant(self) -> complex:
        return self.tau * self.tau_tilde - self.rho * self.rho_tilde


def src_effective_mirror(p: IfoParams, phi_src: float | None = None) -> SrcMirror:
    """Compound-mirror coefficients at recycling-cavity one-way phase phi_src.

    By default phi_src = delta * L_src / c (the idler carrier offset only; the
    audio sideband contribution Omega * L_src / c is negligible over the band).
    """
    phi = p.phi_src if phi_src is None else float(phi_src)
    sr_i = np.sqrt(p.r_itm)
    sr_s = np.sqrt(p.r_srm)
    e2 = np.exp(2j * phi)
    den = 1.0 - sr_i * sr_s * e2
    rho_tilde = (sr_i - sr_s * e2) / den
    rho = -(sr_s - sr_i * e2) / den
    tau = 1j * np.sqrt(p.t_srm * p.t_itm) * np.exp(1j * phi) / den
    return SrcMirror(rho=rho, rho_tilde=rho_tilde, tau=tau, tau_tilde=tau, phi_src=phi)


def compensation_phase(p: IfoParams, mirror: SrcMirror | None = None) -> float:
    """Frequency-flat phase rotation removed from the reflected idler.

    Equals Arg[tau^2 - rho*rho_tilde] - Arg[rho_tilde]; rotating the idler
    local oscillator by this angle reduces the reflection to a pure detuned
    allpass, whose remaining quadrature rotation tracks arctan(K).
    """
    m = mirror if mirror is not None else src_effective_mirror(p)
    return float(_wrap_pi(np.angle(m.discriminant) - np.angle(m.rho_tilde)))


def quoted_compensation_phase(p: IfoParams, mirror: SrcMirror | None = None) -> float:
    """Homodyne compensation in the alternative reference convention.

    The same physical LO offset bookkept with the oscillator referenced on the
    arm side of the recycling cavity and the opposite rotation sense, i.e.
    2*phi_src - compensation_phase, wrapped to (-pi, pi]. Solver output quotes
    this form.
    """
    m = mirror if mirror is not None else src_effective_mirror(p)
    return float(_wrap_pi(2.0 * m.phi_src - compensation_phase(p, m)))


@dataclass(frozen=True)
class IdlerResponse:
    """Idler-channel response on a frequency grid.

    r_plus / r_minus are the interferometer reflectivities of the upper/lower
    idler sidebands (unit modulus when lossless); transfer is the compensated
    quadrature map (b1, b2) -> (B1, B2); phi_rot_achieved the continuous
    quadrature rotation angle after compensation; alpha the residual common
    sideband phase.
    """

    omega: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    transfer: np.ndarray  # (N, 2, 2) complex
    phi_rot_achieved: np.ndarray
    alpha: np.ndarray
    phi_comp: float
    phi_c: float

    @property
    def r_ifo(self) -> np.ndarray:
        return self.r_plus


def idler_reflectivity(p: IfoParams, omega, mirror: SrcMirror | None = None) -> np.ndarray:
    """Exact sideband reflectivity of the idler at signed sideband frequency.

    r(Omega) = [rho + (tau*tau_tilde - rho*rho_tilde) e^{i psi}] /
               [1 - rho_tilde e^{i psi}],  psi = 2 (delta + Omega) L_arm / c,
    with the full (tuned) arm length in the propagation phase.
    """
    m = mirror if mirror is not None else src_effective_mirror(p)
    om = np.asarray(omega, dtype=float)
    psi = 2.0 * (p.delta + om) * p.l_arm_total / c
    e = np.exp(1j * psi)
    return (m.rho + m.discriminant * e) / (1.0 - m.rho_tilde * e)


def idler_response(p: IfoParams, omega) -> IdlerResponse:
    """Quadrature response of the idler beam reflected off the interferometer.

    Builds the 2x2 quadrature transfer from the upper/lower sideband
    reflectivities r(+Omega), r(-Omega), removes the flat compensation phase,
    and extracts the rotation angle and common phase. The rotation angle is
    unwrapped continuously along the grid and anchored so that the
    low-frequency branch lies in [-pi/4, 3pi/4).
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(om < 0):
        raise ValueError("idler_response expects omega >= 0 (signed sidebands internal)")
    mirror = src_effective_mirror(p)
    phi_comp = compensation_phase(p, mirror)
    r_plus = idler_reflectivity(p, om, mirror)
    r_minus = idler_reflectivity(p, -om, mirror)

    # quadrature map from sideband pair: [[A, B], [-B, A]] with
    # A = (r+ + r-*)/2, B = i (r+ - r-*)/2; equals e^{i alpha} R(u)
    a = 0.5 * (r_plus + np.conj(r_minus))
    b = 0.5j * (r_plus - np.conj(r_minus))
    m_refl = np.empty(om.shape + (2, 2), dtype=complex)
    m_refl[..., 0, 0] = a
    m_refl[..., 0, 1] = b
    m_refl[..., 1, 0] = -b
    m_refl[..., 1, 1] = a
    transfer = rotation(-phi_comp) @ m_refl

    w = np.angle(r_plus * r_minus)
    if w.size > 1:
        w = np.unwrap(w)
    u = 0.5 * w
    # anchor the pi-branch at the lowest frequency
    d0 = u.flat[0] - phi_comp
    u = u - np.pi * np.floor((d0 + np.pi / 4.0) / np.pi)
    phi_rot = u - phi_comp
    alpha = 0.5 * np.angle(r_plus * np.conj(r_minus))
    return IdlerResponse(
        omega=om,
        r_plus=r_plus,
        r_minus=r_minus,
        transfer=transfer,
        phi_rot_achieved=phi_rot,
        alpha=alpha,
        phi_comp=phi_comp,
        phi_c=quoted_compensation_phase(p, mirror),
    )
