"""Macrospin magnetization dynamics with spin-transfer and spin-orbit torques.

Magnetization states are plain ``numpy`` unit 3-vectors. The equation of
motion is integrated in its explicit Landau-Lifshitz form,

    (1+a^2) dm/dt = -g m x H - a g m x (m x H)
                    - b m x (m x p) + a b m x p          (STT, b = xi phi J_stt)
                    - c m x (m x s) + a c m x s          (SOT, c = xi eta J_she)

with g = gamma mu0 and xi = gamma hbar / (2 e t_F Ms).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from nandspin import kernels
from nandspin.constants import CONSTANTS, PhysicalConstants
from nandspin.errors import ConfigurationError, InputDomainError
from nandspin.layout import (N_PAR, P_ALPHA, P_AREA, P_EASY, P_ETA, P_GMU0, P_HEXT, P_HK,
                             P_LAM, P_MEFF, P_MP, P_POL, P_SIG, P_SOTSIGN, P_XI, P_XSEC)

MAX_DT = 2e-12
SWITCH_THRESHOLD = 0.9


def unit(v) -> np.ndarray:
    """Return ``v`` as a float array scaled to unit length."""
    arr = np.asarray(v, dtype=float)
    norm = np.linalg.norm(arr)
    if norm == 0.0:
        raise InputDomainError("cannot normalise a zero vector")
    return arr / norm


class AnisotropyKind(str, enum.Enum):
    PERPENDICULAR = "perpendicular"
    IN_PLANE = "in-plane"


@dataclass(frozen=True)
class FreeLayerParams:
    """Free-layer material and geometry.

    ``demag_field`` is the thin-film demagnetizing magnetization used for
    in-plane layers (``None`` means the full ``Ms``); perpendicular layers
    ignore it because their demag is folded into the net anisotropy.
    """

    Ms: float
    alpha: float
    t_F: float
    area: float
    anisotropy_kind: AnisotropyKind
    easy_axis: tuple = (0.0, 0.0, 1.0)
    E_barrier: float = 40.0
    temperature: float = 300.0
    demag_field: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "anisotropy_kind", AnisotropyKind(self.anisotropy_kind))
        if not self.Ms > 0:
            raise ConfigurationError("Ms must be positive", key="Ms")
        if not 0 < self.alpha < 1:
            raise ConfigurationError("alpha must lie in (0, 1)", key="alpha")
        if not self.t_F > 0 or not self.area > 0:
            raise ConfigurationError("free layer needs a positive volume", key="t_F/area")
        easy = np.asarray(self.easy_axis, dtype=float)
        if easy.shape != (3,) or abs(np.linalg.norm(easy) - 1.0) > 1e-9:
            raise ConfigurationError("easy_axis must be a unit 3-vector", key="easy_axis")
        object.__setattr__(self, "easy_axis", tuple(float(c) for c in easy))

    @property
    def volume(self) -> float:
        return self.area * self.t_F

    @property
    def easy(self) -> np.ndarray:
        return np.array(self.easy_axis)

    def anisotropy_field(self, constants: PhysicalConstants = CONSTANTS) -> float:
        """Hk = 2 E kB T / (mu0 Ms V) in A/m."""
        if self.volume <= 0:
            raise ConfigurationError("zero free-layer volume")
        return 2.0 * self.E_barrier * constants.kB * self.temperature / (constants.mu0 * self.Ms * self.volume)

    @property
    def out_of_plane_demag(self) -> float:
        if self.anisotropy_kind is AnisotropyKind.PERPENDICULAR:
            return 0.0
        return self.Ms if self.demag_field is None else float(self.demag_field)

    def torque_prefactor(self, constants: PhysicalConstants = CONSTANTS) -> float:
        """xi = gamma hbar / (2 e t_F Ms), in m^2 A^-1 s^-1."""
        return constants.gamma * constants.hbar / (2.0 * constants.e_charge * self.t_F * self.Ms)

    @property
    def thermal_cone_angle(self) -> float:
        """RMS equilibrium tilt per transverse axis, sqrt(1 / (2 E))."""
        return float(np.sqrt(0.5 / self.E_barrier))


@dataclass(frozen=True)
class TorqueDrive:
    J_stt: float = 0.0
    J_she: float = 0.0
    m_p: tuple = (0.0, 0.0, 1.0)
    sigma_she: tuple = (1.0, 0.0, 0.0)
    P: float = 0.62
    Lambda: float = 1.3
    eta: float = 0.3
    H_ext: tuple = field(default=(0.0, 0.0, 0.0))

    def __post_init__(self):
        for name in ("m_p", "sigma_she"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise InputDomainError(f"{name} must be a unit 3-vector")
            object.__setattr__(self, name, tuple(float(c) for c in vec))
        object.__setattr__(self, "H_ext", tuple(float(c) for c in np.asarray(self.H_ext, dtype=float)))
        if not 0 < self.P < 1:
            raise InputDomainError("P must lie in (0, 1)")
        if not self.Lambda >= 1:
            raise InputDomainError("Lambda must be >= 1")

    def with_currents(self, J_stt: float = 0.0, J_she: float = 0.0) -> "TorqueDrive":
        return replace(self, J_stt=J_stt, J_she=J_she)


def stt_efficiency(cos_angle, P: float, Lambda: float):
    """Angle-dependent STT efficiency phi = 2 P L^2 / ((L^2+1) + (L^2-1) cos)."""
    c = np.asarray(cos_angle, dtype=float)
    if np.any(np.abs(c) > 1.0 + 1e-12) or np.any(~np.isfinite(c)):
        raise InputDomainError("cos_angle must lie in [-1, 1]")
    if not 0 < P < 1 or not Lambda >= 1:
        raise InputDomainError("need 0 < P < 1 and Lambda >= 1")
    lam2 = Lambda * Lambda
    phi = 2.0 * P * lam2 / ((lam2 + 1.0) + (lam2 - 1.0) * c)
    return float(phi) if phi.ndim == 0 else phi


def effective_field(m, fl: FreeLayerParams, H_ext=(0.0, 0.0, 0.0),
                    constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """Uniaxial anisotropy + (in-plane only) thin-film demag + applied field, A/m."""
    m = np.asarray(m, dtype=float)
    easy = fl.easy
    h = fl.anisotropy_field(constants) * float(m @ easy) * easy + np.asarray(H_ext, dtype=float)
    h[2] -= fl.out_of_plane_demag * m[2]
    return h


def pack_layer(fl: FreeLayerParams, drive: TorqueDrive, constants: PhysicalConstants = CONSTANTS,
               strip_cross_section: float = 1.0, sot_sign: float = 1.0) -> np.ndarray:
    """Flatten layer + drive parameters into the kernel's slot vector."""
    par = np.zeros(N_PAR)
    par[P_HK] = fl.anisotropy_field(constants)
    par[P_EASY] = fl.easy
    par[P_MEFF] = fl.out_of_plane_demag
    par[P_ALPHA] = fl.alpha
    par[P_XI] = fl.torque_prefactor(constants)
    par[P_GMU0] = constants.gamma * constants.mu0
    par[P_HEXT] = drive.H_ext
    par[P_MP] = drive.m_p
    par[P_SIG] = drive.sigma_she
    par[P_POL] = drive.P
    par[P_LAM] = drive.Lambda
    par[P_ETA] = drive.eta
    par[P_AREA] = fl.area
    par[P_XSEC] = strip_cross_section
    par[P_SOTSIGN] = sot_sign
    return par


def llg_rhs(m, drive: TorqueDrive, fl: FreeLayerParams,
            constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """dm/dt in 1/s for the current drive."""
    m = np.ascontiguousarray(m, dtype=float)
    return kernels.llg_rhs(m, pack_layer(fl, drive, constants), drive.J_stt, drive.J_she)


def _check_dt(dt: float) -> None:
    if not 0 < dt <= MAX_DT * (1 + 1e-12):
        raise ConfigurationError(f"dt must lie in (0, {MAX_DT:g}] s, got {dt:g}", key="dt")


def integrate_step(m, drive: TorqueDrive, fl: FreeLayerParams, dt: float,
                   constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """One classical RK4 step followed by renormalisation."""
    _check_dt(dt)
    par = pack_layer(fl, drive, constants)[None, :]
    _, traj = kernels.llg_integrate(np.ascontiguousarray(m, dtype=float), np.zeros(1), par,
                                    np.array([[drive.J_stt, drive.J_she]]), dt, 1, 1)
    return traj[-1].copy()


DriveProfile = Union[TorqueDrive, Sequence[tuple]]


@dataclass
class SwitchingResult:
    times: np.ndarray
    trajectory: np.ndarray
    switch_time: float | None

    @property
    def final(self) -> np.ndarray:
        return self.trajectory[-1]


def settled_crossing(times, projection, target_sign: float,
                     threshold: float = SWITCH_THRESHOLD) -> float | None:
    """First time ``target_sign * projection`` reaches ``threshold`` and stays there.

    The crossing instant is linearly interpolated between samples. Returns
    ``None`` when the last sample is not beyond the threshold.
    """
    times = np.asarray(times)
    s = target_sign * np.asarray(projection)
    beyond = s >= threshold
    if beyond.size == 0 or not beyond[-1]:
        return None
    outside = np.flatnonzero(~beyond)
    if outside.size == 0:
        return float(times[0])
    k = outside[-1]
    t0, t1, s0, s1 = times[k], times[k + 1], s[k], s[k + 1]
    return float(t0 + (threshold - s0) / (s1 - s0) * (t1 - t0))


def simulate_switching(m0, drive_profile: DriveProfile, fl: FreeLayerParams, t_stop: float,
                       dt: float = 1e-12, record_every: int = 1,
                       constants: PhysicalConstants = CONSTANTS) -> SwitchingResult:
    """Integrate to ``t_stop`` and report the settled switching time, if any.

    ``drive_profile`` is either one ``TorqueDrive`` or a sequence of
    ``(t_start, TorqueDrive)`` segments sorted by start time, the first
    starting at 0.
    """
    _check_dt(dt)
    if isinstance(drive_profile, TorqueDrive):
        segments = [(0.0, drive_profile)]
    else:
        segments = sorted(((float(t), d) for t, d in drive_profile), key=lambda s: s[0])
        if not segments or segments[0][0] > 0.0:
            raise ConfigurationError("drive profile must start at t = 0")
    seg_t0 = np.array([t for t, _ in segments])
    seg_par = np.ascontiguousarray([pack_layer(fl, d, constants) for _, d in segments])
    seg_j = np.ascontiguousarray([[d.J_stt, d.J_she] for _, d in segments], dtype=float)
    nsteps = int(round(t_stop / dt))
    m0 = unit(m0)
    times, traj = kernels.llg_integrate(np.ascontiguousarray(m0), seg_t0, seg_par, seg_j,
                                        dt, nsteps, max(1, int(record_every)))
    proj = traj @ fl.easy
    initial = float(m0 @ fl.easy)
    sign = -1.0 if initial >= 0 else 1.0
    return SwitchingResult(times, traj, settled_crossing(times, proj, sign))


def anisotropy_energy(m, fl: FreeLayerParams, constants: PhysicalConstants = CONSTANTS) -> float:
    """Uniaxial energy -1/2 mu0 Ms Hk (m.e)^2 V plus the thin-film demag term, in J."""
    m = np.asarray(m, dtype=float)
    hk = fl.anisotropy_field(constants)
    uni = -0.5 * constants.mu0 * fl.Ms * hk * float(m @ fl.easy) ** 2
    demag = 0.5 * constants.mu0 * fl.Ms * fl.out_of_plane_demag * m[2] ** 2
    return (uni + demag) * fl.volume


def thermal_tilt(m, fl: FreeLayerParams, direction=None) -> np.ndarray:
    """Raise the polar angle of ``m`` from the easy axis to at least the thermal cone.

    A macrospin sitting exactly on its easy axis feels zero torque from any
    collinear drive, so switching runs start from the RMS thermal tilt. The
    tilt keeps the azimuth of ``m`` when it has one and otherwise leans
    toward ``direction`` (default: an in-plane axis orthogonal to the easy
    axis).
    """
    m = unit(m)
    easy = fl.easy
    proj = float(m @ easy)
    cone = fl.thermal_cone_angle
    transverse = m - proj * easy
    if np.linalg.norm(transverse) < 1e-12:
        if direction is None:
            direction = (0.0, 1.0, 0.0) if abs(easy[1]) < 0.9 else (1.0, 0.0, 0.0)
        transverse = np.asarray(direction, dtype=float)
        transverse = transverse - (transverse @ easy) * easy
        if fl.anisotropy_kind is AnisotropyKind.IN_PLANE:
            transverse[2] = 0.0
    if np.arccos(np.clip(abs(proj), -1.0, 1.0)) >= cone:
        return m
    sign = 1.0 if proj >= 0 else -1.0
    return unit(sign * np.cos(cone) * easy + np.sin(cone) * unit(transverse))
