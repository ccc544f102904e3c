"""NAND-SPIN device: two MTJs sharing one heavy-metal strip.

Conventions
-----------
* Positive MTJ current flows from the free layer (strip side) up to the
  pinned layer and pulls the free layer toward ``m_p`` (parallel).
* Positive strip current flows along the +x (x-type) or +y (y-type) axis.
  With the default ``sigma_sign`` a positive strip current drives both
  free layers antiparallel (erase).
* ``(mtj1, mtj2) = (AP, P)`` stores '1', ``(P, AP)`` stores '0'.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from nandspin import kernels
from nandspin.constants import CONSTANTS, PhysicalConstants
from nandspin.devices import HeavyMetalStrip, MtjParams, StripOrientation, heavy_metal_resistance
from nandspin.errors import InputDomainError, PreconditionError
from nandspin.llg import (AnisotropyKind, FreeLayerParams, TorqueDrive, pack_layer, thermal_tilt,
                          unit, _check_dt)

NM = 1e-9
DECODE_THRESHOLD = 0.5
# Thin-film demag assumed for the in-plane free layer: interfacial anisotropy
# of the 1.5 nm CoFeB/MgO stack cancels most of the 4 pi Ms shape term.
IN_PLANE_EFFECTIVE_DEMAG = 1.0e5


class DeviceKind(str, enum.Enum):
    P_TYPE = "p"
    I_TYPE = "i"


class MtjState(str, enum.Enum):
    P = "P"
    AP = "AP"
    UNDEFINED = "undefined"


class StoredBit(str, enum.Enum):
    BIT0 = "0"
    BIT1 = "1"
    ERASED = "erased"
    INVALID = "invalid"

    @classmethod
    def from_int(cls, value: int) -> "StoredBit":
        return cls.BIT1 if int(value) else cls.BIT0


@dataclass
class MtjBundle:
    mtj: MtjParams
    layer: FreeLayerParams
    m: np.ndarray
    m_p: np.ndarray

    @property
    def cos_angle(self) -> float:
        return float(np.clip(self.m @ self.m_p, -1.0, 1.0))

    @property
    def projection(self) -> float:
        """Easy-axis projection signed so that +1 means parallel."""
        return float(self.m @ self.layer.easy) * float(np.sign(self.m_p @ self.layer.easy))

    def state(self) -> MtjState:
        c = self.cos_angle
        if c > DECODE_THRESHOLD:
            return MtjState.P
        if c < -DECODE_THRESHOLD:
            return MtjState.AP
        return MtjState.UNDEFINED


@dataclass
class NandSpinDevice:
    kind: DeviceKind
    geometry: StripOrientation
    mtj1: MtjBundle
    mtj2: MtjBundle
    strip: HeavyMetalStrip
    bias_field: np.ndarray = field(default_factory=lambda: np.zeros(3))
    sigma_sign: float = -1.0
    P: float = 0.62
    Lambda: float = 1.3
    eta: float = 0.3

    @property
    def sigma(self) -> np.ndarray:
        return self.sigma_sign * unit(np.cross(self.strip.current_axis, [0.0, 0.0, 1.0]))

    @property
    def strip_resistance(self) -> float:
        return heavy_metal_resistance(self.strip)

    def bundles(self) -> tuple[MtjBundle, MtjBundle]:
        return self.mtj1, self.mtj2

    def drive(self, bundle: MtjBundle, J_stt: float = 0.0, J_she: float = 0.0) -> TorqueDrive:
        return TorqueDrive(J_stt=J_stt, J_she=J_she, m_p=tuple(bundle.m_p), sigma_she=tuple(self.sigma),
                           P=self.P, Lambda=self.Lambda, eta=self.eta, H_ext=tuple(self.bias_field))

    def layer_vector(self, bundle: MtjBundle, constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
        """Kernel slot vector for one free layer, with strip cross-section filled in."""
        return pack_layer(bundle.layer, self.drive(bundle), constants,
                          strip_cross_section=self.strip.cross_section, sot_sign=1.0)

    def with_magnetizations(self, m1, m2) -> "NandSpinDevice":
        return replace(self, mtj1=replace(self.mtj1, m=unit(m1)), mtj2=replace(self.mtj2, m=unit(m2)))

    def with_states(self, s1: MtjState, s2: MtjState) -> "NandSpinDevice":
        def vec(b, s):
            return b.m_p if s is MtjState.P else -b.m_p
        return self.with_magnetizations(vec(self.mtj1, s1), vec(self.mtj2, s2))

    def thermalized(self) -> "NandSpinDevice":
        return self.with_magnetizations(thermal_tilt(self.mtj1.m, self.mtj1.layer),
                                        thermal_tilt(self.mtj2.m, self.mtj2.layer))


def free_layer_preset(kind: DeviceKind, geometry: StripOrientation, **overrides) -> FreeLayerParams:
    kind = DeviceKind(kind)
    geometry = StripOrientation(geometry)
    if kind is DeviceKind.P_TYPE:
        base = dict(Ms=1e6, alpha=0.035, t_F=0.7 * NM, area=40 * NM * 40 * NM,
                    anisotropy_kind=AnisotropyKind.PERPENDICULAR, easy_axis=(0.0, 0.0, 1.0),
                    E_barrier=32.0)
    else:
        # the easy axis follows the SOT polarisation: x for y-type, y for x-type
        easy = (1.0, 0.0, 0.0) if geometry is StripOrientation.Y_TYPE else (0.0, 1.0, 0.0)
        base = dict(Ms=1e6, alpha=0.0122, t_F=1.5 * NM, area=np.pi / 4 * 120 * NM * 40 * NM,
                    anisotropy_kind=AnisotropyKind.IN_PLANE, easy_axis=easy, E_barrier=92.0,
                    demag_field=IN_PLANE_EFFECTIVE_DEMAG)
    base.update(overrides)
    return FreeLayerParams(**base)


def strip_preset(kind: DeviceKind, geometry: StripOrientation, rho: float = 2e-6) -> HeavyMetalStrip:
    if DeviceKind(kind) is DeviceKind.P_TYPE:
        w, l = 80 * NM, 60 * NM
    else:
        w, l = 180 * NM, 60 * NM
    return HeavyMetalStrip(w=w, l=l, d=5 * NM, rho=rho, orientation=StripOrientation(geometry))


def make_device(kind, geometry, RA: float = 5e-12, TMR0: float = 1.2, Vh: float = 0.5,
                P: float = 0.62, Lambda: float = 1.3, eta: float = 0.3, rho: float = 2e-6,
                bias_field_T: float = -0.005, sigma_sign: float | None = None, mtj2_RA: float | None = None,
                mtj2_TMR0: float | None = None, layer_overrides: dict | None = None,
                constants: PhysicalConstants = CONSTANTS) -> NandSpinDevice:
    """Device with the default material stack, both MTJs erased (AP).

    ``bias_field_T`` is the applied flux density along the erase-current axis
    (perpendicular devices only). ``sigma_sign`` defaults to the polarity for
    which a positive strip current erases: -1 for perpendicular layers with
    the negative bias field, and spins antiparallel to ``m_p`` for in-plane
    layers.
    """
    kind = DeviceKind(kind)
    geometry = StripOrientation(geometry)
    layer = free_layer_preset(kind, geometry, **(layer_overrides or {}))
    strip = strip_preset(kind, geometry, rho)
    m_p = layer.easy.copy()
    mtj1 = MtjBundle(MtjParams(layer.area, RA, TMR0, Vh), layer, -m_p.copy(), m_p.copy())
    mtj2 = MtjBundle(MtjParams(layer.area, mtj2_RA if mtj2_RA is not None else RA,
                               mtj2_TMR0 if mtj2_TMR0 is not None else TMR0, Vh),
                     layer, -m_p.copy(), m_p.copy())
    bias = np.zeros(3)
    natural_sigma = np.cross(strip.current_axis, [0.0, 0.0, 1.0])
    if kind is DeviceKind.P_TYPE:
        bias = bias_field_T / constants.mu0 * strip.current_axis
        auto_sign = -1.0
    else:
        auto_sign = -float(np.sign(natural_sigma @ m_p))
    if sigma_sign is None:
        sigma_sign = auto_sign
    return NandSpinDevice(kind, geometry, mtj1, mtj2, strip, bias, sigma_sign, P, Lambda, eta)


def terminal_currents_to_densities(dev: NandSpinDevice, i_strip: float, i_mtj1: float,
                                   i_mtj2: float) -> tuple[float, float, float]:
    """(J_she, J_stt1, J_stt2) in A/m^2, signs preserved."""
    return (i_strip / dev.strip.cross_section, i_mtj1 / dev.mtj1.layer.area,
            i_mtj2 / dev.mtj2.layer.area)


def decode_state(dev: NandSpinDevice) -> StoredBit:
    s1, s2 = dev.mtj1.state(), dev.mtj2.state()
    if MtjState.UNDEFINED in (s1, s2):
        return StoredBit.INVALID
    if s1 is MtjState.AP and s2 is MtjState.AP:
        return StoredBit.ERASED
    if s1 is MtjState.AP and s2 is MtjState.P:
        return StoredBit.BIT1
    if s1 is MtjState.P and s2 is MtjState.AP:
        return StoredBit.BIT0
    return StoredBit.INVALID


def _run_layers(dev: NandSpinDevice, currents: list[tuple[float, float, float]], durations: list[float],
                dt: float, constants: PhysicalConstants) -> tuple[NandSpinDevice, np.ndarray, np.ndarray]:
    """Integrate both layers through consecutive constant-current segments.

    ``currents`` holds (i_strip, i_mtj1, i_mtj2) per segment. Returns the
    final device and the sampled trajectories of both layers.
    """
    dev = dev.thermalized()
    finals, trajs = [], []
    t0 = np.cumsum([0.0] + list(durations[:-1]))
    nsteps = int(round(sum(durations) / dt))
    for k, bundle in enumerate(dev.bundles()):
        par = dev.layer_vector(bundle, constants)
        seg_j = []
        for i_strip, i1, i2 in currents:
            j_she, j1, j2 = terminal_currents_to_densities(dev, i_strip, i1, i2)
            seg_j.append([(j1, j2)[k], j_she])
        _, traj = kernels.llg_integrate(np.ascontiguousarray(bundle.m), np.asarray(t0, dtype=float),
                                        np.ascontiguousarray(np.repeat(par[None], len(currents), 0)),
                                        np.ascontiguousarray(seg_j, dtype=float), dt, nsteps, 10)
        finals.append(traj[-1])
        trajs.append(traj)
    return dev.with_magnetizations(*finals), trajs[0], trajs[1]


def erase_pulse(dev: NandSpinDevice, i_strip: float, duration: float, dt: float = 1e-12,
                relax: float = 2e-9, constants: PhysicalConstants = CONSTANTS) -> NandSpinDevice:
    """Shared SOT pulse through the strip, then ``relax`` seconds without current."""
    _check_dt(dt)
    if duration < 0 or relax < 0:
        raise InputDomainError("pulse and relaxation times must be non-negative")
    segs, durs = [(i_strip, 0.0, 0.0)], [duration]
    if relax > 0:
        segs.append((0.0, 0.0, 0.0))
        durs.append(relax)
    if sum(durs) == 0:
        return dev
    return _run_layers(dev, segs, durs, dt, constants)[0]


def program_pulse(dev: NandSpinDevice, branch: str, i_mtj: float, duration: float,
                  dt: float = 1e-12, relax: float = 1e-9,
                  constants: PhysicalConstants = CONSTANTS) -> NandSpinDevice:
    """Pure-STT pulse through one MTJ of an erased device."""
    _check_dt(dt)
    if branch not in ("mtj1", "mtj2"):
        raise InputDomainError("branch must be 'mtj1' or 'mtj2'")
    if decode_state(dev) is not StoredBit.ERASED:
        raise PreconditionError("program requires an erased device")
    currents = (0.0, i_mtj, 0.0) if branch == "mtj1" else (0.0, 0.0, i_mtj)
    segs, durs = [currents], [duration]
    if relax > 0:
        segs.append((0.0, 0.0, 0.0))
        durs.append(relax)
    return _run_layers(dev, segs, durs, dt, constants)[0]
