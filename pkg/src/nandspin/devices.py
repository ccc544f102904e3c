"""Compact electrical models: MTJ, heavy-metal strip, alpha-power transistor."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from nandspin.errors import ConfigurationError, InputDomainError

RA_UNIT = 1e-12  # 1 Ohm um^2 in Ohm m^2


@dataclass(frozen=True)
class MtjParams:
    """Tunnel barrier: ``RA`` in Ohm m^2, zero-bias ``TMR0``, roll-off voltage ``Vh``."""

    area: float
    RA: float = 5.0 * RA_UNIT
    TMR0: float = 1.2
    Vh: float = 0.5

    def __post_init__(self):
        if not (self.area > 0 and self.RA > 0 and self.TMR0 >= 0 and self.Vh > 0):
            raise ConfigurationError("MTJ needs positive area, RA, Vh and non-negative TMR0")

    @property
    def G_P(self) -> float:
        return self.area / self.RA

    @property
    def R_P(self) -> float:
        return self.RA / self.area

    @property
    def R_AP0(self) -> float:
        return self.R_P * (1.0 + self.TMR0)


def mtj_conductance(cos_angle, V_bias, p: MtjParams):
    """Cosine-interpolated conductance with Lorentzian TMR roll-off, in S."""
    c = np.asarray(cos_angle, dtype=float)
    if np.any(np.abs(c) > 1.0 + 1e-12) or np.any(~np.isfinite(c)):
        raise InputDomainError("cos_angle must lie in [-1, 1]")
    v = np.asarray(V_bias, dtype=float)
    g_ap = p.G_P / (1.0 + p.TMR0 / (1.0 + (v / p.Vh) ** 2))
    g = p.G_P * 0.5 * (1.0 + c) + g_ap * 0.5 * (1.0 - c)
    return float(g) if np.ndim(g) == 0 else g


class StripOrientation(str, enum.Enum):
    """Axis of the erase current: ``y`` flows along the strip length, ``x`` across its width."""

    X_TYPE = "x"
    Y_TYPE = "y"


@dataclass(frozen=True)
class HeavyMetalStrip:
    w: float
    l: float
    d: float
    rho: float = 2e-6
    orientation: StripOrientation = StripOrientation.Y_TYPE

    def __post_init__(self):
        object.__setattr__(self, "orientation", StripOrientation(self.orientation))
        if min(self.w, self.l, self.d, self.rho) <= 0:
            raise ConfigurationError("strip dimensions and resistivity must be positive")

    @property
    def path_length(self) -> float:
        return self.l if self.orientation is StripOrientation.Y_TYPE else self.w

    @property
    def cross_section(self) -> float:
        return self.w * self.d if self.orientation is StripOrientation.Y_TYPE else self.l * self.d

    @property
    def current_axis(self) -> np.ndarray:
        return np.array([0.0, 1.0, 0.0]) if self.orientation is StripOrientation.Y_TYPE \
            else np.array([1.0, 0.0, 0.0])


def heavy_metal_resistance(strip: HeavyMetalStrip) -> float:
    """rho L / A along the erase-current axis, in Ohm."""
    return strip.rho * strip.path_length / strip.cross_section


class Polarity(str, enum.Enum):
    NFET = "nfet"
    PFET = "pfet"

    @property
    def sign(self) -> int:
        return 1 if self is Polarity.NFET else -1


@dataclass(frozen=True)
class TransistorParams:
    """Alpha-power-law MOSFET. ``Vth`` is signed (negative for PFETs)."""

    polarity: Polarity
    W: float
    L: float = 40e-9
    Vth: float = 0.45
    k_drive: float = 4.84e-5
    alpha_sat: float = 1.3
    lambda_ch: float = 0.1
    C_gate_per_area: float = 0.02

    def __post_init__(self):
        object.__setattr__(self, "polarity", Polarity(self.polarity))
        if not (self.W > 0 and self.L > 0):
            raise ConfigurationError("transistor W and L must be positive")
        if not 1.0 <= self.alpha_sat <= 2.0:
            raise ConfigurationError("alpha_sat must lie in [1, 2]")
        if self.k_drive < 0 or self.lambda_ch < 0:
            raise ConfigurationError("k_drive and lambda_ch must be non-negative")

    @property
    def beta(self) -> float:
        return self.k_drive * self.W / self.L

    @property
    def vth_magnitude(self) -> float:
        return abs(self.Vth)

    @property
    def gate_capacitance(self) -> float:
        return self.C_gate_per_area * self.W * self.L

    def scaled(self, width_factor: float) -> "TransistorParams":
        return replace(self, W=self.W * width_factor)


def channel_current(beta: float, vth: float, alpha: float, lam: float, vgs: float, vds: float) -> float:
    """NFET-frame channel current for vds >= 0: saturation above vds = vov, quadratic blend below."""
    vov = vgs - vth
    if vov <= 0.0:
        return 0.0
    clm = 1.0 + lam * vds
    i0 = beta * vov ** alpha
    if vds >= vov:
        return i0 * clm
    x = vds / vov
    return i0 * x * (2.0 - x) * clm


def transistor_current(t: TransistorParams, Vgs: float, Vds: float) -> float:
    """Drain current (into the drain) of a symmetric device.

    NFETs conduct positive current for Vds > 0, PFETs negative current for
    Vds < 0. Reverse bias swaps the source and drain roles.
    """
    s = t.polarity.sign
    vgs, vds = s * Vgs, s * Vds
    if vds >= 0.0:
        cur = channel_current(t.beta, t.vth_magnitude, t.alpha_sat, t.lambda_ch, vgs, vds)
    else:
        cur = -channel_current(t.beta, t.vth_magnitude, t.alpha_sat, t.lambda_ch, vgs - vds, -vds)
    return s * cur


def node_capacitance(gates: Iterable[TransistorParams], C_par: float = 1e-15) -> float:
    """Lumped node capacitance: fixed parasitic plus every attached gate's oxide cap."""
    return C_par + sum(t.gate_capacitance for t in gates)
