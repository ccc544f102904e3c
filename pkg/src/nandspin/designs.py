"""Netlist factories: the four NAND-SPIN flip-flops and the slave-latch SOT baseline.

Node names used by every design: ``qt``/``qc`` (slave latch outputs),
``ma``/``mb`` (master latch), ``t1``/``t2`` (MTJ top electrodes). Control
inputs are bound to schedule signals: CLK, D, EQ, CTRL, REN, PSL (P2 gate,
active high), ERS (N2 gate) and POWER (supply rail).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from nandspin.circuit import GND, VDD, FreeLayer, Netlist, SourceBinding
from nandspin.devices import MtjParams, Polarity, TransistorParams
from nandspin.errors import ConfigurationError
from nandspin.llg import pack_layer
from nandspin.nand_spin import DeviceKind, NandSpinDevice, make_device
from nandspin.devices import StripOrientation

NM = 1e-9

# One-point calibration of the NFET transconductance (A V^-alpha per unit
# W/L); reproduced by ``experiments.calibrate_k_drive``.
K_DRIVE = 4.84e-5
# Fixed hole/electron drive ratio of the process; not a fitted quantity.
P_TO_N_RATIO = 0.55


class DesignKind(str, enum.Enum):
    P_Y = "p-y"
    I_Y = "i-y"
    P_X = "p-x"
    I_X = "i-x"
    BASELINE = "baseline-slave-latch"

    @property
    def is_baseline(self) -> bool:
        return self is DesignKind.BASELINE

    @property
    def device_kind(self) -> DeviceKind:
        return DeviceKind.I_TYPE if self in (DesignKind.I_Y, DesignKind.I_X, DesignKind.BASELINE) \
            else DeviceKind.P_TYPE

    @property
    def geometry(self) -> StripOrientation:
        return StripOrientation.X_TYPE if self in (DesignKind.P_X, DesignKind.I_X) else StripOrientation.Y_TYPE


PROPOSED_KINDS = (DesignKind.P_Y, DesignKind.I_Y, DesignKind.P_X, DesignKind.I_X)


@dataclass(frozen=True)
class ProcessParams:
    vdd: float = 1.1
    vth: float = 0.45
    alpha_sat: float = 1.3
    lambda_ch: float = 0.1
    k_drive: float = K_DRIVE
    p_to_n: float = P_TO_N_RATIO
    c_gate_per_area: float = 0.02
    c_par: float = 1e-15
    L: float = 40 * NM

    def nfet(self, W: float, dvth: float = 0.0) -> TransistorParams:
        return TransistorParams(Polarity.NFET, W, self.L, self.vth + dvth, self.k_drive,
                                self.alpha_sat, self.lambda_ch, self.c_gate_per_area)

    def pfet(self, W: float, dvth: float = 0.0) -> TransistorParams:
        return TransistorParams(Polarity.PFET, W, self.L, -(self.vth + dvth), self.k_drive * self.p_to_n,
                                self.alpha_sat, self.lambda_ch, self.c_gate_per_area)


@dataclass(frozen=True)
class DeviceParams:
    """Magnetic/electrical stack overrides shared by both MTJs unless per-MTJ values are set."""

    RA: float = 5e-12
    TMR0: float = 1.2
    Vh: float = 0.5
    P: float = 0.62
    Lambda: float = 1.3
    eta: float = 0.3
    rho: float = 2e-6
    bias_field_T: float = -0.005
    in_plane_demag: float | None = None
    mtj2_RA: float | None = None
    mtj2_TMR0: float | None = None


@dataclass(frozen=True)
class DesignDescriptor:
    kind: DesignKind = DesignKind.P_Y
    vff_pfet_W: float = 400 * NM
    vff_nfet_W: float = 290 * NM
    p2_W: float | None = None
    L: float = 40 * NM
    access_W: float = 150 * NM          # N3/N4
    n1_W: float = 600 * NM
    n2_W: float = 1500 * NM
    p1_W: float = 400 * NM
    writer_scale: float = 2.0           # master-side write drivers relative to VFF sizes
    baseline_write_W: float = 320 * NM
    baseline_degeneration: float = 300.0
    device: DeviceParams = field(default_factory=DeviceParams)
    process: ProcessParams = field(default_factory=ProcessParams)
    variation: dict | None = None       # per-element dvth / width factors for Monte-Carlo

    def __post_init__(self):
        object.__setattr__(self, "kind", DesignKind(self.kind))
        for name in ("vff_pfet_W", "vff_nfet_W", "L", "access_W", "n1_W", "n2_W", "p1_W"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive", key=name)
        if self.p2_W is not None and not self.p2_W > 0:
            raise ConfigurationError("p2_W must be positive", key="p2_W")

    @property
    def effective_p2_W(self) -> float:
        if self.p2_W is not None:
            return self.p2_W
        return 2000 * NM if self.kind is DesignKind.P_X else 1000 * NM

    def with_vff(self, pfet_W: float, nfet_W: float) -> "DesignDescriptor":
        return replace(self, vff_pfet_W=pfet_W, vff_nfet_W=nfet_W)

    def with_p2(self, width: float) -> "DesignDescriptor":
        return replace(self, p2_W=width)


@dataclass
class NvffCircuit:
    descriptor: DesignDescriptor
    netlist: Netlist
    device: NandSpinDevice
    layers: tuple[str, str]

    @property
    def kind(self) -> DesignKind:
        return self.descriptor.kind

    @property
    def vdd(self) -> float:
        return self.netlist.vdd


def build_device(d: DesignDescriptor) -> NandSpinDevice:
    dp = d.device
    overrides = {}
    if dp.in_plane_demag is not None and d.kind.device_kind is DeviceKind.I_TYPE:
        overrides["demag_field"] = dp.in_plane_demag
    return make_device(d.kind.device_kind, d.kind.geometry, RA=dp.RA, TMR0=dp.TMR0, Vh=dp.Vh,
                       P=dp.P, Lambda=dp.Lambda, eta=dp.eta, rho=dp.rho, bias_field_T=dp.bias_field_T,
                       mtj2_RA=dp.mtj2_RA, mtj2_TMR0=dp.mtj2_TMR0, layer_overrides=overrides)


class _Builder:
    """Adds transistors while applying Monte-Carlo perturbations by element name."""

    def __init__(self, net: Netlist, d: DesignDescriptor):
        self.net = net
        self.proc = d.process
        self.var = d.variation or {}

    def _sized(self, name: str, W: float) -> tuple[float, float]:
        dvth, wfac = self.var.get(name, (0.0, 1.0))
        return W * wfac, dvth

    def n(self, name, W, d, g, s):
        W, dv = self._sized(name, W)
        self.net.add_transistor(name, self.proc.nfet(W, dv), d, g, s)

    def p(self, name, W, d, g, s):
        W, dv = self._sized(name, W)
        self.net.add_transistor(name, self.proc.pfet(W, dv), d, g, s)

    def inverter(self, name, wp, wn, inp, out):
        self.p(f"{name}.p", wp, out, inp, VDD)
        self.n(f"{name}.n", wn, out, inp, GND)

    def tgate(self, name, wp, wn, a, b, n_gate, p_gate):
        self.n(f"{name}.n", wn, a, n_gate, b)
        self.p(f"{name}.p", wp, a, p_gate, b)


def _common_vff(b: _Builder, d: DesignDescriptor) -> None:
    """Master latch, write path into the slave, and the cross-coupled slave latch."""
    net = b.net
    for node, sig, inv in (("clk", "CLK", False), ("clkb", "CLK", True), ("d", "D", False),
                           ("eq", "EQ", False), ("ctrl", "CTRL", False), ("ren", "REN", False)):
        net.bind(node, SourceBinding(sig, invert=inv))
    wp, wn = d.vff_pfet_W, d.vff_nfet_W
    b.tgate("TG1", wp, wn, "d", "ma", "clkb", "clk")
    b.inverter("INV1", wp, wn, "ma", "mb")
    b.inverter("INV2", wp, wn, "mb", "mf")
    b.tgate("TG2", wp, wn, "mf", "ma", "clk", "clkb")
    ws = d.writer_scale
    b.inverter("INV3", ws * wp, ws * wn, "mb", "wt")
    b.inverter("INV4", ws * wp, ws * wn, "ma", "wc")
    b.tgate("TG3", ws * wp, ws * wn, "wt", "qt", "clk", "clkb")
    b.tgate("TG4", ws * wp, ws * wn, "wc", "qc", "clk", "clkb")
    b.p("P5", wp, "qc", "qt", VDD)
    b.p("P6", wp, "qt", "qc", VDD)
    b.p("P1", d.p1_W, "qt", "eq", "qc")


def _apply_mtj_variation(dev: NandSpinDevice, var: dict) -> NandSpinDevice:
    for k, bundle in ((1, dev.mtj1), (2, dev.mtj2)):
        ra_f, tmr_f = var.get(f"MTJ{k}", (1.0, 1.0))
        if (ra_f, tmr_f) != (1.0, 1.0):
            new = replace(bundle, mtj=MtjParams(bundle.mtj.area, bundle.mtj.RA * ra_f,
                                                bundle.mtj.TMR0 * tmr_f, bundle.mtj.Vh))
            dev = replace(dev, **{f"mtj{k}": new})
    return dev


def build_design(d: DesignDescriptor) -> NvffCircuit:
    """Netlist for a proposed NAND-SPIN flip-flop or the baseline surrogate."""
    if d.kind.is_baseline:
        return _build_baseline(d)
    net = Netlist(vdd=d.process.vdd, c_par=d.process.c_par)
    b = _Builder(net, d)
    _common_vff(b, d)
    net.bind("p2g", SourceBinding("PSL", invert=True))
    net.bind("ers", SourceBinding("ERS"))
    b.n("N5", d.vff_nfet_W, "qc", "qt", GND)
    b.n("N6", d.vff_nfet_W, "qt", "qc", GND)
    b.n("N3", d.access_W, "qt", "ctrl", "t1")
    b.n("N4", d.access_W, "qc", "ctrl", "t2")
    b.p("P2", d.effective_p2_W, "hma", "p2g", VDD)
    b.n("N2", d.n2_W, "hmb", "ers", GND)
    dev = _apply_mtj_variation(build_device(d), d.variation or {})
    net.add_nandspin("ns", dev, "hma", "hmb", "t1", "t2")
    b.n("N1", d.n1_W, "ns_mid", "ren", GND)
    return NvffCircuit(d, net, dev, ("ns.fl1", "ns.fl2"))


def _build_baseline(d: DesignDescriptor) -> NvffCircuit:
    """Slave-latch-driven SOT flip-flop with two complementary SOT-MTJs.

    The write current runs qt -> strip1 -> strip2 -> qc (or back), sourced
    and sunk by the latch inverters. Their NFETs share a source-degeneration
    resistor to ground. Strip 2 is mounted reversed so one current writes
    complementary states. Reads go through N3/N4 into the MTJ tops and out
    of the MTJ bottoms through N1A/N1B, bypassing the strips.
    """
    net = Netlist(vdd=d.process.vdd, c_par=d.process.c_par)
    b = _Builder(net, d)
    _common_vff(b, d)
    b.n("N5", d.vff_nfet_W, "qc", "qt", "nsrc")
    b.n("N6", d.vff_nfet_W, "qt", "qc", "nsrc")
    net.add_resistor("Rdeg", "nsrc", GND, d.baseline_degeneration)
    b.n("NW1", d.baseline_write_W, "qt", "ctrl", "s1")
    b.n("NW2", d.baseline_write_W, "qc", "ctrl", "s2")
    b.n("N3", d.access_W, "qt", "ren", "t1")
    b.n("N4", d.access_W, "qc", "ren", "t2")
    b.n("N1A", d.n1_W / 2, "s1", "ren", GND)
    b.n("N1B", d.n1_W / 2, "s2", "ren", GND)
    dev = _apply_mtj_variation(build_device(d), d.variation or {})
    half = dev.strip_resistance
    net.add_resistor("hm1", "s1", "hc", half)
    net.add_resistor("hm2", "s2", "hc", half)
    net.devices["ns"] = dev
    for k, (bundle, top, bottom, strip, sign) in enumerate(
            ((dev.mtj1, "t1", "s1", "hm1", 1.0), (dev.mtj2, "t2", "s2", "hm2", 1.0)), start=1):
        lname = f"ns.fl{k}"
        net.add_mtj(f"ns.mtj{k}", top, bottom, bundle.mtj, lname)
        vec = pack_layer(bundle.layer, dev.drive(bundle), strip_cross_section=dev.strip.cross_section)
        net.add_layer(FreeLayer(lname, vec, bundle.m.copy(), mtj=f"ns.mtj{k}", sot_resistor=strip,
                                sot_sign=sign))
    return NvffCircuit(d, net, dev, ("ns.fl1", "ns.fl2"))
