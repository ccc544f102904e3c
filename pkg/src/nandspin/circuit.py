"""Transient nodal simulation of transistor/MTJ/strip netlists coupled to LLG.

Each time step freezes the MTJ conductances, solves KCL with backward-Euler
node capacitors by damped Newton, extracts MTJ and strip currents and then
advances every free layer by one RK4 step with the same ``dt``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from nandspin import kernels
from nandspin.devices import MtjParams, TransistorParams
from nandspin.errors import ConfigurationError, NandSpinError
from nandspin.layout import (MONITOR_MAGNETIZATION, MONITOR_NONE, MONITOR_SEPARATION, N_PAR, P_EASY,
                             P_MP, P_SOTSIGN, CompiledCircuit)
from nandspin.nand_spin import NandSpinDevice

GND = "gnd"
VDD = "vdd"
CONTROL_SIGNALS = ("EQ", "CTRL", "REN", "PSL", "ERS", "CLK", "D", "POWER")


@dataclass
class Transistor:
    name: str
    params: TransistorParams
    drain: str
    gate: str
    source: str


@dataclass
class Resistor:
    name: str
    a: str
    b: str
    R: float


@dataclass
class MtjElement:
    """Tunnel junction between ``top`` (pinned side) and ``bottom`` (free side)."""

    name: str
    top: str
    bottom: str
    params: MtjParams
    layer: str


@dataclass
class FreeLayer:
    """A magnetic layer: its STT current comes from ``mtj`` and its SOT
    current from resistor ``sot_resistor`` (times ``sot_sign``)."""

    name: str
    vector: np.ndarray
    m0: np.ndarray
    mtj: str | None = None
    sot_resistor: str | None = None
    sot_sign: float = 1.0


@dataclass
class SourceBinding:
    signal: str
    invert: bool = False
    level: float | None = None   # fixed voltage instead of a schedule signal


class Netlist:
    """Named nodes plus elements. Nodes bound to a source are driven, the rest are solved."""

    def __init__(self, vdd: float = 1.1, c_par: float = 1e-15, bleed: float | None = 1e9):
        self.vdd = vdd
        self.c_par = c_par
        self.bleed = bleed
        self.nodes: list[str] = []
        self.sources: dict[str, SourceBinding] = {}
        self.transistors: list[Transistor] = []
        self.resistors: list[Resistor] = []
        self.mtjs: list[MtjElement] = []
        self.layers: list[FreeLayer] = []
        self.extra_caps: dict[str, float] = {}
        self.devices: dict[str, NandSpinDevice] = {}
        self.bind(GND, SourceBinding("", level=0.0))
        self.bind(VDD, SourceBinding("POWER"))

    def node(self, name: str) -> str:
        if name not in self.nodes:
            self.nodes.append(name)
        return name

    def bind(self, node: str, binding: SourceBinding) -> None:
        self.node(node)
        self.sources[node] = binding

    def add_transistor(self, name, params: TransistorParams, drain, gate, source) -> Transistor:
        t = Transistor(name, params, self.node(drain), self.node(gate), self.node(source))
        self.transistors.append(t)
        return t

    def add_resistor(self, name, a, b, R: float) -> Resistor:
        if not R > 0:
            raise ConfigurationError(f"resistor {name} needs R > 0")
        r = Resistor(name, self.node(a), self.node(b), float(R))
        self.resistors.append(r)
        return r

    def add_capacitor(self, node: str, C: float) -> None:
        self.extra_caps[self.node(node)] = self.extra_caps.get(node, 0.0) + C

    def add_mtj(self, name, top, bottom, params: MtjParams, layer: str) -> MtjElement:
        e = MtjElement(name, self.node(top), self.node(bottom), params, layer)
        self.mtjs.append(e)
        return e

    def add_layer(self, layer: FreeLayer) -> FreeLayer:
        self.layers.append(layer)
        return layer

    def add_nandspin(self, name: str, dev: NandSpinDevice, end_a: str, end_b: str,
                     top1: str, top2: str) -> None:
        """Strip split at its midpoint, both MTJ free sides on the midpoint.

        Only the ``mid -> end_b`` half drives SOT: that is the erase path, so
        the program current entering from ``end_a`` acts through STT alone.
        """
        mid = self.node(f"{name}_mid")
        half = dev.strip_resistance / 2.0
        self.add_resistor(f"{name}.hm_a", end_a, mid, half)
        self.add_resistor(f"{name}.hm_b", mid, end_b, half)
        self.devices[name] = dev
        for k, (bundle, top) in enumerate(((dev.mtj1, top1), (dev.mtj2, top2)), start=1):
            lname = f"{name}.fl{k}"
            self.add_mtj(f"{name}.mtj{k}", top, mid, bundle.mtj, lname)
            self.add_layer(FreeLayer(lname, dev.layer_vector(bundle), bundle.m.copy(),
                                     mtj=f"{name}.mtj{k}", sot_resistor=f"{name}.hm_b", sot_sign=1.0))

    def layer_index(self, name: str) -> int:
        return [l.name for l in self.layers].index(name)

    def free_nodes(self) -> list[str]:
        return [n for n in self.nodes if n not in self.sources]

    def validate(self) -> None:
        names = set(self.nodes)
        for t in self.transistors:
            for n in (t.drain, t.gate, t.source):
                if n not in names:
                    raise ConfigurationError(f"{t.name} binds unknown node {n}")
        mtj_names = {m.name for m in self.mtjs}
        res_names = {r.name for r in self.resistors}
        for l in self.layers:
            if l.mtj is not None and l.mtj not in mtj_names:
                raise ConfigurationError(f"layer {l.name} references unknown MTJ {l.mtj}")
            if l.sot_resistor is not None and l.sot_resistor not in res_names:
                raise ConfigurationError(f"layer {l.name} references unknown strip {l.sot_resistor}")

    def node_capacitances(self) -> dict[str, float]:
        caps = {n: self.c_par for n in self.free_nodes()}
        for t in self.transistors:
            if t.gate in caps:
                caps[t.gate] += t.params.gate_capacitance
        for n, c in self.extra_caps.items():
            if n in caps:
                caps[n] += c
        return caps


@dataclass
class ControlSchedule:
    """Piecewise-constant logic levels (0..1) per signal with linear ramps of ``slew``."""

    slew: float = 10e-12
    timelines: dict = field(default_factory=dict)

    def set(self, signal: str, t: float, level: float) -> "ControlSchedule":
        tl = self.timelines.setdefault(signal, [])
        tl.append((float(t), float(level)))
        tl.sort(key=lambda p: p[0])
        return self

    def initial(self, signal: str, level: float) -> "ControlSchedule":
        return self.set(signal, -np.inf, level)

    def level(self, signal: str, t: float) -> float:
        times, vals = self.waveform(signal)
        return float(np.interp(t, times, vals))

    def transitions(self, signal: str) -> list[tuple[float, float]]:
        return [p for p in self.timelines.get(signal, []) if np.isfinite(p[0])]

    def waveform(self, signal: str) -> tuple[np.ndarray, np.ndarray]:
        tl = self.timelines.get(signal, [])
        if not tl:
            return np.array([0.0]), np.array([0.0])
        start = tl[0][1]
        times, vals = [], []
        cur = start
        for t, lvl in tl:
            if not np.isfinite(t):
                cur = lvl
                continue
            if lvl == cur:
                continue
            times += [t, t + self.slew]
            vals += [cur, lvl]
            cur = lvl
        if not times:
            return np.array([0.0]), np.array([cur])
        return np.array(times), np.array(vals)

    def crossing(self, signal: str, after: float = -np.inf, rising: bool = True) -> float | None:
        """Time of the 50 % point of the first matching edge after ``after``."""
        prev = None
        for t, lvl in self.timelines.get(signal, []):
            if prev is not None and np.isfinite(t) and t >= after and (lvl > prev) == rising and lvl != prev:
                return t + 0.5 * self.slew
            prev = lvl
        return None


@dataclass
class CircuitState:
    time: float
    node_names: list
    voltages: np.ndarray
    layer_names: list
    magnetizations: np.ndarray

    def v(self, node: str) -> float:
        return float(self.voltages[self.node_names.index(node)])

    def m(self, layer: str) -> np.ndarray:
        return self.magnetizations[self.layer_names.index(layer)]


@dataclass
class StopMonitor:
    """Early stop once a condition has held for ``hold`` seconds (and t >= t_min).

    ``kind='magnetization'``: every listed layer has ``sign * m.easy >= threshold``.
    ``kind='separation'``: ``|V(a) - V(b)| >= threshold``.
    """

    kind: str
    targets: Sequence[str]
    signs: Sequence[float] = ()
    threshold: float = 0.9
    hold: float = 0.0
    t_min: float = 0.0


@dataclass
class SolverSettings:
    abstol: float = 1e-12
    maxiter: int = 60
    max_halvings: int = 6
    dv_limit: float = 0.3


@dataclass
class Trace:
    t: np.ndarray
    v: np.ndarray
    m: np.ndarray
    i_mtj: np.ndarray
    i_sot: np.ndarray
    p_supply: np.ndarray
    e_cum: np.ndarray
    node_names: list
    layer_names: list
    mtj_names: list
    easy_axes: np.ndarray
    signs: np.ndarray                    # +1 where m_p is along +easy
    vdd: float
    event: float | None = None
    stopped: bool = False
    newton_iters: int = 0
    annotations: dict = field(default_factory=dict)
    schedule: ControlSchedule | None = None

    def voltage(self, node: str) -> np.ndarray:
        return self.v[:, self.node_names.index(node)]

    def projection(self, layer) -> np.ndarray:
        """Easy-axis projection of a layer, +1 meaning parallel to its pinned layer."""
        k = layer if isinstance(layer, int) else self.layer_names.index(layer)
        return (self.m[:, k, :] @ self.easy_axes[k]) * self.signs[k]

    def final_state(self) -> CircuitState:
        return CircuitState(float(self.t[-1]), list(self.node_names), self.v[-1].copy(),
                            list(self.layer_names), self.m[-1].copy())

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])


def compile_netlist(net: Netlist, sched: ControlSchedule) -> CompiledCircuit:
    net.validate()
    free = net.free_nodes()
    srcs = [n for n in net.nodes if n in net.sources]
    order = free + srcs
    idx = {n: i for i, n in enumerate(order)}
    res = list(net.resistors)
    if net.bleed:
        res += [Resistor(f"bleed.{n}", n, GND, net.bleed) for n in free]
    caps = net.node_capacitances()
    ptr, ts, vs = [0], [], []
    for n in srcs:
        b = net.sources[n]
        if b.level is not None:
            t, v = np.array([0.0]), np.array([b.level])
        else:
            t, v = sched.waveform(b.signal)
            v = 1.0 - v if b.invert else v
            v = v * net.vdd
        ts.extend(t.tolist())
        vs.extend(v.tolist())
        ptr.append(len(ts))
    mtj_idx = {m.name: i for i, m in enumerate(net.mtjs)}
    res_idx = {r.name: i for i, r in enumerate(res)}
    layer_idx = {l.name: i for i, l in enumerate(net.layers)}
    ly_par = np.zeros((len(net.layers), N_PAR))
    for i, l in enumerate(net.layers):
        ly_par[i] = l.vector
        ly_par[i, P_SOTSIGN] = l.sot_sign
    i32 = lambda xs: np.ascontiguousarray(xs, dtype=np.int32)
    f64 = lambda xs: np.ascontiguousarray(xs, dtype=np.float64)
    tr = net.transistors
    return CompiledCircuit(
        n_free=len(free), n_nodes=len(order), node_names=order,
        tr_type=i32([t.params.polarity.sign for t in tr]),
        tr_d=i32([idx[t.drain] for t in tr]), tr_g=i32([idx[t.gate] for t in tr]),
        tr_s=i32([idx[t.source] for t in tr]),
        tr_beta=f64([t.params.beta for t in tr]), tr_vth=f64([t.params.vth_magnitude for t in tr]),
        tr_alpha=f64([t.params.alpha_sat for t in tr]), tr_lam=f64([t.params.lambda_ch for t in tr]),
        r_a=i32([idx[r.a] for r in res]), r_b=i32([idx[r.b] for r in res]),
        r_g=f64([1.0 / r.R for r in res]),
        mj_top=i32([idx[m.top] for m in net.mtjs]), mj_bot=i32([idx[m.bottom] for m in net.mtjs]),
        mj_layer=i32([layer_idx[m.layer] for m in net.mtjs]),
        mj_gp=f64([m.params.G_P for m in net.mtjs]), mj_tmr=f64([m.params.TMR0 for m in net.mtjs]),
        mj_vh=f64([m.params.Vh for m in net.mtjs]),
        cap=f64([caps[n] for n in free]),
        src_ptr=i32(ptr), src_t=f64(ts), src_v=f64(vs),
        ly_mtj=i32([mtj_idx[l.mtj] if l.mtj else -1 for l in net.layers]),
        ly_res=i32([res_idx[l.sot_resistor] if l.sot_resistor else -1 for l in net.layers]),
        ly_par=np.ascontiguousarray(ly_par),
        supply=idx[VDD],
    )


def _initial_vectors(net: Netlist, cc: CompiledCircuit, initial: CircuitState | None,
                     guess: dict | None) -> tuple[np.ndarray, np.ndarray]:
    v0 = np.zeros(cc.n_nodes)
    m0 = np.array([l.m0 for l in net.layers], dtype=float).reshape(-1, 3)
    if initial is not None:
        for i, n in enumerate(cc.node_names):
            if n in initial.node_names:
                v0[i] = initial.v(n)
        for i, l in enumerate(net.layers):
            if l.name in initial.layer_names:
                m0[i] = initial.m(l.name)
    if guess:
        for i, n in enumerate(cc.node_names):
            if n in guess:
                v0[i] = guess[n]
    return np.ascontiguousarray(v0), np.ascontiguousarray(m0 if m0.size else np.zeros((0, 3)))


def dc_solve(net: Netlist, sched: ControlSchedule, t: float = 0.0, guess: dict | None = None,
             initial: CircuitState | None = None, settings: SolverSettings | None = None) -> CircuitState:
    """Operating point with capacitors open, seeded from ``guess`` / ``initial``."""
    s = settings or SolverSettings()
    cc = compile_netlist(net, sched)
    v0, m0 = _initial_vectors(net, cc, initial, guess)
    v = kernels.dc_operating_point(cc, v0, m0, t, s.abstol, 200, s.dv_limit)
    return CircuitState(t, list(cc.node_names), v, [l.name for l in net.layers], m0.copy())


def _monitor_arrays(net: Netlist, cc: CompiledCircuit, mon: StopMonitor | None):
    if mon is None:
        return MONITOR_NONE, np.zeros(1, np.int32), np.zeros(1), 0.0, 0.0, 0.0
    if mon.kind == "magnetization":
        idx = [net.layer_index(l) for l in mon.targets]
        signs = []
        for k, sg in zip(idx, mon.signs or [1.0] * len(idx)):
            # monitor signs are relative to m_p; convert to the easy-axis frame
            easy = net.layers[k].vector[P_EASY]
            m_p = net.layers[k].vector[P_MP]
            signs.append(sg * float(np.sign(easy @ m_p)))
        return (MONITOR_MAGNETIZATION, np.ascontiguousarray(idx, dtype=np.int32),
                np.ascontiguousarray(signs, dtype=float), mon.threshold, mon.hold, mon.t_min)
    if mon.kind == "separation":
        idx = [cc.node_names.index(n) for n in mon.targets]
        return (MONITOR_SEPARATION, np.ascontiguousarray(idx, dtype=np.int32), np.ones(2),
                mon.threshold, mon.hold, mon.t_min)
    raise ConfigurationError(f"unknown monitor kind {mon.kind!r}")


def transient_solve(net: Netlist, sched: ControlSchedule, t_stop: float, dt: float = 1e-12,
                    initial: CircuitState | None = None, t_start: float = 0.0, decimation: int = 1,
                    monitor: StopMonitor | None = None, guess: dict | None = None,
                    settings: SolverSettings | None = None, dc_start: bool = False) -> Trace:
    """Run from ``t_start`` to ``t_stop``; see module docstring for the step recipe.

    Initial node voltages come from ``initial`` (a previous ``CircuitState``)
    overlaid with ``guess``; with ``dc_start`` they are first relaxed to the
    operating point at ``t_start``.
    """
    if not 0 < dt <= 2e-12:
        raise ConfigurationError("dt must lie in (0, 2 ps]", key="dt")
    s = settings or SolverSettings()
    cc = compile_netlist(net, sched)
    v0, m0 = _initial_vectors(net, cc, initial, guess)
    if dc_start:
        v0 = np.ascontiguousarray(kernels.dc_operating_point(cc, v0, m0, t_start, s.abstol, 200, s.dv_limit))
    nsteps = int(round((t_stop - t_start) / dt))
    mk, midx, msign, mthr, mhold, mtmin = _monitor_arrays(net, cc, monitor)
    out = kernels.transient(cc, v0, m0, t_start, dt, nsteps, max(1, int(decimation)), mk, midx,
                            msign, mthr, mhold, mtmin, s.abstol, s.maxiter, s.max_halvings, s.dv_limit)
    easy = np.array([l.vector[P_EASY] for l in net.layers]).reshape(-1, 3)
    signs = np.array([np.sign(l.vector[P_EASY] @ l.vector[P_MP]) for l in net.layers])
    return Trace(out["t"], out["v"], out["m"], out["i_mtj"], out["i_sot"], out["p_supply"],
                 out["e_cum"], list(cc.node_names), [l.name for l in net.layers],
                 [m.name for m in net.mtjs], easy, signs, net.vdd, out["event"], out["stopped"],
                 int(out["newton_iters"]), schedule=sched)


def measure_energy(trace: Trace, window: tuple[float, float]) -> float:
    """Supply energy over ``window`` in J (trapezoidal integral of V_dd I_dd)."""
    t0, t1 = window
    if t0 < trace.t[0] - 1e-18 or t1 > trace.t[-1] + 1e-18 or t1 < t0:
        raise ConfigurationError("energy window must lie inside the trace")
    return float(np.interp(t1, trace.t, trace.e_cum) - np.interp(t0, trace.t, trace.e_cum))


def measure_delay(trace: Trace, event: str) -> float | None:
    """Delay of ``event`` in s, or ``None`` when it never completes.

    backup: CTRL 50 % rise to the settled switch of the programmed layer.
    restore: REN 50 % rise to |V(QT) - V(QC)| >= 0.9 Vdd.
    erase: pulse start to both layers settled antiparallel.
    """
    from nandspin.llg import settled_crossing

    ann = trace.annotations
    if event == "backup":
        layer = ann.get("programmed_layer")
        if layer is None:
            return None
        t_sw = settled_crossing(trace.t, trace.projection(layer), +1.0)
        return None if t_sw is None else t_sw - ann["ctrl_rise"]
    if event == "restore":
        sep = np.abs(trace.voltage(ann.get("qt", "qt")) - trace.voltage(ann.get("qc", "qc")))
        t_sep = settled_crossing(trace.t, sep, +1.0, threshold=0.9 * trace.vdd)
        return None if t_sep is None else t_sep - ann["ren_rise"]
    if event == "erase":
        start = ann.get("erase_start")
        if start is None:
            return None
        times = []
        for layer in ann.get("erase_layers", range(len(trace.layer_names))):
            t_sw = settled_crossing(trace.t, trace.projection(layer), -1.0)
            if t_sw is None:
                return None
            times.append(t_sw)
        return max(max(times) - start, 0.0)
    raise NandSpinError(f"unknown event {event!r}")
