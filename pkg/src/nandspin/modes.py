"""Operating modes of the flip-flop and the protocol that chains them.

Each mode builds its own control schedule on a local time axis starting at
0, runs ``transient_solve`` from the previous mode's final state and
reports delay, energy and correctness.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from nandspin.circuit import (CircuitState, ControlSchedule, SolverSettings, StopMonitor, Trace,
                              dc_solve, measure_delay, measure_energy, transient_solve)
from nandspin.designs import DesignKind, NvffCircuit
from nandspin.errors import SequencingError
from nandspin.llg import settled_crossing, thermal_tilt
from nandspin.nand_spin import DeviceKind, StoredBit, decode_state

NS = 1e-9
PS = 1e-12
SETTLED_PROJECTION = 0.9


class Mode(str, enum.Enum):
    ACTIVE = "active_with_erase"
    BACKUP = "backup"
    STANDBY = "standby"
    RESTORE = "restore"


def default_erase_width(kind: DesignKind) -> float:
    """SOT erase pulse long enough to erase from every initial state with margin."""
    if kind.device_kind is DeviceKind.P_TYPE:
        return 0.3 * NS
    return 1.0 * NS if kind is DesignKind.I_Y else 0.6 * NS


@dataclass(frozen=True)
class ModeTiming:
    dt: float = 1 * PS
    decimation: int = 1
    slew: float = 10 * PS
    clk_rise: float = 0.05 * NS
    clk_width: float = 0.3 * NS
    erase_start: float = 0.5 * NS
    erase_width: float | None = None
    erase_relax: float = 3.5 * NS
    backup_start: float = 0.05 * NS
    backup_timeout: float = 10 * NS
    backup_hold: float = 0.2 * NS
    standby: float = 10 * NS
    restore_eq_hold: float = 0.55 * NS
    restore_sense: float = 0.05 * NS
    restore_timeout: float = 5 * NS
    restore_hold: float = 0.2 * NS
    restore_offset: float = 0.0

    def erase_width_for(self, kind: DesignKind) -> float:
        return self.erase_width if self.erase_width is not None else default_erase_width(kind)


@dataclass
class ModeResult:
    mode: Mode
    trace: Trace
    state: CircuitState
    delay: float | None = None
    energy: float | None = None
    ok: bool = True
    details: dict = field(default_factory=dict)


def _base_schedule(t: ModeTiming, power: float, eq: float, data: int) -> ControlSchedule:
    s = ControlSchedule(slew=t.slew)
    for sig, lvl in (("POWER", power), ("EQ", eq), ("CTRL", 0), ("REN", 0), ("PSL", 0), ("ERS", 0),
                     ("CLK", 0), ("D", data)):
        s.initial(sig, lvl)
    return s


def latched_bit(state: CircuitState) -> int:
    return int(state.v("qt") > state.v("qc"))


def decode_layers(circuit: NvffCircuit, state: CircuitState) -> StoredBit:
    """Stored bit from the magnetizations in a circuit state."""
    dev = circuit.device.with_magnetizations(state.m(circuit.layers[0]), state.m(circuit.layers[1]))
    return decode_state(dev)


class NvffSession:
    """Stateful protocol runner: active -> backup -> standby -> restore -> active ..."""

    _allowed_after = {
        Mode.ACTIVE: {None, Mode.RESTORE, Mode.ACTIVE},
        Mode.BACKUP: {Mode.ACTIVE},
        Mode.STANDBY: {Mode.BACKUP, Mode.ACTIVE},
        Mode.RESTORE: {Mode.STANDBY},
    }

    def __init__(self, circuit: NvffCircuit, timing: ModeTiming | None = None,
                 settings: SolverSettings | None = None, initial_bit: StoredBit | None = None):
        self.circuit = circuit
        self.timing = timing or ModeTiming()
        self.settings = settings or SolverSettings()
        self.state: CircuitState | None = None
        self.last_mode: Mode | None = None
        self.initial_bit = initial_bit
        self.history: list[ModeResult] = []

    # -- helpers -----------------------------------------------------------------
    def _initial_magnetizations(self, data: int) -> dict:
        """Power-on MTJ states; by default the complement of the first data bit."""
        dev = self.circuit.device
        b = self.initial_bit if self.initial_bit is not None else StoredBit.from_int(1 - data)
        m1 = dev.mtj1.m_p if b is StoredBit.BIT0 else -dev.mtj1.m_p
        m2 = dev.mtj2.m_p if b is StoredBit.BIT1 else -dev.mtj2.m_p
        return {self.circuit.layers[0]: m1, self.circuit.layers[1]: m2}

    def _thermalized(self, state: CircuitState) -> CircuitState:
        """Put every settled layer at the thermal cone around its easy direction.

        Resetting to one canonical tilt (rather than keeping whatever small
        residual angle the previous mode left) makes mode results independent
        of the previous mode's ring-down.
        """
        mags = state.magnetizations.copy()
        dev = self.circuit.device
        bundles = dict(zip(self.circuit.layers, dev.bundles()))
        # lean into the plane of the bias field, where the static equilibrium already tilts
        lean = dev.bias_field if np.linalg.norm(dev.bias_field) > 0 else None
        for i, name in enumerate(state.layer_names):
            if name not in bundles:
                continue
            layer = bundles[name].layer
            proj = float(mags[i] @ layer.easy)
            if abs(proj) >= SETTLED_PROJECTION:
                mags[i] = thermal_tilt(np.sign(proj) * layer.easy, layer, lean)
            else:
                mags[i] = thermal_tilt(mags[i], layer)
        return replace(state, magnetizations=mags)

    def _run(self, sched, t_stop, state, monitor=None, guess=None, dc_start=False) -> Trace:
        t = self.timing
        return transient_solve(self.circuit.netlist, sched, t_stop, dt=t.dt, initial=state,
                               decimation=t.decimation, monitor=monitor, guess=guess,
                               settings=self.settings, dc_start=dc_start)

    def _check_order(self, mode: Mode) -> None:
        if self.last_mode not in self._allowed_after[mode]:
            raise SequencingError(f"{mode.value} cannot follow {self.last_mode and self.last_mode.value}")

    # -- modes -------------------------------------------------------------------
    def run(self, mode: Mode | str, data: int | None = None) -> ModeResult:
        mode = Mode(mode)
        self._check_order(mode)
        handler = {Mode.ACTIVE: self._active, Mode.BACKUP: self._backup,
                   Mode.STANDBY: self._standby, Mode.RESTORE: self._restore}[mode]
        result = handler(0 if data is None else int(data))
        self.state = result.state
        self.last_mode = mode
        self.history.append(result)
        return result

    def _active(self, data: int) -> ModeResult:
        t = self.timing
        kind = self.circuit.kind
        vdd = self.circuit.vdd
        sched = _base_schedule(t, 1, 1, data)
        sched.set("CLK", t.clk_rise, 1).set("CLK", t.clk_rise + t.clk_width, 0)
        width = t.erase_width_for(kind)
        erase = not kind.is_baseline
        if erase:
            sched.set("PSL", t.erase_start, 1).set("PSL", t.erase_start + width, 0)
            sched.set("ERS", t.erase_start, 1).set("ERS", t.erase_start + width, 0)
        t_stop = t.erase_start + width + t.erase_relax
        if self.state is None:
            # power-up state holding the opposite value so the clock edge must write
            guess = {"qt": 0.0 if data else vdd, "qc": vdd if data else 0.0,
                     "ma": vdd * data, "mb": vdd * (1 - data), "mf": vdd * data,
                     "wt": vdd * data, "wc": vdd * (1 - data)}
            start = dc_solve(self.circuit.netlist, sched, 0.0, guess=guess, settings=self.settings)
            mags = self._initial_magnetizations(data)
            start = replace(start, magnetizations=np.array([mags[n] for n in start.layer_names]))
        else:
            start = self.state
        start = self._thermalized(start)
        trace = self._run(sched, t_stop, start)
        trace.annotations.update(erase_start=t.erase_start + 0.5 * t.slew, erase_layers=[0, 1])
        state = trace.final_state()
        stored = decode_layers(self.circuit, state)
        latched = latched_bit(state)
        details = {"latched": latched, "stored": stored.value}
        res = ModeResult(Mode.ACTIVE, trace, state, details=details)
        if erase:
            res.delay = measure_delay(trace, "erase")
            res.energy = measure_energy(trace, (t.erase_start, min(t.erase_start + width + t.slew, trace.t[-1])))
            res.ok = stored is StoredBit.ERASED and latched == data and res.delay is not None
        else:
            res.ok = latched == data
        return res

    def _backup(self, data: int) -> ModeResult:
        t = self.timing
        latched = latched_bit(self.state)
        sched = _base_schedule(t, 1, 1, latched)
        sched.set("CTRL", t.backup_start, 1)
        if not self.circuit.kind.is_baseline:
            sched.set("PSL", t.backup_start, 1)
        ctrl_rise = sched.crossing("CTRL", rising=True)
        if self.circuit.kind.is_baseline:
            # bidirectional SOT writes both layers; watch both
            targets = list(self.circuit.layers)
            signs = [1.0 if latched == 0 else -1.0, 1.0 if latched == 1 else -1.0]
            programmed = 1 if latched == 1 else 0
        else:
            programmed = 1 if latched == 1 else 0
            targets = [self.circuit.layers[programmed]]
            signs = [1.0]
        mon = StopMonitor("magnetization", targets, signs, threshold=0.9, hold=t.backup_hold)
        erased_before = decode_layers(self.circuit, self.state) is StoredBit.ERASED
        start = self._thermalized(self.state)
        trace = self._run(sched, t.backup_start + t.backup_timeout, start, monitor=mon)
        trace.annotations.update(ctrl_rise=ctrl_rise, programmed_layer=programmed)
        state = trace.final_state()
        res = ModeResult(Mode.BACKUP, trace, state)
        delay = measure_delay(trace, "backup")
        if self.circuit.kind.is_baseline and delay is not None:
            other = settled_other(trace, 1 - programmed, -1.0)
            delay = None if other is None else max(delay, other - ctrl_rise)
        if delay is not None and delay <= 0:
            delay = None       # the layer was already parallel: nothing was programmed
        res.delay = delay
        expected = StoredBit.from_int(latched)
        stored = decode_layers(self.circuit, state)
        res.ok = delay is not None and stored is expected and (erased_before or self.circuit.kind.is_baseline)
        t_end = ctrl_rise + delay if delay is not None else trace.t[-1]
        res.energy = measure_energy(trace, (ctrl_rise, t_end))
        window = (trace.t >= ctrl_rise) & (trace.t <= t_end)
        if self.circuit.kind.is_baseline:
            write_current = np.abs(trace.i_sot[:, programmed])      # bidirectional SOT write
        else:
            write_current = trace.i_mtj[:, trace.mtj_names.index(f"ns.mtj{programmed + 1}")]
        res.details = {
            "latched": latched, "stored": stored.value, "programmed_layer": programmed,
            "erased_before": erased_before,
            "iw": float(np.mean(write_current[window])) if window.any() else 0.0,
            "qt": float(np.mean(trace.voltage("qt")[window])) if window.any() else float(state.v("qt")),
            "qc": float(np.mean(trace.voltage("qc")[window])) if window.any() else float(state.v("qc")),
        }
        return res

    def _standby(self, data: int) -> ModeResult:
        t = self.timing
        sched = _base_schedule(t, 1, 0, 0)
        sched.set("POWER", 0.0, 0)
        trace = self._run(sched, t.standby, self.state)
        state = trace.final_state()
        res = ModeResult(Mode.STANDBY, trace, state)
        res.energy = measure_energy(trace, (t.slew, trace.t[-1]))
        res.details = {"stored": decode_layers(self.circuit, state).value}
        return res

    def _restore(self, data: int) -> ModeResult:
        t = self.timing
        vdd = self.circuit.vdd
        stored_before = decode_layers(self.circuit, self.state)
        sched = _base_schedule(t, 0, 0, 0)
        sched.set("POWER", 0.0, 1).set("REN", 0.0, 1).set("CTRL", 0.0, 1)
        sched.set("EQ", t.restore_eq_hold, 1)
        # the read path loads the latch; release it once the latch has tipped
        t_release = t.restore_eq_hold + t.restore_sense
        sched.set("REN", t_release, 0).set("CTRL", t_release, 0)
        ren_rise = sched.crossing("REN", rising=True)
        mon = StopMonitor("separation", ["qt", "qc"], threshold=0.9 * vdd, hold=t.restore_hold,
                          t_min=t.restore_eq_hold)
        t_stop = t.restore_eq_hold + t.restore_timeout
        if t.restore_offset != 0.0:
            first = self._run(sched, t.restore_eq_hold, self.state)
            mid = first.final_state()
            v = mid.voltages.copy()
            v[mid.node_names.index("qt")] += t.restore_offset
            second = transient_solve(self.circuit.netlist, sched, t_stop, dt=t.dt, initial=replace(mid, voltages=v),
                                     t_start=t.restore_eq_hold, decimation=t.decimation, monitor=mon,
                                     settings=self.settings)
            trace = concat_traces([first, second], shift=False)
        else:
            trace = self._run(sched, t_stop, self.state, monitor=mon)
        trace.annotations.update(ren_rise=ren_rise, qt="qt", qc="qc")
        state = trace.final_state()
        res = ModeResult(Mode.RESTORE, trace, state)
        res.delay = measure_delay(trace, "restore")
        t_end = ren_rise + res.delay if res.delay is not None else trace.t[-1]
        res.energy = measure_energy(trace, (ren_rise, t_end))
        disturb = max(float(np.max(np.abs(trace.projection(k) - trace.projection(k)[0]))) for k in range(2))
        restored = latched_bit(state)
        valid = stored_before in (StoredBit.BIT0, StoredBit.BIT1) and res.delay is not None
        res.ok = valid and restored == int(stored_before is StoredBit.BIT1)
        res.details = {"restored": restored if valid else None, "stored": stored_before.value,
                       "read_disturb": disturb, "valid": valid}
        return res


def settled_other(trace: Trace, layer: int, sign: float) -> float | None:
    return settled_crossing(trace.t, sign * trace.projection(layer), 1.0)


def concat_traces(traces: list[Trace], shift: bool = True) -> Trace:
    """Join traces end to end; with ``shift`` each starts where the previous one ended."""
    offset = 0.0
    parts = {k: [] for k in ("t", "v", "m", "i_mtj", "i_sot", "p_supply", "e_cum")}
    energy = 0.0
    for i, tr in enumerate(traces):
        sl = slice(0, None) if i == 0 else slice(1, None)
        base = offset - tr.t[0] if shift else 0.0
        parts["t"].append(tr.t[sl] + base)
        for k in ("v", "m", "i_mtj", "i_sot", "p_supply"):
            parts[k].append(getattr(tr, k)[sl])
        parts["e_cum"].append(tr.e_cum[sl] - tr.e_cum[0] + energy)
        energy += tr.e_cum[-1] - tr.e_cum[0]
        offset = tr.t[-1] + base
    first = traces[0]
    out = Trace(*(np.concatenate(parts[k]) for k in ("t", "v", "m", "i_mtj", "i_sot", "p_supply", "e_cum")),
                node_names=first.node_names, layer_names=first.layer_names, mtj_names=first.mtj_names,
                easy_axes=first.easy_axes, signs=first.signs, vdd=first.vdd,
                event=traces[-1].event, stopped=traces[-1].stopped,
                newton_iters=sum(tr.newton_iters for tr in traces))
    return out


def run_mode(session: NvffSession, mode: Mode | str, data: int | None = None) -> tuple[Trace, CircuitState]:
    """Functional front end: run one mode on a session, return (trace, new state)."""
    res = session.run(mode, data)
    return res.trace, res.state
