"""Experiment harness: full cycles, design comparison, sweeps, Monte-Carlo, calibration."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from nandspin.circuit import SolverSettings, Trace
from nandspin.designs import (PROPOSED_KINDS, DesignDescriptor, DesignKind, ProcessParams, build_design)
from nandspin.errors import ConfigurationError, SolverError
from nandspin.llg import simulate_switching, thermal_tilt
from nandspin.modes import Mode, ModeResult, ModeTiming, NvffSession, concat_traces, default_erase_width
from nandspin.nand_spin import DeviceKind, MtjState, StoredBit, decode_state, erase_pulse, make_device

NM = 1e-9
# Backup-only studies (sweeps, Monte-Carlo, calibration) erase with a long
# pulse so that weak P2 sizes still start from a cleanly erased device.
BACKUP_STUDY_TIMING = ModeTiming(erase_width=3e-9)
OPERATIONS = ("erase", "backup", "restore")


@dataclass
class OperationMetrics:
    design: str
    operation: str
    delay: float | None
    energy: float | None
    passed: bool


@dataclass
class CycleReport:
    """Delay/energy of one active -> backup -> standby -> restore cycle."""

    design: str
    data: int
    metrics: list[OperationMetrics]
    results: dict = field(default_factory=dict)      # Mode -> ModeResult
    error: str | None = None
    error_time: float | None = None     # time of the Newton failure, if any

    @property
    def ok(self) -> bool:
        return self.error is None and all(m.passed for m in self.metrics)

    def metric(self, operation: str) -> OperationMetrics | None:
        return next((m for m in self.metrics if m.operation == operation), None)

    def trace(self) -> Trace:
        """Whole cycle on one time axis."""
        return concat_traces([self.results[m].trace for m in Mode if m in self.results])


def full_cycle(d: DesignDescriptor, data: int = 1, timing: ModeTiming | None = None,
               settings: SolverSettings | None = None, keep_traces: bool = True) -> CycleReport:
    """Run every mode in order; a failed stage is flagged and later stages still run."""
    session = NvffSession(build_design(d), timing, settings)
    name = d.kind.value
    results: dict = {}
    metrics: list[OperationMetrics] = []
    error = error_time = None
    for mode in Mode:
        try:
            results[mode] = session.run(mode, data)
        except SolverError as exc:
            error, error_time = f"{mode.value}: {exc}", exc.time
            break
    act, bak, rst = (results.get(m) for m in (Mode.ACTIVE, Mode.BACKUP, Mode.RESTORE))
    if not d.kind.is_baseline:
        metrics.append(_metric(name, "erase", act))
    metrics.append(_metric(name, "backup", bak))
    metrics.append(_metric(name, "restore", rst))
    if not keep_traces:
        for r in results.values():
            r.trace = None
    return CycleReport(name, int(data), metrics, results, error, error_time)


def _metric(design: str, op: str, res: ModeResult | None) -> OperationMetrics:
    if res is None:
        return OperationMetrics(design, op, None, None, False)
    return OperationMetrics(design, op, res.delay, res.energy, bool(res.ok and res.delay is not None))


def _cycle_job(args):
    d, data, timing, settings = args
    return full_cycle(d, data, timing, settings, keep_traces=False)


def _pool_map(fn, jobs: list, workers: int | None):
    workers = workers if workers is not None else (os.cpu_count() or 1)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))       # map keeps submission order


def compare_designs(designs: list[DesignDescriptor] | None = None, data: int = 1,
                    timing: ModeTiming | None = None, workers: int | None = 1,
                    settings: SolverSettings | None = None) -> list[CycleReport]:
    designs = designs or [DesignDescriptor(kind=k) for k in PROPOSED_KINDS]
    if not designs:
        raise ConfigurationError("compare_designs needs at least one design")
    return _pool_map(_cycle_job, [(d, data, timing, settings) for d in designs], workers)


def comparison_table(reports: list[CycleReport]) -> list[list[str]]:
    """Rows of {erase, backup, restore} x {delay, energy}; one column per design."""
    header = ["metric"] + [r.design for r in reports]
    rows = [header]
    for op in OPERATIONS:
        for quantity, unit, scale in (("delay", "ns", 1e9), ("energy", "fJ", 1e15)):
            row = [f"{op}_{quantity}_{unit}"]
            for r in reports:
                m = r.metric(op)
                val = None if m is None else getattr(m, quantity)
                row.append("" if val is None else f"{val * scale:.4g}")
            rows.append(row)
    return rows


# --- sweeps ---------------------------------------------------------------------

@dataclass
class SweepPoint:
    design: str
    p2_W: float | None
    vff_pfet_W: float
    vff_nfet_W: float
    delay: float | None
    energy: float | None
    ok: bool
    band: tuple | None = None      # (delay min, delay max, energy min, energy max) across P2 widths


def backup_metrics(d: DesignDescriptor, data: int = 0, timing: ModeTiming | None = None,
                   settings: SolverSettings | None = None) -> ModeResult:
    """Active (with erase) followed by backup; returns the backup result."""
    session = NvffSession(build_design(d), timing or BACKUP_STUDY_TIMING, settings)
    session.run(Mode.ACTIVE, data)
    return session.run(Mode.BACKUP, data)


def _backup_point(args) -> SweepPoint:
    d, data, timing, settings = args
    try:
        res = backup_metrics(d, data, timing, settings)
        delay, energy, ok = res.delay, res.energy, bool(res.ok)
    except SolverError:
        delay, energy, ok = None, None, False
    p2 = None if d.kind.is_baseline else d.effective_p2_W
    return SweepPoint(d.kind.value, p2, d.vff_pfet_W, d.vff_nfet_W, delay, energy, ok)


def sweep_p2(d: DesignDescriptor, widths, data: int = 0, timing: ModeTiming | None = None,
             workers: int | None = 1, settings: SolverSettings | None = None) -> list[SweepPoint]:
    widths = [float(w) for w in widths]
    if any(w <= 0 for w in widths) or any(b < a for a, b in zip(widths, widths[1:])):
        raise ConfigurationError("P2 widths must be positive and ascending")
    if d.kind.is_baseline:
        raise ConfigurationError("the baseline surrogate has no P2 transistor")
    return _pool_map(_backup_point, [(d.with_p2(w), data, timing, settings) for w in widths], workers)


def vff_sizes(scales, pfet_W: float = 400 * NM, nfet_W: float = 300 * NM) -> list[tuple[float, float]]:
    """(PFET, NFET) widths relative to the standard 400/300 nm VFF."""
    return [(pfet_W * s, nfet_W * s) for s in scales]


def sweep_vff_area(d: DesignDescriptor, sizes, p2_widths=None, data: int = 0,
                   timing: ModeTiming | None = None, workers: int | None = 1,
                   settings: SolverSettings | None = None) -> list[SweepPoint]:
    """Backup metrics versus VFF transistor sizes, with a band over ``p2_widths``.

    The reported point uses the design's own P2 width; the band spans the
    extra widths (ignored for the baseline, which has no P2).
    """
    sizes = [(float(p), float(n)) for p, n in sizes]
    extra = [] if d.kind.is_baseline or not p2_widths else [float(w) for w in p2_widths]
    jobs = []
    for wp, wn in sizes:
        base = d.with_vff(wp, wn)
        jobs.append((base, data, timing, settings))
        jobs += [(base.with_p2(w), data, timing, settings) for w in extra]
    pts = _pool_map(_backup_point, jobs, workers)
    out = []
    stride = 1 + len(extra)
    for i in range(len(sizes)):
        group = pts[i * stride:(i + 1) * stride]
        head = group[0]
        good = [p for p in group if p.ok]
        if extra and good:
            ds = [p.delay for p in good]
            es = [p.energy for p in good]
            head.band = (min(ds), max(ds), min(es), max(es))
        head.ok = all(p.ok for p in group)
        out.append(head)
    return out


# --- Monte-Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class VariationSpec:
    sigma_vth: float = 0.025
    sigma_w_rel: float = 0.02
    sigma_ra_rel: float = 0.03
    sigma_tmr_rel: float = 0.03
    rng_seed: int = 0
    n_runs: int = 1000

    def __post_init__(self):
        if min(self.sigma_vth, self.sigma_w_rel, self.sigma_ra_rel, self.sigma_tmr_rel) < 0:
            raise ConfigurationError("variation sigmas must be non-negative")
        if self.n_runs < 1:
            raise ConfigurationError("n_runs must be at least 1", key="n_runs")


def transistor_names(d: DesignDescriptor) -> list[str]:
    return sorted(t.name for t in build_design(replace(d, variation=None)).netlist.transistors)


def sample_variation(names: list[str], v: VariationSpec, rng: np.random.Generator) -> dict:
    """One Gaussian draw per transistor (dVth, width factor) and per MTJ (RA, TMR factors)."""
    var = {}
    for name in names:
        dvth = rng.normal(0.0, v.sigma_vth)
        wfac = max(1.0 + rng.normal(0.0, v.sigma_w_rel), 0.05)
        var[name] = (dvth, wfac)
    for k in (1, 2):
        ra = max(1.0 + rng.normal(0.0, v.sigma_ra_rel), 0.05)
        tmr = max(1.0 + rng.normal(0.0, v.sigma_tmr_rel), 0.0)
        var[f"MTJ{k}"] = (ra, tmr)
    return var


@dataclass
class MonteCarloRun:
    index: int
    ok: bool
    delay: float | None
    energy: float | None
    iw: float
    qt: float
    qc: float


@dataclass
class MonteCarloReport:
    design: str
    data: int
    runs: list[MonteCarloRun]

    def _stat(self, attr: str, fn) -> float:
        vals = np.array([getattr(r, attr) for r in self.runs], dtype=float)
        return float(fn(vals))

    @property
    def success_rate(self) -> float:
        return sum(r.ok for r in self.runs) / len(self.runs)

    def mean(self, attr: str) -> float:
        return self._stat(attr, np.mean)

    def std(self, attr: str) -> float:
        return self._stat(attr, np.std)


def _mc_job(args) -> MonteCarloRun:
    index, d, var, data, timing, settings = args
    try:
        res = backup_metrics(replace(d, variation=var), data, timing, settings)
    except SolverError:
        return MonteCarloRun(index, False, None, None, float("nan"), float("nan"), float("nan"))
    det = res.details
    return MonteCarloRun(index, bool(res.ok), res.delay, res.energy, det["iw"], det["qt"], det["qc"])


def monte_carlo(d: DesignDescriptor, v: VariationSpec = VariationSpec(), data: int = 0,
                timing: ModeTiming | None = None, workers: int | None = None,
                settings: SolverSettings | None = None) -> MonteCarloReport:
    """Independent backup runs under sampled variation, reproducible from ``v.rng_seed``.

    Every run draws from its own child of one ``SeedSequence`` so results do
    not depend on worker count or completion order.
    """
    names = transistor_names(d)
    children = np.random.SeedSequence(v.rng_seed).spawn(v.n_runs)
    jobs = [(i, d, sample_variation(names, v, np.random.default_rng(ss)), data, timing, settings)
            for i, ss in enumerate(children)]
    runs = _pool_map(_mc_job, jobs, workers)
    return MonteCarloReport(d.kind.value, int(data), sorted(runs, key=lambda r: r.index))


# --- calibration and device-level studies ----------------------------------------

def calibrate_k_drive(target_iw: float = 78.9e-6, d: DesignDescriptor | None = None, data: int = 0,
                      bracket=(2e-5, 2e-4), timing: ModeTiming | None = None, rtol: float = 1e-4) -> float:
    """k_drive for which the p-y backup-'0' mean write current hits ``target_iw``."""
    d = d or DesignDescriptor(kind=DesignKind.P_Y)

    def miss(k):
        proc = replace(d.process, k_drive=k)
        return backup_metrics(replace(d, process=proc), data, timing).details["iw"] - target_iw

    return float(brentq(miss, *bracket, rtol=rtol))


def nominal_erase_current(kind: DesignKind, timing: ModeTiming | None = None) -> float:
    """Mean strip current during the circuit's erase pulse (P2/N2 drive)."""
    session = NvffSession(build_design(DesignDescriptor(kind=kind)), timing)
    res = session.run(Mode.ACTIVE, 0)
    t = session.timing
    tr = res.trace
    t0 = t.erase_start + t.slew
    t1 = t.erase_start + t.erase_width_for(kind)
    window = (tr.t >= t0) & (tr.t <= t1)
    return float(np.mean(tr.i_sot[window, 0]))


@dataclass
class EraseOutcome:
    kind: str
    initial: tuple[str, str]
    result: str

    @property
    def erased(self) -> bool:
        return self.result == StoredBit.ERASED.value


def erase_brute_force(kinds=PROPOSED_KINDS, currents: dict | None = None, durations: dict | None = None,
                      dt: float = 1e-12) -> list[EraseOutcome]:
    """Device-level erase from all four (P/AP)^2 initial states for each kind."""
    out = []
    for kind in kinds:
        kind = DesignKind(kind)
        i_strip = (currents or {}).get(kind) or nominal_erase_current(kind)
        width = (durations or {}).get(kind) or default_erase_width(kind)
        dev = make_device(kind.device_kind, kind.geometry)
        for s1 in (MtjState.P, MtjState.AP):
            for s2 in (MtjState.P, MtjState.AP):
                res = erase_pulse(dev.with_states(s1, s2), i_strip, width, dt=dt)
                out.append(EraseOutcome(kind.value, (s1.value, s2.value), decode_state(res).value))
    return out


@dataclass
class SttAsymmetry:
    current: float
    t_ap_to_p: float | None
    t_p_to_ap: float | None

    @property
    def ratio(self) -> float:
        if self.t_ap_to_p is None or self.t_p_to_ap is None:
            return float("inf") if self.t_ap_to_p is not None else float("nan")
        return self.t_p_to_ap / self.t_ap_to_p


def stt_asymmetry(current: float = 78.9e-6, kind: DeviceKind = DeviceKind.P_TYPE,
                  t_stop: float = 20e-9, dt: float = 1e-12) -> SttAsymmetry:
    """Pure-STT switching times in both directions at the same current magnitude.

    A positive current pulls the free layer toward the pinned layer (AP->P);
    the reversed current drives P->AP.
    """
    dev = make_device(kind, "y")
    b = dev.mtj1
    j = current / b.layer.area
    times = []
    for m0, sign in ((-b.m_p, +1.0), (b.m_p, -1.0)):
        r = simulate_switching(thermal_tilt(m0, b.layer), dev.drive(b, J_stt=sign * j), b.layer, t_stop, dt)
        times.append(r.switch_time)
    return SttAsymmetry(current, times[0], times[1])
