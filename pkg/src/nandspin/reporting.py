"""CSV writers for metrics, waveforms, sweeps and Monte-Carlo statistics."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from nandspin.circuit import Trace
from nandspin.experiments import CycleReport, MonteCarloReport, SweepPoint, comparison_table

METRICS_HEADER = ("design", "operation", "delay_ns", "energy_fJ", "pass")


def _fmt(value, scale: float) -> str:
    return "" if value is None else f"{value * scale:.6g}"


def metrics_rows(reports: list[CycleReport]) -> list[list[str]]:
    rows = [list(METRICS_HEADER)]
    for rep in reports:
        for m in rep.metrics:
            rows.append([m.design, m.operation, _fmt(m.delay, 1e9), _fmt(m.energy, 1e15),
                         "true" if m.passed else "false"])
    return rows


def write_rows(path: str | Path, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    return path


def write_metrics_csv(path, reports: list[CycleReport]) -> Path:
    return write_rows(path, metrics_rows(reports))


def write_comparison_csv(path, reports: list[CycleReport]) -> Path:
    return write_rows(path, comparison_table(reports))


def waveform_columns(trace: Trace) -> list[str]:
    nodes = [f"v_{n}_V" for n in trace.node_names if n != "gnd"]
    return ["time_s", *nodes, "mz1", "mz2", "i_strip_A", "i_mtj1_A", "i_mtj2_A", "p_supply_W"]


def waveform_array(trace: Trace, decimation: int = 1) -> np.ndarray:
    """One row per kept sample; magnetization columns are easy-axis projections (+1 = parallel)."""
    keep = np.arange(0, len(trace.t), max(1, int(decimation)))
    if keep[-1] != len(trace.t) - 1:
        keep = np.append(keep, len(trace.t) - 1)
    cols = [trace.t[keep]]
    cols += [trace.v[keep, i] for i, n in enumerate(trace.node_names) if n != "gnd"]
    cols += [trace.projection(0)[keep], trace.projection(1)[keep]]
    cols.append(trace.i_sot[keep, 0])
    mtj = trace.i_mtj[keep]
    cols += [mtj[:, 0], mtj[:, 1]]
    cols.append(trace.p_supply[keep])
    return np.column_stack(cols)


def write_waveform_csv(path, trace: Trace, decimation: int = 10) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, waveform_array(trace, decimation), delimiter=",", fmt="%.9g",
               header=",".join(waveform_columns(trace)), comments="")
    return path


def write_sweep_csv(path, points: list[SweepPoint]) -> Path:
    rows = [["design", "p2_w_nm", "vff_pfet_w_nm", "vff_nfet_w_nm", "delay_ns", "energy_fJ", "pass",
             "delay_min_ns", "delay_max_ns", "energy_min_fJ", "energy_max_fJ"]]
    for p in points:
        band = p.band or (None, None, None, None)
        rows.append([p.design, _fmt(p.p2_W, 1e9), _fmt(p.vff_pfet_W, 1e9), _fmt(p.vff_nfet_W, 1e9),
                     _fmt(p.delay, 1e9), _fmt(p.energy, 1e15), "true" if p.ok else "false",
                     _fmt(band[0], 1e9), _fmt(band[1], 1e9), _fmt(band[2], 1e15), _fmt(band[3], 1e15)])
    return write_rows(path, rows)


def write_montecarlo_csv(runs_path, stats_path, rep: MonteCarloReport) -> tuple[Path, Path]:
    rows = [["run", "pass", "delay_ns", "energy_fJ", "iw_uA", "qt_V", "qc_V"]]
    for r in rep.runs:
        rows.append([r.index, "true" if r.ok else "false", _fmt(r.delay, 1e9), _fmt(r.energy, 1e15),
                     f"{r.iw * 1e6:.6g}", f"{r.qt:.6g}", f"{r.qc:.6g}"])
    stats = [["design", "data", "n_runs", "success_rate", "quantity", "mean", "std"]]
    for name, attr, scale in (("qt_V", "qt", 1.0), ("qc_V", "qc", 1.0), ("iw_uA", "iw", 1e6)):
        stats.append([rep.design, rep.data, len(rep.runs), f"{rep.success_rate:.6g}", name,
                      f"{rep.mean(attr) * scale:.6g}", f"{rep.std(attr) * scale:.6g}"])
    return write_rows(runs_path, rows), write_rows(stats_path, stats)
