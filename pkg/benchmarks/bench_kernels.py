"""Wall-clock comparison of the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times three workloads on each available backend: a free-layer RK4
integration, one p-y backup transient, and a full p-y cycle. Also prints the
largest state difference between backends so a speedup never hides a
semantic drift.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nandspin import kernels
from nandspin.designs import DesignDescriptor, DesignKind
from nandspin.experiments import backup_metrics, full_cycle
from nandspin.llg import simulate_switching, thermal_tilt
from nandspin.nand_spin import DeviceKind, make_device


def _switching():
    dev = make_device(DeviceKind.P_TYPE, "y")
    b = dev.mtj1
    drive = dev.drive(b, J_stt=78.9e-6 / b.layer.area)
    return simulate_switching(thermal_tilt(-b.m_p, b.layer), drive, b.layer, 3e-9, 1e-12).final


def _backup():
    return backup_metrics(DesignDescriptor(kind=DesignKind.P_Y)).state.magnetizations


def _cycle():
    rep = full_cycle(DesignDescriptor(kind=DesignKind.P_Y), keep_traces=False)
    return np.array([m.delay or np.nan for m in rep.metrics])


WORKLOADS = {"llg_stt_3ns": _switching, "backup_transient": _backup, "full_cycle": _cycle}


def bench(repeat: int = 3) -> dict:
    results: dict = {}
    for name, fn in WORKLOADS.items():
        for backend in kernels.available_backends():
            with kernels.use_backend(backend):
                fn()                                  # warm caches and imports
                times = []
                for _ in range(repeat):
                    t0 = time.perf_counter()
                    out = fn()
                    times.append(time.perf_counter() - t0)
            results[name, backend] = (min(times), np.asarray(out, dtype=float))
    return results


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    res = bench(args.repeat)
    backends = kernels.available_backends()
    print(f"{'workload':<18}" + "".join(f"{b + ' [s]':>14}" for b in backends) + f"{'speedup':>10}{'max |diff|':>12}")
    for name in WORKLOADS:
        row = [res[name, b][0] for b in backends]
        speed = row[-1] / row[0] if len(row) > 1 else 1.0
        diff = 0.0
        if len(backends) > 1:
            diff = float(np.nanmax(np.abs(res[name, backends[0]][1] - res[name, backends[-1]][1])))
        print(f"{name:<18}" + "".join(f"{x:>14.4f}" for x in row) + f"{speed:>9.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
