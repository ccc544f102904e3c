"""Command-line front end: ``nandspin <subcommand> [--config PATH] [--out DIR] ...``.

Exit status: 0 success, 1 a flagged operation failed, 2 configuration error,
3 the circuit solver did not converge.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from nandspin import reporting
from nandspin.config import SimConfig, dump_config, load_config
from nandspin.designs import DesignDescriptor, DesignKind
from nandspin.errors import ConfigurationError, SolverError
from nandspin.experiments import (BACKUP_STUDY_TIMING, NM, compare_designs, full_cycle, monte_carlo,
                                  sweep_p2, sweep_vff_area, vff_sizes)
from nandspin.modes import ModeTiming

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
SUBCOMMANDS = ("cycle", "waveform", "sweep-p2", "sweep-vff", "montecarlo", "compare")


class _SolverAbort(Exception):
    def __init__(self, time: float, where: str):
        super().__init__(where)
        self.time = time
        self.where = where


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nandspin", description="NAND-SPIN nonvolatile flip-flop simulator")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", metavar="PATH", help="sectioned key = value file; omitted keys use defaults")
    ap.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=int, metavar="N", help="variation seed (overrides variation.seed)")
    ap.add_argument("--decimation", type=int, metavar="N", help="keep one waveform sample in N")
    ap.add_argument("--allow-fail", action="store_true", help="exit 0 even when an operation fails")
    return ap


def effective_config(args) -> SimConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, variation=replace(cfg.variation, rng_seed=args.seed))
    if args.decimation is not None:
        if args.decimation < 1:
            raise ConfigurationError("decimation must be a positive integer [flag --decimation]")
        cfg = replace(cfg, output=replace(cfg.output, decimation=args.decimation))
    if args.out is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    return cfg


def _designs(cfg: SimConfig, proposed_only: bool = False) -> list[DesignDescriptor]:
    kinds = [DesignKind(k) for k in cfg.run.designs]
    if proposed_only:
        kinds = [k for k in kinds if not k.is_baseline]
    return [replace(cfg.design, kind=k) for k in kinds]


def study_timing(timing: ModeTiming) -> ModeTiming:
    """Backup studies use the long erase pulse unless the config pins a width."""
    if timing.erase_width is not None:
        return timing
    return replace(timing, erase_width=BACKUP_STUDY_TIMING.erase_width)


def _check_cycle(rep) -> None:
    if rep.error_time is not None:
        raise _SolverAbort(rep.error_time, f"{rep.design} {rep.error}")


def _cycle(cfg: SimConfig, out: Path, waveform: bool) -> bool:
    rep = full_cycle(cfg.design, cfg.run.data, cfg.timing, cfg.solver, keep_traces=waveform)
    _check_cycle(rep)
    reporting.write_metrics_csv(out / "metrics.csv", [rep])
    if waveform and rep.results:
        reporting.write_waveform_csv(out / "waveform.csv", rep.trace(), cfg.output.decimation)
    return rep.ok


def _compare(cfg: SimConfig, out: Path) -> bool:
    reps = compare_designs(_designs(cfg), cfg.run.data, cfg.timing, cfg.run.workers, cfg.solver)
    for r in reps:
        _check_cycle(r)
    reporting.write_metrics_csv(out / "metrics.csv", reps)
    reporting.write_comparison_csv(out / "comparison.csv", reps)
    return all(r.ok for r in reps)


def _sweep_metric_rows(points, label) -> list[list[str]]:
    rows = [list(reporting.METRICS_HEADER)]
    for p in points:
        rows.append([f"{p.design}[{label(p)}]", "backup", reporting._fmt(p.delay, 1e9),
                     reporting._fmt(p.energy, 1e15), "true" if p.ok else "false"])
    return rows


def _sweep_p2(cfg: SimConfig, out: Path) -> bool:
    timing = study_timing(cfg.timing)
    points = []
    for d in _designs(cfg, proposed_only=True):
        points += sweep_p2(d, cfg.run.p2_widths, 0, timing, cfg.run.workers, cfg.solver)
    reporting.write_sweep_csv(out / "sweep_p2.csv", points)
    reporting.write_rows(out / "metrics.csv",
                         _sweep_metric_rows(points, lambda p: f"p2_w_nm={p.p2_W / NM:.0f}"))
    return all(p.ok for p in points)


def _sweep_vff(cfg: SimConfig, out: Path) -> bool:
    timing = study_timing(cfg.timing)
    sizes = vff_sizes(cfg.run.vff_scales)
    points = []
    for d in _designs(cfg):
        points += sweep_vff_area(d, sizes, cfg.run.p2_band, 0, timing, cfg.run.workers, cfg.solver)
    reporting.write_sweep_csv(out / "sweep_vff.csv", points)
    label = lambda p: f"vff_w_nm={p.vff_pfet_W / NM:.0f}/{p.vff_nfet_W / NM:.0f}"
    reporting.write_rows(out / "metrics.csv", _sweep_metric_rows(points, label))
    return all(p.ok for p in points)


def _montecarlo(cfg: SimConfig, out: Path) -> bool:
    timing = study_timing(cfg.timing)
    rows = [list(reporting.METRICS_HEADER)]
    ok = True
    for d in _designs(cfg):
        rep = monte_carlo(d, cfg.variation, 0, timing, cfg.run.workers, cfg.solver)
        reporting.write_montecarlo_csv(out / f"montecarlo_{rep.design}_runs.csv",
                                       out / f"montecarlo_{rep.design}_stats.csv", rep)
        for r in rep.runs:
            rows.append([f"{rep.design}[run={r.index}]", "backup", reporting._fmt(r.delay, 1e9),
                         reporting._fmt(r.energy, 1e15), "true" if r.ok else "false"])
        ok = ok and rep.success_rate == 1.0
    reporting.write_rows(out / "metrics.csv", rows)
    return ok


def run(subcommand: str, cfg: SimConfig) -> bool:
    """Execute one subcommand, writing its CSVs under the configured output directory."""
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective_config.ini").write_text(dump_config(cfg))
    if subcommand == "cycle":
        return _cycle(cfg, out, cfg.output.waveform)
    if subcommand == "waveform":
        return _cycle(cfg, out, True)
    if subcommand == "compare":
        return _compare(cfg, out)
    if subcommand == "sweep-p2":
        return _sweep_p2(cfg, out)
    if subcommand == "sweep-vff":
        return _sweep_vff(cfg, out)
    if subcommand == "montecarlo":
        return _montecarlo(cfg, out)
    raise ConfigurationError(f"unknown subcommand {subcommand!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        ok = run(args.subcommand, cfg)
    except ConfigurationError as exc:
        print(f"nandspin: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _SolverAbort as exc:
        print(f"nandspin: solver failed at t = {exc.time:.6e} s ({exc.where})", file=sys.stderr)
        return EXIT_SOLVER
    except SolverError as exc:
        print(f"nandspin: solver failed at t = {exc.time:.6e} s", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"nandspin: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not ok:
        print(f"nandspin: {args.subcommand}: at least one operation failed (see metrics.csv)", file=sys.stderr)
        return EXIT_OK if args.allow_fail else EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
