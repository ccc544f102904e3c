"""Sectioned INI configuration with SI units spelled out in every key name.

Every key is optional; unspecified keys take the library defaults, so an
empty file describes the calibrated p-y flip-flop. ``dump_config`` writes
the fully merged configuration back out, and loading that text reproduces
the same ``SimConfig``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from nandspin.circuit import SolverSettings
from nandspin.designs import DesignDescriptor, DesignKind, DeviceParams, ProcessParams
from nandspin.errors import ConfigurationError
from nandspin.experiments import VariationSpec
from nandspin.modes import ModeTiming

NM, NS, PS = 1e-9, 1e-9, 1e-12


@dataclass(frozen=True)
class RunOptions:
    data: int = 1
    designs: tuple = ("p-y", "i-y", "p-x", "i-x")
    p2_widths: tuple = (1000 * NM, 1250 * NM, 1500 * NM, 1750 * NM, 2000 * NM)
    vff_scales: tuple = (1.0, 0.9, 0.8, 0.7, 0.6)
    p2_band: tuple = (1000 * NM, 2000 * NM)
    workers: int = 1


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "out"
    decimation: int = 10
    waveform: bool = True


@dataclass(frozen=True)
class SimConfig:
    design: DesignDescriptor = field(default_factory=DesignDescriptor)
    timing: ModeTiming = field(default_factory=ModeTiming)
    solver: SolverSettings = field(default_factory=SolverSettings)
    variation: VariationSpec = field(default_factory=VariationSpec)
    run: RunOptions = field(default_factory=RunOptions)
    output: OutputOptions = field(default_factory=OutputOptions)


@dataclass(frozen=True)
class _Key:
    section: str
    key: str
    target: str        # which component object the value lands in
    attr: str
    kind: str = "float"
    scale: float = 1.0  # SI value = config value * scale


_KEYS = (
    _Key("design", "kind", "design", "kind", "str"),
    _Key("design", "vff_pfet_w_nm", "design", "vff_pfet_W", scale=NM),
    _Key("design", "vff_nfet_w_nm", "design", "vff_nfet_W", scale=NM),
    _Key("design", "p2_w_nm", "design", "p2_W", "optfloat", NM),
    _Key("design", "access_w_nm", "design", "access_W", scale=NM),
    _Key("design", "n1_w_nm", "design", "n1_W", scale=NM),
    _Key("design", "n2_w_nm", "design", "n2_W", scale=NM),
    _Key("design", "p1_w_nm", "design", "p1_W", scale=NM),
    _Key("design", "writer_scale", "design", "writer_scale"),
    _Key("design", "baseline_write_w_nm", "design", "baseline_write_W", scale=NM),
    _Key("design", "baseline_degeneration_ohm", "design", "baseline_degeneration"),
    _Key("process", "vdd_v", "process", "vdd"),
    _Key("process", "vth_v", "process", "vth"),
    _Key("process", "alpha_sat", "process", "alpha_sat"),
    _Key("process", "lambda_per_v", "process", "lambda_ch"),
    _Key("process", "k_drive_a_per_v_alpha", "process", "k_drive"),
    _Key("process", "p_to_n_ratio", "process", "p_to_n"),
    _Key("process", "c_gate_f_per_m2", "process", "c_gate_per_area"),
    _Key("process", "c_par_f", "process", "c_par"),
    _Key("process", "l_nm", "process", "L", scale=NM),
    _Key("device", "ra_ohm_m2", "device", "RA"),
    _Key("device", "tmr0", "device", "TMR0"),
    _Key("device", "vh_v", "device", "Vh"),
    _Key("device", "polarization", "device", "P"),
    _Key("device", "stt_asymmetry_lambda", "device", "Lambda"),
    _Key("device", "spin_hall_angle", "device", "eta"),
    _Key("device", "rho_hm_ohm_m", "device", "rho"),
    _Key("device", "bias_field_t", "device", "bias_field_T"),
    _Key("device", "in_plane_demag_a_per_m", "device", "in_plane_demag", "optfloat"),
    _Key("device", "mtj2_ra_ohm_m2", "device", "mtj2_RA", "optfloat"),
    _Key("device", "mtj2_tmr0", "device", "mtj2_TMR0", "optfloat"),
    _Key("solver", "dt_ps", "timing", "dt", scale=PS),
    _Key("solver", "abstol_a", "solver", "abstol"),
    _Key("solver", "maxiter", "solver", "maxiter", "int"),
    _Key("solver", "max_halvings", "solver", "max_halvings", "int"),
    _Key("solver", "dv_limit_v", "solver", "dv_limit"),
    _Key("schedule", "slew_ps", "timing", "slew", scale=PS),
    _Key("schedule", "clk_rise_ns", "timing", "clk_rise", scale=NS),
    _Key("schedule", "clk_width_ns", "timing", "clk_width", scale=NS),
    _Key("schedule", "erase_start_ns", "timing", "erase_start", scale=NS),
    _Key("schedule", "erase_width_ns", "timing", "erase_width", "optfloat", NS),
    _Key("schedule", "erase_relax_ns", "timing", "erase_relax", scale=NS),
    _Key("schedule", "backup_start_ns", "timing", "backup_start", scale=NS),
    _Key("schedule", "backup_timeout_ns", "timing", "backup_timeout", scale=NS),
    _Key("schedule", "backup_hold_ns", "timing", "backup_hold", scale=NS),
    _Key("schedule", "standby_ns", "timing", "standby", scale=NS),
    _Key("schedule", "restore_eq_hold_ns", "timing", "restore_eq_hold", scale=NS),
    _Key("schedule", "restore_sense_ns", "timing", "restore_sense", scale=NS),
    _Key("schedule", "restore_timeout_ns", "timing", "restore_timeout", scale=NS),
    _Key("schedule", "restore_hold_ns", "timing", "restore_hold", scale=NS),
    _Key("schedule", "restore_offset_v", "timing", "restore_offset"),
    _Key("variation", "sigma_vth_v", "variation", "sigma_vth"),
    _Key("variation", "sigma_w_rel", "variation", "sigma_w_rel"),
    _Key("variation", "sigma_ra_rel", "variation", "sigma_ra_rel"),
    _Key("variation", "sigma_tmr_rel", "variation", "sigma_tmr_rel"),
    _Key("variation", "seed", "variation", "rng_seed", "int"),
    _Key("variation", "n_runs", "variation", "n_runs", "int"),
    _Key("run", "data", "run", "data", "int"),
    _Key("run", "designs", "run", "designs", "strlist"),
    _Key("run", "p2_widths_nm", "run", "p2_widths", "floatlist", NM),
    _Key("run", "vff_scales", "run", "vff_scales", "floatlist"),
    _Key("run", "p2_band_nm", "run", "p2_band", "floatlist", NM),
    _Key("run", "workers", "run", "workers", "int"),
    _Key("output", "dir", "output", "directory", "str"),
    _Key("output", "decimation", "output", "decimation", "int"),
    _Key("output", "waveform", "output", "waveform", "bool"),
)
_BY_NAME = {(k.section, k.key): k for k in _KEYS}


def _line_numbers(text: str) -> dict:
    """(section, key) -> 1-based line number, for diagnostics."""
    out, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            section = m.group(1).strip().lower()
        elif section and s and s[0] not in "#;":
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            out.setdefault((section, key), n)
    return out


def _parse(spec: _Key, raw: str, line):
    raw = raw.strip()
    try:
        if spec.kind == "str":
            return raw
        if spec.kind == "int":
            return int(raw)
        if spec.kind == "bool":
            low = raw.lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError(raw)
            return low in ("true", "yes", "1", "on")
        if spec.kind == "optfloat":
            return None if raw.lower() in ("", "none", "default") else float(raw) * spec.scale
        if spec.kind == "floatlist":
            return tuple(float(x) * spec.scale for x in raw.split(",") if x.strip())
        if spec.kind == "strlist":
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        return float(raw) * spec.scale
    except ValueError:
        raise ConfigurationError(f"cannot parse {raw!r} as {spec.kind}", key=f"{spec.section}.{spec.key}",
                                 line=line) from None


def _scaled(value: float, scale: float) -> str:
    """Text t with float(t) * scale == value whenever such a t exists.

    Values that were themselves parsed from a config (or written as a unit
    multiple in code) always have one, which keeps dump/parse exact.
    """
    value = float(value)
    guess = first = value / scale
    for digits in range(13):  # prefer the shortest decimal that round-trips
        short = round(guess, digits)
        if float(repr(short)) * scale == value:
            return repr(short)
    for _ in range(8):
        if float(repr(guess)) * scale == value:
            return repr(guess)
        guess = math.nextafter(guess, math.inf if guess * scale < value else -math.inf)
    return repr(first)


def _format(spec: _Key, value) -> str:
    if value is None:
        return "default"
    if spec.kind == "floatlist":
        return ", ".join(_scaled(v, spec.scale) for v in value)
    if spec.kind == "strlist":
        return ", ".join(value)
    if spec.kind == "bool":
        return "true" if value else "false"
    if spec.kind in ("float", "optfloat"):
        return _scaled(value, spec.scale)
    if isinstance(value, DesignKind):
        return value.value
    return str(value)


def _components(cfg: SimConfig) -> dict:
    d = cfg.design
    return {"design": d, "process": d.process, "device": d.device, "timing": cfg.timing,
            "solver": cfg.solver, "variation": cfg.variation, "run": cfg.run, "output": cfg.output}


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    lines = _line_numbers(text)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}", line=getattr(exc, "lineno", None)) from None
    updates: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            sec = section.lower()
            spec = _BY_NAME.get((sec, key))
            if spec is None:
                raise ConfigurationError("unknown configuration key", key=f"{section}.{key}",
                                         line=lines.get((sec, key)))
            updates.setdefault(spec.target, {})[spec.attr] = _parse(spec, raw, lines.get((sec, key)))
    comp = _components(base or SimConfig())
    try:
        built = {name: replace(obj, **updates.get(name, {})) for name, obj in comp.items()}
        design = replace(built["design"], process=built["process"], device=built["device"])
    except (ValueError, TypeError) as exc:
        bad = next(iter(updates.get("design", {})), None)
        raise ConfigurationError(str(exc), key=bad and f"design.{bad}") from None
    _validate(built, lines)
    return SimConfig(design, built["timing"], built["solver"], built["variation"], built["run"], built["output"])


def _validate(built: dict, lines: dict) -> None:
    t = built["timing"]
    if not 0 < t.dt <= 2e-12:
        raise ConfigurationError("dt must lie in (0, 2] ps", key="solver.dt_ps", line=lines.get(("solver", "dt_ps")))
    if built["run"].data not in (0, 1):
        raise ConfigurationError("data must be 0 or 1", key="run.data", line=lines.get(("run", "data")))
    for name in built["run"].designs:
        try:
            DesignKind(name)
        except ValueError:
            raise ConfigurationError(f"unknown design {name!r}", key="run.designs",
                                     line=lines.get(("run", "designs"))) from None
    if built["output"].decimation < 1:
        raise ConfigurationError("decimation must be >= 1", key="output.decimation",
                                 line=lines.get(("output", "decimation")))


def load_config(path: str | Path | None) -> SimConfig:
    if path is None:
        return SimConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from None
    return parse_config(text)


def dump_config(cfg: SimConfig) -> str:
    """Every key with its effective value; ``parse_config`` of the result gives ``cfg`` back."""
    comp = _components(cfg)
    out, current = [], None
    for spec in _KEYS:
        if spec.section != current:
            if current is not None:
                out.append("")
            out.append(f"[{spec.section}]")
            current = spec.section
        out.append(f"{spec.key} = {_format(spec, getattr(comp[spec.target], spec.attr))}")
    return "\n".join(out) + "\n"


def config_keys() -> list[str]:
    return [f"{k.section}.{k.key}" for k in _KEYS]


def _check_table() -> None:
    # every mapped attribute must exist on its dataclass
    comp = _components(SimConfig())
    for k in _KEYS:
        if k.attr not in {f.name for f in fields(comp[k.target])}:
            raise AssertionError(f"{k.section}.{k.key} maps to missing field {k.attr}")


_check_table()
