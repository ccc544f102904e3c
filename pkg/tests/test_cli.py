import csv

import pytest

from nandspin.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_SOLVER, main
from nandspin.config import load_config


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cycle_writes_metrics_waveform_and_effective_config(tmp_path):
    out = tmp_path / "out"
    assert main(["cycle", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out / "metrics.csv")
    assert rows[0] == ["design", "operation", "delay_ns", "energy_fJ", "pass"]
    assert [r[1] for r in rows[1:]] == ["erase", "backup", "restore"]
    assert all(r[0] == "p-y" and r[4] == "true" for r in rows[1:])
    header = read_csv(out / "waveform.csv")[0]
    assert header[0] == "time_s"
    assert header[-6:] == ["mz1", "mz2", "i_strip_A", "i_mtj1_A", "i_mtj2_A", "p_supply_W"]
    assert any(h.startswith("v_qt") for h in header)
    assert load_config(out / "effective_config.ini").output.directory == str(out)


def test_decimation_flag_thins_waveform(tmp_path):
    main(["waveform", "--out", str(tmp_path / "a"), "--decimation", "1"])
    main(["waveform", "--out", str(tmp_path / "b"), "--decimation", "50"])
    n1 = len(read_csv(tmp_path / "a" / "waveform.csv"))
    n50 = len(read_csv(tmp_path / "b" / "waveform.csv"))
    assert n50 < n1 / 40


def test_waveform_shows_erase_then_program(tmp_path):
    main(["waveform", "--out", str(tmp_path), "--decimation", "10"])
    rows = read_csv(tmp_path / "waveform.csv")
    header, data = rows[0], rows[1:]
    mz1 = [float(r[header.index("mz1")]) for r in data]
    mz2 = [float(r[header.index("mz2")]) for r in data]
    # data = 1: both layers erased to AP, then MTJ2 programmed back to P
    assert min(mz1) < -0.9 and min(mz2) < -0.9
    assert mz1[-1] < -0.9 and mz2[-1] > 0.9


def test_rerunning_effective_config_is_bit_identical(tmp_path):
    main(["cycle", "--out", str(tmp_path / "a")])
    cfg = str(tmp_path / "a" / "effective_config.ini")
    main(["cycle", "--config", cfg, "--out", str(tmp_path / "b")])
    for name in ("metrics.csv", "waveform.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_montecarlo_single_run_zero_std(tmp_path):
    cfg = write(tmp_path, "[variation]\nn_runs = 1\n[run]\ndesigns = p-y\n")
    assert main(["montecarlo", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_OK
    stats = read_csv(tmp_path / "o" / "montecarlo_p-y_stats.csv")
    assert stats[0][-2:] == ["mean", "std"]
    assert all(float(r[-1]) == 0.0 for r in stats[1:])


def test_same_seed_same_csv(tmp_path):
    cfg = write(tmp_path, "[variation]\nn_runs = 3\n[run]\ndesigns = p-x\n")
    for name, seed in (("a", "5"), ("b", "5"), ("c", "6")):
        main(["montecarlo", "--config", cfg, "--seed", seed, "--out", str(tmp_path / name)])
    runs = "montecarlo_p-x_runs.csv"
    assert (tmp_path / "a" / runs).read_bytes() == (tmp_path / "b" / runs).read_bytes()
    assert (tmp_path / "a" / runs).read_bytes() != (tmp_path / "c" / runs).read_bytes()


def test_compare_and_sweeps_write_tables(tmp_path):
    cfg = write(tmp_path, "[run]\ndesigns = p-y, baseline-slave-latch\np2_widths_nm = 1000, 2000\n"
                          "vff_scales = 1.0\n")
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "c")]) == EXIT_OK
    assert read_csv(tmp_path / "c" / "comparison.csv")[0] == ["metric", "p-y", "baseline-slave-latch"]
    assert main(["sweep-p2", "--config", cfg, "--out", str(tmp_path / "p")]) == EXIT_OK
    assert len(read_csv(tmp_path / "p" / "sweep_p2.csv")) == 3          # baseline has no P2
    assert main(["sweep-vff", "--config", cfg, "--out", str(tmp_path / "v")]) == EXIT_OK
    assert len(read_csv(tmp_path / "v" / "sweep_vff.csv")) == 3


def test_failed_operation_exit_code_and_allow_fail(tmp_path):
    cfg = write(tmp_path, "[schedule]\nerase_width_ns = 0.02\n")
    assert main(["cycle", "--config", cfg, "--out", str(tmp_path / "a")]) == EXIT_FAILED
    assert main(["cycle", "--config", cfg, "--out", str(tmp_path / "b"), "--allow-fail"]) == EXIT_OK
    assert "false" in (tmp_path / "b" / "metrics.csv").read_text()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "[design]\n\nbogus = 3\n")
    assert main(["cycle", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "design.bogus" in err and "line 3" in err


def test_solver_error_exit_code_reports_time(tmp_path, capsys):
    cfg = write(tmp_path, "[solver]\nmaxiter = 1\nmax_halvings = 0\n")
    assert main(["cycle", "--config", cfg, "--out", str(tmp_path)]) == EXIT_SOLVER
    assert "t = " in capsys.readouterr().err


def test_bad_decimation_flag(tmp_path):
    assert main(["cycle", "--decimation", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unknown_subcommand_exits_by_argparse():
    with pytest.raises(SystemExit):
        main(["teleport"])
