import csv

import numpy as np

from nandspin.designs import DesignDescriptor, DesignKind
from nandspin.experiments import OperationMetrics, CycleReport, SweepPoint, full_cycle
from nandspin.modes import Mode
from nandspin.reporting import metrics_rows, waveform_array, waveform_columns, write_sweep_csv


def test_waveform_decimation_keeps_first_and_last_sample():
    tr = full_cycle(DesignDescriptor(kind=DesignKind.P_Y), 1).results[Mode.BACKUP].trace
    arr = waveform_array(tr, 7)
    assert arr[0, 0] == tr.t[0] and arr[-1, 0] == tr.t[-1]
    assert arr.shape[1] == len(waveform_columns(tr))
    assert np.allclose(arr[:, waveform_columns(tr).index("mz2")], tr.projection(1)[::7].tolist()
                       + ([tr.projection(1)[-1]] if (len(tr.t) - 1) % 7 else []))


def test_missing_values_are_blank_cells(tmp_path):
    rep = CycleReport("i-y", 0, [OperationMetrics("i-y", "backup", None, None, False)])
    assert metrics_rows([rep])[1] == ["i-y", "backup", "", "", "false"]
    path = write_sweep_csv(tmp_path / "s.csv", [SweepPoint("i-y", 1e-6, 4e-7, 3e-7, None, None, False)])
    row = list(csv.reader(path.open()))[1]
    assert row[:4] == ["i-y", "1000", "400", "300"] and row[4:7] == ["", "", "false"]
