import csv
import subprocess
import sys

import pytest

from bdris_ntn.cli import main
from bdris_ntn.harness import CSV_HEADER, TRACE_HEADER


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text("num_users = 2\nris_elements = 4\n")
    return str(path)


def test_run_prints_summary(small_config, capsys):
    assert main(["run", "--config", small_config, "--trial", "1"]) == 0
    out = capsys.readouterr().out
    assert "sum rate" in out and "channel hash" in out


def test_run_writes_file(small_config, tmp_path, capsys):
    out = tmp_path / "run.txt"
    assert main(["run", "--config", small_config, "--arch", "dris", "--out", str(out)]) == 0
    assert out.read_text() == capsys.readouterr().out


def test_sweep_to_stdout(small_config, capsys):
    assert main(["sweep", "--config", small_config, "--var", "haps_power_dbm",
                 "--values", "20,30", "--trials", "2"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == CSV_HEADER and len(rows) == 1 + 2 * 2 * 2


def test_sweep_to_file_single_arch(small_config, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", small_config, "--var", "interference_cap_w",
                 "--values", "1e-3", "--trials", "3", "--arch", "dris", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert len(rows) == 4 and all(r[2] == "dris" for r in rows[1:])


def test_trace(small_config, capsys):
    assert main(["trace", "--config", small_config, "--seed", "7"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == TRACE_HEADER and len(rows) >= 2


def test_seed_override_changes_channels(small_config, capsys):
    main(["run", "--config", small_config, "--seed", "1"])
    first = capsys.readouterr().out
    main(["run", "--config", small_config, "--seed", "2"])
    assert capsys.readouterr().out != first


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 3\n")
    with pytest.raises(SystemExit) as info:
        main(["run", "--config", str(bad)])
    assert info.value.code == 2
    assert "unknown key" in capsys.readouterr().err


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["sweep", "--var", "haps_power_dbm", "--values", "a,b"])
    with pytest.raises(SystemExit):
        main(["sweep", "--var", "haps_power_dbm", "--values", "1", "--arch", "ris"])


def test_module_entry_point(small_config):
    proc = subprocess.run([sys.executable, "-m", "bdris_ntn", "run", "--config", small_config],
                          capture_output=True, text=True, check=True)
    assert "sum rate" in proc.stdout
