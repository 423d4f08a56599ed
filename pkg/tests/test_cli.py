import json
import subprocess
import sys

import numpy as np
import pytest

from alkit.cli import SuiteReport, main
from alkit.lattice_sim import smooth_state


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_report_json_round_trip():
    r = SuiteReport("demo")
    r.add("a", True, ms=1.5)
    r.add("b", False, residual="x - 1")
    back = SuiteReport.from_json(r.to_json())
    assert back == r
    assert back.failed
    assert "1/2 passed" in r.to_text()


def test_flows_suite_passes(capsys):
    assert main(["flows", "--kmax", "1", "--report", "json"]) == 0
    data = _json(capsys)
    assert data["suite"] == "flows"
    assert all(c["status"] == "PASS" for c in data["checks"])


def test_flipped_projection_fails(capsys):
    assert main(["flows", "--kmax", "0", "--flip-projection"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_schouten_suite(capsys):
    assert main(["schouten"]) == 0


def test_central_subset(capsys):
    assert main(["central", "--pairs", "1,2", "--samples", "5", "--report", "json"]) == 0
    assert len(_json(capsys)["checks"]) >= 1


def test_bad_pairs_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["central", "--pairs", "1,9"])
    assert exc.value.code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_simulate_with_input_and_csv(tmp_path, capsys):
    state = tmp_path / "s.json"
    smooth_state(12).dump(state)
    out = tmp_path / "traj.csv"
    rc = main(["simulate", "--flow", "s0", "--input", str(state), "--steps", "200", "--every", "50",
               "--csv", str(out), "--report", "json"])
    assert rc == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows.shape[0] == 5


def test_simulate_unknown_flow_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--flow", "t9", "--steps", "1"])
    assert exc.value.code == 2


def test_backlund_suite(capsys):
    assert main(["backlund", "--sites", "16", "--steps", "100"]) == 0


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "alkit.cli", "schouten", "--report", "json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["suite"] == "schouten"
