import json
import math
import subprocess
import sys

import numpy as np
import pytest

from rsplab.cli import main
from rsplab.enhancement import parse_scan_csv, parse_trace_csv
from rsplab.states import bell_diagonal, state_to_json


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    assert rc == 0
    return json.loads(out)


def test_measure_singlet(capsys):
    payload = run_json(capsys, ["measure", "--state", "bell:-1,-1,-1"])
    assert payload["f_rsp"] == 1.0
    assert payload["d_g"] == 1.0
    assert payload["e_sq"] == [1.0, 1.0, 1.0]


def test_measure_demo_state(capsys):
    payload = run_json(capsys, ["measure", "--state", "bell:0.5,0,-0.5"])
    assert payload["f_rsp"] == 0.125
    assert payload["d_g"] == 0.125
    assert payload["lambda_max"] == 0.25


def test_measure_state_file(tmp_path, capsys):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(state_to_json(bell_diagonal(0.5, 0.0, -0.5))))
    payload = run_json(capsys, ["measure", "--state", str(path)])
    assert payload["f_rsp"] == 0.125


def test_measure_rejects_outside_tetrahedron(capsys):
    rc = main(["measure", "--state", "bell:1,1,1"])
    captured = capsys.readouterr()
    assert rc == 2
    assert captured.err.startswith("error:")
    assert captured.out == ""


def test_decompose_state(capsys):
    payload = run_json(capsys, ["decompose", "--state", "bell:0.5,0,-0.5"])
    assert payload["a"] == [0.0, 0.0, 0.0]
    assert payload["e"][0][0] == 0.5
    assert payload["e"][2][2] == -0.5


def test_decompose_channel(capsys):
    payload = run_json(capsys,
                       ["decompose", "--channel", "amplitude_damping:0.36"])
    assert payload["diag"] == [0.8, 0.8, 0.64]
    assert payload["sign"] == 1.0
    assert payload["d"] == [0.0, 0.0, 0.36]
    assert payload["r1"] == np.eye(3).tolist()


def test_decompose_needs_exactly_one_input(capsys):
    with pytest.raises(SystemExit):
        main(["decompose", "--state", "bell:0,0,0",
              "--channel", "identity"])


def test_apply_default_identity_on_b(capsys):
    payload = run_json(capsys, ["apply", "--state", "bell:-1,0,0",
                                "--channel-a", "identity"])
    assert payload["measures"]["f_rsp"] == 0.0
    re = np.array(payload["state"]["re"])
    assert re.shape == (4, 4)
    assert abs(np.trace(re) - 1.0) < 1e-12


def test_apply_symmetric_damping_hits_optimum(capsys):
    p = (1.0 + math.sqrt(5.0)) / (3.0 + math.sqrt(5.0))
    ch = f"amplitude_damping:{p!r}"
    payload = run_json(capsys, ["apply", "--state", "bell:-1,0,0",
                                "--channel-a", ch, "--channel-b", ch])
    assert payload["measures"]["f_rsp"] == pytest.approx(0.072949, abs=1e-6)


def test_evolve_round_trip(capsys):
    rc = main(["evolve", "--c=0.5,0,-0.5", "--gamma-t-max", "3.0",
               "--steps", "301"])
    out = capsys.readouterr().out
    assert rc == 0
    trace = parse_trace_csv(out)
    assert len(trace.gamma_t) == 301
    assert "# zero_touch" in out
    assert "# sudden_change" in out
    assert trace.zero_touches[0] == pytest.approx(
        -math.log(2.0 - math.sqrt(2.0)), abs=1e-6)


def test_evolve_to_file(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    rc = main(["evolve", "--c=0.5,0,-0.5", "--gamma-t-max", "2.0",
               "--steps", "101", "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    trace = parse_trace_csv(out.read_text())
    assert trace.f_rsp[0] == pytest.approx(0.125, abs=1e-10)


def test_enhance_enhancible(capsys):
    payload = run_json(capsys, ["enhance", "--c=-1,0,0"])
    assert payload["enhancible"] is True
    assert payload["p_opt"] == pytest.approx(0.61803398875, abs=1e-11)
    assert payload["f_after"] == pytest.approx(0.0729490168752, abs=1e-11)
    assert payload["sweep"]["p_gap"] < 1e-3


def test_enhance_not_enhancible(capsys):
    payload = run_json(capsys, ["enhance", "--c=0,0,0.5"])
    assert payload["enhancible"] is False
    assert payload["q1"] is None
    assert payload["p_opt"] is None
    assert "sweep" not in payload


def test_scan_writes_file_and_summary(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    rc = main(["scan", "--resolution", "9", "--out", str(out)])
    stdout = capsys.readouterr().out
    assert rc == 0
    assert stdout.startswith("enhancible_fraction ")
    assert "symmetry map=neg_c1 holds=true" in stdout
    assert "symmetry map=neg_c1_c3 holds=false" in stdout
    pts, flags = parse_scan_csv(out.read_text())
    assert pts.shape[1] == 3
    assert flags.dtype == bool


def test_scan_stdout(capsys):
    rc = main(["scan", "--resolution", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("c1,c2,c3,enhancible\n")
    assert "# enhancible_fraction" in out


def test_profile(capsys):
    rc = main(["profile", "--points", "11"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    assert lines[0] == "c1,f_before,f_after"
    assert len(lines) == 12
    first = lines[1].split(",")
    assert float(first[0]) == -1.0
    assert float(first[1]) == 1.0


def test_verify_witness(capsys):
    payload = run_json(capsys, ["verify", "--suite", "witness"])
    assert payload["witness"]["abs_err"] <= 1e-9
    assert payload["discord_raising"]["reference"] == 0.25


def test_verify_gmqd_small(capsys):
    payload = run_json(capsys, ["verify", "--suite", "gmqd",
                                "--trials", "3", "--seed", "5"])
    assert payload["gmqd"]["trials"] == 3
    assert payload["gmqd"]["seed"] == 5


def test_bad_inputs_exit_2(capsys):
    assert main(["enhance", "--c=1,2"]) == 2
    capsys.readouterr()
    assert main(["measure", "--state", "no_such_file.json"]) == 2
    capsys.readouterr()
    assert main(["apply", "--state", "bell:0,0,0",
                 "--channel-a", "identity:0.3"]) == 2
    capsys.readouterr()
    assert main(["measure", "--state", "bell:0.1,0.2"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_byte_identical_repeat(capsys):
    main(["enhance", "--c=-1,0,0"])
    first = capsys.readouterr().out
    main(["enhance", "--c=-1,0,0"])
    second = capsys.readouterr().out
    assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rsplab", "measure", "--state",
         "bell:0.5,0,-0.5"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["f_rsp"] == 0.125
