"""System files and the command-line surface."""

import json
import subprocess
import sys

import numpy as np
import pytest

import riccati_lab as rl
from riccati_lab.cli import main

from conftest import PHI


@pytest.fixture
def golden_path(tmp_path, golden):
    path = tmp_path / "golden.json"
    rl.save_system(path, golden, metadata={"name": "golden"})
    return str(path)


def test_save_load_round_trip(tmp_path, rng):
    sys_in = rl.random_system(3, rng=5)
    path = tmp_path / "sys.json"
    rl.save_system(path, sys_in, metadata={"name": "t", "seed": 5})
    sys_out, meta = rl.load_system(path)
    assert np.array_equal(sys_out.A, sys_in.A)
    assert np.array_equal(sys_out.R.values, sys_in.R.values)
    assert np.array_equal(sys_out.S.values, sys_in.S.values)
    assert meta == {"name": "t", "seed": 5}
    raw = path.read_bytes()
    assert raw.endswith(b"\n")
    # writing the same system twice is byte-identical
    path2 = tmp_path / "sys2.json"
    rl.save_system(path2, sys_in, metadata={"name": "t", "seed": 5})
    assert raw == path2.read_bytes()


def test_system_to_dict_shape(golden):
    d = rl.system_to_dict(golden)
    assert d == {"dim": 1, "A": [[1.0]], "R": [[1.0]], "S": [[1.0]]}
    d2 = rl.system_to_dict(golden, metadata={"name": "g"})
    assert d2["metadata"] == {"name": "g"}


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ([1, 2], "top level"),
        ({"A": [[1.0]], "R": [[1.0]], "S": [[1.0]]}, "'dim' must be a positive"),
        ({"dim": 0, "A": [[1.0]], "R": [[1.0]], "S": [[1.0]]}, "'dim'"),
        ({"dim": True, "A": [[1.0]], "R": [[1.0]], "S": [[1.0]]}, "'dim'"),
        ({"dim": 1, "R": [[1.0]], "S": [[1.0]]}, "field 'A' is missing"),
        ({"dim": 1, "A": [["x"]], "R": [[1.0]], "S": [[1.0]]}, "'A' is not a numeric"),
        ({"dim": 2, "A": [[1.0]], "R": [[1.0]], "S": [[1.0]]}, "'A' has shape"),
        ({"dim": 1, "A": [[1e400]], "R": [[1.0]], "S": [[1.0]]}, "non-finite"),
        ({"dim": 1, "A": [[1.0]], "R": [[-1.0]], "S": [[1.0]]},
         "'R' failed PSD certification"),
        ({"dim": 1, "A": [[1.0]], "R": [[1.0]], "S": [[1.0]], "metadata": 3},
         "'metadata'"),
    ],
)
def test_load_system_schema_errors(tmp_path, payload, fragment):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ValueError, match=fragment):
        rl.load_system(path)


def test_cli_certify(golden_path, capsys):
    assert main(["certify", golden_path]) == 0
    out = capsys.readouterr().out
    assert "controllability rank: 1/1 [PASS]" in out
    assert "observability rank: 1/1 [PASS]" in out


def test_cli_certify_failure(tmp_path, capsys):
    path = tmp_path / "bad.json"
    rl.save_system(path, rl.SystemTriple.from_arrays(
        np.eye(2), np.zeros((2, 2)), np.eye(2)))
    assert main(["certify", str(path)]) == 2
    out = capsys.readouterr().out
    assert "[FAIL]" in out


def test_cli_solve_values(golden_path, capsys):
    assert main(["solve", golden_path, "--json"]) == 0
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert data["dim"] == 1
    assert data["Pinf"][0][0] == pytest.approx(PHI, abs=1e-10)
    assert data["H"][0][0] == pytest.approx(1.0 / np.sqrt(5.0), abs=1e-10)
    assert data["rho_E"] < 1.0
    assert "solve time:" in captured.err


def test_cli_solve_human_output(golden_path, capsys):
    assert main(["solve", golden_path]) == 0
    out = capsys.readouterr().out
    assert "1.618033989" in out
    assert "rho(E)" in out


def test_cli_solve_json_deterministic(golden_path, capsys):
    main(["solve", golden_path, "--json"])
    first = capsys.readouterr().out
    main(["solve", golden_path, "--json"])
    second = capsys.readouterr().out
    assert first == second


def test_cli_verify_runs_battery(golden_path, capsys):
    assert main(["verify", golden_path, "--trials", "3", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "duality" in out
    assert "bound-lower" in out
    assert "PASS" in out


def test_cli_verify_json_parallel_identical(golden_path, capsys):
    assert main(["verify", golden_path, "--trials", "3", "--json"]) == 0
    serial = capsys.readouterr().out
    assert main(["verify", golden_path, "--trials", "3", "--json", "--parallel"]) == 0
    parallel = capsys.readouterr().out
    assert serial == parallel
    data = json.loads(serial)
    assert data["ok"] is True
    assert "elapsed" not in data


def test_cli_verify_bad_flags(golden_path, capsys):
    assert main(["verify", golden_path, "--n", "0"]) == 1
    capsys.readouterr()
    assert main(["verify", golden_path, "--trials", "0"]) == 1
    capsys.readouterr()
    assert main(["verify", golden_path, "--epsilon", "1.5"]) == 1


def test_cli_generate_round_trip(tmp_path, capsys):
    out_path = tmp_path / "r3.json"
    assert main(["generate", str(out_path), "--dim", "3", "--seed", "7"]) == 0
    msg = capsys.readouterr().out
    assert "wrote certified system" in msg
    sys_out, meta = rl.load_system(out_path)
    assert sys_out.dim == 3
    assert meta["name"] == "random-r3-seed7"
    assert rl.certify(sys_out).certified
    # same seed, same bytes
    out_path2 = tmp_path / "r3b.json"
    main(["generate", str(out_path2), "--dim", "3", "--seed", "7"])
    assert out_path.read_bytes() == out_path2.read_bytes()


def test_cli_generate_rejects_bad_dim(tmp_path, capsys):
    assert main(["generate", str(tmp_path / "x.json"), "--dim", "0"]) == 1


def test_cli_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    capsys.readouterr()
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    capsys.readouterr()
    bad = tmp_path / "trunc.json"
    bad.write_text("{", encoding="utf-8")
    assert main(["solve", str(bad)]) == 1


def test_cli_uncertified_exit_codes(tmp_path, capsys):
    path = tmp_path / "bad.json"
    rl.save_system(path, rl.SystemTriple.from_arrays(
        np.eye(2), np.zeros((2, 2)), np.eye(2)))
    assert main(["solve", str(path)]) == 2
    capsys.readouterr()
    assert main(["verify", str(path)]) == 2


def test_cli_no_convergence_exit(golden_path, capsys):
    assert main(["solve", golden_path, "--max-iter", "1"]) == 3
    err = capsys.readouterr().err
    assert "no convergence" in err


def test_console_script_smoke(tmp_path):
    out_path = tmp_path / "s.json"
    r = subprocess.run(
        [sys.executable, "-m", "riccati_lab.cli", "generate", str(out_path),
         "--dim", "2", "--seed", "3"],
        capture_output=True, text=True, timeout=120,
    )
    assert r.returncode == 0, r.stderr
    r2 = subprocess.run(
        [sys.executable, "-m", "riccati_lab.cli", "solve", str(out_path)],
        capture_output=True, text=True, timeout=120,
    )
    assert r2.returncode == 0, r2.stderr
    assert "rho(E)" in r2.stdout
