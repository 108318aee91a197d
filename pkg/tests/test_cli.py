import subprocess
import sys

import pytest

from retroptics.harness.cli import main, parse_observe, parse_sweep, UsageError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_builtin_single_photon(capsys):
    code, out, _ = run(["run", "--builtin", "single-photon", "--format", "tsv"], capsys)
    assert code == 0
    assert "D\t(1,0)\t0.5" in out
    assert "C\t(0,1)\t0.5" in out


def test_builtin_penrose_with_oracle(capsys):
    code, out, _ = run(["run", "--builtin", "penrose-fig3", "--oracle", "--format", "tsv"], capsys)
    assert code == 0
    assert "c\t(1,0,0,1)\t0.4752\t0.999579301641" in out
    assert "## oracle" in out


def test_observe_override(capsys):
    code, out, _ = run(["run", "--builtin", "penrose-fig3", "--observe", "d1=1,d4=1", "--format", "tsv"], capsys)
    assert code == 0
    posterior = out.split("## posterior")[1].split("##")[0]
    assert "c\t(1,0,0,1)\t0.4752\t1" in posterior
    assert "(1,0,1,0)" not in posterior


def test_impossible_observation_exit_code(capsys):
    code, _, err = run(["run", "--builtin", "penrose-fig3", "--observe", "d1=3"], capsys)
    assert code == 2
    assert "impossible" in err


def test_unknown_mode_in_observe_is_usage_error(capsys):
    code, _, err = run(["run", "--builtin", "penrose-fig3", "--observe", "d7=1"], capsys)
    assert code == 1
    assert "d7" in err


def test_bad_arguments_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--builtin", "nope"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


def test_parse_error_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.scn"
    path.write_text("[scenario]\nmodes = 2\nphotons = 1\n[element]\nmodes = 1,2\ntransmittance = 1.2\n")
    code, _, err = run(["run", str(path)], capsys)
    assert code == 1
    assert "line 6" in err


def test_missing_file_exit_one(tmp_path, capsys):
    code, _, _ = run(["run", str(tmp_path / "absent.scn")], capsys)
    assert code == 1


def test_non_unitary_element_exit_three(tmp_path, capsys):
    path = tmp_path / "lossy.scn"
    path.write_text("[scenario]\nmodes = 2\nphotons = 1\n[element]\nmodes = 1,2\nmatrix = 0.5,0,0,0,0,0,0.5,0\n")
    code, _, err = run(["run", str(path)], capsys)
    assert code == 3
    assert "numerical" in err


def test_sweep_output(capsys):
    code, out, _ = run(
        ["run", "--builtin", "penrose-fig3", "--sweep", "epsilon:1e-4:1e-1:4:log", "--format", "tsv"], capsys
    )
    assert code == 0
    summary = out.split("## sweep")[1].split("\n\n")[0].strip().splitlines()
    assert summary[0] == "epsilon\tposterior[c]\tposterior[e]"
    assert summary[1].split("\t")[1] == "0.999900009999"
    assert len(summary) == 5


def test_bad_sweep_spec(capsys):
    code, _, _ = run(["run", "--builtin", "penrose-fig3", "--sweep", "epsilon:a:b"], capsys)
    assert code == 1


def test_out_file_matches_stdout(tmp_path, capsys):
    path = tmp_path / "report.tsv"
    code, out, _ = run(["run", "--builtin", "penrose-classical", "--format", "tsv", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    _, direct, _ = run(["run", "--builtin", "penrose-classical", "--format", "tsv"], capsys)
    assert path.read_text() == direct


def test_tsv_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "retroptics.harness.cli", "run", "--builtin", "penrose-fig3", "--format", "tsv"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first


def test_parse_observe_is_one_based():
    assert parse_observe("d1=1, d4=0", 4) == {0: 1, 3: 0}
    with pytest.raises(UsageError):
        parse_observe("d0=1", 4)
    with pytest.raises(UsageError):
        parse_observe("x", 4)


def test_parse_sweep():
    assert parse_sweep("bs.transmittance:0:1:5") == ("bs.transmittance", 0.0, 1.0, 5, False)
    assert parse_sweep("epsilon:1e-4:1:3:log")[-1] is True
    with pytest.raises(UsageError):
        parse_sweep("epsilon:1:2")
