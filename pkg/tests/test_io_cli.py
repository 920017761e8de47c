import json
import subprocess
import sys

import numpy as np
import pytest

from polyroof import __version__
from polyroof.cli import EXIT_CODES, main
from polyroof.errors import RankError, StructureError
from polyroof.io import StateFormatError, dumps, read_state, state_from_dict, write_state
from polyroof.oracle import wootters_concurrence
from polyroof.quantum import DensityMatrix, PureState, ghz, random_rank2, w_state


@pytest.fixture
def files(tmp_path, rng):
    bell_mix = DensityMatrix.mixture(
        [0.8, 0.2], [PureState.from_vector([1, 0, 0, 1]), PureState.from_vector([0, 1, 1, 0])]
    )
    paths = {
        "bell_mix": tmp_path / "bell_mix.json",
        "ghz": tmp_path / "ghz.json",
        "mixed3": tmp_path / "mixed3.json",
        "rank4": tmp_path / "rank4.json",
        "two_qubit": tmp_path / "two_qubit.json",
    }
    write_state(paths["bell_mix"], bell_mix)
    write_state(paths["ghz"], ghz(3))
    write_state(paths["mixed3"], DensityMatrix.mixture([0.7, 0.3], [ghz(3), w_state(3)]))
    write_state(paths["rank4"], DensityMatrix(2, np.eye(4) / 4))
    write_state(paths["two_qubit"], random_rank2(2, rng))
    return paths


def run_cli(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, out.out, out.err


# ----------------------------------------------------------------- io

def test_state_round_trip(tmp_path, rng):
    rho = random_rank2(3, rng)
    write_state(tmp_path / "s.json", rho)
    back = read_state(tmp_path / "s.json")
    assert np.array_equal(back.matrix, rho.matrix)
    write_state(tmp_path / "p.json", ghz(3))
    assert np.allclose(read_state(tmp_path / "p.json").amplitudes, ghz(3).amplitudes)


@pytest.mark.parametrize(
    "obj",
    [
        {},
        {"n_qubits": 0, "amplitudes": []},
        {"n_qubits": 1, "amplitudes": [[1, 0]]},
        {"n_qubits": 1, "amplitudes": [1, 0]},
        {"n_qubits": 1},
        {"n_qubits": 1, "matrix": [[[1, 0], [1, 0]], [[0, 0], [0, 0]]]},
    ],
)
def test_state_format_errors(obj):
    with pytest.raises(StateFormatError):
        state_from_dict(obj)


def test_dumps_formatting():
    text = dumps({"a": 1.0, "b": [0.1, 2], "c": float("nan"), "d": True, "e": None})
    assert '"a": 1.0' in text and "0.10000000000000001" in text
    assert '"nan"' in text and "true" in text and "null" in text
    assert json.loads(text)["b"][1] == 2


# ----------------------------------------------------------------- cli

def test_roof_matches_wootters(capsys, files):
    code, out, _ = run_cli(capsys, "roof", "--measure", "concurrence", "--state", files["bell_mix"])
    assert code == 0
    data = json.loads(out)
    assert data["method"] == "two-root" and data["exact"] is True
    assert data["value"] == pytest.approx(wootters_concurrence(read_state(files["bell_mix"])), abs=1e-12)


def test_roof_witness_and_geometry(capsys, files):
    code, out, _ = run_cli(capsys, "roof", "--measure", "concurrence", "--state", files["two_qubit"], "--witness")
    data = json.loads(out)
    assert code == 0 and set(data["geometry"]) == {"h", "R", "s", "h_c"}
    assert sum(m["weight"] for m in data["witness"]) == pytest.approx(1.0)


def test_roots_output_shape(capsys, files):
    code, out, _ = run_cli(capsys, "roots", "--measure", "tangle", "--state", files["mixed3"])
    data = json.loads(out)
    assert code == 0 and data["structure"] == "four-root"
    assert sum(r["multiplicity"] for r in data["roots"]) == 4
    assert any(r["omega"] == "inf" for r in data["roots"])


def test_entangle(capsys, files):
    code, out, _ = run_cli(capsys, "entangle", "--measure", "tangle", "--state", files["ghz"])
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0)
    code, _, _ = run_cli(capsys, "entangle", "--measure", "tangle", "--state", files["mixed3"])
    assert code == EXIT_CODES[RankError]


def test_oracle_subcommand(capsys, files):
    code, out, _ = run_cli(capsys, "oracle", "--measure", "concurrence", "--state", files["bell_mix"], "--restarts", 8)
    data = json.loads(out)
    assert code == 0 and data["evaluations"] > 0 and len(data["ensemble"]) >= 1


def test_exit_codes(capsys, files, tmp_path):
    code, out, err = run_cli(capsys, "roof", "--measure", "concurrence", "--state", files["rank4"])
    assert code == EXIT_CODES[RankError] and json.loads(out)["error"]["type"] == "RankError" and err
    code, out, _ = run_cli(capsys, "roof", "--state", tmp_path / "missing.json")
    assert code == 2 and "error" in json.loads(out)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(capsys, "roots", "--state", bad)[0] == 2
    assert run_cli(capsys, "roof", "--measure", "negativity", "--state", files["ghz"])[0] == 2
    assert run_cli(capsys, "roof", "--measure", "tangle", "--state", files["bell_mix"])[0] == 2
    assert run_cli(capsys, "oracle", "--state", files["mixed3"], "--ensemble-size", 9)[0] == 2
    code, _, _ = run_cli(capsys, "roof", "--measure", "tangle", "--state", files["mixed3"], "--method", "one-root")
    assert code == EXIT_CODES[StructureError]


def test_unknown_flag_rejected(capsys, files):
    with pytest.raises(SystemExit) as exc:
        main(["roof", "--state", str(files["ghz"]), "--bogus"])
    assert exc.value.code == 2


def test_ghzw_scan_csv(capsys):
    code, out, _ = run_cli(capsys, "ghzw", "--scan", "0:1:101", "--csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith(f"# polyroof {__version__}")
    assert lines[1] == "p,x,flat_f,tangle_envelope"
    rows = [list(map(float, line.split(","))) for line in lines[2:]]
    assert len(rows) == 101
    for p, x, flat, env in rows:
        assert x == pytest.approx(2 * p - 1 - 0.2537, abs=1e-4)
        assert env <= flat + 1e-12


def test_ghzw_json_metadata(capsys):
    code, out, _ = run_cli(capsys, "ghzw", "--p", 0.8)
    data = json.loads(out)
    assert code == 0 and data["metadata"]["x_of_p"] == "x = 2 p - 1 + x_O"
    assert len(data["rows"]) == 1
    assert run_cli(capsys, "ghzw", "--scan", "0:2:3")[0] == 2


def test_iso_curves(capsys, files):
    code, out, _ = run_cli(capsys, "iso-curves", "--measure", "concurrence", "--state", files["two_qubit"], "--csv", "--count", 16)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,y,z" and len(lines) > 1
    for line in lines[1:]:
        assert np.linalg.norm(list(map(float, line.split(",")))) == pytest.approx(1.0, abs=1e-12)


def test_byte_deterministic_across_processes(files):
    argv = [sys.executable, "-m", "polyroof.cli", "roof", "--measure", "tangle", "--state", str(files["mixed3"]),
            "--method", "oracle", "--restarts", "4", "--seed", "7", "--witness"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and b'"exact": false' in first


def test_classify_markdown(capsys):
    code, out, _ = run_cli(capsys, "classify", "--samples", 5, "--seed", 7, "--markdown")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("| Class")
    # the only disagreement is the b=0 variant of the G4 degenerate row, recorded as a known conflict
    diffs = [line for line in lines if line.startswith("- ")]
    assert len(diffs) == 4 and all(d.startswith("- G4 [a=±b, a=0, b=0]") and "'b=0': '2*'" in d for d in diffs)
    assert lines[-1] == "FAIL"
