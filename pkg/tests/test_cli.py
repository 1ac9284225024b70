import json
import math
import subprocess
import sys

import pytest

from trifid.cli import main

S = 1 / math.sqrt(2)


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "m1": write(tmp_path / "m1.json", {"weights": [1, 0]}),
        "m2": write(tmp_path / "m2.json", {"weights": [0.5, 0.5]}),
        "half": write(tmp_path / "half.json", {"dim": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}),
        "d10": write(tmp_path / "d10.json", {"dim": 2, "entries": [[1, 0], [0, 0], [0, 0], [0, 0]]}),
        "e1": write(tmp_path / "e1.json", {"amplitudes": [[1, 0], [0, 0]]}),
        "e2": write(tmp_path / "e2.json", {"amplitudes": [[0, 0], [1, 0]]}),
        "plus": write(tmp_path / "plus.json", {"amplitudes": [[S, 0], [S, 0]]}),
        "iplus": write(tmp_path / "iplus.json", {"amplitudes": [[S, 0], [0, S]]}),
        "bad": write(tmp_path / "bad.json", {"amplitudes": [[1, 0], [1, 0]]}),
        "bx": write(tmp_path / "bx.json", {"x": 1, "y": 0, "z": 0}),
        "by": write(tmp_path / "by.json", {"x": 0, "y": 1, "z": 0}),
        "bz": write(tmp_path / "bz.json", {"x": 0, "y": 0, "z": 1}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fidelity(capsys, files):
    assert run(capsys, "fidelity", "--kind", "classical", files["m1"], files["m2"])[:2] == (0, "0.5\n")
    assert run(capsys, "fidelity", "--kind", "mixed", files["half"], files["d10"])[:2] == (0, "0.5\n")
    assert run(capsys, "fidelity", "--kind", "pure", files["e1"], files["e1"])[:2] == (0, "1\n")
    code, out, _ = run(capsys, "fidelity", "--kind", "bloch", files["bz"], files["bx"], "--json")
    assert code == 0 and json.loads(out) == {"kind": "bloch", "fidelity": 0.5}


def test_fidelity_errors_name_file_and_field(capsys, files):
    code, _, err = run(capsys, "fidelity", "--kind", "pure", files["e1"], files["bad"])
    assert code == 2 and "bad.json" in err and "amplitudes" in err
    code, _, err = run(capsys, "fidelity", "--kind", "pure", files["e1"], files["m1"])
    assert code == 2 and "m1.json" in err


def test_check_triple(capsys):
    code, out, _ = run(capsys, "check-triple", "--f12", "1", "--f13", "1", "--f23", "1")
    assert code == 0 and out.startswith("ExtremeCorner")
    code, out, _ = run(capsys, "check-triple", "--f12", "1", "--f13", "1", "--f23", "0")
    assert code == 1 and out.startswith("Outside")
    code, out, _ = run(capsys, "check-triple", "--f12", "0.36", "--f13", "0.64", "--f23", "0.9216", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "BoundarySurface"
    assert run(capsys, "check-triple", "--f12", "1.5", "--f13", "0", "--f23", "0")[0] == 2


def test_witness(capsys, files):
    code, out, _ = run(capsys, "witness", "--f12", "1", "--f13", "1", "--f23", "1")
    assert code == 0 and json.loads(out)["space_size"] == 1
    out_path = str(files["dir"] / "w.json")
    code, _, _ = run(capsys, "witness", "--f12", "0.36", "--f13", "0.64", "--f23", "0.9216", "--output", out_path)
    doc = json.loads(open(out_path).read())
    assert code == 0 and doc["space_size"] == 2
    assert abs(doc["achieved"]["f23"] - 0.9216) <= 1e-12
    code, out, _ = run(capsys, "witness", "--f12", "0", "--f13", "0", "--f23", "0", "--kind", "quantum")
    states = json.loads(out)["states"]
    assert code == 0 and states == [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]
    assert run(capsys, "witness", "--f12", "1", "--f13", "1", "--f23", "0")[0] == 1


def test_phase(capsys, files):
    assert run(capsys, "phase", files["e1"], files["e1"], files["e1"])[:2] == (0, "0\n")
    code, out, _ = run(capsys, "phase", files["e1"], files["plus"], files["iplus"])
    assert code == 0 and abs(float(out) - math.pi / 4) <= 1e-10
    code, _, err = run(capsys, "phase", files["e1"], files["e2"], files["plus"])
    assert code == 1 and "ZeroFidelity" in err
    code, out, _ = run(capsys, "phase", "--bloch", "--json", files["bx"], files["by"], files["bz"])
    doc = json.loads(out)
    assert code == 0 and abs(doc["cos_phase"] - 1 / math.sqrt(2)) <= 1e-12
    assert abs(math.cos(doc["phase"]) - doc["cos_phase"]) <= 1e-9


def test_phase_mixed_is_experimental(capsys, tmp_path):
    diag = [write(tmp_path / f"r{i}.json", {"dim": 2, "entries": [[p, 0], [0, 0], [0, 0], [1 - p, 0]]}) for i, p in enumerate((0.7, 0.4, 0.2))]
    cfg = write(tmp_path / "opt.json", {"restarts": 2, "seed": 3})
    with pytest.warns(UserWarning, match="experimental"):
        code, out, _ = run(capsys, "phase", "--mixed", "--config", cfg, "--json", *diag)
    doc = json.loads(out)
    assert code == 0 and doc["experimental"] is True and doc["phase"] <= 1e-3
    bad = write(tmp_path / "opt2.json", {"bogus": 1})
    assert run(capsys, "phase", "--mixed", "--config", bad, *diag)[0] == 2


def test_reconstruct(capsys, tmp_path):
    inp = write(tmp_path / "inv.json", {"n": 2, "fidelities": [[1, 0.25], [0.25, 1]], "phases": []})
    out_path = str(tmp_path / "seq.json")
    code, _, _ = run(capsys, "reconstruct", "--input", inp, "--output", out_path, "--verify")
    rows = json.loads(open(out_path).read())["rows"]
    assert code == 0
    assert rows == [[[1.0, 0.0]], [[0.5, 0.0], [0.866025403784, 0.0]]]

    inp = write(tmp_path / "pi4.json", {"n": 3, "fidelities": [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]], "phases": [{"k": 2, "j": 3, "value": math.pi / 4}]})
    code, _, err = run(capsys, "reconstruct", "--input", inp, "--verify")
    assert code == 0 and float(err.split()[-1]) <= 1e-10

    inp = write(tmp_path / "bad.json", {"n": 3, "fidelities": [[1, 1, 1], [1, 1, 0], [1, 0, 1]], "phases": [{"k": 2, "j": 3, "value": 0}]})
    code, _, err = run(capsys, "reconstruct", "--input", inp)
    assert code == 1 and "InconsistentData" in err

    inp = write(tmp_path / "schema.json", {"n": 3, "fidelities": [[1]], "phases": []})
    assert run(capsys, "reconstruct", "--input", inp)[0] == 2


def test_campaign(capsys, tmp_path):
    cfg = write(tmp_path / "c.json", {"kind": "pure-triple", "dims": [2, 3], "samples": 500, "master_seed": 4, "tolerance": 1e-9})
    code, out, err = run(capsys, "campaign", cfg)
    rep = json.loads(out)
    assert code == 0 and rep["violations"] == 0 and "violations" in err
    code, out2, err = run(capsys, "campaign", cfg, "--jobs", "2", "--quiet")
    rep2 = json.loads(out2)
    rep.pop("wall_time"), rep2.pop("wall_time")
    assert code == 0 and rep == rep2 and err == ""
    bad = write(tmp_path / "bad.json", {"kind": "pure-triple", "dims": [1], "samples": 5})
    assert run(capsys, "campaign", bad)[0] == 2
    fails = write(tmp_path / "l3.json", {"kind": "lemma3", "dims": [2], "samples": 2, "master_seed": 0, "tolerance": 1e-6})
    code, out, _ = run(capsys, "campaign", fails, "--quiet")
    assert code == (1 if json.loads(out)["violations"] else 0)


def test_campaign_env_seed(capsys, tmp_path, monkeypatch):
    cfg = write(tmp_path / "c.json", {"kind": "pure-triple", "dims": [2], "samples": 10, "master_seed": 4})
    monkeypatch.setenv("TRIFID_SEED", "77")
    code, out, _ = run(capsys, "campaign", cfg, "--quiet")
    assert code == 0 and json.loads(out)["config"]["master_seed"] == 77


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check-triple", "--f12", "1", "--f13", "1", "--f23", "1", "--unknown"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "trifid", "check-triple", "--f12", "0.25", "--f13", "0.25", "--f23", "0.25"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("Inside")
