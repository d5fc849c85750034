import json
import subprocess
import sys

import numpy as np
import pytest

from entprobe.cli import main
from entprobe.io import dumps, save, to_record
from entprobe.measure import Observable
from entprobe.qcore import PLUS, PureState, ghz, ket, product_vector, random_hermitian


@pytest.fixture
def files(tmp_path):
    save(ghz(3), tmp_path / "ghz3.json")
    save(PureState((2, 2, 2), product_vector(ket(2, 0), PLUS, ket(2, 1))), tmp_path / "product3.json")
    (tmp_path / "malformed.json").write_text('{"dims": [2, 2], "kind": "pure", "data": [[1, 0]')
    (tmp_path / "unnormalized.json").write_text(dumps({"dims": [2], "kind": "pure", "data": [[1, 0], [1, 0]]}))
    return tmp_path


def test_verify_ghz(files, capsys):
    assert main(["verify", str(files / "ghz3.json")]) == 3
    out = json.loads(capsys.readouterr().out)
    assert out["b"] == 1


def test_verify_product(files):
    out = files / "v.json"
    assert main(["verify", str(files / "product3.json"), "--json", str(out)]) == 0
    verdict = json.loads(out.read_text())
    assert verdict["b"] == 0 and verdict["total_observables"] <= 6
    assert set(verdict["parties"][0]) == {"k", "l", "s", "alphas"}
    manifest = json.loads((files / "v.json.manifest.json").read_text())
    assert manifest["command"] == "verify" and manifest["outputs"] == [str(out)]


def test_verify_errors(files):
    assert main(["verify", str(files / "malformed.json")]) == 1
    assert main(["verify", str(files / "missing.json")]) == 1
    assert main(["verify", str(files / "unnormalized.json")]) == 2


def test_witness_random(tmp_path):
    out = tmp_path / "w.json"
    assert main(["witness", "2,2", "--random", "14", "--property", "ppt", "--json", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["report"]["max_stat_gap"] <= 1e-9
    assert payload["report"]["observable_count"] == 14
    assert payload["rho"]["kind"] == "density"


def test_witness_complete(capsys):
    assert main(["witness", "2,2", "--random", "16"]) == 2
    assert "t = 15" in capsys.readouterr().err


def test_witness_qubit_qutrit():
    for seed in range(3):
        assert main(["witness", "2,3", "--random", "34", "--property", "ppt", "--seed", str(seed)]) == 0


def test_witness_observable_file(tmp_path, rng):
    recs = [to_record(Observable((2, 2), random_hermitian(4, rng), f"A{i}")) for i in range(12)]
    (tmp_path / "obs.json").write_text(dumps(recs))
    assert main(["witness", "2,2", "--observables", str(tmp_path / "obs.json")]) == 0


def test_witness_not_found(tmp_path, monkeypatch):
    import entprobe.cli as cli
    from entprobe.errors import NotFound

    def fail(*a, **k):
        raise NotFound("none", {"bases": []})

    monkeypatch.setattr(cli, "indistinguishable_pair", fail)
    out = tmp_path / "nf.json"
    assert main(["witness", "2,2", "--random", "3", "--json", str(out)]) == 4
    assert json.loads(out.read_text())["status"] == "not_found"


def test_upb(capsys):
    assert main(["upb", "--restarts", "16"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["PASS pt_invariant", "PASS ppt_all_bipartitions", "PASS product_overlap_below_1"]


def test_budget(capsys):
    assert main(["budget", "2,2,2"]) == 0
    out = capsys.readouterr().out
    for value in ("63", "6", "4"):
        assert value in out
    assert main(["budget", "2x10"]) == 0
    out = capsys.readouterr().out
    assert "1048575" in out and "27" in out


def test_budget_json(tmp_path):
    out = tmp_path / "b.json"
    main(["budget", "2,2,2", "--json", str(out)])
    data = json.loads(out.read_text())
    assert (data["t"], data["upper"], data["adaptive_lower"], data["nonadaptive_lower"]) == (63, 6, 4, 6)


def test_bad_shape():
    with pytest.raises(SystemExit) as exc:
        main(["budget", "1,2"])
    assert exc.value.code == 2


def _run(args, cwd):
    return subprocess.run([sys.executable, "-m", "entprobe.cli", *args], cwd=cwd, capture_output=True)


def test_module_entry_point(files):
    res = _run(["verify", "ghz3.json"], files)
    assert res.returncode == 3
