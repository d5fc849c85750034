import json

import numpy as np
import pytest

from entprobe.errors import InvariantViolation
from entprobe.io import FormatError, dumps, from_record, load, load_observables, save, to_record
from entprobe.measure import Observable
from entprobe.qcore import bell, random_density, random_hermitian, random_pure


def test_pure_roundtrip_bit_exact(tmp_path):
    for seed in range(10):
        psi = random_pure((2, 3, 2), seed)
        save(psi, tmp_path / "s.json")
        back = load(tmp_path / "s.json", expect="pure")
        assert np.array_equal(back.amplitudes, psi.amplitudes)


def test_density_and_observable_roundtrip(tmp_path, rng):
    rho = random_density((2, 2), rng)
    save(rho, tmp_path / "r.json")
    assert np.array_equal(load(tmp_path / "r.json").matrix, rho.matrix)
    obs = Observable((2, 2), random_hermitian(4, rng), "H")
    save(obs, tmp_path / "o.json")
    back = load(tmp_path / "o.json", expect="observable")
    assert np.array_equal(back.matrix, obs.matrix) and back.label == "H"


def test_layout():
    rec = to_record(bell())
    assert rec["dims"] == [2, 2] and rec["kind"] == "pure"
    assert rec["data"][0] == [pytest.approx(2**-0.5), 0.0]
    text = dumps(rec)
    assert json.loads(text) == rec


def test_seventeen_digits():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(1.0) == "1"
    assert dumps(0.0) == "0.0"
    assert dumps([1, 2.5, True, None, "x"]) == '[1, 2.5, true, null, "x"]'


def test_matrix_is_row_major(rng):
    m = np.arange(4).reshape(2, 2).astype(complex)
    m = (m + m.T) / 2 + 1j * (m - m.T) / 2
    rec = to_record(Observable((2,), m))
    flat = [complex(a, b) for a, b in rec["data"]]
    assert flat == list(m.reshape(-1))


@pytest.mark.parametrize(
    "rec",
    [
        [],
        {"dims": [2], "kind": "pure"},
        {"dims": [2], "kind": "qubit", "data": [[1, 0], [0, 0]]},
        {"dims": [2], "kind": "pure", "data": [[1, 0]]},
        {"dims": [2], "kind": "density", "data": [[1, 0], [0, 0]]},
        {"dims": [2], "kind": "pure", "data": [[1, 0, 3], [0, 0]]},
    ],
)
def test_malformed(rec):
    with pytest.raises(FormatError):
        from_record(rec)


def test_invalid_physics_is_not_parse_error():
    with pytest.raises(InvariantViolation):
        from_record({"dims": [2], "kind": "pure", "data": [[1, 0], [1, 0]]})


def test_kind_mismatch(tmp_path):
    save(bell(), tmp_path / "b.json")
    with pytest.raises(FormatError):
        load(tmp_path / "b.json", expect="density")


def test_observable_list(tmp_path, rng):
    recs = [to_record(Observable((2,), random_hermitian(2, rng))) for _ in range(3)]
    (tmp_path / "obs.json").write_text(dumps(recs))
    obs = load_observables(tmp_path / "obs.json")
    assert [o.label for o in obs] == ["O1", "O2", "O3"]


def test_unreadable(tmp_path):
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(FormatError):
        load(tmp_path / "bad.json")
    with pytest.raises(FormatError):
        load(tmp_path / "missing.json")
