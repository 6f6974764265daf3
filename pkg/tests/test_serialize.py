import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
import pytest

from ghzcost import serialize


def test_canonical_json_scalars():
    assert serialize.canonical_json(None) == "null"
    assert serialize.canonical_json(True) == "true"
    assert serialize.canonical_json(7) == "7"
    assert serialize.canonical_json("a\"b") == '"a\\"b"'
    assert serialize.canonical_json(0.1) == "0.10000000000000001"
    assert serialize.canonical_json(1.0) == "1"
    assert serialize.canonical_json(math.nan) == "null"
    assert serialize.canonical_json(math.inf) == "null"
    assert serialize.canonical_json(2 + 3j) == "[2,3]"


def test_canonical_json_sorts_keys_and_nests():
    text = serialize.canonical_json({"b": [1, (2, 3)], "a": {"y": 1, "x": 2}})
    assert text == '{"a":{"x":2,"y":1},"b":[1,[2,3]]}'
    assert json.loads(text) == {"a": {"x": 2, "y": 1}, "b": [1, [2, 3]]}


def test_canonical_json_numpy_and_dataclass():
    @dataclass
    class Row:
        n: int
        v: float

    arr = np.array([1 + 0j, 0.5j])
    text = serialize.canonical_json({"arr": arr, "row": Row(2, 0.25), "f": np.float64(0.5)})
    assert json.loads(text) == {
        "arr": [[1, 0], [0, 0.5]],
        "row": {"n": 2, "v": 0.25},
        "f": 0.5,
    }


def test_canonical_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        serialize.canonical_json(object())


def test_csv_cells_and_quoting():
    assert serialize.csv_cell(None) == ""
    assert serialize.csv_cell(math.inf) == ""
    assert serialize.csv_cell(True) == "true"
    assert serialize.csv_cell(0.1) == "0.10000000000000001"
    assert serialize.csv_cell('say "hi", twice') == '"say ""hi"", twice"'
    text = serialize.csv_text(["a", "b"], [[1, None], [0.5, "x"]])
    assert text == "a,b\n1,\n0.5,x\n"


def test_write_text_digest_and_atomicity(tmp_path):
    path = str(tmp_path / "sub" / "out.json")
    digest = serialize.write_json(path, {"k": 1})
    body = open(path, encoding="utf-8").read()
    assert body == '{"k":1}\n'
    assert digest == hashlib.sha256(body.encode()).hexdigest()
    assert not (tmp_path / "sub" / "out.json.tmp").exists()
    # overwrite goes through the same temp-and-rename path
    serialize.write_json(path, {"k": 2})
    assert json.load(open(path)) == {"k": 2}


def test_identical_objects_identical_bytes(tmp_path):
    obj = {"floats": [0.1 + 0.2, 1e-300, -0.0], "c": 1j, "n": math.nan}
    a = serialize.write_json(str(tmp_path / "a.json"), obj)
    b = serialize.write_json(str(tmp_path / "b.json"), obj)
    assert a == b
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
