import json
import math

import numpy as np
import pytest

from renyi_bounds.errors import DomainError, ParseError
from renyi_bounds.linalg import random_density
from renyi_bounds.serialization import (decode_matrix, dump_state, encode_matrix, format_float, load_state,
                                        to_jsonable, write_csv)


def test_roundtrip(tmp_path, rng):
    rho = random_density(4, seed=rng)
    path = tmp_path / "s.json"
    dump_state(path, rho, (2, 2))
    mat, dims = load_state(path)
    assert dims == (2, 2)
    assert np.array_equal(mat, 0.5 * (rho + rho.conj().T))
    assert np.array_equal(decode_matrix(encode_matrix(rho)), rho)


def test_real_entries_accepted():
    mat, dims = load_state({"matrix": [[0.5, 0], [0, 0.5]]})
    assert dims == (2,) and mat[0, 0] == 0.5


@pytest.mark.parametrize("obj,err", [
    ({"matrix": [[1, 0], [1, 0]]}, DomainError),
    ({"matrix": [[0.6, 0], [0, 0.6]]}, DomainError),
    ({"matrix": [[1.5, 0], [0, -0.5]]}, DomainError),
    ({"matrix": [[0.5, 0], [0, 0.5]], "dims": [3]}, ParseError),
    ({"matrix": [[0.5, 0, 0], [0, 0.5]]}, ParseError),
    ({"matrix": [[[0.5, 0, 1], 0], [0, 0.5]]}, ParseError),
    ({"dims": [2]}, ParseError),
    ({"matrix": [["x", 0], [0, 1]]}, ParseError),
])
def test_validation(obj, err):
    with pytest.raises(err):
        load_state(obj)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_state(p)


@pytest.mark.parametrize("x,s", [(math.inf, "inf"), (-math.inf, "-inf"), (math.nan, "nan"),
                                 (1 / 3, "0.333333333333"), (None, "")])
def test_format_float(x, s):
    assert format_float(x) == s


def test_csv_lf_and_format(tmp_path):
    text = write_csv([[1.0, math.inf, "a"]], ["x", "y", "z"], tmp_path / "o.csv")
    assert text == "x,y,z\n1,inf,a\n"
    assert (tmp_path / "o.csv").read_bytes() == text.encode()


def test_to_jsonable():
    obj = to_jsonable({"m": np.eye(2, dtype=complex), "v": np.float64(math.inf), "z": 1 + 2j})
    json.dumps(obj)
    assert obj["v"] == "inf" and obj["z"] == [1.0, 2.0]
