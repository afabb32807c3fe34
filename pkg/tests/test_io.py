import json
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from toricna.errors import InputError
from toricna.io import decode_rational, dumps, encode, load_json, polytope_from_json, write_csv
from toricna.nonarchimedean import make_config, na_report


@given(st.fractions())
def test_rational_round_trip(x):
    assert decode_rational(json.loads(dumps(x))) == x


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert json.loads(dumps({"v": x}))["v"] == x


def test_report_round_trip(hinge):
    rep = na_report(make_config(hinge.P, hinge))
    back = json.loads(dumps(rep))
    for k, v in rep.as_dict().items():
        if v is not None:
            assert decode_rational(back[k]) == v


def test_polytope_json():
    assert polytope_from_json({"interval": [0, [3, 2]]}).interval_ends == (0, Fr(3, 2))
    assert polytope_from_json({"dim": 1, "vertices": [[0, 1], [2, 1]]}).interval_ends == (0, 2)
    assert polytope_from_json({"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}).n == 2
    with pytest.raises(InputError):
        polytope_from_json({"dim": 2, "vertices": [[0, 0, 0]]})
    with pytest.raises(InputError):
        polytope_from_json([1, 2])


def test_load_json_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{nope")
    with pytest.raises(InputError, match="malformed"):
        load_json(p)
    with pytest.raises(InputError, match="cannot read"):
        load_json(tmp_path / "missing.json")


def test_csv_cells():
    text = write_csv([(Fr(1, 3), 0.1, "a")], ["q", "x", "s"])
    assert text == "q,x,s\n1/3,0.1,a\n"
    assert encode((Fr(2, 4), None, True)) == [[1, 2], None, True]


def test_potential_json_validation(P1):
    from toricna.potentials import potential_from_json
    with pytest.raises(InputError, match="at least 6"):
        potential_from_json(P1, {"kind": "grid", "y": [0.25, 0.5, 0.75], "ustar": [0, 0, 0]})
    with pytest.raises(InputError):
        potential_from_json(P1, {"kind": "lse-weights", "weights": [1, -1]})
    with pytest.raises(InputError):
        potential_from_json(P1, {"kind": "nope"})
