from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quiverdt import io
from quiverdt.errors import ParseError
from quiverdt.dt import DTTable, ATTRACTOR
from quiverdt.quiver import Quiver


def test_parse_rational():
    assert io.parse_rational("3") == 3
    assert io.parse_rational(" -3/6 ") == Fraction(-1, 2)
    assert io.parse_rational(4) == 4
    for bad in ["1.5", "1/0", "", "x", True, "1/-2"]:
        with pytest.raises(ParseError):
            io.parse_rational(bad)


@given(st.fractions())
def test_rational_round_trip(x):
    assert io.parse_rational(io.format_rational(x)) == x


def test_vectors_and_parts():
    assert io.parse_covector("1,-1/2") == (1, Fraction(-1, 2))
    assert io.parse_vector("1,2") == (1, 2)
    assert io.parse_parts("1,0; 0,1") == ((1, 0), (0, 1))
    for bad in ["1,,2", "", "1/2,1"]:
        with pytest.raises(ParseError):
            io.parse_vector(bad)
    with pytest.raises(ParseError):
        io.parse_parts("1,0;1")


def test_toml_round_trip():
    q = Quiver(((0, 2), (1, 0)), name="2-cycle")
    table = DTTable({(1, 0): 1, (0, 1): 1, (1, 1): -2}, ATTRACTOR)
    q2, t2 = io.quiver_from_toml(io.quiver_to_toml(q, table))
    assert q2 == q and t2.entries == table.entries


def test_toml_without_attractor():
    q, table = io.quiver_from_toml('vertices = 2\narrows = [[0, 3], [0, 0]]\n')
    assert q.arrows == ((0, 3), (0, 0)) and table is None


@pytest.mark.parametrize("text,line", [
    ("vertices = 2\narrows = [[0, 3], [0, 0]\n", 2),
    ("vertices = 2\narrows = [[0, -1], [0, 0]]\n", 2),
    ("vertices = 2\n\narrows = [[0, 1]]\n", 3),
    ("name = 3\nvertices = 2\narrows = [[0, 1], [0, 0]]\n", 1),
    ("vertices = 0\narrows = []\n", 1),
    ("vertices = 2\narrows = [[0, 1], [0, 0]]\nattractor = [{gamma = [1], omega = 1}]\n", 3),
    ("vertices = 2\narrows = [[0, 1], [0, 0]]\nattractor = [{gamma = [1, 0], omega = 1.5}]\n", 3),
    ("vertices = 2\narrows = [[0, 1], [0, 0]]\nattractor = [{gamma = [1, 0], omega = 1}, {gamma = [1, 0], omega = 2}]\n", 3),
])
def test_toml_errors_have_positions(text, line):
    with pytest.raises(ParseError) as exc:
        io.quiver_from_toml(text)
    assert exc.value.line == line
    assert exc.value.column is not None


def test_missing_keys():
    with pytest.raises(ParseError, match="arrows"):
        io.quiver_from_toml("vertices = 2\n")
    with pytest.raises(ParseError, match="vertices"):
        io.quiver_from_toml("arrows = []\n")


def test_read_quiver_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        io.read_quiver(tmp_path / "nope.toml")


def test_dumps_is_deterministic():
    obj = {"b": 1, "a": ["1/2"]}
    assert io.dumps(obj) == io.dumps(obj) == '{\n  "b": 1,\n  "a": [\n    "1/2"\n  ]\n}\n'
