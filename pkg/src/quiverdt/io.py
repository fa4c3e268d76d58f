"""Quiver files, command-line values and JSON output.

Quiver files are TOML::

    name = "3-Kronecker"          # optional
    vertices = 2
    arrows = [[0, 3], [0, 0]]
    attractor = [                 # optional
        {gamma = [1, 0], omega = 1},
        {gamma = [0, 1], omega = 1},
    ]

Rationals are written as ``"p/q"`` strings or bare integers everywhere.
"""

from __future__ import annotations

import json
import re
import sys
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dt import ATTRACTOR, DTTable
from .errors import ParseError
from .quiver import Quiver

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
_TOML_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def parse_rational(text) -> Fraction:
    """An integer or "p/q"; no floats, no zero denominators."""
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL.match(str(text))
    if not m:
        raise ParseError(f"not a rational: {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x) -> str:
    """Canonical "p/q" string; integers print without a denominator."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vector(v) -> list[str]:
    return [format_rational(x) for x in v]


def parse_covector(text: str) -> tuple[Fraction, ...]:
    items = [s for s in text.split(",")]
    if not text.strip() or any(not s.strip() for s in items):
        raise ParseError(f"empty entry in {text!r}")
    return tuple(parse_rational(s) for s in items)


def parse_vector(text: str) -> tuple[int, ...]:
    values = parse_covector(text)
    if any(v.denominator != 1 for v in values):
        raise ParseError(f"dimension vector {text!r} must have integer entries")
    return tuple(int(v) for v in values)


def parse_parts(text: str) -> tuple[tuple[int, ...], ...]:
    """Parts separated by ';', coordinates by ','; e.g. "1,0;0,1"."""
    parts = tuple(parse_vector(chunk) for chunk in text.split(";"))
    if len({len(p) for p in parts}) != 1:
        raise ParseError(f"parts in {text!r} have different lengths")
    return parts


def _key_position(text: str, key: str) -> tuple[int | None, int | None]:
    for n, line in enumerate(text.splitlines(), start=1):
        m = re.match(rf"^(\s*){re.escape(key)}\s*=", line)
        if m:
            return n, len(m.group(1)) + 1
    return None, None


def _load(text: str, source: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _TOML_POS.search(str(exc))
        msg = _TOML_POS.sub("", str(exc)).strip()
        if m:
            raise ParseError(f"{source}: {msg}", int(m.group(1)), int(m.group(2))) from None
        # "(at end of document)": point just past the last character
        msg = msg.replace("(at end of document)", "").strip()
        lines = text.splitlines() or [""]
        raise ParseError(f"{source}: {msg} at end of file", len(lines), len(lines[-1]) + 1) from None


def _int_matrix(value, d, text, source):
    line, col = _key_position(text, "arrows")
    if not isinstance(value, list) or len(value) != d:
        raise ParseError(f"{source}: arrows must be a list of {d} rows", line, col)
    for row in value:
        if not isinstance(row, list) or len(row) != d:
            raise ParseError(f"{source}: every arrows row must have {d} entries", line, col)
        for a in row:
            if isinstance(a, bool) or not isinstance(a, int) or a < 0:
                raise ParseError(f"{source}: arrow counts must be nonnegative integers, got {a!r}", line, col)
    return tuple(tuple(row) for row in value)


def quiver_from_toml(text: str, source: str = "<quiver>") -> tuple[Quiver, DTTable | None]:
    """Parse a quiver file; returns the quiver and its attractor table, if any."""
    data = _load(text, source)
    if "vertices" not in data:
        raise ParseError(f"{source}: missing key 'vertices'", 1, 1)
    d = data["vertices"]
    line, col = _key_position(text, "vertices")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ParseError(f"{source}: vertices must be a positive integer", line, col)
    if "arrows" not in data:
        raise ParseError(f"{source}: missing key 'arrows'", 1, 1)
    arrows = _int_matrix(data["arrows"], d, text, source)
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ParseError(f"{source}: name must be a string", *_key_position(text, "name"))
    q = Quiver(arrows, name=name)
    attractor = None
    if "attractor" in data:
        attractor = _attractor_entries(data["attractor"], d, text, source)
    return q, attractor


def _attractor_entries(value, d, text, source) -> DTTable:
    line, col = _key_position(text, "attractor")
    if not isinstance(value, list):
        raise ParseError(f"{source}: attractor must be a list of tables", line, col)
    entries = {}
    for item in value:
        if not isinstance(item, dict) or set(item) != {"gamma", "omega"}:
            raise ParseError(f"{source}: attractor entries need exactly the keys gamma and omega", line, col)
        g, omega = item["gamma"], item["omega"]
        if not isinstance(g, list) or len(g) != d or any(isinstance(x, bool) or not isinstance(x, int) for x in g):
            raise ParseError(f"{source}: attractor gamma must be a list of {d} integers, got {g!r}", line, col)
        if not any(g):
            raise ParseError(f"{source}: attractor gamma must be nonzero", line, col)
        if isinstance(omega, bool) or not isinstance(omega, int):
            raise ParseError(f"{source}: attractor omega must be an integer, got {omega!r}", line, col)
        if tuple(g) in entries:
            raise ParseError(f"{source}: duplicate attractor entry for gamma {g}", line, col)
        entries[tuple(g)] = omega
    return DTTable(entries, ATTRACTOR)


def read_quiver(path) -> tuple[Quiver, DTTable | None]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return quiver_from_toml(text, str(path))


def quiver_to_toml(q: Quiver, attractor: DTTable | None = None) -> str:
    lines = []
    if q.name:
        lines.append(f"name = {json.dumps(q.name)}")
    lines.append(f"vertices = {q.d}")
    lines.append("arrows = [" + ", ".join("[" + ", ".join(str(a) for a in row) + "]" for row in q.arrows) + "]")
    if attractor is not None:
        lines.append("attractor = [")
        for g in sorted(attractor.entries):
            lines.append(f"    {{gamma = [{', '.join(str(x) for x in g)}], omega = {int(attractor[g])}}},")
        lines.append("]")
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    """Deterministic JSON: key order as built, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
