"""DT tables, multicover repackaging and assembly of Omega^theta from attractor data."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import flow
from .config import RunConfig
from .errors import IntegralityError, MissingEntry, NotAcyclic
from .quiver import (Chamber, DimVector, Quiver, as_covector, attractor_point, divisibility,
                     euler_form, primitive, sub_vectors, walls_and_chamber)

log = logging.getLogger(__name__)

INTEGER = "integer"
RATIONAL = "rational"
ATTRACTOR = "attractor"
RATIONAL_ATTRACTOR = "rational-attractor"
KINDS = (INTEGER, RATIONAL, ATTRACTOR, RATIONAL_ATTRACTOR)


@dataclass(frozen=True)
class DTTable:
    """Finitely supported map dimension vector -> rational.

    Absent entries read as zero; explicit zeros are kept so that
    ``g in table`` tells "known to vanish" from "missing".  Attractor
    tables may contain vectors with mixed-sign coordinates; they never
    appear in a decomposition of a nonnegative vector and are reported by
    ``mixed_sign_support``.
    """

    entries: Mapping[DimVector, Fraction]
    kind: str = INTEGER

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")
        clean = {}
        for g, v in self.entries.items():
            g = tuple(int(x) for x in g)
            if not any(g):
                raise ValueError("DT tables are supported on nonzero vectors")
            if any(x < 0 for x in g) and self.kind not in (ATTRACTOR, RATIONAL_ATTRACTOR):
                raise ValueError(f"support vector {g} has negative coordinates")
            v = Fraction(v)
            if self.kind in (INTEGER, ATTRACTOR) and v.denominator != 1:
                raise ValueError(f"integer table has non-integer value {v} at {g}")
            clean[g] = v
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, g) -> Fraction:
        return self.entries.get(tuple(g), Fraction(0))

    def __contains__(self, g) -> bool:
        return tuple(g) in self.entries

    @property
    def support(self) -> list[DimVector]:
        return sorted(g for g, v in self.entries.items() if v)

    @property
    def mixed_sign_support(self) -> list[DimVector]:
        return sorted(g for g in self.entries if any(x < 0 for x in g) and any(x > 0 for x in g))

    def scaled(self, c) -> "DTTable":
        return DTTable({g: v * c for g, v in self.entries.items()}, self.kind)


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def multicover_sign(q: Quiver | None, base: Sequence[int], k: int) -> int:
    """Sign of the k-fold cover term of base in the rational invariant.

    Without a quiver this is (-1)^(k-1).  With a quiver it is
    (-1)^((k+1) chi(base, base)), which agrees with (-1)^(k-1) exactly when
    chi(base, base) is odd and otherwise makes every sign positive.  The
    quiver-aware rule is what keeps e.g. the 2-Kronecker (2,2) invariant
    at 0, where the stable locus is empty.
    """
    if q is None:
        return (-1) ** (k - 1)
    return -1 if (k + 1) * euler_form(q, base, base) % 2 else 1


def rational_from_integer_dt(table: DTTable, g: Sequence[int], q: Quiver | None = None) -> Fraction:
    """sum over k | div(g) of sign_k / k^2 * table[g/k].

    ``sign_k`` is (-1)^(k-1) unless a quiver is passed; see
    ``multicover_sign``.
    """
    g = tuple(int(x) for x in g)
    n = divisibility(g)
    total = Fraction(0)
    for k in _divisors(n):
        base = tuple(x // k for x in g)
        total += Fraction(multicover_sign(q, base, k), k * k) * table[base]
    return total


def integer_from_rational_dt(table: DTTable, g: Sequence[int], q: Quiver | None = None) -> tuple[Fraction, bool]:
    """Invert the multicover sum along the ray through g.

    Returns (Omega(g), is_integer).  Every g/k for k | div(g) must be
    present in ``table`` (zero values included), else MissingEntry.
    """
    g = tuple(int(x) for x in g)
    n = divisibility(g)
    base = primitive(g)
    omega: dict[int, Fraction] = {}
    for m in _divisors(n):
        v = tuple(m * x for x in base)
        if v not in table:
            raise MissingEntry(f"rational DT value missing at {v}")
        rest = Fraction(0)
        for k in _divisors(m):
            if k > 1:
                w = tuple((m // k) * x for x in base)
                rest += Fraction(multicover_sign(q, w, k), k * k) * omega[m // k]
        omega[m] = table[v] - rest
    value = omega[n]
    return value, value.denominator == 1


def default_attractor_acyclic(q: Quiver, g: Sequence[int]) -> int:
    """Attractor invariants of an acyclic quiver: 1 on simple vectors e_i, else 0."""
    if not q.is_acyclic:
        raise NotAcyclic("quiver has an oriented cycle; supply an attractor table")
    g = tuple(g)
    return int(sum(g) == 1 and all(x in (0, 1) for x in g))


def acyclic_attractor_table(q: Quiver) -> DTTable:
    if not q.is_acyclic:
        raise NotAcyclic("quiver has an oriented cycle; supply an attractor table")
    return DTTable({q.basis(i): 1 for i in range(q.d)}, ATTRACTOR)


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[DimVector, ...]

    @property
    def aut_order(self) -> int:
        return math.prod(math.factorial(m) for m in Counter(self.parts).values())

    @property
    def r(self) -> int:
        return len(self.parts)


def _desc(v):
    return tuple(-x for x in v)


def decompositions(g: Sequence[int], support) -> list[Decomposition]:
    """Every multiset of support vectors summing to g.

    Parts are listed in decreasing lexicographic order; decompositions are
    ordered by number of parts, then by parts.
    """
    g = tuple(int(x) for x in g)
    support = sorted({tuple(int(x) for x in s) for s in support if all(a <= b for a, b in zip(s, g))},
                     key=_desc)
    out: list[tuple] = []

    def go(rem, start, cur):
        if not any(rem):
            out.append(tuple(cur))
            return
        for k in range(start, len(support)):
            s = support[k]
            if all(a <= b for a, b in zip(s, rem)):
                cur.append(s)
                go(tuple(b - a for a, b in zip(s, rem)), k, cur)
                cur.pop()

    go(g, 0, [])
    return [Decomposition(p) for p in sorted(out, key=lambda p: (len(p), [_desc(v) for v in p]))]


@dataclass(frozen=True)
class Term:
    """One decomposition's contribution to the rational invariant."""

    parts: tuple[DimVector, ...]
    aut_order: int
    F: int
    attractor_product: Fraction

    @property
    def contribution(self) -> Fraction:
        return Fraction(self.F, self.aut_order) * self.attractor_product


@dataclass
class OmegaResult:
    gamma: DimVector
    theta: tuple[Fraction, ...]
    omega: int
    omega_bar: Fraction
    chamber: Chamber
    breakdown: list[Term]
    # rational invariants of g/k for every k | div(g), keyed by g/k
    omega_bar_divisors: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _rational_attractor_on(attractor: DTTable, g: DimVector, q: Quiver) -> dict[DimVector, Fraction]:
    """Nonzero rational attractor values on 0 < g' <= g."""
    out = {}
    if attractor.kind == RATIONAL_ATTRACTOR:
        for v in sub_vectors(g, strict=False):
            if attractor[v]:
                out[v] = attractor[v]
        return out
    for v in sub_vectors(g, strict=False):
        val = rational_from_integer_dt(attractor, v, q)
        if val:
            out[v] = val
    return out


def omega_bar_theta(q: Quiver, g: Sequence[int], theta: Sequence, attractor: DTTable | None = None,
                    config: RunConfig = RunConfig(), notes: list | None = None) -> tuple[Fraction, list[Term]]:
    """Rational invariant of g at theta: sum over decompositions of F/|Aut| * prod attractor.

    ``attractor`` is an integer attractor table (converted by the multicover
    sum) or a rational one used as is; None means the acyclic default.
    theta must be generic for g.
    """
    g = tuple(int(x) for x in g)
    theta = as_covector(theta)
    if attractor is None:
        attractor = acyclic_attractor_table(q)
    flow.check_generic(q, g, theta)
    values = _rational_attractor_on(attractor, g, q)
    kernel = {v for v in values if not any(attractor_point(q, v))}
    terms = []
    for dec in decompositions(g, values):
        if dec.r > 1 and kernel.intersection(dec.parts):
            msg = f"pruned decomposition {dec.parts}: part in the kernel of the skew form"
            log.info(msg)
            if notes is not None:
                notes.append(msg)
            continue
        F = flow.f_coefficient(q, dec.parts, theta, config)
        prod = math.prod((values[v] for v in dec.parts), start=Fraction(1))
        terms.append(Term(dec.parts, dec.aut_order, F, prod))
    total = sum((t.contribution for t in terms), Fraction(0))
    return total, terms


def omega_theta(q: Quiver, g: Sequence[int], theta: Sequence, attractor: DTTable | None = None,
                config: RunConfig = RunConfig()) -> OmegaResult:
    """Integer DT invariant Omega_g^{+,theta} with its per-decomposition breakdown.

    Raises GenericityError off-chamber and IntegralityError if the inverted
    multicover sum is not an integer.
    """
    g = tuple(int(x) for x in g)
    theta = as_covector(theta)
    chamber = walls_and_chamber(q, g, theta)
    if not chamber.generic:
        flow.check_generic(q, g, theta)
    if attractor is None:
        attractor = acyclic_attractor_table(q)
    notes: list[str] = []
    mixed = attractor.mixed_sign_support
    if mixed:
        notes.append(f"attractor table has mixed-sign support vectors {mixed}; ignored")
        log.warning(notes[-1])
    n = divisibility(g)
    base = primitive(g)
    rational = {}
    breakdown: list[Term] = []
    for k in _divisors(n):
        v = tuple(k * x for x in base)
        value, terms = omega_bar_theta(q, v, theta, attractor, config, notes)
        rational[v] = value
        if v == g:
            breakdown = terms
    omega, integral = integer_from_rational_dt(DTTable(rational, RATIONAL), g, q)
    if not integral:
        raise IntegralityError(f"Omega at gamma {g} came out as {omega}, not an integer")
    return OmegaResult(g, theta, int(omega), rational[g], chamber, breakdown, rational, notes)
