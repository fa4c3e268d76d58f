"""Finite-field point counts of quiver moduli via the Harder-Narasimhan recursion.

This is an independent check on the flow-tree engine.  Counts are exact
rational functions in q.  For an acyclic quiver, a primitive dimension
vector and a generic stability parameter the moduli space is smooth and
projective, its point count is a polynomial, and the value at q = 1 is
its Euler characteristic.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import GenericityError, NotAcyclic, OracleError
from .quiver import Quiver, as_covector, divisibility, euler_form, pair, sub_vectors, walls_and_chamber


def _trim(coeffs) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Polynomial in q with rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-x for x in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return Poly(tuple(out))

    def scale(self, c) -> "Poly":
        return Poly(tuple(x * c for x in self.coeffs))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        for k in range(len(quot) - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[k + j] -= c * y
        return Poly(tuple(quot)), Poly(tuple(rem))

    def monic(self) -> "Poly":
        return self.scale(1 / self.coeffs[-1])

    def __call__(self, x):
        total = Fraction(0)
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def __str__(self) -> str:
        if not self:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic() if a else a


ONE = Poly((1,))


@dataclass(frozen=True)
class RationalFunctionQ:
    """num/den in reduced form with a monic denominator."""

    num: Poly
    den: Poly = ONE

    def __post_init__(self):
        if not self.den:
            raise ZeroDivisionError("zero denominator")
        num, den = self.num, self.den
        if not num:
            num, den = Poly(), ONE
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.divmod(g)[0], den.divmod(g)[0]
            lead = den.coeffs[-1]
            num, den = num.scale(1 / lead), den.scale(1 / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def q_power(cls, k: int) -> "RationalFunctionQ":
        return cls(Poly.monomial(k)) if k >= 0 else cls(ONE, Poly.monomial(-k))

    def __add__(self, other: "RationalFunctionQ") -> "RationalFunctionQ":
        if self.den == other.den:
            return RationalFunctionQ(self.num + other.num, self.den)
        return RationalFunctionQ(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFunctionQ":
        return RationalFunctionQ(-self.num, self.den)

    def __sub__(self, other: "RationalFunctionQ") -> "RationalFunctionQ":
        return self + (-other)

    def __mul__(self, other: "RationalFunctionQ") -> "RationalFunctionQ":
        return RationalFunctionQ(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunctionQ") -> "RationalFunctionQ":
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunctionQ(self.num * other.den, self.den * other.num)

    @property
    def is_polynomial(self) -> bool:
        return self.den == ONE

    def __call__(self, x) -> Fraction:
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at q = {x}")
        return self.num(x) / d

    def __str__(self) -> str:
        return str(self.num) if self.is_polynomial else f"({self.num}) / ({self.den})"


ZERO_RF = RationalFunctionQ(Poly())
ONE_RF = RationalFunctionQ(ONE)


def gl_order(n: int) -> Poly:
    """|GL_n(F_q)| = prod_{k<n} (q^n - q^k)."""
    out = ONE
    for k in range(n):
        out = out * (Poly.monomial(n) - Poly.monomial(k))
    return out


@functools.lru_cache(maxsize=None)
def stacky_count_all(q: Quiver, g: tuple) -> RationalFunctionQ:
    """q^(sum a_ij g_i g_j) / prod_i |GL_{g_i}|: all representations over the gauge group."""
    g = tuple(int(x) for x in g)
    edges = sum(q.arrows[i][j] * g[i] * g[j] for i in range(q.d) for j in range(q.d))
    den = ONE
    for n in g:
        den = den * gl_order(n)
    return RationalFunctionQ(Poly.monomial(edges), den)


def _slope(theta, v) -> Fraction:
    return pair(theta, v) / sum(v)


def _minus(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _twist(q: Quiver, rest, first) -> RationalFunctionQ:
    return RationalFunctionQ.q_power(-euler_form(q, rest, first))


@functools.lru_cache(maxsize=None)
def _ss(q: Quiver, theta: tuple, g: tuple) -> RationalFunctionQ:
    mu = _slope(theta, g)
    total = stacky_count_all(q, g)
    for first in sub_vectors(g):
        m1 = _slope(theta, first)
        if m1 > mu:
            rest = _minus(g, first)
            total = total - _ss(q, theta, first) * _twist(q, rest, first) * _below(q, theta, rest, m1)
    return total


@functools.lru_cache(maxsize=None)
def _below(q: Quiver, theta: tuple, e: tuple, bound: Fraction) -> RationalFunctionQ:
    # sum over HN types of e whose slopes are all < bound
    if not any(e):
        return ONE_RF
    total = ZERO_RF
    for first in sub_vectors(e, strict=False):
        m1 = _slope(theta, first)
        if m1 < bound:
            rest = _minus(e, first)
            total = total + _ss(q, theta, first) * _twist(q, rest, first) * _below(q, theta, rest, m1)
    return total


def stacky_count_ss(q: Quiver, g: Sequence[int], theta: Sequence) -> RationalFunctionQ:
    """Semistable representations of dimension g over the gauge group.

    Slopes are theta(d)/sum(d); theta need not vanish on g.  Solves the
    Harder-Narasimhan recursion by induction on g.
    """
    g = tuple(int(x) for x in g)
    if any(x < 0 for x in g):
        raise ValueError(f"dimension vector {g} has negative coordinates")
    if not any(g):
        return ONE_RF
    return _ss(q, as_covector(theta), g)


def hn_types(g: Sequence[int], theta: Sequence) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Every tuple (d^1, ..., d^s) summing to g with strictly decreasing slope."""
    g = tuple(int(x) for x in g)
    theta = as_covector(theta)

    def go(e, bound):
        if not any(e):
            yield ()
            return
        for first in sub_vectors(e, strict=False):
            m1 = _slope(theta, first)
            if bound is None or m1 < bound:
                for tail in go(_minus(e, first), m1):
                    yield (first,) + tail

    yield from go(g, None)


def hn_term(q: Quiver, hn_type: Sequence[Sequence[int]], theta: Sequence) -> RationalFunctionQ:
    """q^(-sum_{k<l} chi(d^l, d^k)) * prod_k stacky_count_ss(d^k)."""
    exp = 0
    out = ONE_RF
    for k, dk in enumerate(hn_type):
        out = out * stacky_count_ss(q, dk, theta)
        for dl in hn_type[k + 1:]:
            exp -= euler_form(q, dl, dk)
    return out * RationalFunctionQ.q_power(exp)


def _check_preconditions(q: Quiver, g, theta) -> None:
    if not q.is_acyclic:
        raise NotAcyclic("the point-count oracle only covers acyclic quivers")
    if divisibility(g) != 1:
        raise OracleError(f"dimension vector {tuple(g)} is not primitive")
    chamber = walls_and_chamber(q, g, theta)
    if not chamber.generic:
        n = chamber.violated[0]
        raise GenericityError(f"theta lies on the wall of normal {n} for gamma {tuple(g)}", normal=n)


def stable_point_count(q: Quiver, g: Sequence[int], theta: Sequence) -> Poly:
    """Number of F_q-points of the stable moduli space, as a polynomial in q."""
    g = tuple(int(x) for x in g)
    theta = as_covector(theta)
    _check_preconditions(q, g, theta)
    count = stacky_count_ss(q, g, theta) * RationalFunctionQ(Poly((-1, 1)))
    if not count.is_polynomial:
        raise OracleError(f"point count {count} is not a polynomial")
    poly = count.num
    if any(c < 0 or c.denominator != 1 for c in poly.coeffs):
        raise OracleError(f"point count {poly} has a coefficient that is negative or not an integer")
    return poly


def euler_char(q: Quiver, g: Sequence[int], theta: Sequence) -> int:
    """Euler characteristic of the stable moduli space: the point count at q = 1."""
    return int(stable_point_count(q, g, theta)(1))


def coefficient_list(poly: Poly) -> list[int]:
    return [int(c) for c in poly.coeffs]


# ---------------------------------------------------------------------------
# brute-force enumeration over a prime field, for cross-checking tiny cases


def _subspaces(n: int, p: int) -> list[tuple[tuple[int, ...], ...]]:
    """Every subspace of F_p^n, as a sorted tuple of its elements."""
    vectors = list(itertools.product(range(p), repeat=n))
    seen = set()
    for k in range(n + 1):
        for gens in itertools.combinations(vectors, k):
            span = {tuple([0] * n)}
            for v in gens:
                span = {tuple((a + c * b) % p for a, b in zip(u, v)) for u in span for c in range(p)}
            seen.add(tuple(sorted(span)))
    return sorted(seen, key=len)


def _apply(mat, v, p):
    return tuple(sum(mat[i][j] * v[j] for j in range(len(v))) % p for i in range(len(mat)))


def brute_force_stacky_ss(q: Quiver, g: Sequence[int], theta: Sequence, p: int) -> Fraction:
    """Count theta-semistable representations over F_p, divided by |G_g(F_p)|.

    Exponential; only meant for dimension vectors with entries <= 2 and
    p in {2, 3}.
    """
    g = tuple(int(x) for x in g)
    theta = as_covector(theta)
    arrows = [(i, j) for i in range(q.d) for j in range(q.d) for _ in range(q.arrows[i][j])]
    subs = [_subspaces(n, p) for n in g]
    mu = _slope(theta, g)

    def matrices(rows, cols):
        for entries in itertools.product(range(p), repeat=rows * cols):
            yield tuple(tuple(entries[r * cols:(r + 1) * cols]) for r in range(rows))

    count = 0
    for maps in itertools.product(*(list(matrices(g[j], g[i])) for i, j in arrows)):
        ok = True
        for choice in itertools.product(*subs):
            dims = tuple(_log(len(s), p) for s in choice)
            if not any(dims) or dims == g:
                continue
            closed = all(
                _apply(m, v, p) in set(choice[j]) for (i, j), m in zip(arrows, maps) for v in choice[i]
            )
            if closed and _slope(theta, dims) > mu:
                ok = False
                break
        count += ok
    group = 1
    for n in g:
        group *= int(gl_order(n)(p))
    return Fraction(count, group)


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k
