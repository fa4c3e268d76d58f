"""Quivers, dimension vectors, bilinear forms and the wall structure on gamma-perp."""

from __future__ import annotations

import functools
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import _linalg
from .errors import DimensionMismatch, NotStabilityParameter

DimVector = tuple[int, ...]
Covector = tuple[Fraction, ...]


@dataclass(frozen=True)
class Quiver:
    """A quiver on vertices ``0..d-1`` given by its arrow-multiplicity matrix.

    ``arrows[i][j]`` is the number of arrows from vertex i to vertex j.
    Loops are allowed in the data but do not contribute to the skew form.
    """

    arrows: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in row) for row in self.arrows)
        d = len(rows)
        if d < 1:
            raise ValueError("a quiver needs at least one vertex")
        if any(len(row) != d for row in rows):
            raise DimensionMismatch(f"arrow matrix must be {d}x{d}")
        if any(a < 0 for row in rows for a in row):
            raise ValueError("arrow multiplicities must be nonnegative")
        object.__setattr__(self, "arrows", rows)

    @classmethod
    def kronecker(cls, n: int) -> "Quiver":
        return cls(((0, n), (0, 0)), name=f"{n}-Kronecker")

    @property
    def d(self) -> int:
        return len(self.arrows)

    @functools.cached_property
    def skew_matrix(self) -> tuple[tuple[int, ...], ...]:
        a = self.arrows
        return tuple(tuple(a[i][j] - a[j][i] for j in range(self.d)) for i in range(self.d))

    @functools.cached_property
    def is_acyclic(self) -> bool:
        # Kahn's algorithm; a loop a_ii > 0 is a cycle
        indeg = [sum(1 for i in range(self.d) if self.arrows[i][j] > 0) for j in range(self.d)]
        ready = [j for j in range(self.d) if indeg[j] == 0]
        seen = 0
        while ready:
            i = ready.pop()
            seen += 1
            for j in range(self.d):
                if self.arrows[i][j] > 0:
                    indeg[j] -= 1
                    if indeg[j] == 0:
                        ready.append(j)
        return seen == self.d

    def basis(self, i: int) -> DimVector:
        return tuple(int(k == i) for k in range(self.d))


def _check(q: Quiver, *vectors: Sequence) -> None:
    for v in vectors:
        if len(v) != q.d:
            raise DimensionMismatch(f"vector {tuple(v)} has length {len(v)}, quiver has {q.d} vertices")


def skew_form(q: Quiver, x: Sequence, y: Sequence):
    """<x, y> = sum_ij x_i y_j (a_ij - a_ji)."""
    _check(q, x, y)
    s = q.skew_matrix
    return sum(x[i] * s[i][j] * y[j] for i in range(q.d) if x[i] for j in range(q.d) if y[j])


def euler_form(q: Quiver, x: Sequence, y: Sequence):
    """chi(x, y) = sum_i x_i y_i - sum_ij a_ij x_i y_j.

    Note the orientation: skew_form(x, y) = chi(y, x) - chi(x, y).
    """
    _check(q, x, y)
    a = q.arrows
    return sum(x[i] * y[i] for i in range(q.d)) - sum(
        a[i][j] * x[i] * y[j] for i in range(q.d) for j in range(q.d)
    )


def attractor_point(q: Quiver, g: Sequence) -> tuple:
    """The covector <g, ->, i.e. i -> <g, e_i>."""
    _check(q, g)
    s = q.skew_matrix
    return tuple(sum(g[i] * s[i][j] for i in range(q.d)) for j in range(q.d))


def pair(theta: Sequence, g: Sequence):
    """Evaluate a covector on a vector."""
    if len(theta) != len(g):
        raise DimensionMismatch(f"covector length {len(theta)} != vector length {len(g)}")
    return sum(t * x for t, x in zip(theta, g))


def divisibility(g: Sequence[int]) -> int:
    if not any(g):
        raise ValueError("divisibility of the zero vector is undefined")
    return math.gcd(*(int(x) for x in g))


def primitive(g: Sequence[int]) -> DimVector:
    k = divisibility(g)
    return tuple(int(x) // k for x in g)


def sub_vectors(g: Sequence[int], strict: bool = True) -> Iterator[DimVector]:
    """All gamma' with 0 < gamma' <= g coordinatewise (gamma' != g if strict)."""
    g = tuple(g)
    for v in itertools.product(*(range(k + 1) for k in g)):
        if any(v) and not (strict and v == g):
            yield v


def as_covector(theta: Sequence) -> Covector:
    return tuple(Fraction(t) for t in theta)


@dataclass(frozen=True)
class Wall:
    """The locus normal^perp inside gamma^perp, for a primitive 0 < normal < gamma."""

    normal: DimVector
    # every strict subvector whose restriction to gamma^perp is proportional
    members: tuple[DimVector, ...] = ()


@dataclass(frozen=True)
class Chamber:
    gamma: DimVector
    theta: Covector
    walls: tuple[Wall, ...]
    signs: tuple[int, ...]

    @property
    def generic(self) -> bool:
        return all(self.signs)

    @property
    def violated(self) -> tuple[DimVector, ...]:
        return tuple(w.normal for w, s in zip(self.walls, self.signs) if s == 0)


def _wall_order(v: DimVector):
    return (sum(v), tuple(-x for x in v))


@functools.lru_cache(maxsize=None)
def walls(g: DimVector) -> tuple[Wall, ...]:
    """Distinct walls in gamma^perp, deduplicated as loci.

    Two normals give the same locus when their restrictions to gamma^perp
    are proportional, i.e. when rank(n, n', gamma) <= 2.  Normals
    proportional to gamma restrict to zero and are not walls.  Only the
    arrangement of gamma matters, so the quiver is not an argument.
    """
    g = tuple(int(x) for x in g)
    if any(x < 0 for x in g) or not any(g):
        raise ValueError(f"wall analysis needs a nonzero nonnegative dimension vector, got {g}")
    normals = sorted({primitive(v) for v in sub_vectors(g)}, key=_wall_order)
    groups: list[list[DimVector]] = []
    for n in normals:
        if _linalg.rank([n, g]) < 2:
            continue
        for grp in groups:
            if _linalg.rank([grp[0], n, g]) <= 2:
                grp.append(n)
                break
        else:
            groups.append([n])
    return tuple(Wall(grp[0], tuple(grp)) for grp in groups)


def walls_and_chamber(q: Quiver, g: Sequence[int], theta: Sequence) -> Chamber:
    """Wall list of gamma and the signs of theta on each wall normal.

    The chamber is generic iff every sign is nonzero.  Raises
    NotStabilityParameter when theta(g) != 0.
    """
    g = tuple(int(x) for x in g)
    _check(q, g, theta)
    theta = as_covector(theta)
    if pair(theta, g) != 0:
        raise NotStabilityParameter(f"theta{_fmt(theta)} does not vanish on gamma {g}")
    ws = walls(g)
    signs = tuple(_sign(pair(theta, w.normal)) for w in ws)
    return Chamber(g, theta, ws, signs)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _fmt(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def perp_basis(g: Sequence[int]) -> list[tuple[int, ...]]:
    """Integral basis (over Q) of gamma^perp in M_Q."""
    basis = _linalg.kernel_basis([g], len(g))
    out = []
    for v in basis:
        den = math.lcm(*(x.denominator for x in v))
        iv = [int(x * den) for x in v]
        k = math.gcd(*iv)
        out.append(tuple(x // k for x in iv))
    return out


def _half(v) -> int:
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def chamber_samples(g: Sequence[int], per_chamber: int = 3, seed: int = 0) -> dict[tuple[int, ...], list[Covector]]:
    """Generic stability parameters grouped by chamber (sign vector over walls(g)).

    Exact and complete when gamma^perp has dimension <= 2 (d <= 3); for
    larger d the chambers are found by seeded random sampling and thin
    chambers may be missed.
    """
    g = tuple(int(x) for x in g)
    ws = walls(g)
    basis = perp_basis(g)
    dim = len(basis)

    def lift(coeffs) -> Covector:
        return tuple(
            Fraction(sum(c * b[i] for c, b in zip(coeffs, basis))) for i in range(len(g))
        )

    weights = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
    candidates: list[Covector] = []
    if dim == 0:
        candidates = [tuple(Fraction(0) for _ in g)]
    elif dim == 1:
        candidates = [lift((k,)) for k in range(1, per_chamber + 1)]
        if ws:
            candidates += [lift((-k,)) for k in range(1, per_chamber + 1)]
    elif dim == 2:
        rays = []
        for w in ws:
            a, b = (pair(w.normal, basis[0]), pair(w.normal, basis[1]))
            rays += [(-b, a), (b, -a)]
        if not rays:
            candidates = [lift(c) for c in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)][: max(per_chamber, 1)]]
        elif len(rays) == 2:
            (x, y) = rays[0]
            normal = (y, -x)
            for s in (1, -1):
                for k in range(per_chamber):
                    t = (k + 1) // 2 * (1 if k % 2 else -1)
                    candidates.append(lift((s * normal[0] + t * x, s * normal[1] + t * y)))
        else:
            rays.sort(key=functools.cmp_to_key(_angle_cmp))
            for i, u in enumerate(rays):
                v = rays[(i + 1) % len(rays)]
                for a, b in weights[:per_chamber]:
                    candidates.append(lift((a * u[0] + b * v[0], a * u[1] + b * v[1])))
    else:
        rng = random.Random(seed)
        for _ in range(400 * per_chamber * max(1, len(ws))):
            candidates.append(lift([rng.randint(-12, 12) for _ in range(dim)]))

    out: dict[tuple[int, ...], list[Covector]] = {}
    for theta in candidates:
        signs = tuple(_sign(pair(theta, w.normal)) for w in ws)
        if not all(signs):
            continue
        bucket = out.setdefault(signs, [])
        if theta not in bucket and len(bucket) < per_chamber:
            bucket.append(theta)
    return out
