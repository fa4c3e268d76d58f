"""Binary trees, the perturbed discrete attractor flow and flow tree coefficients.

Trees are nested tuples: a leaf is an ``int`` label in ``0..r-1`` (printed
as ``1..r``) and an internal vertex is a tuple of its children sorted by
smallest leaf label.  Binary trees have only 2-tuples; limit trees may
have longer tuples.  An internal vertex is identified by its leaf set.

The flow from a point ``theta_p`` along charge ``g_v`` is the ray
``theta_p + t <g_v, ->``.  At an internal vertex with children ``A``, ``B``
the splitting time solves ``theta_v(g_A) = 0``::

    t_v = -theta_p(g_A) / <g_B, g_A>

A tree is valid when every ``t_v > 0``.  Validity is decided on perturbed
charges; multiplicities ``|<g_A, g_B>|`` use the original integer charges.
"""

from __future__ import annotations

import functools
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .config import RunConfig
from .errors import DegenerateFlow, DimensionMismatch, GenericityError, PerturbationMismatch
from .quiver import Quiver, as_covector, pair, skew_form, walls_and_chamber

log = logging.getLogger(__name__)

Tree = Union[int, tuple]

# fixed large prime for perturbation denominators
PRIME = 1_000_003


# ---------------------------------------------------------------------------
# tree combinatorics


def leaves(tree: Tree) -> frozenset:
    if isinstance(tree, int):
        return frozenset((tree,))
    return frozenset().union(*(leaves(c) for c in tree))


def _key(tree: Tree) -> int:
    return tree if isinstance(tree, int) else min(leaves(tree))


def canonical(tree: Tree) -> Tree:
    if isinstance(tree, int):
        return tree
    return tuple(sorted((canonical(c) for c in tree), key=_key))


def internal_vertices(tree: Tree) -> list[tuple]:
    """Internal vertices in preorder (root first, children by smallest leaf)."""
    if isinstance(tree, int):
        return []
    out = [tree]
    for c in tree:
        out += internal_vertices(c)
    return out


def is_binary(tree: Tree) -> bool:
    return all(len(v) == 2 for v in internal_vertices(tree))


def encode(tree: Tree) -> str:
    """Nested-parentheses encoding with 1-based leaf labels, e.g. ``((1,2),3)``."""
    if isinstance(tree, int):
        return str(tree + 1)
    return "(" + ",".join(encode(c) for c in tree) + ")"


def parse_tree(text: str) -> Tree:
    """Inverse of ``encode``; labels must be exactly 1..r."""
    text = text.replace(" ", "") + "$"
    pos = 0

    def node():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            kids = [node()]
            while text[pos] == ",":
                pos += 1
                kids.append(node())
            if text[pos] != ")":
                raise ValueError(f"expected ')' at {pos} in {text!r}")
            pos += 1
            if len(kids) < 2:
                raise ValueError("internal vertices need at least two children")
            return tuple(kids)
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"expected a leaf label at {pos} in {text!r}")
        return int(text[start:pos]) - 1

    tree = node()
    if pos != len(text) - 1:
        raise ValueError(f"trailing characters in tree {text[:-1]!r}")
    labels = sorted(_labels(tree))
    if labels != list(range(len(labels))):
        raise ValueError(f"leaf labels of {text[:-1]!r} must be 1..{len(labels)}, each once")
    return canonical(tree)


def _labels(tree: Tree) -> list[int]:
    return [tree] if isinstance(tree, int) else [x for c in tree for x in _labels(c)]


def _trees_on(labels: tuple) -> Iterator[Tree]:
    if len(labels) == 1:
        yield labels[0]
        return
    first, rest = labels[0], labels[1:]
    for k in range(len(rest)):
        for comb in itertools.combinations(rest, k):
            a = (first,) + comb
            b = tuple(x for x in rest if x not in comb)
            for ta in _trees_on(a):
                for tb in _trees_on(b):
                    yield (ta, tb)


def enumerate_trees(r: int) -> Iterator[Tree]:
    """Every rooted binary tree with leaves 0..r-1, once each; (2r-3)!! of them."""
    if r < 1:
        raise ValueError("need at least one leaf")
    yield from _trees_on(tuple(range(r)))


def vertex_charge(vertex: Tree, parts: Sequence[Sequence]) -> tuple:
    ls = leaves(vertex)
    return tuple(sum(parts[i][k] for i in ls) for k in range(len(parts[0])))


def multiplicity(q: Quiver, tree: Tree, parts: Sequence[Sequence[int]]) -> int:
    """Product over internal vertices of |<g_A, g_B>|, with unperturbed charges."""
    m = 1
    for v in internal_vertices(tree):
        a, b = v
        m *= abs(skew_form(q, vertex_charge(a, parts), vertex_charge(b, parts)))
    return m


# ---------------------------------------------------------------------------
# perturbation


def _draw(rng: random.Random, bound: Fraction) -> Fraction:
    return bound * Fraction(rng.randint(-PRIME, PRIME), PRIME)


@dataclass(frozen=True)
class PerturbationData:
    """Perturbed charges, pairing and stability parameter for one decomposition.

    For ``bound > 0`` the ambient space is Q^(d+r): the first d coordinates
    are M_Q with charges ``g_i + eps_i``, and one auxiliary coordinate per
    part carries a small random skew block so that the pairings between
    parts are generic.  For ``bound == 0`` the ambient space is Q^d and
    nothing is perturbed.
    """

    parts: tuple[tuple[int, ...], ...]
    base_theta: tuple[Fraction, ...]
    seed: int
    bound: Fraction
    charges: tuple[tuple[Fraction, ...], ...]
    form: tuple[tuple[Fraction, ...], ...]
    theta: tuple[Fraction, ...]
    d: int

    @property
    def dim(self) -> int:
        return len(self.theta)

    @functools.cached_property
    def pairings(self) -> tuple[tuple[Fraction, ...], ...]:
        """alpha[i][j] = <g_i, g_j> on perturbed charges."""
        return tuple(tuple(self.pair(x, y) for y in self.charges) for x in self.charges)

    @functools.cached_property
    def leaf_values(self) -> tuple[Fraction, ...]:
        return tuple(pair(self.theta, g) for g in self.charges)

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        s = self.form
        n = self.dim
        return sum(
            (x[i] * s[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j] and s[i][j]),
            Fraction(0),
        )

    def direction(self, x: Sequence) -> tuple[Fraction, ...]:
        """The covector <x, ->."""
        s = self.form
        n = self.dim
        return tuple(sum((x[i] * s[i][j] for i in range(n) if x[i]), Fraction(0)) for j in range(n))

    @functools.cached_property
    def _directions(self) -> dict:
        return {frozenset((i,)): self.direction(g) for i, g in enumerate(self.charges)}

    def vertex_direction(self, vertex: Tree) -> tuple[Fraction, ...]:
        """<g_v, ->, summed from cached leaf directions."""
        key = leaves(vertex)
        cache = self._directions
        if key not in cache:
            cols = [cache[frozenset((i,))] for i in key]
            cache[key] = tuple(sum(c) for c in zip(*cols))
        return cache[key]

    def charge(self, vertex: Tree) -> tuple[Fraction, ...]:
        ls = leaves(vertex)
        return tuple(sum((self.charges[i][k] for i in ls), Fraction(0)) for k in range(self.dim))


def perturb(q: Quiver, parts: Sequence[Sequence[int]], theta: Sequence, seed: int = 1,
            bound: Fraction = Fraction(1, 10**6)) -> PerturbationData:
    """Deterministic pseudorandom perturbation of (parts, theta).

    Coordinates are ``bound * k / PRIME`` with ``k`` uniform in
    ``[-PRIME, PRIME]`` from ``random.Random(seed)``.  The stability
    parameter is corrected along the dual of the first auxiliary coordinate
    (where the total charge is exactly 1) so that ``theta_hat(g_hat) = 0``.
    """
    parts = tuple(tuple(int(x) for x in g) for g in parts)
    theta = as_covector(theta)
    d, r = q.d, len(parts)
    for g in parts:
        if len(g) != d:
            raise DimensionMismatch(f"part {g} does not have length {d}")
    if len(theta) != d:
        raise DimensionMismatch(f"theta has length {len(theta)}, expected {d}")
    bound = Fraction(bound)
    skew = [[Fraction(x) for x in row] for row in q.skew_matrix]
    if bound == 0:
        return PerturbationData(
            parts, theta, seed, bound,
            tuple(tuple(Fraction(x) for x in g) for g in parts),
            tuple(tuple(row) for row in skew), theta, d,
        )
    if bound < 0:
        raise ValueError("perturbation bound must be nonnegative")
    rng = random.Random(seed)
    n = d + r
    charges = []
    for i, g in enumerate(parts):
        m_part = [Fraction(x) + _draw(rng, bound) for x in g]
        aux = [Fraction(int(j == i)) for j in range(r)]
        charges.append(tuple(m_part + aux))
    form = [[Fraction(0)] * n for _ in range(n)]
    for i in range(d):
        for j in range(d):
            form[i][j] = skew[i][j]
    for i in range(r):
        for j in range(i + 1, r):
            e = _draw(rng, bound)
            form[d + i][d + j] = e
            form[d + j][d + i] = -e
    th = [t + _draw(rng, bound) for t in theta] + [_draw(rng, bound) for _ in range(r)]
    total = [sum((c[k] for c in charges), Fraction(0)) for k in range(n)]
    th[d] -= pair(th, total) / total[d]
    return PerturbationData(parts, theta, seed, bound, tuple(charges),
                            tuple(tuple(row) for row in form), tuple(th), d)


# ---------------------------------------------------------------------------
# the flow on a given tree


@dataclass
class FlowResult:
    tree: Tree
    times: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    status: str = "valid"  # valid | invalid | degenerate
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def ordered(self) -> list[tuple[tuple, Fraction, tuple]]:
        return [(v, self.times[v], self.points[v]) for v in internal_vertices(self.tree) if v in self.times]


class FlowConsistencyError(AssertionError):
    pass


def discrete_flow(q: Quiver, tree: Tree, p: PerturbationData) -> FlowResult:
    """Run the flow top-down on every internal vertex of a binary tree.

    Degenerate (zero denominator or zero time) takes precedence over
    invalid (some negative time).  The two formulas for t_v, via either
    child, are checked to agree exactly.
    """
    tree = canonical(tree)
    if len(leaves(tree)) != len(p.parts):
        raise DimensionMismatch(f"tree has {len(leaves(tree))} leaves, {len(p.parts)} parts given")
    res = FlowResult(tree)
    negative = []

    def visit(vertex, parent_point):
        if isinstance(vertex, int):
            return
        a, b = vertex
        ga, gb = p.charge(a), p.charge(b)
        den = p.pair(gb, ga)
        if den == 0:
            res.status, res.reason = "degenerate", f"zero denominator at {encode(vertex)}"
            return
        t = -pair(parent_point, ga) / den
        t_other = -pair(parent_point, gb) / p.pair(ga, gb)
        if t != t_other:
            raise FlowConsistencyError(f"t_v mismatch at {encode(vertex)}: {t} != {t_other}")
        if t == 0:
            res.status, res.reason = "degenerate", f"zero time at {encode(vertex)}"
        elif t < 0:
            negative.append(vertex)
        w = p.direction(p.charge(vertex))
        point = tuple(x + t * y for x, y in zip(parent_point, w))
        res.times[vertex] = t
        res.points[vertex] = point
        visit(a, point)
        visit(b, point)

    visit(tree, p.theta)
    if res.status == "valid" and negative:
        res.status, res.reason = "invalid", f"negative time at {encode(negative[0])}"
    return res


# ---------------------------------------------------------------------------
# fused enumeration + flow


def _search(labels: tuple, vals: tuple, alpha, alpha_hat) -> list[tuple[Tree, int]]:
    # vals[j] is the current point evaluated on perturbed charge j
    if len(labels) == 1:
        return [(labels[0], 1)]
    out = []
    first, rest = labels[0], labels[1:]
    r = len(vals)
    for k in range(len(rest)):
        for comb in itertools.combinations(rest, k):
            a = (first,) + comb
            b = tuple(x for x in rest if x not in comb)
            m = abs(sum(alpha[i][j] for i in a for j in b))
            if m == 0:
                continue
            den = sum(alpha_hat[i][j] for i in b for j in a)
            if den == 0:
                raise DegenerateFlow(f"zero denominator splitting {a} | {b}")
            t = -sum(vals[i] for i in a) / den
            if t == 0:
                raise DegenerateFlow(f"zero time splitting {a} | {b}")
            if t < 0:
                continue
            new = tuple(vals[j] + t * sum(alpha_hat[i][j] for i in labels) for j in range(r))
            left = _search(a, new, alpha, alpha_hat)
            if not left:
                continue
            right = _search(b, new, alpha, alpha_hat)
            for ta, ma in left:
                for tb, mb in right:
                    out.append(((ta, tb), m * ma * mb))
    return out


def contributing_trees(q: Quiver, p: PerturbationData) -> list[tuple[Tree, int]]:
    """(tree, multiplicity) for every binary tree with valid flow and nonzero multiplicity.

    Trees are built by splitting the leaf set at the root; a branch is
    abandoned as soon as its time is negative or its multiplicity is zero.
    Raises DegenerateFlow on a zero time or denominator along the search.
    """
    parts = p.parts
    r = len(parts)
    alpha = [[skew_form(q, x, y) for y in parts] for x in parts]
    return _search(tuple(range(r)), p.leaf_values, alpha, p.pairings)


def check_generic(q: Quiver, g: Sequence[int], theta: Sequence) -> None:
    chamber = walls_and_chamber(q, g, theta)
    if not chamber.generic:
        n = chamber.violated[0]
        raise GenericityError(f"theta lies on the wall of normal {n} for gamma {tuple(g)}", normal=n)


@dataclass
class FlowRun:
    """Outcome of the retry loop for one seed."""

    value: int
    trees: list[tuple[Tree, int]]
    perturbation: PerturbationData


def run_flow(q: Quiver, parts: Sequence[Sequence[int]], theta: Sequence, seed: int,
             config: RunConfig = RunConfig()) -> FlowRun:
    """Contributing trees for the first non-degenerate perturbation from ``seed`` on."""
    bound = config.bound
    s = seed
    for _ in range(config.escalations + 1):
        for _ in range(config.seed_retries + 1):
            p = perturb(q, parts, theta, s, Fraction(1, bound))
            try:
                trees = contributing_trees(q, p)
            except DegenerateFlow as exc:
                log.debug("degenerate perturbation seed=%d B=%d: %s", s, bound, exc)
                s += 1
                continue
            return FlowRun(sum(m for _, m in trees), trees, p)
        bound *= 100
    raise DegenerateFlow(
        f"flow stayed degenerate after {config.seed_retries} retries x {config.escalations} escalations"
    )


def _prepare(q: Quiver, parts, theta):
    parts = tuple(tuple(int(x) for x in g) for g in parts)
    theta = as_covector(theta)
    if not parts:
        raise ValueError("need at least one part")
    total = tuple(sum(g[k] for g in parts) for k in range(q.d))
    check_generic(q, total, theta)
    return parts, theta


def f_coefficient(q: Quiver, parts: Sequence[Sequence[int]], theta: Sequence,
                  config: RunConfig = RunConfig()) -> int:
    """F_r^theta(g_1..g_r): sum over valid binary trees of vertex multiplicities.

    With ``config.verify`` the value is recomputed from three distinct seeds
    and PerturbationMismatch is raised if they disagree.
    """
    parts, theta = _prepare(q, parts, theta)
    return _f_cached(q, tuple(sorted(parts)), theta, config)


@functools.lru_cache(maxsize=None)
def _f_cached(q: Quiver, parts: tuple, theta: tuple, config: RunConfig) -> int:
    if len(parts) == 1:
        return 1
    run = run_flow(q, parts, theta, config.seed, config)
    if config.verify:
        values = [run.value]
        seed = run.perturbation.seed
        for _ in range(2):
            other = run_flow(q, parts, theta, seed + 1, config)
            values.append(other.value)
            seed = other.perturbation.seed
        if len(set(values)) != 1:
            raise PerturbationMismatch(f"F differs across seeds for parts {parts}: {values}")
    return run.value


# ---------------------------------------------------------------------------
# limit trees


def contract(tree: Tree, times: dict) -> Tree:
    """Merge every internal vertex whose (limit) time is zero into its parent."""
    if isinstance(tree, int):
        return tree
    kids = []
    for c in tree:
        c2 = contract(c, times)
        if not isinstance(c, int) and times.get(c) == 0:
            kids.extend(c2)
        else:
            kids.append(c2)
    return canonical(tuple(kids))


UNRESOLVED = "unresolved"


def limit_tree(q: Quiver, tree: Tree, parts: Sequence[Sequence[int]], theta: Sequence):
    """The epsilon -> 0 limit of a binary tree, or UNRESOLVED on a 0/0 time."""
    p0 = perturb(q, parts, theta, bound=Fraction(0))
    res = discrete_flow(q, tree, p0)
    if len(res.times) != len(internal_vertices(canonical(tree))) or any(t < 0 for t in res.times.values()):
        return UNRESOLVED
    return contract(res.tree, res.times)


def f_by_limit_tree(q: Quiver, parts: Sequence[Sequence[int]], theta: Sequence,
                    config: RunConfig = RunConfig(), run: FlowRun | None = None) -> dict:
    """Map limit tree -> F_{r,T}; contributions of unresolved trees go under UNRESOLVED."""
    parts, theta = _prepare(q, parts, theta)
    if len(parts) == 1:
        return {0: 1}
    if run is None:
        run = run_flow(q, parts, theta, config.seed, config)
    groups: dict = {}
    for tree, m in run.trees:
        t = limit_tree(q, tree, parts, theta)
        groups[t] = groups.get(t, 0) + m
    return groups
