"""Attractor trees as tropical curves: realization by a linear solve, balancing, family dimension.

A binary tree over parts g_1..g_r gives a tropical type in the ambient
space of the perturbation data.  Each internal vertex v gets a position
x_v.  The edge into v has direction <g_v, -> and length l_v.  The root
edge starts at theta.  Leaf i leaves its parent vertex along <g_i, ->
and is constrained to the hyperplane g_i-perp.  None of this uses the
flow recursion: positions and lengths come from one exact linear solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _linalg, flow
from .config import RunConfig
from .errors import DegenerateFlow, InvalidTropicalType
from .flow import PerturbationData, Tree, canonical, internal_vertices, leaves, perturb
from .quiver import Quiver, as_covector, attractor_point

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
DEGENERATE = "degenerate"

ROOT = "root"


@dataclass(frozen=True)
class Leg:
    """A half-infinite edge attached to ``vertex``.

    ``label`` is a leaf index, or ROOT for the leg running back to theta.
    ``direction`` points away from the vertex; ``weight`` is the contact
    order (divisibility of the unperturbed integer direction, 0 if that
    direction is zero).
    """

    vertex: Tree
    label: object
    direction: tuple
    weight: int


@dataclass(frozen=True)
class TropicalType:
    """Combinatorial type of a tree with its weighted directions and constraints.

    ``edges`` are (parent, child, direction) with direction <g_child, ->
    oriented from parent to child.  ``constraints[i]`` is the charge g_i;
    leaf i must lie in the hyperplane where it pairs to zero.
    """

    tree: Tree
    vertices: tuple
    edges: tuple
    legs: tuple[Leg, ...]
    constraints: tuple
    root_point: tuple
    dim: int

    @property
    def leaf_legs(self) -> tuple[Leg, ...]:
        return tuple(leg for leg in self.legs if leg.label != ROOT)

    @property
    def root_leg(self) -> Leg | None:
        return next((leg for leg in self.legs if leg.label == ROOT), None)


def contact_order(q: Quiver, g: Sequence[int]) -> int:
    w = attractor_point(q, g)
    return math.gcd(*(int(x) for x in w)) if any(w) else 0


def tropical_type(q: Quiver, tree: Tree, p: PerturbationData) -> TropicalType:
    """The type of ``tree`` in the ambient space of ``p``.

    Limit trees with higher-valent vertices are accepted; everything else
    in the module treats them the same way.
    """
    tree = canonical(tree)
    r = len(p.parts)
    if leaves(tree) != frozenset(range(r)):
        raise InvalidTropicalType(f"tree {flow.encode(tree)} does not have leaves 1..{r}")
    vertices = tuple(internal_vertices(tree))
    edges = []
    legs = []

    def whole(v):
        return tuple(sum(p.parts[i][k] for i in leaves(v)) for k in range(p.d))

    if vertices:
        w = p.vertex_direction(tree)
        legs.append(Leg(tree, ROOT, tuple(-x for x in w), contact_order(q, whole(tree))))
    for v in vertices:
        for c in v:
            w = p.vertex_direction(c)
            if isinstance(c, int):
                legs.append(Leg(v, c, w, contact_order(q, p.parts[c])))
            else:
                edges.append((v, c, w))
    if not vertices:
        # a single leg through theta, pointing along <g, ->
        legs.append(Leg(tree, tree, p.vertex_direction(tree), contact_order(q, p.parts[tree])))
    return TropicalType(tree, vertices, tuple(edges), tuple(legs), tuple(p.charges), tuple(p.theta), p.dim)


@dataclass
class Realization:
    type: TropicalType
    status: str
    positions: dict = field(default_factory=dict)
    lengths: dict = field(default_factory=dict)
    free_parameters: int = 0
    reason: str | None = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def ordered(self) -> list[tuple[Tree, Fraction, tuple]]:
        return [(v, self.lengths[v], self.positions[v]) for v in self.type.vertices]


def _parent_map(t: TropicalType) -> dict:
    parents = {}
    for v in t.vertices:
        for c in v:
            parents[c] = v
    return parents


def _system(t: TropicalType, pinned: bool, with_root_length: bool):
    """Rows for the edge, root and leaf equations.

    Variables: D coordinates per vertex, then one length per vertex,
    skipping the root's length unless ``with_root_length``.  Vertices are
    numbered in reverse preorder so that each edge row pivots on the
    child's coordinates, which keeps the elimination nearly triangular.
    """
    D = t.dim
    index = {v: k for k, v in enumerate(reversed(t.vertices))}
    nv = len(t.vertices)
    length_col = {}
    col = nv * D
    for v in t.vertices:
        if v == t.tree and not with_root_length:
            continue
        length_col[v] = col
        col += 1
    rows, rhs = [], []
    for parent, child, w in t.edges:
        a, b = index[parent] * D, index[child] * D
        for k in range(D):
            row = {b + k: Fraction(1), a + k: Fraction(-1)}
            if w[k]:
                row[length_col[child]] = -w[k]
            rows.append(row)
            rhs.append(Fraction(0))
    if pinned and t.vertices:
        w = t.root_leg.direction  # equals -<g, ->
        a = index[t.tree] * D
        for k in range(D):
            row = {a + k: Fraction(1)}
            if w[k]:
                row[length_col[t.tree]] = w[k]
            rows.append(row)
            rhs.append(Fraction(t.root_point[k]))
    parents = _parent_map(t)
    for leg in t.leaf_legs:
        v = parents[leg.label]
        g = t.constraints[leg.label]
        a = index[v] * D
        rows.append({a + k: Fraction(g[k]) for k in range(D) if g[k]})
        rhs.append(Fraction(0))
    return rows, rhs, col, index, length_col


def realize(t: TropicalType) -> Realization:
    """Solve for vertex positions and edge lengths with the root edge starting at theta."""
    if not t.vertices:
        return Realization(t, FEASIBLE)
    rows, rhs, n, index, length_col = _system(t, pinned=True, with_root_length=True)
    sol = _linalg.solve(rows, rhs, n)
    if not sol.consistent:
        return Realization(t, INFEASIBLE, reason="inconsistent linear system")
    D = t.dim
    positions = {v: tuple(sol.values[index[v] * D + k] for k in range(D)) for v in t.vertices}
    lengths = {v: sol.values[length_col[v]] for v in t.vertices}
    if sol.nullity:
        return Realization(t, DEGENERATE, positions, lengths, sol.nullity,
                           f"{sol.nullity}-dimensional solution space")
    zero = [v for v in t.vertices if lengths[v] == 0]
    if zero:
        return Realization(t, DEGENERATE, positions, lengths, 0, f"zero length at {flow.encode(zero[0])}")
    negative = [v for v in t.vertices if lengths[v] < 0]
    if negative:
        return Realization(t, INFEASIBLE, positions, lengths, 0, f"negative length at {flow.encode(negative[0])}")
    return Realization(t, FEASIBLE, positions, lengths, 0)


def realize_tree(q: Quiver, tree: Tree, p: PerturbationData) -> Realization:
    """Realize a tree on perturbed data; feasible iff every edge length is positive."""
    if len(leaves(canonical(tree))) != len(p.parts):
        raise InvalidTropicalType(f"tree has {len(leaves(tree))} leaves, {len(p.parts)} parts given")
    return realize(tropical_type(q, tree, p))


def balancing_check(obj) -> tuple[bool, dict]:
    """Sum of outgoing weighted directions at every vertex; ok iff all are exactly zero."""
    t = obj.type if isinstance(obj, Realization) else obj
    out = {v: [Fraction(0)] * t.dim for v in t.vertices}

    def add(v, w, sign):
        acc = out[v]
        for k in range(t.dim):
            acc[k] += sign * w[k]

    for parent, child, w in t.edges:
        add(parent, w, 1)
        add(child, w, -1)
    for leg in t.legs:
        if leg.vertex in out:
            add(leg.vertex, leg.direction, 1)
    residuals = {v: tuple(acc) for v, acc in out.items()}
    return all(not any(res) for res in residuals.values()), residuals


def family_dimension(q: Quiver, t: TropicalType, pinned: bool = False) -> int:
    """Dimension of the space of realizations of an unperturbed type.

    By default theta is free in g-perp: the root leg is unbounded and only
    the edge and leaf equations are imposed on positions and internal edge
    lengths.  With ``pinned`` the root leg must pass through the type's
    theta (expected dimension 0).
    """
    if t.dim != q.d:
        raise InvalidTropicalType("family_dimension needs an unperturbed type in Q^d")
    ok, residuals = balancing_check(t)
    if not ok:
        bad = next(v for v, res in residuals.items() if any(res))
        raise InvalidTropicalType(f"type is unbalanced at {flow.encode(bad)}")
    if not t.vertices:
        return q.d - 1 if not pinned else 0
    parents = _parent_map(t)
    for parent, child, _ in t.edges:
        if parents.get(child) != parent:
            raise InvalidTropicalType("type is disconnected")
    rows, rhs, n, _, _ = _system(t, pinned=pinned, with_root_length=pinned)
    sol = _linalg.solve(rows, rhs, n)
    if not sol.consistent:
        raise InvalidTropicalType("type has no realization")
    return sol.nullity


def unperturbed_type(q: Quiver, tree: Tree, parts, theta) -> TropicalType:
    return tropical_type(q, tree, perturb(q, parts, theta, bound=Fraction(0)))


def limit_tree(q: Quiver, tree: Tree, parts, theta):
    """The unperturbed limit of ``tree``, found from the unperturbed linear solve.

    Internal edges of length zero are contracted; a singular or infeasible
    unperturbed system gives flow.UNRESOLVED.
    """
    real = realize(unperturbed_type(q, tree, parts, theta))
    if not real.positions or real.free_parameters or any(x < 0 for x in real.lengths.values()):
        return flow.UNRESOLVED
    return flow.contract(canonical(tree), real.lengths)


@dataclass
class TropicalRun:
    """All realizable trees for one perturbation, grouped by limit tree."""

    perturbation: PerturbationData
    realizations: dict
    multiplicities: dict
    groups: dict

    @property
    def total(self) -> int:
        return sum(self.groups.values())


def tropical_run(q: Quiver, parts, theta, p: PerturbationData | None = None,
                 config: RunConfig = RunConfig()) -> TropicalRun:
    """Realize every binary tree with nonzero multiplicity and group by limit tree.

    ``p`` defaults to the perturbation the flow retry loop settles on, so
    both paths see the same data.  A degenerate realization raises
    DegenerateFlow.
    """
    parts = tuple(tuple(int(x) for x in g) for g in parts)
    theta = as_covector(theta)
    r = len(parts)
    if r == 1:
        p = p or perturb(q, parts, theta, bound=Fraction(0))
        return TropicalRun(p, {0: realize_tree(q, 0, p)}, {0: 1}, {0: 1})
    if p is None:
        p = flow.run_flow(q, parts, theta, config.seed, config).perturbation
    realizations, mults, groups = {}, {}, {}
    for tree in flow.enumerate_trees(r):
        m = flow.multiplicity(q, tree, parts)
        if m == 0:
            continue
        real = realize_tree(q, tree, p)
        if real.status == DEGENERATE:
            raise DegenerateFlow(f"degenerate realization of {flow.encode(tree)}: {real.reason}")
        if not real.feasible:
            continue
        realizations[tree] = real
        mults[tree] = m
        t = limit_tree(q, tree, parts, theta)
        groups[t] = groups.get(t, 0) + m
    return TropicalRun(p, realizations, mults, groups)


def tropical_count_N(q: Quiver, parts, theta, limit: Tree, p: PerturbationData | None = None,
                     config: RunConfig = RunConfig(), run: TropicalRun | None = None) -> int:
    """Sum of vertex multiplicities over realizable binary trees whose limit is ``limit``.

    Pass ``run`` to reuse the realizations of an earlier ``tropical_run``.
    """
    if run is None:
        run = tropical_run(q, parts, theta, p, config)
    return run.groups.get(limit if limit == flow.UNRESOLVED else canonical(limit), 0)


def plot_segments(t: TropicalType, real: Realization, leg_length=Fraction(1)) -> list[tuple[tuple, tuple, str]]:
    """Segments (start, end, label) of a realized tree; legs drawn with finite length."""
    segs = []
    if not t.vertices:
        start = tuple(t.root_point)
        leg = t.legs[0]
        segs.append((start, tuple(a + leg_length * b for a, b in zip(start, leg.direction)), "leg"))
        return segs
    root = real.positions[t.tree]
    segs.append((tuple(t.root_point), root, "root"))
    for parent, child, _ in t.edges:
        segs.append((real.positions[parent], real.positions[child], "edge"))
    for leg in t.leaf_legs:
        x = real.positions[leg.vertex]
        segs.append((x, tuple(a + leg_length * b for a, b in zip(x, leg.direction)), f"leaf {leg.label + 1}"))
    return segs

