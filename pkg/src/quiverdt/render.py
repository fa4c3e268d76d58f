"""DOT and plot-data output for flow trees and their tropical realizations.

Plot-data schema (version 1)::

    {"version": 1, "gamma": [...], "theta": [...], "axes": [i, j],
     "trees": [{"tree": "((1,2),3)", "multiplicity": m,
                "segments": [{"kind": "root"|"edge"|"leaf", "label": str,
                              "from": ["p/q", "p/q"], "to": ["p/q", "p/q"]}]}]}

Points are the M-part of the realized positions (the first d coordinates
of the perturbed ambient space).  For d = 2 both coordinates are kept.
For d = 3 the slice keeps the two coordinates that are free in gamma-perp
(``axes``), dropping the one solved for by theta(gamma) = 0.  Leaf legs
are drawn with length ``leg_length`` times their direction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .flow import Tree, encode, leaves
from .io import format_rational, format_vector
from .tropical import Realization, plot_segments

PLOT_VERSION = 1


def slice_axes(gamma: Sequence[int]) -> list[int]:
    """Coordinates kept in plots: all for d <= 2, else the free columns of gamma-perp."""
    d = len(gamma)
    if d <= 2:
        return list(range(d))
    solved = next(i for i, x in enumerate(gamma) if x)
    return [i for i in range(d) if i != solved][:2]


def _pt(x, axes):
    return format_vector([x[i] for i in axes])


def plot_data(gamma, theta, items: list[tuple[Tree, int, Realization]], leg_length=Fraction(1)) -> dict:
    axes = slice_axes(gamma)
    trees = []
    for tree, mult, real in items:
        segs = []
        for start, end, label in plot_segments(real.type, real, leg_length):
            kind = label.split()[0]
            segs.append({"kind": kind, "label": label, "from": _pt(start, axes), "to": _pt(end, axes)})
        trees.append({"tree": encode(tree), "multiplicity": mult, "segments": segs})
    return {"version": PLOT_VERSION, "gamma": list(gamma), "theta": format_vector(theta),
            "axes": axes, "trees": trees}


def _node(v) -> str:
    return "v" + "_".join(str(i + 1) for i in sorted(leaves(v)))


def dot(parts, items: list[tuple[Tree, int, Realization]], d: int) -> str:
    """One DOT cluster per tree; vertices labeled with charge and position."""
    lines = ["digraph flowtrees {", "  node [shape=box, fontname=monospace];"]
    for k, (tree, mult, real) in enumerate(items):
        pre = f"t{k}_"
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="{encode(tree)}  multiplicity {mult}";')
        lines.append(f'    {pre}theta [shape=point];')
        for v in real.type.vertices:
            charge = [sum(parts[i][c] for i in leaves(v)) for c in range(d)]
            pos = ",".join(format_rational(x) for x in real.positions[v][:d])
            lines.append(f'    {pre}{_node(v)} [label="{charge}\\n({pos})"];')
        if real.type.vertices:
            ell = format_rational(real.lengths[real.type.tree])
            lines.append(f'    {pre}theta -> {pre}{_node(real.type.tree)} [label="{ell}"];')
        for parent, child, _ in real.type.edges:
            ell = format_rational(real.lengths[child])
            lines.append(f'    {pre}{_node(parent)} -> {pre}{_node(child)} [label="{ell}"];')
        for leg in real.type.leaf_legs:
            lines.append(f'    {pre}leaf{leg.label + 1} [shape=plaintext, label="{list(parts[leg.label])}"];')
            lines.append(f"    {pre}{_node(leg.vertex)} -> {pre}leaf{leg.label + 1};")
        if not real.type.vertices:
            lines.append(f'    {pre}leaf1 [shape=plaintext, label="{list(parts[0])}"];')
            lines.append(f"    {pre}theta -> {pre}leaf1;")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
