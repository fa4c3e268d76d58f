"""Exact sparse linear algebra over the rationals.

Rows are dicts ``{column: Fraction}``; elimination keeps the pivot rows in
reduced row echelon form so that back-substitution is a lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass
class LinearSolution:
    consistent: bool
    nullity: int
    rank: int
    # particular solution with every free variable set to zero
    values: list[Fraction] | None


class _Eliminator:
    def __init__(self):
        self.pivots: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
        self.consistent = True

    def add(self, row: dict[int, Fraction], rhs: Fraction = Fraction(0)) -> bool:
        """Insert a row; return True if it increased the rank."""
        row = {c: Fraction(v) for c, v in row.items() if v != 0}
        rhs = Fraction(rhs)
        for col in [c for c in row if c in self.pivots]:
            coef = row.get(col)
            if not coef:
                continue
            prow, prhs = self.pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - coef * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs -= coef * prhs
        if not row:
            if rhs != 0:
                self.consistent = False
            return False
        col = min(row)
        lead = row[col]
        row = {c: v / lead for c, v in row.items()}
        rhs = rhs / lead
        for pcol, (prow, prhs) in list(self.pivots.items()):
            coef = prow.get(col)
            if coef:
                for c, v in row.items():
                    nv = prow.get(c, 0) - coef * v
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
                self.pivots[pcol] = (prow, prhs - coef * rhs)
        self.pivots[col] = (row, rhs)
        return True


def solve(rows: Sequence[dict[int, Fraction]], rhs: Sequence, nvars: int) -> LinearSolution:
    elim = _Eliminator()
    for row, b in zip(rows, rhs):
        elim.add(row, b)
    rank = len(elim.pivots)
    if not elim.consistent:
        return LinearSolution(False, nvars - rank, rank, None)
    values = [Fraction(0)] * nvars
    for col, (_, b) in elim.pivots.items():
        values[col] = b
    return LinearSolution(True, nvars - rank, rank, values)


def rank(vectors: Iterable[Sequence]) -> int:
    elim = _Eliminator()
    for v in vectors:
        elim.add({i: Fraction(x) for i, x in enumerate(v) if x})
    return len(elim.pivots)


def kernel_basis(vectors: Sequence[Sequence], n: int) -> list[list[Fraction]]:
    """Basis of {x : <v, x> = 0 for all v}, as rational vectors of length n."""
    elim = _Eliminator()
    for v in vectors:
        elim.add({i: Fraction(x) for i, x in enumerate(v) if x})
    free = [c for c in range(n) if c not in elim.pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for col, (row, _) in elim.pivots.items():
            x[col] = -row.get(f, Fraction(0))
        basis.append(x)
    return basis
