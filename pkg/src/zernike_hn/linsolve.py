"""Exact sparse Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Row = Dict[int, Fraction]


class InconsistentSystem(ValueError):
    pass


def solve_sparse(rows: Sequence[Tuple[Dict[int, object], object]], n_unknowns: int,
                 order: Optional[Sequence[int]] = None, strict: bool = True) -> List[Fraction]:
    """Solve ``sum_j a_ij x_j = b_i`` exactly.

    ``rows`` holds ``({column: coeff}, rhs)`` pairs.  Columns are pivoted in
    ``order`` (default ``0..n-1``); free unknowns are set to zero, so columns
    late in the order are the first to be left at zero.

    Raises InconsistentSystem if some row reduces to ``0 = b`` with ``b != 0``;
    with ``strict=False`` such rows are dropped instead.
    """
    if order is None:
        order = list(range(n_unknowns))
    rank_of = {c: r for r, c in enumerate(order)}
    # pivot rows keyed by their pivot column
    pivots: Dict[int, Tuple[Row, Fraction]] = {}

    def lead(row: Row) -> int:
        return min(row, key=rank_of.__getitem__)

    for coeffs, rhs in rows:
        row: Row = {j: Fraction(v) for j, v in coeffs.items() if v != 0}
        b = Fraction(rhs)
        # reduce against existing pivots until the leading column is new
        while row:
            c = lead(row)
            if c not in pivots:
                break
            prow, pb = pivots[c]
            f = row[c]
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            b -= f * pb
        if not row:
            if b != 0 and strict:
                raise InconsistentSystem(f"0 = {b}")
            continue
        c = lead(row)
        inv = 1 / row[c]
        row = {j: v * inv for j, v in row.items()}
        pivots[c] = (row, b * inv)

    # back substitution, latest pivot columns first
    x = [Fraction(0)] * n_unknowns
    for c in sorted(pivots, key=rank_of.__getitem__, reverse=True):
        prow, pb = pivots[c]
        x[c] = pb - sum(v * x[j] for j, v in prow.items() if j != c)
    return x


def nullity(rows: Sequence[Dict[int, object]], n_unknowns: int) -> int:
    """Dimension of the kernel of the coefficient matrix."""
    pivots: Dict[int, Row] = {}
    for coeffs in rows:
        row: Row = {j: Fraction(v) for j, v in coeffs.items() if v != 0}
        while row:
            c = min(row)
            if c not in pivots:
                break
            prow = pivots[c]
            f = row[c]
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        if row:
            c = min(row)
            inv = 1 / row[c]
            pivots[c] = {j: v * inv for j, v in row.items()}
    return n_unknowns - len(pivots)

