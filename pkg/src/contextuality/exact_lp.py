"""Exact rational linear algebra: phase-one simplex and Gaussian elimination.

Both routines work on dense lists of :class:`~fractions.Fraction` and are
deterministic.  The simplex uses Bland's rule (smallest eligible index for
both the entering and the leaving variable), which guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of :func:`phase_one`.

    Exactly one of ``solution`` / ``certificate`` is set.  A certificate ``y``
    satisfies ``y.A[:, j] <= 0`` for every column and ``y.b > 0``, so no
    nonnegative ``x`` can solve ``A x = b``.
    """

    solution: Optional[list[Fraction]]
    certificate: Optional[list[Fraction]]
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def phase_one(A: Sequence[Sequence], b: Sequence) -> FeasibilityResult:
    """Decide whether ``A x = b, x >= 0`` has a solution, exactly.

    Artificial variables are appended for every row and their sum is
    minimised.  The problem is feasible iff that minimum is zero.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    flipped = []
    for i in range(m):
        bi = Fraction(b[i])
        row = [Fraction(v) for v in A[i]]
        if len(row) != n:
            raise ValueError("ragged constraint matrix")
        flip = bi < 0
        if flip:
            bi = -bi
            row = [-v for v in row]
        flipped.append(flip)
        # artificial columns n .. n+m-1
        row.extend(ONE if k == i else ZERO for k in range(m))
        rows.append(row)
        rhs.append(bi)

    total = n + m
    basis = [n + i for i in range(m)]
    # reduced costs of the phase-one objective: c_j - c_B B^-1 A_j
    cost = [ZERO] * total
    for j in range(n):
        cost[j] = -sum((rows[i][j] for i in range(m)), ZERO)
    pivots = 0
    while True:
        entering = next((j for j in range(total) if cost[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best = None
        for i in range(m):
            a = rows[i][entering]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            # cannot happen: the phase-one objective is bounded below by zero
            raise ArithmeticError("unbounded phase-one problem")
        _pivot(rows, rhs, cost, leaving, entering)
        basis[leaving] = entering
        pivots += 1

    objective = sum((rhs[i] for i in range(m) if basis[i] >= n), ZERO)
    if objective == 0:
        x = [ZERO] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rhs[i]
        return FeasibilityResult(x, None, pivots)

    # artificial column k has cost 1, so its reduced cost is 1 - y_k
    y = [ONE - cost[n + k] for k in range(m)]
    y = [-v if flipped[k] else v for k, v in enumerate(y)]
    return FeasibilityResult(None, y, pivots)


def _pivot(rows, rhs, cost, r, c):
    piv = rows[r][c]
    prow = rows[r]
    if piv != 1:
        inv = 1 / piv
        prow[:] = [v * inv for v in prow]
        rhs[r] *= inv
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
            rhs[i] -= f * rhs[r]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * prow[j]


def solve_affine(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """A solution of ``A x = b`` with every free variable set to zero, or None.

    Gauss-Jordan elimination with pivots chosen column by column, first
    nonzero row from the top.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(m)]
    pivot_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        nz = [j for j, v in enumerate(M[r]) if v]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                row = M[i]
                for j in nz:
                    row[j] -= f * M[r][j]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if M[i][n] != 0:
            return None
    x = [ZERO] * n
    for i, c in enumerate(pivot_cols):
        x[c] = M[i][n]
    return x
