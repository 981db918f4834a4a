"""Rank-revealing Gaussian elimination for small indifference systems.

All equilibrium and rest-point enumeration reduces to systems of at most
seven equations.  The same elimination runs over exact Fractions (the
default) or float64, differing only in the pivot test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_FLOAT_PIVOT_EPS = 1e-11

UNIQUE = "unique"
INCONSISTENT = "inconsistent"
UNDERDETERMINED = "underdetermined"


@dataclass
class LinearResult:
    status: str
    solution: list | None  # unique solution, or a particular one (free vars = 0)
    nullspace: list[list]  # basis of the homogeneous solutions; empty unless underdetermined


def solve_linear(matrix, rhs, exact: bool = True) -> LinearResult:
    """Solve matrix @ z = rhs for any shape, reporting the solution structure."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if exact:
        aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
        zero = lambda v: v == 0
    else:
        aug = [[float(v) for v in row] + [float(rhs[i])] for i, row in enumerate(matrix)]
        scale = max((abs(v) for row in aug for v in row), default=1.0)
        eps = _FLOAT_PIVOT_EPS * max(1.0, scale)
        zero = lambda v: abs(v) <= eps

    pivot_cols = []
    r = 0
    for c in range(n):
        if exact:
            pivot = next((i for i in range(r, m) if not zero(aug[i][c])), None)
        else:
            pivot, best = None, 0.0
            for i in range(r, m):
                if abs(aug[i][c]) > best:
                    pivot, best = i, abs(aug[i][c])
            if pivot is not None and zero(aug[pivot][c]):
                pivot = None
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and not zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break

    for i in range(r, m):
        if not zero(aug[i][n]):
            return LinearResult(INCONSISTENT, None, [])

    zero_val = Fraction(0) if exact else 0.0
    one_val = Fraction(1) if exact else 1.0
    free_cols = [c for c in range(n) if c not in pivot_cols]
    particular = [zero_val] * n
    for row_idx, c in enumerate(pivot_cols):
        particular[c] = aug[row_idx][n]

    if not free_cols:
        return LinearResult(UNIQUE, particular, [])

    basis = []
    for fc in free_cols:
        vec = [zero_val] * n
        vec[fc] = one_val
        for row_idx, c in enumerate(pivot_cols):
            vec[c] = -aug[row_idx][fc]
        basis.append(vec)
    return LinearResult(UNDERDETERMINED, particular, basis)
