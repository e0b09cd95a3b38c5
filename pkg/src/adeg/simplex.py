"""Two-phase primal simplex over exact rationals with Bland's rule.

Solves ``maximize c.z  subject to  A z = b, z >= 0`` and returns an optimal
basic solution together with an optimal dual vector ``y`` (so that
``A^T y >= c`` and ``b.y = c.z``). Both certificates are re-checked exactly
before the result is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


class LPError(RuntimeError):
    """Infeasible or unbounded program, or a failed post-solve check."""


@dataclass(frozen=True)
class SimplexResult:
    value: Fraction
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]
    pivots: int
    dropped_rows: tuple[int, ...]


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], r: int, c: int) -> None:
    prow = rows[r]
    pv = prow[c]
    if pv != 1:
        prow[:] = [v / pv if v else ZERO for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(rows):
        if i != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[c]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]


def _run(rows, obj, basis, allowed, max_pivots) -> int:
    """Bland's rule iterations; ``obj`` holds reduced costs and ``-value`` last."""
    pivots = 0
    width = len(obj) - 1
    while True:
        enter = next((j for j in range(width) if allowed[j] and obj[j] > 0), None)
        if enter is None:
            return pivots
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise LPError("objective unbounded")
        leave = best[1]
        _pivot(rows, obj, leave, enter)
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")


def solve(
    c: Sequence, A: Sequence[Sequence], b: Sequence, max_pivots: int = 10**6
) -> SimplexResult:
    m, n = len(A), len(c)
    cq = [Fraction(v) for v in c]
    signs = []
    rows: list[list[Fraction]] = []
    for i in range(m):
        if len(A[i]) != n:
            raise ValueError("constraint row has the wrong length")
        bi = Fraction(b[i])
        s = -1 if bi < 0 else 1
        signs.append(s)
        row = [Fraction(v) * s for v in A[i]]
        art = [ZERO] * m
        art[i] = Fraction(1)
        rows.append(row + art + [bi * s])
    width = n + m
    basis = list(range(n, n + m))

    # phase 1: maximize -sum(artificials)
    obj = [ZERO] * (width + 1)
    for row in rows:
        for j in range(n):
            obj[j] += row[j]
        obj[-1] += row[-1]
    allowed = [True] * n + [False] * m
    pivots = _run(rows, obj, basis, allowed, max_pivots)
    if obj[-1] != 0:
        raise LPError("infeasible")

    # drive remaining artificials out of the basis; drop redundant rows
    dropped = []
    i = 0
    while i < len(rows):
        if basis[i] >= n:
            col = next((j for j in range(n) if rows[i][j] != 0), None)
            if col is None:
                dropped.append(basis[i] - n)
                del rows[i]
                del basis[i]
                continue
            _pivot(rows, obj, i, col)
            basis[i] = col
            pivots += 1
        i += 1

    # phase 2: reduced costs of the true objective
    obj = cq + [ZERO] * m + [ZERO]
    for i, row in enumerate(rows):
        cb = cq[basis[i]]
        if cb:
            for j, v in enumerate(row):
                if v:
                    obj[j] -= cb * v
    pivots += _run(rows, obj, basis, allowed, max_pivots)

    z = [ZERO] * n
    for i, row in enumerate(rows):
        z[basis[i]] = row[-1]
    value = sum((cq[j] * z[j] for j in range(n) if z[j]), ZERO)

    # y = c_B B^{-1}, read from the artificial columns (which carry B^{-1})
    y = [ZERO] * m
    for k in range(m):
        col = n + k
        acc = ZERO
        for i, row in enumerate(rows):
            if row[col]:
                acc += cq[basis[i]] * row[col]
        y[k] = acc * signs[k]

    _verify(cq, A, b, z, y, value)
    return SimplexResult(value, tuple(z), tuple(y), pivots, tuple(sorted(dropped)))


def _verify(c, A, b, z, y, value) -> None:
    for i, row in enumerate(A):
        lhs = sum((Fraction(a) * z[j] for j, a in enumerate(row) if a and z[j]), ZERO)
        if lhs != Fraction(b[i]):
            raise LPError(f"primal row {i} violated after solve")
    if any(v < 0 for v in z):
        raise LPError("negative primal value after solve")
    for j in range(len(c)):
        red = sum((Fraction(A[i][j]) * y[i] for i in range(len(A)) if A[i][j] and y[i]), ZERO)
        if red < c[j]:
            raise LPError(f"dual constraint {j} violated after solve")
    if sum((Fraction(bi) * yi for bi, yi in zip(b, y)), ZERO) != value:
        raise LPError("duality gap after solve")
