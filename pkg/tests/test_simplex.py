from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adeg.simplex import LPError, solve


def _solve_square(B, b):
    """Gaussian elimination; None when singular."""
    size = len(b)
    a = [list(row) + [b[i]] for i, row in enumerate(B)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][size] for i in range(size)]


def vertex_oracle(c, A, b):
    """Maximum of c.z over the basic feasible solutions of A z = b, z >= 0.

    Bases are tried on every square row/column subset, so rank-deficient
    systems are handled too.
    """
    m, n = len(A), len(c)
    best = None
    for k in range(m, 0, -1):
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                B = [[A[i][j] for j in cols] for i in rows]
                zb = _solve_square(B, [b[i] for i in rows])
                if zb is None or any(v < 0 for v in zb):
                    continue
                z = [Fraction(0)] * n
                for j, v in zip(cols, zb):
                    z[j] = v
                if any(sum(a * v for a, v in zip(row, z)) != bi for row, bi in zip(A, b)):
                    continue
                val = sum(cj * v for cj, v in zip(c, z))
                best = val if best is None else max(best, val)
    return best


coef = st.integers(-4, 4).map(Fraction)


@st.composite
def bounded_programs(draw):
    """Random programs with a budget row ``sum z = B`` so every feasible one is bounded."""
    m = draw(st.integers(1, 2))
    n = draw(st.integers(m + 1, 5))
    A = [[draw(coef) for _ in range(n)] for _ in range(m)]
    b = [draw(coef) for _ in range(m)]
    A.append([Fraction(1)] * n)
    b.append(Fraction(draw(st.integers(1, 5))))
    c = [draw(coef) for _ in range(n)]
    return c, A, b


@given(bounded_programs())
def test_matches_vertex_enumeration(prog):
    c, A, b = prog
    if vertex_oracle(c, A, b) is None:
        with pytest.raises(LPError):
            solve(c, A, b)
        return
    res = solve(c, A, b)
    assert res.value == vertex_oracle(c, A, b)
    assert all(v >= 0 for v in res.primal)
    assert sum(bi * yi for bi, yi in zip(b, res.dual)) == res.value


def test_small_known_program():
    # maximize x + y with x + 2y + s = 4, 3x + y + t = 6
    c = [1, 1, 0, 0]
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    res = solve(c, A, [4, 6])
    assert res.value == Fraction(14, 5)
    assert res.primal[:2] == (Fraction(8, 5), Fraction(6, 5))


def test_infeasible_and_unbounded():
    with pytest.raises(LPError):
        solve([1], [[1], [1]], [1, 2])
    with pytest.raises(LPError):
        solve([1, 0], [[1, -1]], [0])


def test_redundant_rows_dropped():
    res = solve([1, 0], [[1, 1], [2, 2]], [1, 2])
    assert res.value == 1
    assert len(res.dropped_rows) == 1
