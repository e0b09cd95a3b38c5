"""Exact linear-programming oracle for approximate degree and its dual witnesses.

The program solved is the witness side of the duality: over nonnegative
``a_x, b_x`` (``psi(x) = b_x - a_x``), maximize

    sum_{x in dom} f(x) psi(x) - sum_{x bounded, not in dom} (a_x + b_x)

subject to ``sum_x psi(x) chi_S(x) = 0`` for ``|S| <= d`` and
``sum_x (a_x + b_x) = 1``. Its optimum is the least error ``eps*`` of a degree
``d`` approximation, and the optimal dual multipliers are the coefficients of
that approximation (the multiplier of the normalization row is ``eps*``).

Points fall in three classes per variant:

* ``bounded``: off-domain points must satisfy ``|p| <= 1 + eps``;
* ``unbounded``: off-domain points are unconstrained (witness vanishes there);
* ``double-promise``: with outer promise ``H = H_{<=N}``, off-domain points in
  ``H`` are bounded and points outside ``H`` are unconstrained.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Union

from .core import (
    InputError,
    ListInput,
    PartialBoolFn,
    binomial,
    bits_per_item,
    block_compose,
    decode_list,
    or_fn,
    property_to_block,
    restrict_weight,
    weight,
)
from .duals import (
    DualWitness,
    LevelWitness,
    correlation,
    l1_norm,
    pure_high_degree,
    symmetric_witness,
)
from .polynomials import MultilinearPoly, UnivariatePoly
from .simplex import SimplexResult, solve

VARIANTS = ("bounded", "unbounded", "double-promise")
EXPLICIT_LIMIT = int(os.environ.get("ADEG_LP_EXPLICIT_LIMIT", 1 << 8))
LEVEL_LIMIT = int(os.environ.get("ADEG_LP_LEVEL_LIMIT", 20000))


class BudgetError(RuntimeError):
    """The instance exceeds the configured solver budget."""


@dataclass(frozen=True)
class LPInstance:
    f: PartialBoolFn
    degree: int
    variant: str = "bounded"
    promise_weight: Optional[int] = None

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise InputError(f"unknown variant {self.variant!r}")
        if self.variant == "double-promise" and self.promise_weight is None:
            raise InputError("double-promise variant needs promise_weight")
        if self.degree < 0:
            raise InputError("degree must be non-negative")

    def classify(self, value: Optional[int], w: int) -> str:
        """'approx', 'bounded' or 'free' for a point with f-value and weight."""
        if self.variant == "double-promise" and w > self.promise_weight:
            return "free"
        if value is not None:
            return "approx"
        return "free" if self.variant == "unbounded" else "bounded"


@dataclass(frozen=True)
class LPResult:
    """Optimal error, achieving polynomial and extracted dual witness.

    For symmetric instances solved on Hamming levels the polynomial is the
    univariate ``q`` with ``p(x) = q(|x|)`` and the witness is a symmetric
    :class:`LevelWitness`.
    """

    instance: LPInstance
    eps: Fraction
    poly: Union[MultilinearPoly, UnivariatePoly]
    witness: Union[DualWitness, LevelWitness]
    raw_norm: Fraction
    pivots: int
    symmetric: bool

    @property
    def eps_zeroone(self) -> Fraction:
        """The same optimum measured for 0/1-valued targets (half the sign-scale error)."""
        return self.eps / 2

    @property
    def degenerate(self) -> bool:
        """True when the optimal multipliers cancel to the zero function."""
        return self.raw_norm == 0


def _masks_up_to(n: int, d: int) -> list[int]:
    out = []
    for k in range(min(d, n) + 1):
        for S in combinations(range(n), k):
            out.append(sum(1 << i for i in S))
    return out


def _solve_witness_lp(points, chars_of, classes, values, n_rows):
    """Assemble and solve the witness LP for a list of points (or levels)."""
    cols_c: list[Fraction] = []
    cols: list[tuple[int, int]] = []  # (point index, +1 for b / -1 for a)
    for i, cls in enumerate(classes):
        if cls == "free":
            continue
        for sgn in (1, -1):
            cols.append((i, sgn))
            if cls == "approx":
                cols_c.append(Fraction(sgn * values[i]))
            else:
                cols_c.append(Fraction(-1))
    A = [[Fraction(0)] * len(cols) for _ in range(n_rows + 1)]
    for j, (i, sgn) in enumerate(cols):
        for r, v in chars_of(points[i]):
            A[r][j] = Fraction(sgn) * v
        A[n_rows][j] = Fraction(1)
    b = [Fraction(0)] * n_rows + [Fraction(1)]
    res: SimplexResult = solve(cols_c, A, b)
    psi = {}
    for j, (i, sgn) in enumerate(cols):
        if res.primal[j]:
            psi[i] = psi.get(i, Fraction(0)) + sgn * res.primal[j]
    return res, psi


def optimal_error(
    f: PartialBoolFn,
    d: int,
    variant: str = "bounded",
    promise_weight: Optional[int] = None,
    symmetric: Optional[bool] = None,
) -> LPResult:
    """Least error of a degree-``d`` approximation, with primal and dual.

    ``symmetric=None`` picks the level-collapsed program when ``f`` is
    symmetric and the cube is beyond the explicit budget.
    """
    inst = LPInstance(f, d, variant, promise_weight)
    if symmetric is None:
        symmetric = f.is_symmetric and (1 << f.n) > EXPLICIT_LIMIT
    if symmetric:
        if not f.is_symmetric:
            raise InputError("symmetric collapse needs a symmetric function")
        return _optimal_error_levels(inst)
    if (1 << f.n) > EXPLICIT_LIMIT:
        raise BudgetError(
            f"2^{f.n} points exceed the explicit LP budget; use the symmetric collapse"
        )
    return _optimal_error_explicit(inst)


def _optimal_error_explicit(inst: LPInstance) -> LPResult:
    f, n = inst.f, inst.f.n
    masks = _masks_up_to(n, inst.degree)
    points = list(range(1 << n))
    values = [f(x) for x in points]
    classes = [inst.classify(values[x], weight(x)) for x in points]

    def chars_of(x: int):
        return ((r, -1 if (m & x).bit_count() % 2 else 1) for r, m in enumerate(masks))

    res, psi = _solve_witness_lp(points, chars_of, classes, values, len(masks))
    eps = res.value
    poly = MultilinearPoly(n, {m: res.dual[r] for r, m in enumerate(masks)})
    if res.dual[len(masks)] != eps:
        raise AssertionError("normalization multiplier differs from the optimum")
    raw = DualWitness(n, psi)
    norm = l1_norm(raw)
    witness = raw.scale(1 / norm) if norm else raw
    return LPResult(inst, eps, poly, witness, norm, res.pivots, False)


def _optimal_error_levels(inst: LPInstance) -> LPResult:
    f, n = inst.f, inst.f.n
    if (n + 1) * (inst.degree + 2) > LEVEL_LIMIT:
        raise BudgetError("level-collapsed program exceeds the budget")
    levels = list(range(n + 1))
    values = [f.at_levels((t,)) for t in levels]
    classes = [inst.classify(values[t], t) for t in levels]
    dmax = min(inst.degree, n)

    def chars_of(t: int):
        return ((j, Fraction(t) ** j) for j in range(dmax + 1))

    res, psi = _solve_witness_lp(levels, chars_of, classes, values, dmax + 1)
    eps = res.value
    poly = UnivariatePoly(tuple(res.dual[: dmax + 1]))
    if res.dual[dmax + 1] != eps:
        raise AssertionError("normalization multiplier differs from the optimum")
    norm = sum((abs(v) for v in psi.values()), Fraction(0))
    masses = [psi.get(t, Fraction(0)) for t in levels]
    if norm:
        masses = [m / norm for m in masses]
    witness = symmetric_witness(masses, n)
    return LPResult(inst, eps, poly, witness, norm, res.pivots, True)


def approximate_degree(
    f: PartialBoolFn,
    eps,
    variant: str = "bounded",
    promise_weight: Optional[int] = None,
    symmetric: Optional[bool] = None,
    convention: str = "sign",
) -> tuple[int, LPResult]:
    """Least ``d`` with ``eps*(d) <= eps`` (ascending search).

    ``convention="sign"`` measures error against ``{-1, +1}`` targets, the
    scale used by the duality theorems; ``"zeroone"`` measures it against
    ``{0, 1}`` targets, where every error is half as large.
    """
    eps = Fraction(eps)
    if convention not in ("sign", "zeroone"):
        raise InputError(f"unknown convention {convention!r}")
    for d in range(f.n + 1):
        res = optimal_error(f, d, variant, promise_weight, symmetric)
        measured = res.eps if convention == "sign" else res.eps_zeroone
        if measured <= eps:
            return d, res
    raise AssertionError("degree n always achieves zero error")


def witness_correlation(result: LPResult) -> Fraction:
    """Net correlation of the extracted witness under the variant's formula."""
    inst = result.instance
    promise = inst.promise_weight if inst.variant == "double-promise" else None
    return correlation(result.witness, inst.f, promise).net


@dataclass(frozen=True)
class ExtractedDual:
    witness: Union[DualWitness, LevelWitness]
    phd: int
    correlation: Fraction
    eps: Fraction
    degenerate: bool
    checks: dict


def extract_dual(result: LPResult) -> ExtractedDual:
    """Re-verify the dual witness of a solve at degree cap ``d``.

    The witness has unit norm (unless degenerate), pure high degree at least
    ``d + 1`` and net correlation exactly ``eps*``. A degenerate optimum
    (multipliers cancelling to zero) happens only when ``eps* = 0``, where no
    lower bound exists to certify; it is flagged instead of re-solved.
    """
    inst = result.instance
    psi = result.witness
    phd = pure_high_degree(psi)
    corr = witness_correlation(result)
    checks = {
        "unit_norm": result.degenerate or l1_norm(psi) == 1,
        "pure_high_degree": phd >= inst.degree + 1,
        "strong_duality": corr == result.eps,
        "vanishes_where_free": _vanishes_where_free(result),
    }
    if result.degenerate and result.eps != 0:
        raise AssertionError("degenerate witness with a positive optimum")
    return ExtractedDual(psi, phd, corr, result.eps, result.degenerate, checks)


def _vanishes_where_free(result: LPResult) -> bool:
    inst = result.instance
    psi = result.witness
    if isinstance(psi, LevelWitness):
        return all(
            inst.classify(inst.f.at_levels(t), sum(t)) != "free" for t in psi.masses
        )
    return all(inst.classify(inst.f(x), weight(x)) != "free" for x in psi.entries)


def max_correlation_dual(f: PartialBoolFn, threshold=Fraction(9, 10)) -> tuple[int, DualWitness, Fraction]:
    """Witness for ``f`` with the largest pure high degree reaching ``threshold``.

    Descending search over the degree cap; returns ``(phd, witness, corr)``.
    """
    threshold = Fraction(threshold)
    for d in range(f.n, 0, -1):
        res = optimal_error(f, d - 1, symmetric=False)
        if res.eps >= threshold:
            return pure_high_degree(res.witness), res.witness, res.eps
    raise InputError(f"no {f.label} witness reaches correlation {threshold}")


def max_correlation_or_dual(M: int, threshold=Fraction(9, 10)) -> tuple[int, DualWitness, Fraction]:
    return max_correlation_dual(or_fn(M), threshold)


# ---------------------------------------------------------------------------
# consistency of the list-to-block correspondence


@dataclass(frozen=True)
class ReductionReport:
    property_degree: int
    block_degree: int
    property_eps: Fraction
    block_eps: Fraction
    bits: int

    @property
    def holds(self) -> bool:
        return self.property_degree >= self.block_degree


def property_function(outer: PartialBoolFn, inner: PartialBoolFn, N: int, R: int) -> PartialBoolFn:
    """List function ``F(s) = outer(inner(1[s_i = 1]), ..., inner(1[s_i = R]))``.

    Inputs are lists in ``[R]_0^N`` encoded in binary with the item width
    padded to a power of two; padded codes repeat the last real item.
    """
    B = bits_per_item(R, dummy=True)
    composed = block_compose(outer, inner)

    def rule(x: int):
        s = decode_list(x, N, R, dummy=True)
        return composed(property_to_block(s).packed)

    return PartialBoolFn(N * B, rule, f"prop[{composed.label}]")


def reduction_consistency(outer: PartialBoolFn, inner: PartialBoolFn, eps) -> ReductionReport:
    """Compare ``deg_eps`` of the list function with ``ubdeg_eps`` on ``H_{<=N}``.

    The list side is a total function over the bit encoding (bounded variant);
    the block side is ``outer o inner`` restricted to total weight at most
    ``N`` (unbounded variant). The expected direction is list >= block.
    """
    R, N = outer.n, inner.n
    prop = property_function(outer, inner, N, R)
    block = restrict_weight(block_compose(outer, inner), N)
    dp, rp = approximate_degree(prop, eps, "bounded")
    db, rb = approximate_degree(block, eps, "unbounded")
    return ReductionReport(dp, db, rp.eps, rb.eps, prop.n)


def list_lp_points(N: int, R: int) -> int:
    return 1 << (N * bits_per_item(R, dummy=True))


def enumerate_block_points(N: int, R: int):
    """All lists in ``[R]_0^N`` with their block encodings."""
    for items in product(range(R + 1), repeat=N):
        s = ListInput(N, R, items)
        yield s, property_to_block(s).packed


def level_count(n: int, d: int) -> int:
    return sum(binomial(n, k) for k in range(d + 1))
