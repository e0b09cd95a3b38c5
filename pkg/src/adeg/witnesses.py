"""Explicit dual-witness constructions and the zeroing pipeline.

Univariate witnesses live on levels ``0..T`` and are supported on a small node
set ``S``: up to normalization and sign,

    |omega(t)| = prod_{r in S, r != t} 1 / |t - r|      (t in S),

which makes ``sum_t omega(t) q(t) = 0`` for every polynomial ``q`` of degree
below ``|S| - 1``. Symmetrizing into ``N >= T`` bits gives a witness whose
level masses are ``omega``.

The pipeline composes an outer witness ``Phi`` on ``R`` bits with a
symmetrized inner witness, measures the mass the composition puts above total
weight ``N`` by a dynamic program over level sums, removes that mass with a
minimum-norm correction found by exact linear programming, and renormalizes.
All quantities are exact rationals; exponentials and square roots enter only
through certified enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Mapping, Optional, Sequence, Union

from . import intervals
from .core import (
    FALSE,
    TRUE,
    Check,
    InputError,
    PartialBoolFn,
    all_pass,
    and_fn,
    binomial,
    block_compose,
    gap_and_fn,
    or_fn,
    thr_fn,
    weight,
)
from .duals import (
    DualWitness,
    LevelWitness,
    compositions,
    correlation,
    dual_block_compose,
    l1_norm,
    level_weight,
    pure_high_degree,
    symmetric_witness,
    two_point_witness,
)
from .intervals import CertifiedReal
from .simplex import LPError, solve

OR_DECAY_C2 = Fraction(1, 10)
CORRECTION_NORM_CAP = Fraction(1, 10)
CORRECTION_LEVEL_LIMIT = 6000
CORRECTION_POINT_LIMIT = 4096


class DegenerateParameters(InputError):
    """Parameters for which the node set collapses (``m = 0``)."""


class CorrectionError(RuntimeError):
    """The correction program has no solution; carries diagnostics."""


# ---------------------------------------------------------------------------
# exact integer helpers


def iroot_ceil(n: int, k: int) -> int:
    """Least integer ``r`` with ``r**k >= n``."""
    if n <= 0:
        return 0
    r = max(1, int(round(n ** (1.0 / k))))
    while r**k < n:
        r += 1
    while r > 1 and (r - 1) ** k >= n:
        r -= 1
    return r


def sqrt_ceil(q) -> int:
    """``ceil(sqrt(q))`` for a nonnegative rational ``q``."""
    q = Fraction(q)
    a = math.isqrt(math.ceil(q))
    return a if a * a >= q else a + 1


def sqrt_floor(q) -> int:
    """``floor(sqrt(q))`` for a nonnegative rational ``q``."""
    return math.isqrt(math.floor(Fraction(q)))


# ---------------------------------------------------------------------------
# univariate witnesses


@dataclass(frozen=True)
class DecayCheck:
    """Per-level test of ``|omega(t)| <= alpha exp(-beta t) / t^2`` for ``t >= 1``."""

    alpha: Fraction
    beta: CertifiedReal
    passes: tuple[bool, ...]

    @property
    def passed(self) -> bool:
        return all(self.passes)

    def failures(self) -> list[int]:
        return [t for t, ok in enumerate(self.passes, start=1) if not ok]


def decay_check(values: Sequence[Fraction], alpha, beta) -> DecayCheck:
    """Sound decay test: each level must sit below the lower enclosure of the bound."""
    alpha = Fraction(alpha)
    beta = intervals.as_certified(beta)
    passes = []
    for t in range(1, len(values)):
        v = abs(values[t])
        if not v:
            passes.append(True)
            continue
        bound = intervals.exp(-(beta * t))
        passes.append(v <= alpha * bound.lo / (t * t))
    return DecayCheck(alpha, beta, tuple(passes))


def univariate_phd(values: Sequence[Fraction]) -> int:
    """Least ``j`` with ``sum_t omega(t) t^j != 0``; ``T + 1`` for the zero function."""
    support = [(t, v) for t, v in enumerate(values) if v]
    for j in range(len(values)):
        if sum((v * t**j for t, v in support), Fraction(0)):
            return j
    return len(values)


@dataclass(frozen=True)
class UnivariateWitness:
    T: int
    values: tuple[Fraction, ...]
    meta: Mapping[str, Any] = field(default_factory=dict)
    checks: tuple[Check, ...] = ()

    def __call__(self, t: int) -> Fraction:
        return self.values[t] if 0 <= t <= self.T else Fraction(0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(t for t, v in enumerate(self.values) if v)

    @property
    def norm(self) -> Fraction:
        return sum((abs(v) for v in self.values), Fraction(0))

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)

    def positive_part(self) -> tuple[Fraction, ...]:
        return tuple(max(v, Fraction(0)) for v in self.values)

    def negative_part(self) -> tuple[Fraction, ...]:
        return tuple(max(-v, Fraction(0)) for v in self.values)


def _values_of(omega) -> tuple[Fraction, ...]:
    if isinstance(omega, UnivariateWitness):
        return omega.values
    return tuple(Fraction(v) for v in omega)


def _node_values(T: int, nodes: Sequence[int], flip: int) -> tuple[Fraction, ...]:
    """Unit-norm witness on ``nodes`` with sign ``(-1)^(flip + #{r in S : r > t})``."""
    nodes = sorted(nodes)
    raw = [Fraction(0)] * (T + 1)
    for idx, t in enumerate(nodes):
        den = 1
        for r in nodes:
            if r != t:
                den *= abs(t - r)
        above = len(nodes) - 1 - idx
        raw[t] = Fraction(-1 if (flip + above) % 2 else 1, den)
    total = sum(abs(v) for v in raw)
    return tuple(v / total for v in raw)


def _common_checks(values: Sequence[Fraction], nodes: Sequence[int]) -> list[Check]:
    support = {t for t, v in enumerate(values) if v}
    total = sum(values, Fraction(0))
    norm = sum((abs(v) for v in values), Fraction(0))
    phd = univariate_phd(values)
    return [
        Check("support-in-nodes", support <= set(nodes), f"|S| = {len(nodes)}"),
        Check("balanced", total == 0, f"sum = {total}"),
        Check("unit-norm", norm == 1, f"norm = {norm}"),
        Check("pure-high-degree", phd >= len(nodes) - 1, f"phd = {phd}, |S| - 1 = {len(nodes) - 1}"),
    ]


def or_nodes(T: int, delta) -> tuple[int, int, list[int]]:
    """``(c, m, S)`` for the OR construction."""
    delta = Fraction(delta)
    c = math.ceil(8 / delta)
    m = math.isqrt(T // (2 * c))
    nodes = sorted({0, 1, c} | {2 * c * i * i for i in range(1, m + 1)})
    return c, m, nodes


def build_or_witness(T: int, delta) -> UnivariateWitness:
    """Univariate witness for OR on levels ``0..T`` with correlation ``>= 1 - delta``."""
    delta = Fraction(delta)
    if T < 1 or not Fraction(1, T) <= delta <= Fraction(1, 2):
        raise InputError("need T >= 1 and 1/T <= delta <= 1/2")
    c, m, nodes = or_nodes(T, delta)
    if m == 0:
        raise DegenerateParameters(f"m = 0 for T = {T}, delta = {delta} (need T >= {2 * c})")
    values = _node_values(T, nodes, m)
    corr = values[0] - sum(values[1:], Fraction(0))
    beta = intervals.sqrt(delta / T) * OR_DECAY_C2
    decay = decay_check(values, 170 / delta, beta)
    checks = _common_checks(values, nodes) + [
        Check("correlation", corr >= 1 - delta, f"{corr} >= {1 - delta}"),
        Check("origin-positive", values[0] > 0),
        Check("decay", decay.passed, f"c2 = {OR_DECAY_C2}, failing levels {decay.failures()}"),
    ]
    ratio = len(nodes) / float(intervals.sqrt(delta * T).mid)
    meta = {
        "kind": "or",
        "delta": delta,
        "c": c,
        "m": m,
        "S": tuple(nodes),
        "correlation": corr,
        "phd": univariate_phd(values),
        "size_ratio": ratio,
        "decay": decay,
    }
    return UnivariateWitness(T, values, meta, tuple(checks))


def thr_nodes(k: int, T: int, N: int) -> tuple[int, int, list[int]]:
    c = 2 * k * iroot_ceil(N, k)
    m = math.isqrt(T // c)
    nodes = sorted(set(range(k + 1)) | {c * i * i for i in range(1, m + 1)})
    return c, m, nodes


def _thr_error_masses(values: Sequence[Fraction], k: int) -> tuple[Fraction, Fraction]:
    pos = sum((v for t, v in enumerate(values) if v > 0 and t >= k), Fraction(0))
    neg = sum((-v for t, v in enumerate(values) if v < 0 and t < k), Fraction(0))
    return pos, neg


def build_thr_witness(k: int, T: int, N: int) -> UnivariateWitness:
    """Univariate witness for the threshold-``k`` function on levels ``0..T``."""
    if not 1 <= k <= T or N < 1:
        raise InputError("need 1 <= k <= T and N >= 1")
    if k == 1:
        c, m, nodes = 0, 0, [0, 1]
        values = (Fraction(1, 2), Fraction(-1, 2)) + (Fraction(0),) * (T - 1)
    else:
        c, m, nodes = thr_nodes(k, T, N)
        if m == 0:
            raise DegenerateParameters(f"m = 0 for k = {k}, T = {T}, N = {N} (need T >= {c})")
        values = _node_values(T, nodes, m + 1)
    pos, neg = _thr_error_masses(values, k)
    wk = abs(values[k])
    checks = _common_checks(values, nodes) + [
        Check("pivot-negative", values[k] < 0, f"omega(k) = {values[k]}"),
        Check("false-positive-mass", pos <= Fraction(1, 48 * N), f"{pos} <= 1/{48 * N}"),
        Check("false-negative-mass", neg <= Fraction(1, 2) - Fraction(2, 4**k), f"{neg} <= 1/2 - 2/4^{k}"),
    ]
    if k >= 2:
        head = [abs(values[t]) / wk <= binomial(k, t) for t in range(k + 1)]
        checks.append(Check("head-bound", all(head), f"levels failing {[t for t, ok in enumerate(head) if not ok]}"))
        tail_fail = []
        for j in range(1, m + 1):
            ratio = abs(values[c * j * j]) / wk
            bound = intervals.exp(Fraction(-j * j, 2 * m)) * Fraction((2 * k) ** k, c**k * j**4)
            if not ratio <= bound.lo:
                tail_fail.append(j)
        checks.append(Check("tail-bound", not tail_fail, f"failing j {tail_fail}"))
        mass_ratio = sum((abs(v) for v in values), Fraction(0)) / wk
        checks.append(Check("mass-on-pivot", mass_ratio < Fraction(4**k, 2), f"{mass_ratio} < 4^{k}/2"))
    meta = {
        "kind": "thr",
        "k": k,
        "N": N,
        "c": c,
        "m": m,
        "S": tuple(nodes),
        "false_positive": pos,
        "false_negative": neg,
        "phd": univariate_phd(values),
    }
    return UnivariateWitness(T, values, meta, tuple(checks))


def symmetrize_witness(omega, N: int) -> LevelWitness:
    """Symmetric witness on ``N`` bits with level masses ``omega(t)``."""
    values = _values_of(omega)
    T = len(values) - 1
    if T > N:
        if any(values[N + 1 :]):
            raise InputError(f"witness has mass above level {N}")
        values = values[: N + 1]
    return symmetric_witness(values, N)


def omega_from_levels(psi: LevelWitness) -> tuple[Fraction, ...]:
    """Level masses of a symmetric witness."""
    if psi.num_blocks != 1:
        raise InputError("expected a symmetric witness")
    return tuple(psi.masses.get((t,), Fraction(0)) for t in range(psi.block_size + 1))


def omega_from_lp(f: PartialBoolFn, degree: int) -> tuple[Fraction, ...]:
    """Level masses of an optimal symmetric LP witness for ``f`` at ``degree``."""
    from .lp import optimal_error

    res = optimal_error(f, degree, symmetric=True)
    if not isinstance(res.witness, LevelWitness):
        raise InputError(f"{f.label} is not symmetric")
    return omega_from_levels(res.witness)


# ---------------------------------------------------------------------------
# tail mass above total weight N


def _require_split(values: Sequence[Fraction]) -> None:
    pos = sum((v for v in values if v > 0), Fraction(0))
    neg = sum((-v for v in values if v < 0), Fraction(0))
    if pos != Fraction(1, 2) or neg != Fraction(1, 2):
        raise InputError("inner witness must split into positive and negative halves of mass 1/2")


def _tail_by_negatives(plus, minus, R: int, N: int) -> list[Fraction]:
    """``out[j]``: mass above ``N`` of the product with ``j`` negative and ``R - j`` positive factors."""
    cap = N + 1

    def convolve(dist, vec):
        out = [Fraction(0)] * (cap + 1)
        for s, a in enumerate(dist):
            if not a:
                continue
            for t, b in enumerate(vec):
                if b:
                    out[min(s + t, cap)] += a * b
        return out

    start = [Fraction(1)] + [Fraction(0)] * cap
    neg_prefix = [start]
    for _ in range(R):
        neg_prefix.append(convolve(neg_prefix[-1], minus))
    out = []
    for j in range(R + 1):
        dist = neg_prefix[j]
        for _ in range(R - j):
            dist = convolve(dist, plus)
        out.append(dist[cap])
    return out


def tail_mass(Phi: DualWitness, omega, N: int) -> Fraction:
    """Exact mass of ``Phi * psi`` above total weight ``N`` via level-sum convolution.

    ``psi`` is ``omega`` symmetrized into ``N`` bits. The product structure
    means the tail for a sign pattern ``z`` depends only on how many
    coordinates of ``z`` are TRUE.
    """
    values = _values_of(omega)
    _require_split(values)
    R = Phi.n
    plus = [max(v, Fraction(0)) for v in values]
    minus = [max(-v, Fraction(0)) for v in values]
    per_count = _tail_by_negatives(plus, minus, R, N)
    total = sum((abs(v) * per_count[weight(z)] for z, v in Phi.items()), Fraction(0))
    return 2**R * total


def tail_mass_bruteforce(Phi: DualWitness, omega, N: int) -> Fraction:
    """The same quantity by composing explicitly and enumerating the support."""
    values = _values_of(omega)
    R = Phi.n
    if N * R > 22:
        raise InputError("explicit enumeration limited to N*R <= 22")
    psi = symmetrize_witness(values, N).materialize()
    xi = dual_block_compose(Phi, psi)
    return sum((abs(v) for x, v in xi.items() if weight(x) > N), Fraction(0))


def level_tail(xi: LevelWitness, N: int) -> Fraction:
    return sum((abs(m) for t, m in xi.items() if sum(t) > N), Fraction(0))


def tail_exponent(tail: Fraction, N: int, R: int) -> Optional[int]:
    """Largest ``D`` with ``tail <= (2NR)^(-2D)``; ``None`` when the tail vanishes."""
    if tail == 0:
        return None
    base = (2 * N * R) ** 2
    D = 0
    while tail * base ** (D + 1) <= 1:
        D += 1
    return D


# ---------------------------------------------------------------------------
# correction


@dataclass(frozen=True)
class CorrectionResult:
    nu: Union[LevelWitness, DualWitness]
    norm: Fraction
    tail: Fraction
    degree: int
    pivots: int
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def _levels_inside(R: int, N: int) -> list[tuple[int, ...]]:
    out = []
    for total in range(N + 1):
        out.extend(compositions(total, R, N))
    return out


def _solve_min_norm(columns: list[list[Fraction]], rhs: list[Fraction]):
    """Minimize ``sum |v|`` subject to ``sum_j v_j columns[j] = rhs``."""
    rows = len(rhs)
    width = len(columns)
    A = [[Fraction(0)] * (2 * width) for _ in range(rows)]
    for j, col in enumerate(columns):
        for i, a in enumerate(col):
            if a:
                A[i][j] = a
                A[i][width + j] = -a
    c = [Fraction(-1)] * (2 * width)
    res = solve(c, A, rhs)
    v = [res.primal[j] - res.primal[width + j] for j in range(width)]
    return v, res.pivots


def build_correction(
    xi, N: int, D: int, R: Optional[int] = None, enforce_precondition: bool = True
) -> CorrectionResult:
    """Least-norm ``nu`` with pure high degree ``>= D`` agreeing with ``xi`` above weight ``N``.

    ``xi`` may be block-symmetric (solved over weight tuples; symmetrizing any
    feasible correction keeps it feasible and does not raise its norm, so
    this is also optimal among all corrections) or explicit (solved over
    points, for small cubes).
    """
    n_total = xi.n
    if isinstance(xi, LevelWitness):
        R = xi.num_blocks
        tail = level_tail(xi, N)
    else:
        R = R if R is not None else max(1, n_total // N)
        tail = sum((abs(v) for x, v in xi.items() if weight(x) > N), Fraction(0))
    bound = Fraction(1, (2 * N * R) ** (2 * max(D, 0)))
    pre = tail <= bound
    if enforce_precondition and not pre:
        raise InputError(f"tail mass {tail} exceeds (2NR)^(-2D) = {bound}")
    checks = [Check("tail-precondition", pre, f"{tail} <= {bound}", informative=not enforce_precondition)]

    if isinstance(xi, LevelWitness):
        outside = {t: m for t, m in xi.items() if sum(t) > N}
        if D <= 0 or not outside:
            inside_vals, pivots, inside = [], 0, []
        else:
            inside = _levels_inside(R, N)
            if len(inside) > CORRECTION_LEVEL_LIMIT:
                raise InputError(f"{len(inside)} weight tuples exceed the correction budget")
            char_rows = [s for d in range(D) for s in compositions(d, R, N)]
            rhs = [-sum((m * level_weight(N, s, t) for t, m in outside.items()), Fraction(0)) for s in char_rows]
            columns = [[level_weight(N, s, t) for s in char_rows] for t in inside]
            try:
                inside_vals, pivots = _solve_min_norm(columns, rhs)
            except LPError as exc:
                raise CorrectionError(f"correction program failed at D = {D}: {exc}") from exc
        masses = dict(outside)
        for t, v in zip(inside, inside_vals):
            if v:
                masses[t] = v
        nu = LevelWitness(R, N, masses)
        phd = pure_high_degree(nu, max_degree=max(D - 1, 0)) if D > 0 else 0
    else:
        n = xi.n
        outside = {x: v for x, v in xi.items() if weight(x) > N}
        if D <= 0 or not outside:
            inside_vals, pivots, inside = [], 0, []
        else:
            inside = [x for x in range(1 << n) if weight(x) <= N]
            if len(inside) > CORRECTION_POINT_LIMIT:
                raise InputError(f"{len(inside)} points exceed the explicit correction budget")
            masks = [sum(1 << i for i in S) for d in range(D) for S in combinations(range(n), d)]

            def chi(mask, x):
                return -1 if (mask & x).bit_count() % 2 else 1

            rhs = [-sum((v * chi(S, x) for x, v in outside.items()), Fraction(0)) for S in masks]
            columns = [[Fraction(chi(S, x)) for S in masks] for x in inside]
            try:
                inside_vals, pivots = _solve_min_norm(columns, rhs)
            except LPError as exc:
                raise CorrectionError(f"correction program failed at D = {D}: {exc}") from exc
        entries = dict(outside)
        for x, v in zip(inside, inside_vals):
            if v:
                entries[x] = v
        nu = DualWitness(n, entries)
        phd = pure_high_degree(nu, max_degree=max(D - 1, 0)) if (D > 0 and nu.entries) else n_total + 1

    norm = l1_norm(nu)
    agrees = all(nu(x) == v for x, v in outside.items()) if not isinstance(nu, LevelWitness) else all(
        nu.masses.get(t) == m for t, m in outside.items()
    )
    if isinstance(nu, LevelWitness) and not nu.masses:
        phd = n_total + 1
    checks += [
        Check("pure-high-degree", D <= 0 or phd >= D, f"phd >= {min(phd, D)} (needed {D})"),
        Check("agrees-above-promise", agrees),
        Check("norm-cap", norm <= CORRECTION_NORM_CAP, f"{norm} <= 1/10"),
    ]
    return CorrectionResult(nu, norm, tail, D, pivots, tuple(checks))


# ---------------------------------------------------------------------------
# zeroing


@dataclass(frozen=True)
class ZeroingResult:
    zeta: LevelWitness
    xi: LevelWitness
    correction: CorrectionResult
    tail: Fraction
    phd_outer_inner: int
    tail_exponent: Optional[int]
    degree: int
    values: Mapping[str, Any]
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def zero_out(
    Phi: DualWitness,
    omega,
    N: int,
    D: Optional[int] = None,
    target: Optional[PartialBoolFn] = None,
    alpha=None,
    beta=None,
    degree: Optional[int] = None,
) -> ZeroingResult:
    """Remove the mass of ``Phi * psi`` above total weight ``N``.

    ``D`` is the pure high degree to preserve (measured on the composition
    when omitted). The correction degree defaults to ``min(D, Delta)`` where
    ``Delta`` is the largest exponent with ``tail <= (2NR)^(-2 Delta)``;
    passing ``degree`` overrides it and downgrades the tail precondition to
    an informative check, the correction norm being verified directly.
    """
    values = _values_of(omega)
    R = Phi.n
    psi = symmetrize_witness(values, N)
    xi = dual_block_compose(Phi, psi)
    if D is None:
        D = pure_high_degree(xi)
    tail = tail_mass(Phi, values, N)
    tail_direct = level_tail(xi, N)
    delta_exp = tail_exponent(tail, N, R)
    if degree is None:
        degree = D if delta_exp is None else min(D, delta_exp)
        enforce = True
    else:
        degree = min(degree, D)
        enforce = False
    corr = build_correction(xi, N, degree, enforce_precondition=enforce)
    nu = corr.nu
    diff = xi - nu
    zeta = diff.scale(1 / l1_norm(diff))
    drift = l1_norm(zeta - xi)
    nu_norm = corr.norm

    checks = [
        Check("tail-paths-agree", tail == tail_direct, f"{tail} vs {tail_direct}"),
        Check("support", all(sum(t) <= N for t in zeta.masses), f"weight <= {N}"),
        Check("unit-norm", l1_norm(zeta) == 1),
    ]
    if degree > 0:
        phd = pure_high_degree(zeta, max_degree=degree - 1)
        checks.append(Check("pure-high-degree", phd >= degree, f"phd >= {min(phd, degree)} (needed {degree})"))
    checks += [c for c in corr.checks if c.name in ("norm-cap", "tail-precondition")]
    if nu_norm < 1:
        derived = 2 * nu_norm / (1 - nu_norm)
        checks.append(Check("drift-derived", drift <= derived, f"{drift} <= 2|nu|/(1-|nu|) = {derived}"))
    checks.append(Check("drift-cap", drift <= Fraction(2, 9), f"{drift} <= 2/9"))
    checks.append(
        Check("correction-degree-below-R", R > degree, f"R = {R}, degree = {degree}", informative=True)
    )
    vals: dict[str, Any] = {
        "D": D,
        "degree": degree,
        "tail": tail,
        "tail_exponent": delta_exp,
        "nu_norm": nu_norm,
        "drift": drift,
    }
    if target is not None:
        c_xi = correlation(xi, target).net
        c_zeta = correlation(zeta, target).net
        vals["corr_xi"], vals["corr_zeta"] = c_xi, c_zeta
        checks.append(Check("correlation", c_zeta > Fraction(1, 3), f"{c_zeta} > 1/3"))
        checks.append(Check("correlation-drift", c_zeta >= c_xi - drift, f"{c_zeta} >= {c_xi} - {drift}"))
    if alpha is not None and beta is not None:
        dc = decay_check(values, alpha, beta)
        checks.append(Check("inner-decay", dc.passed, f"failing levels {dc.failures()}", informative=True))
        if R >= 2:
            beta_c = intervals.as_certified(beta)
            lnR = intervals.log(R)
            recipe_delta = beta_c * intervals.sqrt(Fraction(alpha)) * R / (lnR * lnR * 4)
            need = recipe_delta.hi
            ok = delta_exp is None or delta_exp >= need
            vals["recipe_delta"] = recipe_delta
            checks.append(
                Check("tail-exponent-vs-asymptotic", ok, f"measured {delta_exp}, bound ~{float(need):.4g}", informative=True)
            )
    return ZeroingResult(zeta, xi, corr, tail, D, delta_exp, degree, vals, tuple(checks))


# ---------------------------------------------------------------------------
# parameter blocks


@dataclass(frozen=True)
class ParameterBlock:
    name: str
    values: Mapping[str, Any]
    checks: tuple[Check, ...]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def _length_factor(alpha) -> int:
    """``ceil(20 sqrt(alpha))``."""
    return sqrt_ceil(400 * Fraction(alpha))


def surj_parameter_block(R: int, d: Optional[int] = None) -> ParameterBlock:
    """SURJ recipe. ``d`` is the pure high degree of the outer AND witness (default ``isqrt(R)``)."""
    if R < 1:
        raise InputError("R >= 1")
    d = d if d is not None else max(1, math.isqrt(R))
    delta = Fraction(1, 20)
    alpha = 170 / delta
    T = sqrt_floor(Fraction(R, d)) ** 2
    beta = intervals.sqrt(delta / T) * OR_DECAY_C2 if T else None
    factor = _length_factor(alpha)
    N = factor * R
    values = {
        "d": d,
        "T": T,
        "delta": delta,
        "alpha": alpha,
        "beta": beta,
        "D_hat_over_c1": intervals.sqrt(T) * d,
        "N": N,
        "length_factor": factor,
    }
    checks = (
        Check("alpha", alpha == 3400, f"alpha = {alpha}"),
        Check("delta", delta == Fraction(1, 20)),
        Check("N-identity", N == 693 * R, f"ceil(20 sqrt({alpha})) R = {N}, stated 693R = {693 * R}"),
    )
    return ParameterBlock("surj", values, checks)


def dist_parameter_block(R: int, k: int, d: Optional[int] = None) -> ParameterBlock:
    """k-distinctness recipe; the decay constant is reported with ``c2 = 1/2``."""
    if R < 1 or k < 2:
        raise InputError("R >= 1 and k >= 2")
    d = d if d is not None else max(1, math.isqrt(R) // 2**k)
    T = math.isqrt((8 * k) ** k * R)
    alpha = Fraction((2 * k) ** k)
    factor = _length_factor(alpha)
    N = factor * R
    root = intervals.exp(intervals.log(N) / k)
    values = {
        "k": k,
        "d": d,
        "T": T,
        "alpha": alpha,
        "N": N,
        "length_factor": factor,
        "beta_c2_half": Fraction(1, 2) / intervals.sqrt(root * (k * T)),
        "D_hat_over_c1": intervals.sqrt(CertifiedReal.exact(T) / root / k) * d,
    }
    checks = (
        Check("alpha", alpha == (2 * k) ** k),
        Check("T", T * T <= (8 * k) ** k * R < (T + 1) ** 2, f"T = {T}"),
        Check("N-identity", N == _length_factor(alpha) * R),
    )
    return ParameterBlock("dist", values, checks)


def ist_parameter_block(R: int, gamma) -> ParameterBlock:
    gamma = Fraction(gamma)
    if R < 1 or not 0 < gamma <= 1:
        raise InputError("R >= 1 and 0 < gamma <= 1")
    delta = gamma / 4
    alpha = 170 / delta
    factor = _length_factor(alpha)
    N = factor * R
    values = {
        "gamma": gamma,
        "delta": delta,
        "alpha": alpha,
        "T": N,
        "N": N,
        "length_factor": factor,
        "beta": intervals.sqrt(delta / N) * OR_DECAY_C2,
    }
    # N <= 310 R / sqrt(gamma)  <=>  (N/R)^2 gamma <= 310^2
    stated = factor * factor * gamma <= 310**2
    checks = (
        Check("delta", delta == gamma / 4),
        Check("length-bound", stated, f"ceil(20 sqrt(alpha)) = {factor} vs 310/sqrt(gamma)"),
    )
    return ParameterBlock("ist", values, checks)


# ---------------------------------------------------------------------------
# image size testing


@dataclass(frozen=True)
class IstResult:
    R: int
    N: int
    gamma: Fraction
    delta: Fraction
    xi: LevelWitness
    correlation: Fraction
    bound: CertifiedReal
    zeroing: Optional[ZeroingResult]
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def ist_target(R: int, gamma, N: int) -> PartialBoolFn:
    return block_compose(gap_and_fn(R, gamma), or_fn(N))


def build_ist_witness(R: int, gamma, N: Optional[int] = None, omega=None, zero: bool = True) -> IstResult:
    """Two-point outer witness composed with an OR witness, checked against GapAND o OR.

    ``N`` defaults to the recipe length; a smaller value is a desk-scale
    override. ``omega`` defaults to the OR construction with ``T = N`` and
    ``delta = gamma / 4``; any balanced unit witness with correlation at least
    ``1 - delta`` may be supplied instead.
    """
    gamma = Fraction(gamma)
    delta = gamma / 4
    if N is None:
        N = ist_parameter_block(R, gamma)["N"]
    if omega is None:
        omega = build_or_witness(N, delta)
    values = _values_of(omega)
    psi = symmetrize_witness(values, N)
    inner_corr = correlation(psi, or_fn(N)).net
    Phi = two_point_witness(R)
    xi = dual_block_compose(Phi, psi)
    target = ist_target(R, gamma, N)
    corr = correlation(xi, target).net
    bound = 1 - delta**R - intervals.exp(-(gamma - delta) * R / 3)
    minus_part = dual_block_compose(DualWitness(R, {(1 << R) - 1: Fraction(-1, 2)}), psi)
    off_minus = correlation(minus_part, target).penalty
    checks = [
        Check("inner-balanced", sum(values, Fraction(0)) == 0),
        Check("inner-unit-norm", sum((abs(v) for v in values), Fraction(0)) == 1),
        Check("inner-correlation", inner_corr >= 1 - delta, f"{inner_corr} >= {1 - delta}"),
        Check("gap-condition", gamma > 2 * delta),
        Check("outer-two-points", l1_norm(Phi) == 1 and len(Phi.entries) == 2),
        Check("composed-unit-norm", l1_norm(xi) == 1),
        Check("correlation-bound", corr >= bound.hi, f"{corr} >= ~{float(bound.mid):.6g}"),
        Check("one-sided-term", off_minus == 0, f"off-domain mass from the all-TRUE pattern = {off_minus}"),
    ]
    zr = None
    if zero:
        zr = zero_out(Phi, values, N, target=target)
        checks.extend(Check(f"zeroing:{c.name}", c.passed, c.detail, c.informative) for c in zr.checks)
    return IstResult(R, N, gamma, delta, xi, corr, bound, zr, tuple(checks))


# ---------------------------------------------------------------------------
# composed pipelines for surjectivity and k-distinctness


@dataclass(frozen=True)
class PipelineResult:
    """Outer witness, inner level masses and the zeroed composition."""

    name: str
    R: int
    N: int
    Phi: DualWitness
    omega: tuple[Fraction, ...]
    target: PartialBoolFn
    zeroing: ZeroingResult
    parameters: Mapping[str, Any]
    checks: tuple[Check, ...]

    @property
    def witness(self) -> LevelWitness:
        return self.zeroing.zeta

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def _recipe_checks(block: ParameterBlock) -> list[Check]:
    return [Check(f"recipe:{c.name}", c.passed, c.detail, informative=True) for c in block.checks]


def _pipeline(name, R, N, Phi, values, inner, target, alpha, beta, block, params, full) -> PipelineResult:
    psi = symmetrize_witness(values, N)
    # full: correct at the whole pure high degree of the composition, verified directly
    degree = pure_high_degree(dual_block_compose(Phi, psi)) if full else None
    checks = [
        Check("inner-balanced", sum(values, Fraction(0)) == 0),
        Check("inner-unit-norm", sum((abs(v) for v in values), Fraction(0)) == 1),
        Check("outer-unit-norm", l1_norm(Phi) == 1),
        Check("inner-correlation", True, f"{correlation(psi, inner).net}", informative=True),
    ]
    zr = zero_out(Phi, values, N, target=target, alpha=alpha, beta=beta, degree=degree)
    checks.extend(Check(f"zeroing:{c.name}", c.passed, c.detail, c.informative) for c in zr.checks)
    checks.extend(_recipe_checks(block))
    return PipelineResult(name, R, N, Phi, tuple(values), target, zr, params, tuple(checks))


def build_surj_witness(
    R: int, N: Optional[int] = None, T: Optional[int] = None, degree: int = 1, full: bool = True
) -> PipelineResult:
    """AND-outer, OR-inner pipeline.

    With ``N`` omitted the recipe length and the OR construction are used. A
    given ``N`` is a desk-scale override: the inner witness is then the
    optimal symmetric LP witness for OR on ``T`` bits (default ``min(N, 2R)``)
    at the given degree. ``full`` corrects at the whole pure high degree of
    the composition instead of ``min(D, Delta)``.
    """
    from .lp import max_correlation_dual

    block = surj_parameter_block(R)
    delta = block["delta"]
    if N is None:
        N = block["N"]
        T = block["T"] if T is None else T
        omega = build_or_witness(T, delta).values
    else:
        T = min(N, 2 * R) if T is None else T
        if not 1 <= T <= N:
            raise InputError("need 1 <= T <= N")
        omega = omega_from_lp(or_fn(T), degree)
    _, Phi, outer_corr = max_correlation_dual(and_fn(R), Fraction(2, 3))
    target = block_compose(and_fn(R), or_fn(N))
    alpha = 170 / delta
    beta = intervals.sqrt(delta / T) * OR_DECAY_C2
    params = {"R": R, "N": N, "T": T, "delta": delta, "inner_degree": degree, "outer_correlation": outer_corr}
    return _pipeline("surj", R, N, Phi, omega, or_fn(N), target, alpha, beta, block, params, full)


def build_dist_witness(
    R: int, k: int, N: Optional[int] = None, T: Optional[int] = None, degree: int = 1, full: bool = True
) -> PipelineResult:
    """OR-outer, threshold-inner pipeline (desk-scale override as in :func:`build_surj_witness`)."""
    from .lp import max_correlation_dual

    block = dist_parameter_block(R, k)
    if N is None:
        N = block["N"]
        T = block["T"] if T is None else T
        omega = build_thr_witness(k, T, N).values
    else:
        T = min(N, 3 * k) if T is None else T
        if not k <= T <= N:
            raise InputError("need k <= T <= N")
        omega = omega_from_lp(thr_fn(k, T), degree)
    _, Phi, outer_corr = max_correlation_dual(or_fn(R), Fraction(2, 3))
    target = block_compose(or_fn(R), thr_fn(k, N))
    root = intervals.exp(intervals.log(N) / k)
    beta = Fraction(1, 2) / intervals.sqrt(root * (k * T))
    params = {"R": R, "k": k, "N": N, "T": T, "inner_degree": degree, "outer_correlation": outer_corr}
    return _pipeline("dist", R, N, Phi, omega, thr_fn(k, N), target, block["alpha"], beta, block, params, full)
