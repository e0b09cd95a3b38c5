"""Upper-bound constructions for OR-type and surjectivity functions.

This module works in the 0/1 convention: a Boolean value is 1 for TRUE and 0
for FALSE, and a polynomial approximates a function with error ``e`` when its
value is within ``e`` of that 0/1 value. The rest of the package uses signs
(-1 for TRUE); :func:`sign_to_zeroone` and :func:`zeroone_to_sign` are the only
crossing points.

Pieces:

* :func:`approximate_nor` builds a NOR approximator from an OR approximator on
  low weights, and a weight test that separates weight 0 from weight above the
  threshold.
* :func:`build_p_R` composes an AND approximator with one low-weight OR
  approximator per range item, giving a polynomial that tracks surjectivity
  restricted to a set of range items whenever none of them is too frequent.
* :func:`build_surj_approximator` averages those polynomials over random
  samples of the input, excluding every item seen in the sample.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from . import intervals
from .core import (
    FALSE,
    TRUE,
    Check,
    InputError,
    ListInput,
    all_lists,
    all_pass,
    and_fn,
    binomial,
    bits_per_item,
    symmetric_fn,
)
from .intervals import CertifiedReal
from .lp import LPResult, optimal_error
from .polynomials import (
    MultilinearPoly,
    SymmetricProfile,
    UnivariatePoly,
    VResult,
    amplifier,
    amplifier_iterations,
    build_V,
)

INPUT_BUDGET = int(os.environ.get("ADEG_INPUT_BUDGET", 10**6))
SUBSET_BUDGET = int(os.environ.get("ADEG_SUBSET_BUDGET", 10**4))
BIT_POLY_LIMIT = 8
SYMMETRIC_POLY_LIMIT = 12

NOR_INNER_EPS = Fraction(1, 10)
WEIGHT_TEST_SIGN_EPS = Fraction(1, 9)  # 0/1 error 1/10 after rescaling
AND_TARGET = Fraction(1, 20)


def sign_to_zeroone(v) -> Fraction:
    """Map a sign value (-1 TRUE, +1 FALSE) to the 0/1 scale (1 TRUE, 0 FALSE)."""
    return (1 - Fraction(v)) / 2


def zeroone_to_sign(v) -> Fraction:
    return 1 - 2 * Fraction(v)


def _symmetric_extension(values: Sequence[Fraction], z: Sequence[Fraction]) -> Fraction:
    """Multilinear extension of a symmetric cube function at a real 0/1-coordinate point.

    ``values[k]`` is the value on points with ``k`` ones. The extension equals
    ``sum_k values[k] e_k`` where ``e_k`` is the coefficient of ``u^k`` in
    ``prod_i (1 - z_i + z_i u)``.
    """
    coeffs = [Fraction(1)]
    for zi in z:
        zi = Fraction(zi)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k] += c * (1 - zi)
            nxt[k + 1] += c * zi
        coeffs = nxt
    return sum((values[k] * c for k, c in enumerate(coeffs)), Fraction(0))


def growth_certificate(z: Iterable) -> Fraction:
    """``prod_i (|1 - z_i| + |z_i|)``: bounds a [0,1]-bounded multilinear polynomial at ``z``."""
    out = Fraction(1)
    for v in z:
        v = Fraction(v)
        out *= abs(1 - v) + abs(v)
    return out


# ---------------------------------------------------------------------------
# NOR warmup


@dataclass(frozen=True)
class NorReport:
    """Level-space NOR approximator and the facts verified about it."""

    n: int
    T: int
    V: VResult
    outer_values: tuple[Fraction, ...]
    test_degree: int
    test_eps: Fraction
    test_attempts: tuple[tuple[int, Fraction], ...]
    amplify_rounds: int
    growth_max: Fraction
    profile: SymmetricProfile
    degree_bound: int
    max_error: Fraction
    poly: Optional[MultilinearPoly]
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def _weight_test(n: int, T: int) -> tuple[int, LPResult, list]:
    """Least-degree symmetric separator of weight 0 from weight above ``T``."""
    g = symmetric_fn(n, lambda t: TRUE if t == 0 else (FALSE if t > T else None), f"ZERO_vs_gt{T}")
    attempts = []
    for d in range(n + 1):
        res = optimal_error(g, d, symmetric=True)
        attempts.append((d, res.eps))
        if res.eps <= WEIGHT_TEST_SIGN_EPS:
            return d, res, attempts
    raise AssertionError("full degree separates exactly")



def approximate_nor(n: int, T: int) -> NorReport:
    """Approximate NOR on ``n`` bits with a low-weight OR approximator and a weight test.

    ``p = 1 - V`` is close to NOR up to weight ``T`` but may be large above it.
    The weight test ``q`` is near 1 at weight 0 and at most ``1/(3M)`` above
    ``T``, where ``M`` bounds ``|p|`` there, so ``p q`` stays within 1/3 of NOR
    everywhere. With ``T >= n`` the weight test is unnecessary.
    """
    if not 1 <= T <= n:
        raise InputError("need 1 <= T <= n")
    V = build_V(T, NOR_INNER_EPS, n)
    outer = tuple(1 - v for v in V.profile.values)
    nor = [Fraction(1) if t == 0 else Fraction(0) for t in range(n + 1)]
    checks = []
    checks.append(Check("outer-origin", outer[0] == 1, f"p(0) = {outer[0]}"))
    checks.append(
        Check(
            "outer-low-weights",
            all(0 <= outer[t] <= NOR_INNER_EPS for t in range(1, T + 1)),
            "p in [0, 1/10] on weights 1..T",
        )
    )
    growth = max((abs(outer[t]) for t in range(T + 1, n + 1)), default=Fraction(0))
    checks.append(
        Check(
            "growth-within-certificate",
            growth <= 1 + V.magnitude_bound,
            f"max |p| above T = {growth}, certificate {1 + V.magnitude_bound}",
        )
    )
    if T >= n:
        test = tuple(Fraction(1) for _ in range(n + 1))
        d_test, eps_test, attempts, rounds = 0, Fraction(0), (), 0
    else:
        d_test, res, attempts = _weight_test(n, T)
        eps_test = res.eps
        # rescale into [0, 1] cube-wide, then read in the 0/1 convention
        raw = [res.poly(t) / (1 + eps_test) for t in range(n + 1)]
        test = [sign_to_zeroone(v) for v in raw]
        start = eps_test / (1 + eps_test)
        target = 1 / (3 * growth) if growth else Fraction(1, 3)
        rounds = amplifier_iterations(start, min(target, start, NOR_INNER_EPS))
        for _ in range(rounds):
            test = [amplifier(v) for v in test]
        test = tuple(test)
        checks.append(
            Check(
                "test-origin",
                test[0] >= 1 - NOR_INNER_EPS,
                f"q(0) = {test[0]}",
            )
        )
        checks.append(
            Check("test-bounded", all(0 <= v <= 1 for v in test), "weight test in [0, 1] on every level")
        )
        checks.append(
            Check(
                "test-amplified",
                all(test[t] * growth <= Fraction(1, 3) for t in range(T + 1, n + 1)),
                f"q <= 1/(3M) above T with M = {growth}",
            )
        )
    values = tuple(outer[t] * test[t] for t in range(n + 1))
    err = max(abs(values[t] - nor[t]) for t in range(n + 1))
    checks.append(Check("origin-value", values[0] >= Fraction(81, 100), f"r(0) = {values[0]}"))
    checks.append(Check("max-error", err <= Fraction(1, 3), f"max error {err}"))
    if T >= n:
        checks.append(Check("full-promise-error", err <= NOR_INNER_EPS, f"max error {err}"))
    profile = SymmetricProfile(n, values)
    poly = profile.to_multilinear() if n <= SYMMETRIC_POLY_LIMIT else None
    if poly is not None:
        cube_ok = all(v == values[bin(x).count("1")] for x, v in enumerate(poly.cube_values()))
        checks.append(Check("multilinear-agrees", cube_ok, "cube values match the level profile"))
    degree = V.d + d_test * 3**rounds
    return NorReport(
        n, T, V, outer, d_test, eps_test, tuple(attempts), rounds, growth, profile,
        degree, err, poly, tuple(checks),
    )


# ---------------------------------------------------------------------------
# AND approximator on m bits


@dataclass(frozen=True)
class AndApproximator:
    """Symmetric approximator of AND on ``m`` bits with values in ``[0, 1]`` on the cube.

    ``values[k]`` is the value at points with ``k`` TRUE inputs. The raw LP
    optimum has 0/1 error ``e`` and range ``[-e, 1 + e]``; the affine map
    ``v -> (v + e) / (1 + 2e)`` moves it into ``[0, 1]`` at error ``2e/(1+2e)``.
    """

    m: int
    degree: int
    sign_eps: Fraction
    values: tuple[Fraction, ...]

    @property
    def error(self) -> Fraction:
        return max(abs(v - (1 if k == self.m else 0)) for k, v in enumerate(self.values))

    def __call__(self, z: Sequence) -> Fraction:
        if len(z) != self.m:
            raise InputError(f"expected {self.m} coordinates")
        return _symmetric_extension(self.values, z)

    def poly(self) -> MultilinearPoly:
        return SymmetricProfile(self.m, self.values).to_multilinear()


@lru_cache(maxsize=None)
def and_approximator(m: int) -> AndApproximator:
    """Least-degree AND approximator with 0/1 error at most 1/20 after rescaling."""
    if m < 0:
        raise InputError("m must be non-negative")
    if m == 0:
        return AndApproximator(0, 0, Fraction(0), (Fraction(1),))
    f = and_fn(m)
    for d in range(m + 1):
        res = optimal_error(f, d, symmetric=True)
        e = res.eps / 2
        if 2 * e / (1 + 2 * e) <= AND_TARGET:
            values = tuple((sign_to_zeroone(res.poly(k)) + e) / (1 + 2 * e) for k in range(m + 1))
            return AndApproximator(m, d, res.eps, values)
    raise AssertionError("full degree is exact")


# ---------------------------------------------------------------------------
# p_R: surjectivity restricted to a set of range items


@dataclass(frozen=True)
class HardPromise:
    """Inputs in which every item of ``items`` occurs at most ``T`` times."""

    items: frozenset
    T: int

    def contains(self, x: ListInput) -> bool:
        f = x.frequencies
        return all(f[r] <= self.T for r in self.items)


def heavy_missing_count(items: Iterable[int], x: ListInput, T: int) -> int:
    """Items of ``items`` occurring more than ``T`` times in ``x`` (frequency scan)."""
    f = x.frequencies
    return sum(1 for r in items if f[r] > T)


def heavy_missing_count_direct(items: Iterable[int], x: ListInput, T: int) -> int:
    """Same count straight from the definition, item by item over the list."""
    out = 0
    for r in set(items):
        if len([v for v in x.items if v == r]) > T:
            out += 1
    return out


def surj_restricted(items: Iterable[int], x: ListInput) -> int:
    """1 when every item of ``items`` occurs in ``x``, else 0."""
    seen = set(x.items)
    return int(all(r in seen for r in items))


@dataclass(frozen=True)
class PR:
    """Evaluator for ``w(V(#r(x)) : r in items)`` plus construction data."""

    items: tuple[int, ...]
    N: int
    R: int
    T: int
    w: AndApproximator
    V: Optional[VResult]
    bits: int
    checks: tuple[Check, ...] = ()
    poly: Optional[MultilinearPoly] = None

    @property
    def promise(self) -> HardPromise:
        return HardPromise(frozenset(self.items), self.T)

    @property
    def degree_bound(self) -> int:
        d_v = self.V.d if self.V is not None else 0
        return self.w.degree * d_v * self.bits

    def inner(self, x: ListInput) -> list[Fraction]:
        f = x.frequencies
        if self.V is None:
            return []
        return [self.V.poly(f[r]) for r in self.items]

    def __call__(self, x: ListInput) -> Fraction:
        return self.w(self.inner(x))

    def certificate(self, x: ListInput) -> Fraction:
        return growth_certificate(self.inner(x))

    @property
    def factor_bound(self) -> Fraction:
        """Per-heavy-item growth factor: ``|1 - z| + |z| <= 1 + 2|z|`` with ``|z|`` bounded."""
        if self.V is None:
            return Fraction(1)
        return 1 + 2 * self.V.magnitude_bound

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


@lru_cache(maxsize=None)
def _inner_V(T: int, m: int, N: int) -> VResult:
    return build_V(T, Fraction(1, 20 * m), N)


def _make_pr(items: Sequence[int], N: int, R: int, T: int) -> PR:
    items = tuple(sorted(set(items)))
    if any(not 1 <= r <= R for r in items):
        raise InputError("range items must lie in 1..R")
    if not 1 <= T <= N:
        raise InputError("need 1 <= T <= N")
    m = len(items)
    w = and_approximator(m)
    V = _inner_V(T, m, N) if m else None
    return PR(items, N, R, T, w, V, bits_per_item(R, False))


def _indicator_poly(n_bits: int, pos: int, B: int, R: int, item: int) -> MultilinearPoly:
    """Bit-level indicator ``[x_pos = item]`` in the character basis (codes clamp at ``R``)."""

    def exact(code: int) -> MultilinearPoly:
        terms: dict[int, Fraction] = {0: Fraction(1)}
        for j in range(B):
            var = pos * B + j
            nxt: dict[int, Fraction] = {}
            for mask, c in terms.items():
                if (code >> j) & 1:
                    nxt[mask | (1 << var)] = nxt.get(mask | (1 << var), Fraction(0)) + c
                else:
                    nxt[mask] = nxt.get(mask, Fraction(0)) + c
                    nxt[mask | (1 << var)] = nxt.get(mask | (1 << var), Fraction(0)) - c
            terms = nxt
        return MultilinearPoly.from_zeroone(n_bits, terms)

    if item < R:
        return exact(item - 1)
    out = MultilinearPoly.constant(n_bits, 1)
    for r in range(1, R):
        out = out - exact(r - 1)
    return out


def _poly_apply(q: UnivariatePoly, x: MultilinearPoly) -> MultilinearPoly:
    out = MultilinearPoly(x.n, {})
    for c in reversed(q.coeffs):
        out = out * x + MultilinearPoly.constant(x.n, c)
    return out


def pr_bit_poly(pr: PR) -> MultilinearPoly:
    """``p_R`` as a multilinear polynomial over the binary encoding of the list."""
    n_bits = pr.N * pr.bits
    if n_bits > BIT_POLY_LIMIT:
        raise InputError(f"{n_bits} bits exceed the bit-level polynomial limit")
    inner = []
    for r in pr.items:
        count = MultilinearPoly(n_bits, {})
        for i in range(pr.N):
            count = count + _indicator_poly(n_bits, i, pr.bits, pr.R, r)
        inner.append(_poly_apply(pr.V.poly, count))
    w_terms = pr.w.poly().to_zeroone() if pr.w.m else {0: pr.w.values[0]}
    out = MultilinearPoly(n_bits, {})
    for mask, c in w_terms.items():
        term = MultilinearPoly.constant(n_bits, c)
        for i in range(pr.w.m):
            if (mask >> i) & 1:
                term = term * inner[i]
        out = out + term
    return out


def _encode(x: ListInput, B: int) -> int:
    """Packed bit string whose set bits are the 0/1 ones of the item codes."""
    code = 0
    for i, v in enumerate(x.items):
        code |= (v - 1) << (i * B)
    return code


def build_p_R(items: Iterable[int], N: int, R: int, T: int, bit_poly: bool = True) -> PR:
    """``p_R`` and exhaustive checks of its promise, growth and degree claims."""
    pr = _make_pr(list(items), N, R, T)
    checks: list[Check] = []
    checks.append(
        Check(
            "and-approximator",
            pr.w.error <= AND_TARGET and all(0 <= v <= 1 for v in pr.w.values),
            f"AND_{pr.w.m}: degree {pr.w.degree}, error {pr.w.error}",
        )
    )
    if pr.V is not None:
        vc = pr.V.checks()
        checks.append(Check("inner-approximator", all(vc.values()), str(vc)))
    checks.append(
        Check(
            "naive-composition-bound",
            AND_TARGET + (Fraction(1, 20 * pr.w.m) * pr.w.m if pr.w.m else 0) <= Fraction(1, 10),
            "outer error plus inner error times arity",
        )
    )
    if R**N <= INPUT_BUDGET:
        worst_in = Fraction(0)
        range_ok = cert_ok = factor_ok = True
        growth_ratio = 0.0
        for x in all_lists(N, R, dummy=False):
            v = pr(x)
            if pr.promise.contains(x):
                target = surj_restricted(pr.items, x)
                worst_in = max(worst_in, abs(v - target))
                lo, hi = (Fraction(9, 10), Fraction(1)) if target else (Fraction(0), Fraction(1, 10))
                range_ok &= lo <= v <= hi
            else:
                b = heavy_missing_count(pr.items, x, T)
                cert = pr.certificate(x)
                cert_ok &= abs(v) <= cert
                factor_ok &= cert <= pr.factor_bound**b
                scale = b * math.sqrt(T) * math.log(N) if N > 1 else 0
                if scale:
                    growth_ratio = max(growth_ratio, math.log(float(cert)) / scale)
        checks.append(Check("promise-range", range_ok, "[9/10,1] on TRUE, [0,1/10] on FALSE"))
        checks.append(Check("promise-error", worst_in <= Fraction(1, 10), f"max error on promise {worst_in}"))
        checks.append(Check("off-promise-certificate", cert_ok, "|p| <= prod(|1-z|+|z|)"))
        checks.append(
            Check("certificate-per-heavy-item", factor_ok, f"certificate <= {pr.factor_bound}^b")
        )
        checks.append(
            Check(
                "growth-constant",
                True,
                f"log(certificate) <= C b sqrt(T) log N with C = {growth_ratio:.4f}",
                informative=True,
            )
        )
    else:
        checks.append(Check("exhaustive", False, "input space beyond budget", informative=True))
    poly = None
    if bit_poly and pr.w.m and N * pr.bits <= BIT_POLY_LIMIT:
        poly = pr_bit_poly(pr)
        agree = all(poly.value_at(_encode(x, pr.bits)) == pr(x) for x in all_lists(N, R, dummy=False))
        checks.append(Check("bit-polynomial-agrees", agree, "bit-level polynomial matches evaluator"))
        checks.append(
            Check(
                "degree-bound",
                poly.degree <= pr.degree_bound,
                f"degree {poly.degree} <= {pr.w.degree}*{pr.V.d}*{pr.bits}",
            )
        )
    return PR(pr.items, N, R, T, pr.w, pr.V, pr.bits, tuple(checks), poly)


# ---------------------------------------------------------------------------
# sampling


def miss_bound(N: int, S: int, T: int, b: int) -> CertifiedReal:
    """``exp(-b (S T / N - ln N))``."""
    return intervals.exp(-b * (Fraction(S * T, N) - intervals.log(N)))


@dataclass(frozen=True)
class MissProbability:
    N: int
    S: int
    T: int
    b: int
    exact: Optional[Fraction]
    bound: CertifiedReal
    vacuous: bool
    within_bound: Optional[bool]


def _missed_heavy(x: ListInput, sample: Iterable[int], T: int) -> int:
    seen = {x.items[i] for i in sample}
    unseen = [r for r in range(1, x.R + 1) if r not in seen]
    return heavy_missing_count(unseen, x, T)


def sample_miss_probability(N: int, S: int, T: int, x: ListInput, b: int, budget: int = SUBSET_BUDGET) -> MissProbability:
    """Probability that a random ``S``-subset misses at least ``b`` items occurring more than ``T`` times."""
    if not (0 <= S <= N and 1 <= T <= N) or x.N != N or b < 1:
        raise InputError("need 0 <= S <= N, 1 <= T <= N, b >= 1 and a list of length N")
    bound = miss_bound(N, S, T, b)
    vacuous = bound.lo >= 1
    total = binomial(N, S)
    if total > budget:
        return MissProbability(N, S, T, b, None, bound, vacuous, None)
    hits = sum(1 for sample in combinations(range(N), S) if _missed_heavy(x, sample, T) >= b)
    exact = Fraction(hits, total)
    return MissProbability(N, S, T, b, exact, bound, vacuous, exact <= bound.lo)


# ---------------------------------------------------------------------------
# the averaged approximator


def _unseen_distribution(x: ListInput, S: int) -> dict[frozenset, Fraction]:
    """Law of the set of range items missed by a uniform ``S``-subset, by counting.

    The subsets whose seen items are exactly ``U`` are those inside the
    positions of ``U`` that hit every item of ``U``; inclusion-exclusion over
    subsets of ``U`` counts them.
    """
    f = x.frequencies
    present = [r for r in range(1, x.R + 1) if f[r]]
    total = binomial(x.N, S)
    out: dict[frozenset, Fraction] = {}
    for k in range(len(present) + 1):
        for U in combinations(present, k):
            count = 0
            for j in range(k + 1):
                for W in combinations(U, j):
                    count += (-1) ** (k - j) * binomial(sum(f[r] for r in W), S)
            if count:
                unseen = frozenset(r for r in range(1, x.R + 1) if r not in U)
                out[unseen] = Fraction(count, total)
    return out


@dataclass(frozen=True)
class InputReport:
    x: ListInput
    target: int
    value: Fraction
    t1: Fraction
    t2: Fraction
    tail_bound: Fraction
    miss: tuple[Fraction, ...]


@dataclass
class SurjApproximator:
    """Average of ``p_R`` over random samples, with ``R`` the items the sample missed."""

    N: int
    R: int
    T: int
    S: int
    bits: int
    _cache: dict = field(default_factory=dict, repr=False)

    def p(self, items: frozenset) -> PR:
        if items not in self._cache:
            self._cache[items] = _make_pr(sorted(items), self.N, self.R, self.T)
        return self._cache[items]

    @property
    def w(self) -> AndApproximator:
        return and_approximator(self.R)

    @property
    def V(self) -> VResult:
        return _inner_V(self.T, self.R, self.N)

    @property
    def degree_bound(self) -> int:
        worst = max(self.p(frozenset(range(1, m + 1))).degree_bound for m in range(self.R + 1))
        return self.S * self.bits + worst

    def decompose(self, x: ListInput) -> InputReport:
        t1 = t2 = Fraction(0)
        miss = [Fraction(0)] * (self.R + 1)
        for items, prob in _unseen_distribution(x, self.S).items():
            pr = self.p(items)
            b = heavy_missing_count(items, x, self.T)
            miss[b] += prob
            if b == 0:
                t1 += prob * pr(x)
            else:
                t2 += prob * pr(x)
        factor = max(self.p(frozenset(range(1, m + 1))).factor_bound for m in range(self.R + 1))
        tail_bound = sum((miss[b] * factor**b for b in range(1, self.R + 1)), Fraction(0))
        target = 1 if all(x.frequencies[r] for r in range(1, self.R + 1)) else 0
        return InputReport(x, target, t1 + t2, t1, t2, tail_bound, tuple(miss))

    def __call__(self, x: ListInput) -> Fraction:
        return self.decompose(x).value

    def explicit(self, x: ListInput, y_budget: int = SUBSET_BUDGET) -> Fraction:
        """The subset-and-string sum, enumerated term by term."""
        total = Fraction(0)
        count = binomial(self.N, self.S)
        spell = self.R**self.S <= y_budget
        for sample in combinations(range(self.N), self.S):
            observed = tuple(x.items[i] for i in sample)
            strings = product(range(1, self.R + 1), repeat=self.S) if spell else (observed,)
            for y in strings:
                if y != observed:
                    continue
                items = frozenset(range(1, self.R + 1)) - set(y)
                total += self.p(items)(x)
        return total / count


@dataclass(frozen=True)
class SurjReport:
    approximator: SurjApproximator
    exhaustive: bool
    inputs: int
    max_error: Fraction
    worst: Optional[ListInput]
    max_t2: Fraction
    degree_bound: int
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all_pass(self.checks)


def _inputs(N: int, R: int, budget: int, samples: int, seed: int):
    if R**N <= budget:
        return list(all_lists(N, R, dummy=False)), True
    rng = random.Random(seed)
    return [ListInput(N, R, tuple(rng.randint(1, R) for _ in range(N))) for _ in range(samples)], False


def build_surj_approximator(
    N: int,
    R: int,
    T: int,
    S: int,
    budget: int = INPUT_BUDGET,
    subset_budget: int = SUBSET_BUDGET,
    samples: int = 200,
    seed: int = 0,
) -> SurjReport:
    """Assemble the averaged approximator and measure it on every input within budget."""
    if not (1 <= T <= N and 0 <= S <= N and R >= 1):
        raise InputError("need 1 <= T <= N, 0 <= S <= N and R >= 1")
    approx = SurjApproximator(N, R, T, S, bits_per_item(R, False))
    xs, exhaustive = _inputs(N, R, budget, samples, seed)
    worst_err, worst_x, max_t2 = Fraction(-1), None, Fraction(0)
    tail_ok = explicit_ok = split_ok = prob_ok = True
    explicit_run = binomial(N, S) <= subset_budget
    for x in xs:
        rep = approx.decompose(x)
        err = abs(rep.value - rep.target)
        if err > worst_err:
            worst_err, worst_x = err, x
        max_t2 = max(max_t2, abs(rep.t2))
        tail_ok &= abs(rep.t2) <= rep.tail_bound
        split_ok &= rep.value == rep.t1 + rep.t2
        for b in range(1, R + 1):
            at_least = sum(rep.miss[b:], Fraction(0))
            if S * T > 0:
                bound = miss_bound(N, S, T, b)
                if bound.lo < 1:
                    prob_ok &= at_least <= bound.lo
        if explicit_run:
            explicit_ok &= approx.explicit(x) == rep.value
    checks = [
        Check("split-sums", split_ok, "r = t1 + t2 on every input"),
        Check("tail-term-bound", tail_ok, "|t2| <= sum_b Pr[b] (growth factor)^b"),
        Check("miss-probability-bound", prob_ok, "exact miss law below exp(-b(ST/N - ln N)) where non-vacuous"),
        Check("max-error", worst_err <= Fraction(1, 3), f"max |r - SURJ| = {worst_err}"),
        Check("exhaustive", exhaustive, f"{len(xs)} inputs", informative=True),
    ]
    if explicit_run:
        checks.append(Check("explicit-sum-agrees", explicit_ok, "subset/string sum equals the assembled value"))
    return SurjReport(
        approx, exhaustive, len(xs), worst_err, worst_x, max_t2, approx.degree_bound, tuple(checks)
    )


@dataclass(frozen=True)
class GridRow:
    T: int
    S: int
    max_error: Fraction
    degree_bound: int
    passed: bool


def grid_search(N: int, R: int, Ts: Optional[Sequence[int]] = None, Ss: Optional[Sequence[int]] = None) -> tuple[list[GridRow], Optional[GridRow]]:
    """Error of the averaged approximator over a grid of thresholds and sample sizes.

    The best row has error below 1/3 and the least degree bound among those.
    """
    Ts = list(Ts) if Ts is not None else list(range(1, N + 1))
    Ss = list(Ss) if Ss is not None else list(range(0, N + 1))
    rows = []
    for T in Ts:
        for S in Ss:
            rep = build_surj_approximator(N, R, T, S)
            rows.append(GridRow(T, S, rep.max_error, rep.degree_bound, rep.passed))
    good = [r for r in rows if r.max_error < Fraction(1, 3)]
    best = min(good, key=lambda r: (r.degree_bound, r.max_error)) if good else None
    return rows, best
