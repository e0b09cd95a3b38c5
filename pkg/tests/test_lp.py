from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adeg.core import TRUE, InputError, and_fn, block_compose, maj_fn, or_fn, parity_fn, property_to_block, restrict_weight, thr_fn
from adeg.duals import LevelWitness, l1_norm, pure_high_degree
from adeg.lp import (
    BudgetError,
    approximate_degree,
    enumerate_block_points,
    extract_dual,
    level_count,
    list_lp_points,
    max_correlation_dual,
    optimal_error,
    property_function,
    reduction_consistency,
    witness_correlation,
)

FUNCS = {
    "AND": and_fn,
    "OR": or_fn,
    "PARITY": parity_fn,
    "MAJ": maj_fn,
    "THR2": lambda n: thr_fn(2, n),
}


@st.composite
def small_instances(draw, max_n=4):
    name = draw(st.sampled_from(sorted(FUNCS)))
    n = draw(st.integers(2 if name == "THR2" else 1, max_n))
    d = draw(st.integers(0, n))
    return FUNCS[name](n), d


@pytest.mark.parametrize("n", range(2, 8))
def test_or_degree_one_closed_form(n):
    # equioscillation at t = 0, 1, n for the best line gives (n - 1)/n
    assert optimal_error(or_fn(n), 1, symmetric=True).eps == Fraction(n - 1, n)


@pytest.mark.parametrize("n", range(1, 6))
def test_parity_needs_full_degree(n):
    for d in range(n):
        assert optimal_error(parity_fn(n), d, symmetric=True).eps == 1
    assert optimal_error(parity_fn(n), n, symmetric=True).eps == 0


def test_and2_table():
    # constant: error 1; best line on levels (1, 1, -1): error 1/2
    assert [optimal_error(and_fn(2), d).eps for d in range(3)] == [1, Fraction(1, 2), 0]
    d, res = approximate_degree(and_fn(2), Fraction(1, 3), convention="zeroone")
    assert d == 1 and res.eps_zeroone == Fraction(1, 4)
    assert approximate_degree(parity_fn(3), Fraction(1, 3), convention="zeroone")[0] == 3


@given(small_instances())
def test_explicit_and_level_programs_agree(inst):
    f, d = inst
    a = optimal_error(f, d, symmetric=False)
    b = optimal_error(f, d, symmetric=True)
    assert a.eps == b.eps
    for res in (a, b):
        dual = extract_dual(res)
        assert all(dual.checks.values())
        assert dual.correlation == res.eps


@given(small_instances(max_n=3))
def test_primal_polynomial_achieves_optimum(inst):
    f, d = inst
    res = optimal_error(f, d, symmetric=False)
    assert res.poly.degree <= d
    err = max(abs(res.poly.value_at(x) - f(x)) for x in f.domain())
    assert err == res.eps


@given(small_instances(max_n=3))
def test_error_decreases_with_degree(inst):
    f, d = inst
    if d == 0:
        return
    assert optimal_error(f, d, symmetric=True).eps <= optimal_error(f, d - 1, symmetric=True).eps


def test_variants_order():
    f = restrict_weight(or_fn(4), 2)
    for d in range(3):
        unb = optimal_error(f, d, "unbounded").eps
        bnd = optimal_error(f, d, "bounded").eps
        assert unb <= bnd
    dp = optimal_error(or_fn(4), 1, "double-promise", promise_weight=2)
    assert dp.eps <= optimal_error(or_fn(4), 1).eps
    assert witness_correlation(dp) == dp.eps


def test_degenerate_optimum_flagged():
    res = optimal_error(and_fn(2), 2)
    assert res.eps == 0
    dual = extract_dual(res)
    assert dual.degenerate and dual.correlation == 0


def test_level_witness_shape():
    res = optimal_error(or_fn(20), 2, symmetric=True)
    assert isinstance(res.witness, LevelWitness)
    assert l1_norm(res.witness) == 1
    assert pure_high_degree(res.witness) >= 3


def test_budget_refusal():
    with pytest.raises(BudgetError):
        optimal_error(maj_fn(12), 2, symmetric=False)
    with pytest.raises(InputError):
        optimal_error(block_compose(and_fn(2), or_fn(2)), 1, symmetric=True)


def test_max_correlation_dual():
    phd, psi, corr = max_correlation_dual(or_fn(3), Fraction(2, 3))
    assert corr >= Fraction(2, 3)
    assert pure_high_degree(psi) == phd
    assert optimal_error(or_fn(3), phd, symmetric=False).eps < Fraction(2, 3)
    with pytest.raises(InputError):
        max_correlation_dual(or_fn(1), Fraction(3, 2))


def test_property_function_matches_block_encoding():
    outer, inner, N, R = or_fn(2), and_fn(2), 2, 2
    prop = property_function(outer, inner, N, R)
    composed = block_compose(outer, inner)
    assert prop.n == 4 and list_lp_points(N, R) == 16
    seen = 0
    for s, x in enumerate_block_points(N, R):
        code = sum(v << (2 * i) for i, v in enumerate(s.items))
        assert prop(code) == composed(x) == composed(property_to_block(s).packed)
        seen += 1
    assert seen == 9


def test_reduction_consistency_micro():
    rep = reduction_consistency(and_fn(2), or_fn(2), Fraction(1, 3))
    assert rep.holds and rep.bits == 4
    assert rep.property_degree >= rep.block_degree


def test_level_count():
    assert level_count(4, 2) == 1 + 4 + 6
    assert level_count(3, 5) == 8


def test_or_dual_is_one_sided():
    res = optimal_error(or_fn(5), 2, symmetric=False)
    assert res.witness(0) > 0
    assert or_fn(5)(1) == TRUE
