"""Command line: build, verify and certify witnesses; run the LP oracle and the upper bound.

Every command prints JSON on stdout. Exit codes: 0 certified, 1 a deciding
check failed, 2 input error, 3 budget refusal. Budgets are read from the
``ADEG_*`` environment variables documented in the README.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from . import approx, witnesses
from .core import (
    Check,
    InputError,
    ListInput,
    PartialBoolFn,
    block_compose,
    entropy_pair_report,
    eval_dist_k,
    eval_surj,
    function_from_spec,
    gap_and_fn,
    reduce_ddist_to_dist,
    reduce_dsurj_to_surj,
)
from .duals import LevelWitness, Witness, correlation, l1_norm, one_sided_check, pure_high_degree
from .lp import BudgetError, approximate_degree, max_correlation_dual, optimal_error
from .serialize import (
    certificate,
    dump_witness,
    dumps,
    load_witness,
    parse_fraction,
    verdict,
    write_atomic,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# function specs and claim verification


def function_spec(name: str, n: int, k: Optional[int] = None, gamma=None, inner: Optional[dict] = None) -> dict:
    spec: dict[str, Any] = {"name": name.upper(), "n": n}
    if k is not None:
        spec["k"] = k
    if gamma is not None:
        spec["gamma"] = str(Fraction(gamma))
    if inner is not None:
        spec["inner"] = inner
    return spec


def _named(spec: Mapping) -> PartialBoolFn:
    name, n = str(spec["name"]).upper(), int(spec["n"])
    if name == "GAPAND":
        if "gamma" not in spec:
            raise InputError("GAPAND needs gamma")
        return gap_and_fn(n, parse_fraction(spec["gamma"]))
    k = spec.get("k")
    return function_from_spec(name, n, int(k) if k is not None else None)


def build_function(spec: Mapping) -> PartialBoolFn:
    try:
        outer = _named(spec)
        if spec.get("inner"):
            return block_compose(outer, _named(spec["inner"]))
        return outer
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed function spec: {exc}") from exc


def verify_claims(psi: Witness, claim: Mapping) -> list[Check]:
    """Re-derive every claimed property of ``psi`` from its entries alone."""
    f = build_function(claim["function"])
    if f.n != psi.n:
        raise InputError(f"witness has {psi.n} bits, function has {f.n}")
    promise = claim.get("promise_weight")
    promise = int(promise) if promise is not None else None
    checks = []
    norm = l1_norm(psi)
    checks.append(Check("unit-norm", norm == 1, f"l1 norm = {norm}"))
    if claim.get("pure_high_degree") is not None:
        want = int(claim["pure_high_degree"])
        got = pure_high_degree(psi, max_degree=want - 1) if want > 0 else want
        checks.append(Check("pure-high-degree", got >= want, f"pure high degree {'>=' if got >= want else '='} {min(got, want)}, claimed {want}"))
    corr = correlation(psi, f, promise).net
    if claim.get("correlation_at_least") is not None:
        want = parse_fraction(claim["correlation_at_least"])
        checks.append(Check("correlation", corr >= want, f"{corr} >= {want}"))
    else:
        checks.append(Check("correlation", True, f"{corr}", informative=True))
    if claim.get("one_sided"):
        ok = one_sided_check(psi)
        checks.append(Check("one-sided", ok is True, f"positive at the all-FALSE point: {ok}"))
    return checks


def _claim(function: dict, phd: int, corr, promise_weight=None, one_sided: bool = False) -> dict:
    out: dict[str, Any] = {
        "function": function,
        "pure_high_degree": phd,
        "correlation_at_least": str(Fraction(corr)),
        "statement": f"every polynomial of degree below {phd} has error at least {corr} (sign scale)",
    }
    if promise_weight is not None:
        out["promise_weight"] = promise_weight
    if one_sided:
        out["one_sided"] = True
    return out


def _emit(obj: Any) -> None:
    sys.stdout.write(dumps(obj))


def _write_outputs(out_dir: Optional[str], witness_text: Optional[str], cert: dict) -> None:
    if not out_dir:
        return
    if witness_text is not None:
        write_atomic(os.path.join(out_dir, "witness.json"), witness_text)
    write_atomic(os.path.join(out_dir, "certificate.json"), dumps(cert))


def _exit_for(cert_verdict: str) -> int:
    return EXIT_OK if cert_verdict == "certified" else EXIT_FAILED


# ---------------------------------------------------------------------------
# build-witness


def _overrides(items: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or key not in ("N", "T"):
            raise InputError(f"scale override must look like N=6 or T=4, got {item!r}")
        out[key] = int(value)
    return out


def cmd_build_witness(args) -> int:
    kind = args.kind
    over = _overrides(args.scale_override)
    params: dict[str, Any] = {"kind": kind}
    if kind == "or":
        if args.T is None:
            raise InputError("or needs --T")
        delta = parse_fraction(args.delta or "1/2")
        w = witnesses.build_or_witness(args.T, delta)
        psi: Witness = witnesses.symmetrize_witness(w, args.T)
        spec = function_spec("OR", args.T)
        claim = _claim(spec, w.meta["phd"], w.meta["correlation"], one_sided=True)
        params.update({k: v for k, v in w.meta.items() if k != "decay"})
        build_checks = list(w.checks)
    elif kind == "thr":
        if args.k is None:
            raise InputError("thr needs --k")
        k = args.k
        N = over.get("N", args.N if args.N is not None else (1 if k == 1 else 16))
        if args.T is not None or "T" in over:
            T = over.get("T", args.T)
        else:
            T = 1 if k == 1 else 4 * 2 * k * witnesses.iroot_ceil(N, k)
        w = witnesses.build_thr_witness(k, T, N)
        psi = witnesses.symmetrize_witness(w, T)
        spec = function_spec("THR", T, k=k)
        corr = correlation(psi, build_function(spec)).net
        claim = _claim(spec, w.meta["phd"], corr)
        params.update(w.meta)
        build_checks = list(w.checks)
    elif kind in ("surj", "dist"):
        if args.R is None:
            raise InputError(f"{kind} needs --R")
        N = over.get("N", args.N)
        T = over.get("T", args.T)
        if kind == "surj":
            res = witnesses.build_surj_witness(args.R, N=N, T=T)
            spec = function_spec("AND", args.R, inner=function_spec("OR", res.N))
        else:
            if args.k is None:
                raise InputError("dist needs --k")
            res = witnesses.build_dist_witness(args.R, args.k, N=N, T=T)
            spec = function_spec("OR", args.R, inner=function_spec("THR", res.N, k=args.k))
        psi = res.witness
        zr = res.zeroing
        claim = _claim(spec, zr.degree, zr.values["corr_zeta"], promise_weight=res.N)
        params.update(res.parameters)
        params.update({"zeroing": dict(zr.values), "scale_override": over})
        build_checks = list(res.checks)
    elif kind == "ist":
        if args.R is None:
            raise InputError("ist needs --R")
        gamma = parse_fraction(args.gamma or "2/3")
        N = over.get("N", args.N)
        res = witnesses.build_ist_witness(args.R, gamma, N=N)
        psi = res.zeroing.zeta if res.zeroing is not None else res.xi
        spec = function_spec("GAPAND", args.R, gamma=gamma, inner=function_spec("OR", res.N))
        if res.zeroing is not None:
            claim = _claim(spec, res.zeroing.degree, res.zeroing.values["corr_zeta"], promise_weight=res.N)
        else:
            claim = _claim(spec, pure_high_degree(psi), res.correlation)
        params.update({"R": args.R, "N": res.N, "gamma": gamma, "delta": res.delta, "correlation": res.correlation, "bound": res.bound})
        build_checks = list(res.checks)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown kind {kind!r}")
    fresh = verify_claims(psi, claim)
    checks = build_checks + [Check(f"verify:{c.name}", c.passed, c.detail, c.informative) for c in fresh]
    text = dump_witness(psi)
    cert = certificate(claim, checks, params, text)
    _write_outputs(args.out_dir, text, cert)
    _emit(cert)
    return _exit_for(cert["verdict"])


# ---------------------------------------------------------------------------
# adeg


def cmd_adeg(args) -> int:
    f = function_from_spec(args.function, args.n, args.k)
    eps = parse_fraction(args.eps)
    symmetric = True if args.symmetric else (False if args.explicit else None)
    degree, _ = approximate_degree(f, eps, args.variant, args.promise_weight, symmetric, args.convention)
    top = f.n if args.full_table else degree
    table = []
    results = {}
    for d in range(top + 1):
        res = optimal_error(f, d, args.variant, args.promise_weight, symmetric)
        results[d] = res
        table.append({"d": d, "eps_star": res.eps if args.convention == "sign" else res.eps_zeroone, "eps_star_sign": res.eps})
    report: dict[str, Any] = {
        "function": function_spec(args.function, args.n, args.k),
        "variant": args.variant,
        "convention": args.convention,
        "eps": eps,
        "degree": degree,
        "table": table,
    }
    code = EXIT_OK
    if args.emit_dual:
        if degree == 0:
            raise InputError("degree 0 needs no lower-bound witness")
        res = results[degree - 1]
        psi = res.witness
        promise = args.promise_weight if args.variant == "double-promise" else None
        one_sided = args.function.upper() == "OR" and args.variant == "bounded"
        claim = _claim(report["function"], degree, res.eps, promise_weight=promise, one_sided=one_sided)
        if args.variant == "unbounded":
            claim["note"] = "unbounded variant: the witness vanishes off the domain"
        checks = verify_claims(psi, claim)
        text = dump_witness(psi)
        write_atomic(args.emit_dual, text)
        cert = certificate(claim, checks, {"lp_degree": degree - 1}, text)
        report["dual"] = {"path": args.emit_dual, "certificate": cert}
        code = _exit_for(cert["verdict"])
    _emit(report)
    return code


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    with open(args.witness) as fh:
        psi = load_witness(fh.read())
    claim: dict[str, Any] = {}
    if args.claims:
        with open(args.claims) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"malformed claims file: {exc}") from exc
        claim = dict(data.get("claim", data))
    if args.function:
        inner = None
        if args.inner:
            inner = function_spec(args.inner, args.inner_n, args.inner_k)
        claim["function"] = function_spec(args.function, args.n, args.k, args.gamma, inner)
    if args.phd is not None:
        claim["pure_high_degree"] = args.phd
    if args.correlation is not None:
        claim["correlation_at_least"] = args.correlation
    if args.promise_weight is not None:
        claim["promise_weight"] = args.promise_weight
    if args.one_sided:
        claim["one_sided"] = True
    if "function" not in claim:
        raise InputError("no function given (use --function or --claims)")
    checks = verify_claims(psi, claim)
    v = verdict(checks)
    failed = [c.name for c in checks if not c.passed and not c.informative]
    _emit({"verdict": v, "checks": checks, "failed": failed})
    if failed:
        sys.stderr.write("failed: " + ", ".join(failed) + "\n")
    return _exit_for(v)


# ---------------------------------------------------------------------------
# surj-upper


def _int_list(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"expected a comma-separated integer list, got {text!r}") from exc


def cmd_surj_upper(args) -> int:
    if args.R**args.N > approx.INPUT_BUDGET:
        raise BudgetError(f"{args.R}^{args.N} inputs exceed the budget {approx.INPUT_BUDGET}")
    rows, best = approx.grid_search(args.N, args.R, _int_list(args.T), _int_list(args.S))
    table = [
        {"T": r.T, "S": r.S, "max_error": r.max_error, "degree_bound": r.degree_bound, "checks_passed": r.passed, "best": r == best}
        for r in rows
    ]
    report = {
        "N": args.N,
        "R": args.R,
        "exhaustive": True,
        "degree_accounting": "S * bits_per_item + max over sampled sets of deg(w) * deg(V) * bits_per_item",
        "rows": table,
        "best": None if best is None else {"T": best.T, "S": best.S, "max_error": best.max_error, "degree_bound": best.degree_bound},
    }
    _emit(report)
    return EXIT_OK if best is not None and all(r.passed for r in rows if r.max_error < Fraction(1, 3)) else EXIT_FAILED


# ---------------------------------------------------------------------------
# tail-mass


def cmd_tail_mass(args) -> int:
    outer = function_from_spec(args.outer, args.R)
    _, Phi, _ = max_correlation_dual(outer, parse_fraction(args.threshold))
    inner = function_from_spec(args.inner, args.T, args.k)
    omega = witnesses.omega_from_lp(inner, args.degree)
    tail = witnesses.tail_mass(Phi, omega, args.N)
    report: dict[str, Any] = {
        "outer": function_spec(args.outer, args.R),
        "inner": function_spec(args.inner, args.T, args.k),
        "N": args.N,
        "tail": tail,
        "tail_exponent": witnesses.tail_exponent(tail, args.N, args.R),
    }
    checks = []
    if args.N * args.R <= 22:
        brute = witnesses.tail_mass_bruteforce(Phi, omega, args.N)
        report["bruteforce"] = brute
        checks.append(Check("dp-equals-bruteforce", brute == tail, f"{tail} vs {brute}"))
    report["checks"] = checks
    report["verdict"] = verdict(checks)
    _emit(report)
    return EXIT_OK if report["verdict"] != "failed" else EXIT_FAILED


# ---------------------------------------------------------------------------
# reduce and entropy-pair


def _list_input(args) -> ListInput:
    if args.input:
        with open(args.input) as fh:
            return ListInput.from_json(fh.read())
    if args.items is None or args.R is None:
        raise InputError("give --input FILE or --items and --R")
    items = _int_list(args.items)
    return ListInput(len(items), args.R, tuple(items))


def cmd_reduce(args) -> int:
    s = _list_input(args)
    if args.kind == "dsurj":
        out = reduce_dsurj_to_surj(s)
        before, after = eval_surj(s, dummy=True), eval_surj(out)
    else:
        if args.k is None:
            raise InputError("ddist needs --k")
        out = reduce_ddist_to_dist(s, args.k)
        before, after = eval_dist_k(s, args.k, dummy=True), eval_dist_k(out, args.k)
    checks = [Check("commutes", before == after, f"{before} -> {after}")]
    _emit({"input": json.loads(s.to_json()), "output": json.loads(out.to_json()), "checks": checks, "verdict": verdict(checks)})
    return _exit_for(verdict(checks))


def cmd_entropy_pair(args) -> int:
    u = _list_input(args)
    rep = entropy_pair_report(u, args.precision)
    out = {
        "input": json.loads(u.to_json()),
        "first": json.loads(rep.first.to_json()),
        "second": json.loads(rep.second.to_json()),
        "entropy": {"input": rep.h_source, "first": rep.h_first, "second": rep.h_second},
        "distance_from_uniform": rep.distance,
        "checks": rep.checks,
        "verdict": verdict(rep.checks),
    }
    _emit(out)
    return _exit_for(out["verdict"])


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adeg", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log construction details to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-witness", help="construct a dual witness and certify it")
    b.add_argument("kind", choices=["or", "thr", "surj", "dist", "ist"])
    b.add_argument("--T", type=int)
    b.add_argument("--N", type=int)
    b.add_argument("--R", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--delta")
    b.add_argument("--gamma")
    b.add_argument("--scale-override", action="append", default=[], metavar="KEY=VALUE")
    b.add_argument("--out-dir")
    b.set_defaults(func=cmd_build_witness)

    a = sub.add_parser("adeg", help="exact approximate degree from the LP oracle")
    a.add_argument("function")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int)
    a.add_argument("--eps", default="1/3")
    a.add_argument("--variant", choices=["bounded", "unbounded", "double-promise"], default="bounded")
    a.add_argument("--promise-weight", type=int)
    a.add_argument("--convention", choices=["zeroone", "sign"], default="zeroone")
    g = a.add_mutually_exclusive_group()
    g.add_argument("--symmetric", action="store_true", help="solve on Hamming levels")
    g.add_argument("--explicit", action="store_true", help="solve on the whole cube")
    a.add_argument("--full-table", action="store_true")
    a.add_argument("--emit-dual", nargs="?", const="dual.json", metavar="PATH")
    a.set_defaults(func=cmd_adeg)

    v = sub.add_parser("verify", help="re-verify a witness file against claims")
    v.add_argument("witness")
    v.add_argument("--claims", help="certificate or claim JSON")
    v.add_argument("--function")
    v.add_argument("--n", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--gamma")
    v.add_argument("--inner")
    v.add_argument("--inner-n", type=int)
    v.add_argument("--inner-k", type=int)
    v.add_argument("--phd", type=int)
    v.add_argument("--correlation")
    v.add_argument("--promise-weight", type=int)
    v.add_argument("--one-sided", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("surj-upper", help="grid search for the surjectivity approximator")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--R", type=int, required=True)
    s.add_argument("--T", help="comma-separated thresholds (default 1..N)")
    s.add_argument("--S", help="comma-separated sample sizes (default 0..N)")
    s.set_defaults(func=cmd_surj_upper)

    t = sub.add_parser("tail-mass", help="mass of a composed witness above total weight N")
    t.add_argument("--outer", default="AND")
    t.add_argument("--R", type=int, required=True)
    t.add_argument("--inner", default="OR")
    t.add_argument("--T", type=int, required=True)
    t.add_argument("--k", type=int)
    t.add_argument("--N", type=int, required=True)
    t.add_argument("--degree", type=int, default=1, help="LP degree of the inner witness")
    t.add_argument("--threshold", default="2/3", help="outer witness correlation threshold")
    t.set_defaults(func=cmd_tail_mass)

    r = sub.add_parser("reduce", help="dummy-item reductions")
    r.add_argument("kind", choices=["dsurj", "ddist"])
    r.add_argument("--input")
    r.add_argument("--items")
    r.add_argument("--R", type=int)
    r.add_argument("--k", type=int)
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("entropy-pair", help="entropy-comparison transform of a list")
    e.add_argument("--input")
    e.add_argument("--items")
    e.add_argument("--R", type=int)
    e.add_argument("--precision", type=int, default=128, help="working precision in bits")
    e.set_defaults(func=cmd_entropy_pair)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    try:
        return args.func(args)
    except BudgetError as exc:
        sys.stderr.write(f"budget refusal: {exc}\n")
        if args.command == "adeg":
            sys.stderr.write("hint: symmetric functions can be solved on Hamming levels with --symmetric\n")
        return EXIT_BUDGET
    except (InputError, OSError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
