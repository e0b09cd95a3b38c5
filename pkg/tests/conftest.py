import random
import re
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from adeg.duals import DualWitness
from adeg.polynomials import MultilinearPoly

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_witness(rng: random.Random, n: int, min_degree: int = 0, spread: int = 5) -> DualWitness:
    """Unit-norm witness on ``n`` bits whose characters below ``min_degree`` vanish."""
    while True:
        vals = [Fraction(rng.randint(-spread, spread)) for _ in range(1 << n)]
        p = MultilinearPoly.from_cube_values(n, vals)
        p = MultilinearPoly(n, {m: c for m, c in p.coeffs.items() if m.bit_count() >= min_degree})
        cube = p.cube_values()
        norm = sum(abs(v) for v in cube)
        if norm:
            return DualWitness(n, {x: v / norm for x, v in enumerate(cube)})


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, after the regular report."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            match = re.search(r"test_acceptance\.py::test_criterion_\[(\d+)\]", rep.nodeid)
            if getattr(rep, "when", "call") != "call" or not match:
                continue
            number = int(match.group(1))
            detail = dict(rep.user_properties).get("detail", "")
            lines.append((number, "PASS" if outcome == "passed" else "FAIL", detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
