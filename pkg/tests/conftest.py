import random
import sys
from fractions import Fraction

import pytest

from gkzhorn.lattice import build_gale_context
from gkzhorn.weyl import WeylOp, WeylRing

SEED = 20240

TWISTED_CUBIC = ((1, 1, 1, 1), (0, 1, 2, 3))
GAUSS_A = ((1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 0, 1))
GAUSS_B = ((1,), (1,), (-1,), (-1,))


def pytest_report_header(config):
    return f"random seed: {SEED}"


def small_fraction(rng, height=5):
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_op(rng, ring, terms=3, degree=2, laurent_neg=False):
    out = {}
    lo = -degree if laurent_neg else 0
    for _ in range(terms):
        a = tuple(rng.randint(lo, degree) for _ in range(ring.n))
        b = tuple(rng.randint(0, degree) for _ in range(ring.n))
        out[(a, b)] = small_fraction(rng)
    return WeylOp(ring, out)


def random_invariant_op(rng, ctx, terms=2, extra=1):
    """Random x-side operator of A-degree zero: terms x^a d^b with a - b = +-(column of B) or 0."""
    R = WeylRing(ctx.n, False, "x")
    out = WeylOp.zero(R)
    for _ in range(terms):
        v = [0] * ctx.m
        v[rng.randrange(ctx.m)] = rng.choice((-1, 0, 1))
        w = [sum(ctx.B[i][k] * v[k] for k in range(ctx.m)) for i in range(ctx.n)]
        c = [rng.randint(0, extra) for _ in range(ctx.n)]
        a = [max(x, 0) + ci for x, ci in zip(w, c)]
        b = [max(-x, 0) + ci for x, ci in zip(w, c)]
        out = out + WeylOp.monomial(R, a, b, small_fraction(rng))
    return out


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def cubic_ctx():
    return build_gale_context(TWISTED_CUBIC)


@pytest.fixture(scope="session")
def gauss_ctx():
    return build_gale_context(GAUSS_A, GAUSS_B)


@pytest.fixture(scope="session")
def ex55_ctx():
    return build_gale_context(TWISTED_CUBIC, ((-1, 2), (0, -3), (3, 0), (-2, 1)),
                              ((1, 1, 1, 1), (0, 1, 2, 3), (1, 0, 0, 0), (0, 1, 0, 0)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
