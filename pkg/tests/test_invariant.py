import dataclasses
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gkzhorn.invariant import (clearing_monomial, delta, delta_bar, from_display, pi_presentation,
                               psi, residues, shorn_decomposition)
from gkzhorn.lattice import matvec
from gkzhorn.systems import gkz_system, lattice_basis_system
from gkzhorn.weyl import WeylError, WeylOp, WeylRing, a_degree, euler_operators, theta_form

from conftest import TWISTED_CUBIC, random_invariant_op, random_op, small_fraction

KAPPA = (0, 0, Fraction(1, 2), Fraction(1, 3))
seeds = st.integers(0, 2**32)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_delta_is_multiplicative(cubic_ctx, seed):
    rng = random.Random(seed)
    p, q = random_invariant_op(rng, cubic_ctx), random_invariant_op(rng, cubic_ctx)
    assert delta(cubic_ctx, KAPPA, p * q) == delta(cubic_ctx, KAPPA, p) * delta(cubic_ctx, KAPPA, q)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_delta_kills_euler_operators(gauss_ctx, seed):
    rng = random.Random(seed)
    kappa = tuple(small_fraction(rng) for _ in range(gauss_ctx.n))
    beta = matvec(gauss_ctx.A, kappa)
    for E in euler_operators(gauss_ctx.A, beta, WeylRing(4, False, "x")):
        assert not delta(gauss_ctx, kappa, E)
        # and the left ideal they generate
        p = random_invariant_op(rng, gauss_ctx)
        assert not delta(gauss_ctx, kappa, p * E)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_delta_after_psi_is_identity(cubic_ctx, seed):
    rng = random.Random(seed)
    q = random_op(rng, WeylRing(2, True, "z"), laurent_neg=True)
    assert delta(cubic_ctx, KAPPA, psi(cubic_ctx, KAPPA, q)) == q


def test_delta_rejects_noninvariant(cubic_ctx):
    with pytest.raises(WeylError):
        delta(cubic_ctx, KAPPA, WeylOp.var(WeylRing(4, False, "x"), 0))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_delta_bar_matches_delta_at_index_one(cubic_ctx, seed):
    rng = random.Random(seed)
    p = random_invariant_op(rng, cubic_ctx)
    expected = [(tuple(Fraction(x) for x in a), g) for a, g in theta_form(delta(cubic_ctx, KAPPA, p)).items()]
    assert delta_bar(cubic_ctx, KAPPA, p).display() == sorted(expected)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_delta_bar_module_structure(ex55_ctx, seed):
    # delta_bar(pq) = delta(p) . delta_bar(q) for p with exponents in ZB
    rng = random.Random(seed)
    full = dataclasses.replace(ex55_ctx, B=ex55_ctx.C)
    p, q = random_invariant_op(rng, ex55_ctx), random_invariant_op(rng, full)
    lhs = delta_bar(ex55_ctx, KAPPA, p * q)
    img = delta_bar(ex55_ctx, KAPPA, q)
    assert lhs == img.left_mul(delta(ex55_ctx, KAPPA, p))
    assert from_display(ex55_ctx, img.display()) == img


def test_monomial_action_composes(ex55_ctx):
    rng = random.Random(5)
    full = dataclasses.replace(ex55_ctx, B=ex55_ctx.C)
    e = delta_bar(ex55_ctx, KAPPA, random_invariant_op(rng, full))
    r, s = (Fraction(1, 3), Fraction(2, 3)), (Fraction(-2, 3), Fraction(-1, 3))
    both = tuple(a + b for a, b in zip(r, s))
    assert e.left_mul_monomial(s).left_mul_monomial(r) == e.left_mul_monomial(both)


def test_residue_classes(ex55_ctx):
    res = residues(ex55_ctx)
    assert len(res.reps) == ex55_ctx.latticeIndex == 3
    for k in res.reps:
        assert all(0 <= x < 1 for x in res.frac_rep(k))


def test_shorn_summands_are_horn_systems(ex55_ctx):
    summands = shorn_decomposition(ex55_ctx, KAPPA)
    assert len(summands) == 3
    c2 = tuple(row[1] for row in ex55_ctx.C)
    assert [s.shift for s in summands] == [tuple(j * x for x in c2) for j in range(3)]
    for s in summands:
        assert s.row_ops == s.horn.generators


def test_clearing_monomial_makes_invariant(cubic_ctx):
    for g in gkz_system(TWISTED_CUBIC, (1, 2)).generators:
        mu = clearing_monomial(g)
        R = WeylRing(4, True, "x")
        lift = WeylOp.monomial(R, mu, [0] * 4) * WeylOp(R, g.items())
        assert a_degree(lift, TWISTED_CUBIC) == (0, 0)


def test_presentation_rows_for_lattice_system(cubic_ctx):
    pres = pi_presentation(lattice_basis_system(cubic_ctx, KAPPA), cubic_ctx, KAPPA)
    assert len(pres.rows) == 2 and not pres.dropped
    assert pres.summandCount == 1
    assert len(pres.module_rows()) == 2


def test_presentation_rejects_wrong_kappa(cubic_ctx):
    s = gkz_system(TWISTED_CUBIC, (1, 2), ctx=cubic_ctx)
    with pytest.raises(ValueError, match="kappa"):
        pi_presentation(s, cubic_ctx, (0, 0, 0, 0))
