import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardyops.criteria import (
    BOUNDED,
    COMPACT,
    HS,
    INCONCLUSIVE,
    NOT_HS,
    UNBOUNDED,
    boundedness_diagnostic,
    chain_check,
    compactness_diagnostic,
    derivative_growth_check,
    hs_bracket,
    hs_criterion,
    kappa,
    leibniz_alphas,
    lemma31_bounds,
    lemma32_identity,
    trend,
    univalent_ratio_diagnostic,
)
from hardyops.errors import NotUnivalent, PreconditionFailure
from hardyops.maps import Affine, Contact, Mobius, Monomial, identity
from hardyops.operators import OperatorHandle, hs_sum_adaptive
from hardyops.series import PowerSeries


def op(m, n=1):
    return OperatorHandle(m, n)


# trend rules -------------------------------------------------------------------


def test_trend_rules():
    assert trend([1, 2, 4, 8, 16])["unbounded"]
    assert trend([1, 1, 1, 1])["bounded"] and not trend([1, 1, 1, 1])["compact"]
    assert trend([1, 0.5, 0.25, 1e-4, 1e-8])["compact"]
    assert trend([3, 0, 0, 0, 0])["compact"]


# diagnostics ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_is_unbounded_and_not_hs(n):
    assert boundedness_diagnostic(op(identity(), n)).verdict == UNBOUNDED
    assert compactness_diagnostic(op(identity(), n)).verdict == UNBOUNDED
    assert hs_criterion(op(identity(), n)).verdict == NOT_HS


def test_identity_statistic_closed_form():
    d = boundedness_diagnostic(op(identity(), 1))
    for r, q in d.evidence:
        assert q == pytest.approx(math.log(1 / r) ** -2, rel=1e-9)


@pytest.mark.parametrize("a", [0.5, 0.9, -0.3j])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_contractive_affine_is_compact_and_hs(a, n):
    o = op(Affine(a, 0), n)
    assert boundedness_diagnostic(o).verdict == BOUNDED
    assert compactness_diagnostic(o).verdict == COMPACT
    assert hs_criterion(o).verdict == HS


@pytest.mark.parametrize("lam", [0.5, 0.3, 0.2 - 0.6j])
@pytest.mark.parametrize("n", [1, 2])
def test_automorphisms_are_unbounded(lam, n):
    assert boundedness_diagnostic(op(Mobius(lam), n)).verdict == UNBOUNDED
    assert compactness_diagnostic(op(Mobius(lam), n)).verdict == UNBOUNDED


def test_mobius_hs_divergent():
    assert hs_criterion(op(Mobius(0.3))).verdict == NOT_HS


def test_hs_limit_half_z():
    res = hs_criterion(op(Affine(0.5, 0)))
    assert res.limit_value == pytest.approx(64 / 27, rel=1e-6)


def test_univalent_ratio_verdicts():
    assert univalent_ratio_diagnostic(op(Affine(0.5, 0))).verdict == COMPACT
    assert univalent_ratio_diagnostic(op(Affine(0.5, 0.5))).verdict == UNBOUNDED
    assert univalent_ratio_diagnostic(op(Mobius(0.4))).verdict == UNBOUNDED


def test_univalent_ratio_real_axis_growth():
    d = univalent_ratio_diagnostic(op(Affine(0.5, 0.5), 1))
    r, R = d.evidence[-1]
    assert R == pytest.approx(8 / (1 - r) ** 2, rel=1e-6)


def test_univalent_ratio_requires_univalent_map():
    with pytest.raises(NotUnivalent):
        univalent_ratio_diagnostic(op(Monomial(2)))


def test_threshold_contact_is_recorded():
    o = op(Contact(1 / 3), 1)
    d = boundedness_diagnostic(o)
    assert d.verdict in (BOUNDED, INCONCLUSIVE)
    assert len(d.evidence) == 14
    ratio = univalent_ratio_diagnostic(o)
    assert all(v == pytest.approx(1, rel=1e-6) or v <= 1 + 1e-6 for _, v in ratio.evidence)


def test_diagnostic_evidence_is_reproducible():
    a = boundedness_diagnostic(op(Mobius(0.3), 2))
    b = boundedness_diagnostic(op(Mobius(0.3), 2))
    assert a == b and a.parameters == (Mobius(0.3).label, 2)


def test_hs_consistency_implies_convergent_sum():
    assert hs_criterion(op(Affine(0.7, 0.1))).verdict == HS
    assert hs_sum_adaptive(op(Affine(0.7, 0.1))).converged


# lemmas -------------------------------------------------------------------------------


def test_lemma31_spot_value():
    b = lemma31_bounds((1, 2), 1, 0.25)
    assert b.value == pytest.approx(80 / 27)
    assert b.lower == pytest.approx(64 / 27) and b.upper == pytest.approx(192 / 27)
    assert b.beta == pytest.approx(1)


def test_lemma31_at_zero():
    b = lemma31_bounds((2.5, 1, 7), 2, 0.0)
    assert b.value == 2.5 and b.lower <= 2.5 <= b.upper


def test_lemma31_flat_weights():
    b = lemma31_bounds((1, 1, 1), 2, 0.5)
    # min over t of (1-t)^2 + t(1-t) + t^2 = 1 - t + t^2 is 3/4 at t = 1/2
    assert b.beta == pytest.approx(0.75, abs=1e-9)
    assert b.lower <= b.value <= b.upper


def test_lemma31_rejects_boundary():
    with pytest.raises(PreconditionFailure):
        lemma31_bounds((1, 2), 1, 1.0)


@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.floats(1e-3, 1e3), min_size=n + 1, max_size=n + 1),
            st.floats(0, 0.999),
        )
    )
)
def test_lemma31_bracketing_property(args):
    n, alphas, x = args
    b = lemma31_bounds(alphas, n, x)
    assert b.beta > 0
    assert b.lower <= b.value * (1 + 1e-12) and b.value <= b.upper * (1 + 1e-12)


def test_leibniz_alphas():
    assert leibniz_alphas(1) == (1.0, 2.0)
    assert leibniz_alphas(2) == (4.0, 24.0, 24.0)


def test_lemma32_spot_value():
    r = lemma32_identity(1, 0.25)
    assert r.lhs_partial == pytest.approx(80 / 27) and r.rhs_closed == pytest.approx(80 / 27)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lemma32_at_zero(n):
    r = lemma32_identity(n, 0.0)
    assert r.lhs_partial == r.rhs_closed == math.factorial(n) ** 2


def test_lemma32_against_high_precision_sum():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    exact = mpmath.nsum(lambda j: (mpmath.ff(j + 2, 2)) ** 2 * mpmath.mpf(0.5) ** j, [0, mpmath.inf])
    r = lemma32_identity(2, 0.5)
    assert r.residual < 1e-8
    assert abs(r.rhs_closed - float(exact)) < 1e-12 * float(exact)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("x", [0, 0.1, 0.25, 0.5, 0.9])
def test_lemma32_residual_grid(n, x):
    assert lemma32_identity(n, x).residual < 1e-7


def test_lemma32_cap_reports_nonconvergence():
    with pytest.raises(PreconditionFailure):
        lemma32_identity(1, 0.9999, max_terms=100)


def test_hs_bracket_half_z():
    b = hs_bracket(op(Affine(0.5, 0)))
    assert b.lower == pytest.approx(64 / 27) and b.upper == pytest.approx(192 / 27)
    assert b.lower <= 80 / 27 <= b.upper


@pytest.mark.parametrize("phi", [Affine(0.4, 0.3), Affine(0.3j, -0.2), Monomial(2, 0.7)], ids=repr)
@pytest.mark.parametrize("n", [1, 2])
def test_hs_sum_within_bracket(phi, n):
    from hardyops.series import hinf_estimate
    from hardyops.maps import to_series

    o = op(phi, n)
    total = hs_sum_adaptive(o).value
    b = hs_bracket(o)
    assert b.lower * (1 - 1e-6) <= total <= b.upper * (1 + 1e-6)
    x = hinf_estimate(to_series(phi, 64)) ** 2
    assert total <= lemma31_bounds(leibniz_alphas(n), n, x).value * (1 + 1e-6)


def test_hs_bracket_requires_finite_integral():
    with pytest.raises(PreconditionFailure):
        hs_bracket(op(identity()))


def test_kappa_values():
    assert kappa(1) == pytest.approx(4)
    assert kappa(2) == pytest.approx(36)
    for n in (1, 2, 3):
        xs = np.linspace(n + 1, 200, 500)
        g = [np.prod([(x - i) for i in range(n)]) ** 2 / (x - n) ** (2 * n) for x in xs]
        assert kappa(n) >= max(g) * (1 - 1e-12)


# chain ------------------------------------------------------------------------------------


def test_chain_outside_image():
    rep = chain_check(op(Affine(0.5, 0)), 0.9)
    assert rep.holds and rep.C == 0 and all(map(math.isfinite, (rep.A, rep.B)))


@pytest.mark.parametrize("phi", [Mobius(0.2), Monomial(2)], ids=repr)
def test_chain_inside_image(phi):
    rep = chain_check(op(phi), 0.9)
    assert rep.holds and rep.C > 0
    assert rep.A - rep.B == pytest.approx(rep.gap_exact, abs=1e-8)


def test_chain_admissibility():
    with pytest.raises(PreconditionFailure):
        chain_check(op(Mobius(0.2)), 0.3)


# pointwise derivative bound -----------------------------------------------------------------


def test_growth_constant():
    rep = derivative_growth_check(PowerSeries([1.0]), 1, 0.4j)
    assert rep.value == 0 and rep.holds


def test_growth_spot_value():
    rep = derivative_growth_check(PowerSeries.monomial(5), 2, 0.5)
    assert rep.value == pytest.approx(2.5) and rep.bound == pytest.approx(16)


def test_growth_random():
    rng = np.random.default_rng(9)
    for _ in range(100):
        f = PowerSeries(rng.normal(size=12) + 1j * rng.normal(size=12))
        for z in (0, 0.5, -0.9j, 0.3 + 0.6j):
            for n in (1, 2, 3):
                assert derivative_growth_check(f, n, z).holds
