import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqcknap.errors import ValidityRangeError
from aqcknap.phasetrans import (
    LN2,
    PHASE_HEADER,
    alpha_for_kappa,
    constrained_closed,
    constrained_quad,
    derivative_relation_check,
    kappa_closed,
    near_one_expansion,
    near_zero_asymptote,
    near_zero_relation,
    special_point_check,
    tabulate,
    unconstrained_closed,
    unconstrained_quad,
    x_closed,
    x_closed_via_reflection,
    x_for_kappa,
)

# regenerated by adaptive quadrature of the defining integrals
X1 = 0.1705573495024382
K1 = 0.944065567711715

alphas = st.one_of(st.floats(1e-3, 30), st.floats(-30, -1e-3))


def grid():
    pos = np.logspace(-3, math.log10(30), 40)
    return np.concatenate([-pos[::-1], pos])


def test_reference_values_at_one():
    q = unconstrained_quad(1.0)
    assert q.x == pytest.approx(X1, abs=1e-13)
    assert q.kappa_c == pytest.approx(K1, abs=1e-13)
    c = unconstrained_closed(1.0)
    assert c.x == pytest.approx(X1, abs=1e-12)
    assert c.kappa_c == pytest.approx(K1, abs=1e-12)


def test_alpha_zero():
    q = unconstrained_quad(0.0)
    assert q.x == pytest.approx(0.25, abs=1e-15)
    assert q.kappa_c == pytest.approx(1.0, abs=1e-15)
    assert x_closed(1e-6) == pytest.approx(0.25, abs=1e-6)
    assert kappa_closed(1e-6) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("a", grid())
def test_closed_matches_quadrature(a):
    c, q = unconstrained_closed(a), unconstrained_quad(a)
    assert abs(c.x - q.x) < 1e-9
    assert abs(c.kappa_c - q.kappa_c) < 1e-9


@given(alphas)
def test_reflection_route_agrees(a):
    assert x_closed_via_reflection(a) == pytest.approx(x_closed(a), abs=1e-9)


@given(alphas)
def test_symmetries(a):
    assert abs(x_closed(a) + x_closed(-a) - 0.5) < 1e-10
    assert abs(kappa_closed(a) - kappa_closed(-a)) < 1e-10


@given(st.floats(-20, 20), st.floats(0.01, 1))
def test_x_decreasing(a, da):
    assert unconstrained_quad(a + da).x < unconstrained_quad(a).x


def test_small_alpha_series_continuous():
    for a in (9.99e-4, -9.99e-4):
        near = unconstrained_quad(a)
        assert x_closed(a) == pytest.approx(near.x, abs=1e-12)
        assert kappa_closed(a) == pytest.approx(near.kappa_c, abs=1e-12)


def test_near_one_expansion():
    lo, hi = near_one_expansion(1.0)
    assert lo == hi == 0.25
    lo, hi = near_one_expansion(0.999)
    assert 0.25 - lo == pytest.approx(hi - 0.25)
    for k in (0.99, 0.995, 0.999):
        lo, hi = near_one_expansion(k)
        assert abs(hi - x_for_kappa(k, -1)) < 5e-4
        assert abs(lo - x_for_kappa(k, 1)) < 5e-4
    with pytest.raises(ValidityRangeError):
        near_one_expansion(0.8)


def test_near_zero_asymptote_matches_inversion():
    for k in (1e-3, 1e-2, 2e-2):
        exact = x_for_kappa(k, 1)
        assert near_zero_asymptote(k) == pytest.approx(exact, rel=1e-3)


def test_near_zero_relation_constant_offset():
    # the 12/49 prefactor sits a fixed factor away from the true asymptote
    ratio = near_zero_relation(0.01) / near_zero_asymptote(0.01)
    assert ratio == pytest.approx(12 / 49 * math.pi**2 / 3, rel=1e-12)
    with pytest.raises(ValidityRangeError):
        near_zero_relation(0.1)


def test_alpha_for_kappa_roundtrip():
    for k in (0.1, 0.5, 0.9):
        for sign in (1, -1):
            a = alpha_for_kappa(k, sign)
            assert math.copysign(1, a) == sign
            assert kappa_closed(a) == pytest.approx(k, abs=1e-12)


@pytest.mark.parametrize("a", [-10, -3, -1, -0.5, 0.5, 1, 3, 10])
def test_derivative_relation(a):
    r = derivative_relation_check(a)
    assert r["residual"] < 1e-8
    assert r["slope"] == pytest.approx(LN2 / a, rel=1e-6)


def test_derivative_relation_refuses_small_alpha():
    with pytest.raises(ValidityRangeError):
        derivative_relation_check(1e-3)


def test_special_points_reported():
    rows = {r["name"]: r for r in special_point_check()}
    assert set(rows) == {"alpha_minus", "alpha_plus", "li2(-1/phi)", "li2(-phi)"}
    # the classical golden-ratio values hold for the evaluator itself
    assert abs(rows["li2(-1/phi)"]["difference"]) < 1e-14
    assert abs(rows["li2(-phi)"]["difference"]) < 1e-14


def test_constrained_reference_values():
    q = constrained_quad(1.0, 1.0)
    assert (q.rho, q.x, q.kappa_c) == pytest.approx((0.6201145069582775, 0.29067185646071575, K1), abs=1e-12)
    assert constrained_quad(0.0, 0.0).rho == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("a", [-3.0, -1.0, 0.0, 1.0, 3.0])
@pytest.mark.parametrize("m", [-3.0, -1.0, 0.0, 1.0, 3.0])
def test_constrained_symmetry(a, m):
    p, q = constrained_quad(a, m), constrained_quad(-a, -m)
    assert abs(p.rho + q.rho - 1) < 1e-10
    assert abs(p.x + q.x - 0.5) < 1e-10
    assert abs(p.kappa_c - q.kappa_c) < 1e-10


@given(st.floats(-20, 20))
def test_mu_zero_reduces(a):
    c, u = constrained_quad(a, 0.0), unconstrained_quad(a)
    assert c.x == pytest.approx(u.x, abs=1e-10)
    assert c.kappa_c == pytest.approx(u.kappa_c, abs=1e-10)


@given(st.one_of(st.floats(1e-2, 30), st.floats(-30, -1e-2)), st.floats(-5, 5))
def test_derived_closed_matches_quadrature(a, m):
    assert constrained_closed(a, m, "derived").deviation < 1e-9


@given(st.one_of(st.floats(1e-3, 1e-2), st.floats(-1e-2, -1e-3)), st.floats(-5, 5))
def test_derived_closed_small_alpha_cancellation(a, m):
    # the 1/alpha^2 terms cancel; rounding grows like eps / alpha^2
    assert constrained_closed(a, m, "derived").deviation < 1e-14 / a**2


def test_paper_fidelity_reports_deviation():
    c = constrained_closed(1.0, 1.0, "paper")
    assert c.deviation > 1e-3
    assert c.x == pytest.approx(constrained_quad(1.0, 1.0).x, abs=1e-12)
    with pytest.raises(ValidityRangeError):
        constrained_closed(1e-4, 1.0)
    with pytest.raises(ValueError):
        constrained_closed(1.0, 1.0, "other")


def test_tabulate_rows():
    rows = tabulate([-1.0, 0.0, 1.0])
    assert [r["alpha"] for r in rows] == [-1.0, 0.0, 1.0]
    assert all(set(PHASE_HEADER) <= set(r) for r in rows)
    assert max(r["deviation"] for r in rows) < 1e-9
    rows = tabulate([0.0, 2.0], mus=[-1.0, 1.0])
    assert len(rows) == 4
    assert math.isnan(rows[0]["x_closed"])
    assert rows[1]["deviation"] < 1e-9
