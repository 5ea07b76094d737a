import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from torsion_bench import DomainError
from torsion_bench import special_zeta as sz

mp.mp.dps = 30


@pytest.mark.parametrize("s", [1.5, 2.0, 3.25, 7.0])
def test_riemann_matches_mpmath(s):
    assert sz.riemann_zeta(s) == pytest.approx(float(mp.zeta(s)), rel=1e-13)


@pytest.mark.parametrize("s", [1.5, 2.0, 4.0])
def test_shifted_matches_hurwitz(s):
    assert sz.shifted_zeta(s) == pytest.approx(float(mp.zeta(s, 0.5)), rel=1e-13)


def test_values_at_zero_match_mpmath():
    z = sz.riemann_zeta_at_0()
    assert z.value_at_0 == float(mp.zeta(0))
    assert z.deriv_at_0 == pytest.approx(float(mp.zeta(0, derivative=1)), abs=1e-15)
    zt = sz.shifted_zeta_at_0()
    assert zt.value_at_0 == pytest.approx(float(mp.zeta(0, 0.5)), abs=1e-15)
    assert zt.deriv_at_0 == pytest.approx(float(mp.zeta(0, 0.5, derivative=1)), abs=1e-15)


def test_shifted_pi_squared_over_two():
    assert sz.shifted_zeta(2.0) == pytest.approx(math.pi ** 2 / 2, abs=1e-10)


@given(st.floats(1.05, 12.0))
def test_shifted_functional_identity(s):
    assert sz.shifted_zeta(s) == pytest.approx((2 ** s - 1) * sz.riemann_zeta(s), rel=1e-12)


@pytest.mark.parametrize("fn", [sz.riemann_zeta, sz.shifted_zeta])
@pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
def test_series_domain(fn, s):
    with pytest.raises(DomainError):
        fn(s)


def _closed_oracle(inner_a, s):
    return 2 * (2 / mp.pi) ** (2 * s) * mp.zeta(2 * s, inner_a)


@pytest.mark.parametrize("s", [0.75, 1.0, 2.5])
def test_closed_forms_against_mpmath(s):
    assert sz.zeta_DD_closed(s) == pytest.approx(float(_closed_oracle(1, s)), rel=1e-12)
    assert sz.zeta_DN_closed(s) == pytest.approx(float(_closed_oracle(0.5, s)), rel=1e-12)


def test_closed_forms_at_zero():
    dd, dn = sz.zeta_DD_closed_at_0(), sz.zeta_DN_closed_at_0()
    assert dd.deriv_at_0 == pytest.approx(-4 * math.log(2), abs=1e-12)
    assert dn.deriv_at_0 == pytest.approx(-2 * math.log(2), abs=1e-12)
    assert dd.value_at_0 == -1.0 and dn.value_at_0 == 0.0
    # the derivative agrees with numerical differentiation of the mpmath closed form
    assert dd.deriv_at_0 == pytest.approx(float(mp.diff(lambda s: _closed_oracle(1, s), 0)), abs=1e-12)
    assert dn.deriv_at_0 == pytest.approx(float(mp.diff(lambda s: _closed_oracle(0.5, s), 0)), abs=1e-12)


@given(st.floats(0.1, 5.0), st.floats(0.2, 4.0), st.sampled_from([1.0, 0.5]))
def test_scaled_product_rule(pref, base, a):
    inner = sz.riemann_zeta_at_0() if a == 1.0 else sz.shifted_zeta_at_0()
    z = sz.scaled_zeta_at_0(pref, base, inner)
    f = lambda s: pref * mp.mpf(base) ** (2 * s) * mp.zeta(2 * s, a)
    assert z.value_at_0 == pytest.approx(float(f(0)), abs=1e-13)
    assert z.deriv_at_0 == pytest.approx(float(mp.diff(f, 0)), abs=1e-12)
