import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from torsion_bench import DomainError, UnsupportedInput
from torsion_bench import heat_kernel_1d as hk

LOG2 = math.log(2)


def brute_trace(lams, t):
    return sum(math.exp(-t * lam / 4) for lam in lams)


def interval_eigs(l, bc, n=4000):
    """Eigenvalues of -d^2/dx^2 on [-l, l] listed directly."""
    k = np.arange(n)
    if bc == hk.DD:
        return ((k + 1) * math.pi / (2 * l)) ** 2
    if bc == hk.NN:
        return (k * math.pi / (2 * l)) ** 2
    return ((k + 0.5) * math.pi / (2 * l)) ** 2


@pytest.mark.parametrize("bc", [hk.DD, hk.NN, hk.DN, hk.ND])
@pytest.mark.parametrize("t", [0.05, 1.0, 8.0])
def test_trace_matches_eigenvalue_sum(bc, t):
    got = hk.heat_trace(hk.IntervalSpec(0.75), bc, t)
    assert got == pytest.approx(brute_trace(interval_eigs(0.75, bc), t), rel=1e-12)


@given(st.floats(0.2, 3.0), st.floats(0.0, 0.99), st.floats(0.3, 3.0))
def test_image_and_eigen_series_agree(omega, shift, t):
    fam = hk.LatticeFamily(omega, shift, 1.0, 0.0)
    for a, b in zip(fam.all_parts(t, "eigen"), fam.all_parts(t, "image")):
        assert a == pytest.approx(b, rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("l", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_mckean_singer(l, t):
    spec = hk.IntervalSpec(l)
    assert hk.heat_trace(spec, hk.NN, t) - hk.heat_trace(spec, hk.DD, t) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bc", [hk.DD, hk.DN])
def test_t_derivative_by_finite_difference(bc):
    spec, t, h = hk.IntervalSpec(1.0), 0.7, 1e-5
    fd = (hk.heat_trace(spec, bc, t + h) - hk.heat_trace(spec, bc, t - h)) / (2 * h)
    assert hk.heat_trace_t_derivative(spec, bc, t) == pytest.approx(fd, rel=1e-8)


def test_dd_integrand_vanishes_at_small_t():
    assert abs(hk.corrected_integrand(hk.DD, 1e-8)) < 1e-7
    assert abs(hk.corrected_integrand(hk.DN, 1e-8)) < 1e-7


def test_corrected_integrand_rejects_nn():
    with pytest.raises(UnsupportedInput):
        hk.corrected_integrand(hk.NN, 1.0)


def test_lemma22_raw_single_component():
    dd, dn = hk.lemma22_by_quadrature()
    assert dd == pytest.approx(-2 * LOG2, abs=1e-8)
    assert dn == pytest.approx(-LOG2, abs=1e-8)


@pytest.mark.parametrize("bc,value", [(hk.DN, 0.0), (hk.DD, -0.5)])
@pytest.mark.parametrize("l", [0.5, 1.0, 3.0])
def test_zeta_from_trace_matches_closed_form(bc, value, l):
    spec = hk.IntervalSpec(l)
    got, ref = hk.zeta_from_trace(spec, bc), hk.closed_form_zeta(spec, bc)
    assert got.value_at_0 == pytest.approx(value, abs=1e-12)
    assert got.deriv_at_0 == pytest.approx(ref.deriv_at_0, abs=1e-10)


def test_positive_tail_against_quadrature():
    fam = hk.interval_family(hk.IntervalSpec(1.0), hk.DN)
    T = 5.0
    ref = quad(lambda t: sum((1 - t * lam / 2) * math.exp(-t * lam / 4) for lam in interval_eigs(1.0, hk.DN, 40)) / t,
               T, np.inf, epsabs=1e-13)[0]
    assert hk.positive_tail([(1.0, fam)], T) == pytest.approx(ref, abs=1e-11)


def test_circle_family_spectrum():
    fam = hk.circle_family(2.0, math.pi)
    eig = fam.eigenvalues_below(200.0)
    ref = sorted({(math.pi * (k + 0.5)) ** 2 for k in range(-10, 10)})
    assert [lam for lam, _ in eig] == pytest.approx([x for x in ref if x <= 200.0])
    assert all(m == 2 for _, m in eig)


def test_domain_errors():
    with pytest.raises(DomainError):
        hk.IntervalSpec(0.0)
    with pytest.raises(DomainError):
        hk.heat_trace(hk.IntervalSpec(1.0), hk.DD, -1.0)
    with pytest.raises(DomainError):
        hk.circle_family(-1.0)
