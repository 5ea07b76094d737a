"""Quadrature of Mellin-type integrals ``int_0^inf g(t) dt/t``.

The integral is taken in ``u = log t`` on ``[T_MIN, T_MAX]`` split at ``t = 1``;
the pieces beyond are supplied by the caller in closed form.
"""
from __future__ import annotations

import math
import warnings

from scipy import integrate
from scipy.special import exp1

from .errors import NumericalFailure

T_MIN = 1e-8
T_MAX = 200.0
PANEL_TOL = 1e-9
ENDPOINT_TOL = 1e-6


def integrate_dt_over_t(g, a: float, b: float, tol: float = PANEL_TOL) -> float:
    """``int_a^b g(t) dt/t`` by adaptive Gauss-Kronrod in ``log t``."""

    def h(u):
        return g(math.exp(u))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, err, info = integrate.quad(
            h, math.log(a), math.log(b), epsabs=tol * 1e-2, epsrel=1e-12, limit=400, full_output=True
        )[:3]
    if err > tol:
        raise NumericalFailure(
            f"quadrature on [{a:g}, {b:g}] did not reach {tol:g} (estimated error {err:.3g})", partial=val
        )
    return val


def mellin_at_zero(g, small_tail: float = 0.0, large_tail: float = 0.0, tol: float = PANEL_TOL,
                   t_min: float = T_MIN, t_max: float = T_MAX, check_endpoints: bool = True) -> float:
    """``int_0^inf g dt/t`` given closed-form tails below ``t_min`` and above ``t_max``."""
    if check_endpoints:
        lo, hi = g(t_min), g(t_max)
        if abs(lo) > ENDPOINT_TOL or abs(hi) > ENDPOINT_TOL:
            raise NumericalFailure(
                f"integrand does not vanish at the ends: g({t_min:g}) = {lo:.6g}, g({t_max:g}) = {hi:.6g}",
                partial=(lo, hi),
            )
    return (
        small_tail
        + integrate_dt_over_t(g, t_min, 1.0, tol)
        + integrate_dt_over_t(g, 1.0, t_max, tol)
        + large_tail
    )


def counterterm_small_tail(t0: float) -> float:
    """``int_0^{t0} (f'(i sqrt(t)/2) - 1) dt/t`` where ``f'(i sqrt(t)/2) = (1 - t/2) e^{-t/4}``.

    The integrand is analytic near 0 (``-3/4 + 5t/32 - ...``); a short series is exact to
    rounding for ``t0 <= 1e-2``.
    """
    # (1 - t/2) e^{-t/4} - 1 = sum_{n>=1} c_n t^n
    exp_coeffs = [(-0.25) ** n / math.factorial(n) for n in range(12)]
    total = 0.0
    for n in range(1, 11):
        total += (exp_coeffs[n] - 0.5 * exp_coeffs[n - 1]) * t0 ** n / n
    return total


def counterterm_large_tail(T: float) -> float:
    """``int_T^inf f'(i sqrt(t)/2) dt/t = E1(T/4) - 2 e^{-T/4}``."""
    return float(exp1(T / 4.0) - 2.0 * math.exp(-T / 4.0))
