"""Riemann and half-shifted zeta values, and the interval zeta functions built from them.

Series are summed directly up to a cutoff and closed off with an
Euler-Maclaurin tail.  Values and derivatives at ``s = 0`` are not obtained
by continuation: they are the classical constants, and the interval zeta
functions are differentiated at 0 by the product rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

LOG2 = math.log(2.0)

# B_2, B_4, B_6, B_8, B_10
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0)

EM_CUTOFF = 10_000
EM_TERMS = 4


@dataclass(frozen=True)
class ZetaValue:
    """Value and first derivative of a zeta function at ``s = 0``."""

    value_at_0: float
    deriv_at_0: float
    error_bound: float = 0.0


def _rising(s: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= s + i
    return out


def _hurwitz_series(s: float, a: float, cutoff: int = EM_CUTOFF, terms: int = EM_TERMS):
    """Return ``(sum_{k>=0} (k+a)^{-s}, error_bound)`` for real ``s > 1``."""
    k = np.arange(cutoff, dtype=float) + a
    head = float(np.sum((k ** -s)[::-1]))
    x = cutoff + a
    tail = x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** -s
    for j in range(1, terms + 1):
        tail += (_BERNOULLI[j - 1] / math.factorial(2 * j)) * _rising(s, 2 * j - 1) * x ** (-s - 2 * j + 1)
    j = terms + 1
    bound = abs(_BERNOULLI[j - 1] / math.factorial(2 * j) * _rising(s, 2 * j - 1) * x ** (-s - 2 * j + 1))
    # floating-point summation of the head
    bound += 4.0 * np.finfo(float).eps * abs(head + tail)
    return head + tail, bound


def riemann_zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``."""
    if not s > 1.0:
        raise DomainError(f"riemann_zeta needs s > 1, got {s!r}")
    return _hurwitz_series(s, 1.0)[0]


def shifted_zeta(s: float) -> float:
    """``sum_{k>=1} (k - 1/2)^{-s}`` for real ``s > 1``."""
    if not s > 1.0:
        raise DomainError(f"shifted_zeta needs s > 1, got {s!r}")
    return _hurwitz_series(s, 0.5)[0]


def riemann_zeta_at_0() -> ZetaValue:
    return ZetaValue(-0.5, -0.5 * math.log(2.0 * math.pi), 0.0)


def shifted_zeta_at_0() -> ZetaValue:
    return ZetaValue(0.0, -0.5 * LOG2, 0.0)


def scaled_zeta_at_0(prefactor: float, base: float, inner: ZetaValue) -> ZetaValue:
    """Value and derivative at 0 of ``prefactor * base**(2s) * inner(2s)``.

    Product rule: d/ds at 0 gives ``2 log(base) A z(0) + 2 A z'(0)``.
    """
    value = prefactor * inner.value_at_0
    deriv = 2.0 * math.log(base) * prefactor * inner.value_at_0 + 2.0 * prefactor * inner.deriv_at_0
    return ZetaValue(value, deriv, prefactor * inner.error_bound)


def _closed(s: float, inner, at_0: ZetaValue) -> float:
    if s == 0.0:
        return 2.0 * at_0.value_at_0
    if not 2.0 * s > 1.0:
        raise DomainError(f"closed form is evaluated by series only for s > 1/2 (or s = 0), got {s!r}")
    return 2.0 * (2.0 / math.pi) ** (2.0 * s) * inner(2.0 * s)


def zeta_DD_closed(s: float) -> float:
    """``2 (2/pi)^{2s} zeta(2s)``."""
    return _closed(s, riemann_zeta, riemann_zeta_at_0())


def zeta_DN_closed(s: float) -> float:
    """``2 (2/pi)^{2s} zeta~(2s)``."""
    return _closed(s, shifted_zeta, shifted_zeta_at_0())


def zeta_DD_closed_at_0() -> ZetaValue:
    return scaled_zeta_at_0(2.0, 2.0 / math.pi, riemann_zeta_at_0())


def zeta_DN_closed_at_0() -> ZetaValue:
    return scaled_zeta_at_0(2.0, 2.0 / math.pi, shifted_zeta_at_0())
