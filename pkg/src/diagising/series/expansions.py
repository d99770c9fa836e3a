"""Expansions of ``C_{N,N}`` close to the critical point.

``small_s_correlation`` keeps the ``p = 0`` and ``p = 1`` terms of the
expansion in ``tau = -+(t**(1/4) - t**(-1/4))/2`` around ``t = 1``;
``small_s_scaled_expansion`` is its scaling-limit re-expansion through
``s**2`` at each of the orders ``N**0, N**-1, N**-2``.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath as mp

from ..lattice_core import (
    DEFAULT_PREC, GUARD_DIGITS, DomainError, Regime, constant_A, digamma, to_mpf,
)
from ..toeplitz import critical_correlation
from .logpoly import LogPolySeries, log_L

TAU_MAX = mp.mpf("0.05")


def tau_of_t(t, regime):
    regime = Regime.parse(regime)
    t = to_mpf(t)
    q = t ** (mp.mpf(1) / 4)
    return -regime.sign * (q - 1 / q) / 2


def small_s_correlation(N: int, t, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``C_{N,N}(t)`` from the ``p <= 1`` near-critical expansion, ``O(tau**2)`` braces kept."""
    regime = Regime.parse(regime)
    if N < 1:
        raise DomainError("N must be at least 1")
    with mp.workdps(prec + GUARD_DIGITS):
        t = to_mpf(t)
        if not 0 < t <= 1:
            raise DomainError("t must lie in (0, 1]")
        tau = tau_of_t(t, regime)
        if abs(tau) > TAU_MAX:
            raise DomainError(f"|tau| = {mp.nstr(abs(tau), 3)} is outside the expansion window")
        c1 = critical_correlation(N, prec)
        pref = c1 * t ** (-regime.sign * mp.mpf(1) / 8)
        if tau == 0:
            return pref

        def braces(p):
            return 1 + (1 + 2 * (N * N - p * p)) * tau * tau / 8

        logs = (mp.log(abs(tau)) + (digamma(N + 1, prec) + digamma(N, prec)) / 2
                - digamma(1, prec) - mp.log(4))
        p0 = braces(0)
        p1 = 4 * logs * (N * tau / 4) * braces(1)
        return pref * (p0 + p1)


def small_s_envelope(N: int, t, regime) -> mp.mpf:
    """Declared relative size of what :func:`small_s_correlation` leaves out.

    The first omitted pieces are the ``tau**3`` braces terms (``(N tau)**3``
    at large ``N``) and the ``p = 2`` term ``~ (N tau)**4 log(tau)**2``.
    """
    tau = abs(tau_of_t(t, regime))
    x = N * tau
    return 4 * (x ** 3 + x ** 4 * mp.log(tau) ** 2 + tau ** 2 * abs(mp.log(tau)))


def scaled_bracket_series(regime):
    """Normalized brackets of the small-``s`` form at orders ``N**0, N**-1, N**-2``."""
    regime = Regime.parse(regime)
    e = regime.sign
    q = Fraction
    o0 = LogPolySeries({(0, 0): 1, (1, 1): q(e, 2), (0, 2): q(1, 16)}, 2, regime)
    o1 = LogPolySeries({(0, 1): q(e, 4), (0, 2): q(e, 2), (1, 2): q(e * (4 + e), 8)}, 2, regime)
    o2 = LogPolySeries({(0, 0): q(-1, 64), (0, 1): q(-e, 24), (1, 1): q(-e, 128),
                        (0, 2): q(63 + 256 * e, 1024)}, 2, regime)
    return o0, o1, o2


def small_s_scaled_expansion(s, N, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``(2s)**(1/4) G(t; N)`` through ``s**2`` in each of the first three orders of ``1/N``."""
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        s, N = to_mpf(s), to_mpf(N)
        if not 0 < s <= mp.mpf("0.3"):
            raise DomainError("small-s form needs 0 < s <= 0.3")
        if N < 2 * s / mp.mpf("0.05"):
            raise DomainError("N too small for the small-s form")
        L = log_L(s)
        o0, o1, o2 = scaled_bracket_series(regime)
        total = o0.evaluate(s, L) + o1.evaluate(s, L) / N + o2.evaluate(s, L) / N ** 2
        return constant_A(prec) * total
