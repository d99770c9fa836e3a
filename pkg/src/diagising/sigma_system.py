"""The sigma function of ``C_{N,N}``, its Painleve VI residual, and the scaled system.

The finite-``N`` sigma function is built from the Toeplitz determinant; its
second derivative comes from central differences of the analytic
``d log C / dt`` with step ``10**-(prec/4)``.  The scaled equations
(Painleve V for ``sigma_0`` and the linear equations for ``sigma_1``,
``sigma_2``) are written once over a tiny ring interface so the same code
evaluates them on numbers and on :class:`LogPolySeries`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .lattice_core import (
    DEFAULT_PREC, GUARD_DIGITS, CouplingPoint, DomainError, Regime, coupling_from_t, to_mpf,
)
from .toeplitz import log_deriv_correlation_t

QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class SigmaValue:
    N: int
    t: mp.mpf
    regime: Regime
    sigma: mp.mpf
    dsigma: mp.mpf
    d2sigma: mp.mpf


@dataclass(frozen=True)
class OdeCoefficients:
    """Coefficients of ``A y'' + B y' + C y = D`` for the two correction equations."""
    A: object
    B: object
    C: object
    D1: object
    D2: Optional[object] = None


def fd_step(prec: int) -> mp.mpf:
    return mp.mpf(10) ** (-mp.mpf(prec) / 4)


def sigma_from_correlation(N: int, point: CouplingPoint, prec: int = DEFAULT_PREC,
                           h=None) -> SigmaValue:
    """``sigma = t(t-1) dlogC/dt - t/4`` (low T) or ``... - 1/4`` (high T), with two derivatives."""
    t = point.t
    if not 0 < t < 1:
        raise DomainError("sigma needs 0 < t < 1")
    with mp.workdps(prec + GUARD_DIGITS):
        h = fd_step(prec) if h is None else to_mpf(h)
        if not (0 < t - h and t + h < 1):
            raise DomainError("t too close to the ends of (0, 1) for the difference step")
        D0 = log_deriv_correlation_t(N, point, prec)
        Dp = log_deriv_correlation_t(N, coupling_from_t(t + h, point.regime, prec), prec)
        Dm = log_deriv_correlation_t(N, coupling_from_t(t - h, point.regime, prec), prec)
        D1 = (Dp - Dm) / (2 * h)
        D2 = (Dp - 2 * D0 + Dm) / (h * h)
        q = t * (t - 1)
        if point.regime is Regime.LOW:
            sigma = q * D0 - t / 4
            ds = (2 * t - 1) * D0 + q * D1 - mp.mpf(1) / 4
        else:
            sigma = q * D0 - mp.mpf(1) / 4
            ds = (2 * t - 1) * D0 + q * D1
        d2s = 2 * D0 + 2 * (2 * t - 1) * D1 + q * D2
        return SigmaValue(N, t, point.regime, sigma, ds, d2s)


def _normalized(lhs, rhs):
    return abs(lhs - rhs) / (1 + abs(lhs) + abs(rhs))


def pvi_sides(sigma, dsigma, d2sigma, t, N):
    """Both sides of the sigma form of Painleve VI, in the lattice ``t`` convention."""
    lhs = (t * (t - 1) * d2sigma) ** 2
    rhs = (N * N * ((t - 1) * dsigma - sigma) ** 2
           - 4 * dsigma * ((t - 1) * dsigma - sigma - QUARTER) * (t * dsigma - sigma))
    return lhs, rhs


def pvi_residual(sv: SigmaValue, prec: int = DEFAULT_PREC) -> mp.mpf:
    with mp.workdps(prec + GUARD_DIGITS):
        lhs, rhs = pvi_sides(sv.sigma, sv.dsigma, sv.d2sigma, sv.t, sv.N)
        return _normalized(lhs, rhs)


# -- scaled system: generic over numbers and series --------------------------

def pv_sides(y, dy, d2y, s):
    """``(s y'')**2`` and ``4(s y' - y)**2 - 4 y'**2 (s y' - y) + y'**2``."""
    u = s * dy - y
    return (s * d2y) ** 2, 4 * u * u - 4 * dy * dy * u + dy * dy


def pv_polynomial(y, dy, d2y, s):
    """``P0 = (s y'')**2 - 4(s y'-y)**2 + 4 y'**2 (s y'-y) - y'**2``."""
    lhs, rhs = pv_sides(y, dy, d2y, s)
    return lhs - rhs


def pv_sigma0_residual(sigma0, dsigma0, d2sigma0, s, prec: int = DEFAULT_PREC) -> mp.mpf:
    with mp.workdps(prec + GUARD_DIGITS):
        lhs, rhs = pv_sides(to_mpf(sigma0), to_mpf(dsigma0), to_mpf(d2sigma0), to_mpf(s))
        return _normalized(lhs, rhs)


def ode_coefficients(jet: Sequence, s) -> OdeCoefficients:
    """``A, B, C, D1`` (and ``D2`` when ``sigma0'''`` is supplied) from ``(sigma0, sigma0', sigma0'' [, sigma0'''])``."""
    y, dy, d2y = jet[0], jet[1], jet[2]
    d3y = jet[3] if len(jet) > 3 else None
    u = s * dy - y
    A = s * s * d2y * Fraction(1, 2)
    B = s * dy * dy - 2 * s * u + 2 * dy * (u - QUARTER)
    C = 2 * u - dy * dy
    D1 = s * s * s * d2y * d2y + 2 * dy * u * (u - QUARTER)
    D2 = None
    if d3y is not None:
        s2 = s * s
        D2 = (u * u * (u - QUARTER)
              + 2 * s2 * s * dy * d2y * (u - QUARTER)
              + (s2 * d2y) ** 2 * (3 + s2 + y - 3 * s * dy)
              + Fraction(1, 2) * s2 * s2 * s * d2y * d3y
              - QUARTER * s2 * s2 * s2 * d3y * d3y)
    return OdeCoefficients(A, B, C, D1, D2)


def linear_ode_lhs(coeffs: OdeCoefficients, y, dy, d2y):
    return coeffs.A * d2y + coeffs.B * dy + coeffs.C * y


def linear_ode_residual(which: int, jet: Sequence, coeffs: OdeCoefficients,
                        prec: int = DEFAULT_PREC) -> mp.mpf:
    """Normalised ``|A y'' + B y' + C y - D_which|`` for ``jet = (y, y', y'')``."""
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    D = coeffs.D1 if which == 1 else coeffs.D2
    if D is None:
        raise DomainError("D2 needs the third derivative of sigma0")
    with mp.workdps(prec + GUARD_DIGITS):
        lhs = linear_ode_lhs(coeffs, *(to_mpf(v) for v in jet))
        return _normalized(lhs, to_mpf(D))


def sigma1_from_identity(y, dy, s):
    """``sigma1 = s**2 sigma0' - s sigma0``; pointwise or on series."""
    return s * s * dy - s * y


def sigma1_jet(jet: Sequence, s):
    """``(sigma1, sigma1', sigma1'')`` from ``(sigma0, sigma0', sigma0'', sigma0''')``."""
    y, dy, d2y, d3y = jet
    y1 = s * s * dy - s * y
    dy1 = s * dy + s * s * d2y - y
    d2y1 = s * s * d3y + 3 * s * d2y
    return y1, dy1, d2y1


def p1_p0_relation_check(y0, s=None) -> bool:
    """Formal check of ``P1 = (1/4) s**2 dP0/ds`` with ``y1 = s**2 y0' - s y0``.

    ``y0`` is any :class:`~diagising.series.logpoly.LogPolySeries`; the identity
    is algebraic, so it must hold through the common valid order.
    """
    from .series.solvers import s_series
    s = s_series() if s is None else s
    d1 = y0.diff()
    d2 = d1.diff()
    d3 = d2.diff()
    p0 = pv_polynomial(y0, d1, d2, s)
    coeffs = ode_coefficients((y0, d1, d2), s)
    y1, dy1, d2y1 = sigma1_jet((y0, d1, d2, d3), s)
    p1 = linear_ode_lhs(coeffs, y1, dy1, d2y1) - coeffs.D1
    rhs = Fraction(1, 4) * s * s * p0.diff()
    order = min(p1.max_order, rhs.max_order)
    return (p1 - rhs).truncate(order).is_zero()
