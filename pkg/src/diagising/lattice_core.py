"""Model parameters, regime conventions and the special-function kernel.

Everything numeric runs on :mod:`mpmath` at ``prec + GUARD_DIGITS`` decimal
digits.  Results are trusted to ``prec`` digits; ``tolerance(prec)`` is the
matching absolute tolerance ``10**-(prec - GUARD_DIGITS)`` used by the tests.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Tuple, Union

import mpmath as mp

DEFAULT_PREC = 60
GUARD_DIGITS = 10

Number = Union[int, float, str, Fraction, mp.mpf]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class CriticalPointError(DomainError):
    """``k == 1`` was passed to an operation that needs ``t < 1``."""


class PrecisionError(ArithmeticError):
    """A series or iteration failed to converge at the requested precision."""


class Regime(enum.Enum):
    """Which side of the critical point: the upper/lower sign of every +- formula."""

    HIGH = "high"  # T > T_c, 0 < k < 1, t = k**2
    LOW = "low"    # T < T_c, k > 1,     t = k**-2

    @property
    def sign(self) -> int:
        return 1 if self is Regime.HIGH else -1

    @classmethod
    def parse(cls, value) -> "Regime":
        if isinstance(value, Regime):
            return value
        v = str(value).strip().lower()
        aliases = {"high": cls.HIGH, "hight": cls.HIGH, "+": cls.HIGH,
                   "low": cls.LOW, "lowt": cls.LOW, "-": cls.LOW}
        try:
            return aliases[v]
        except KeyError:
            raise DomainError(f"unknown regime {value!r}") from None


def tolerance(prec: int = DEFAULT_PREC) -> mp.mpf:
    return mp.mpf(10) ** (-(prec - GUARD_DIGITS))


def to_mpf(x: Number) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


@dataclass(frozen=True)
class CouplingPoint:
    k: mp.mpf
    t: mp.mpf
    regime: Regime


def t_from_k(k: Number, prec: int = DEFAULT_PREC) -> Tuple[mp.mpf, Regime]:
    with mp.workdps(prec + GUARD_DIGITS):
        k = to_mpf(k)
        if k <= 0:
            raise DomainError(f"k must be positive, got {k}")
        if k == 1:
            raise CriticalPointError("k = 1 is the critical point; use the critical-path operations")
        if k < 1:
            return k * k, Regime.HIGH
        return 1 / (k * k), Regime.LOW


def coupling_from_k(k: Number, prec: int = DEFAULT_PREC) -> CouplingPoint:
    t, regime = t_from_k(k, prec)
    with mp.workdps(prec + GUARD_DIGITS):
        return CouplingPoint(to_mpf(k), t, regime)


def coupling_from_t(t: Number, regime, prec: int = DEFAULT_PREC) -> CouplingPoint:
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        t = to_mpf(t)
        if not 0 < t < 1:
            raise DomainError(f"t must lie in (0, 1), got {t}")
        k = mp.sqrt(t) if regime is Regime.HIGH else 1 / mp.sqrt(t)
        return CouplingPoint(k, t, regime)


def scaling_embed(s: Number, N: int, regime, prec: int = DEFAULT_PREC) -> CouplingPoint:
    """The coupling with ``t = 1 - 2s/N`` on the requested side of criticality."""
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        if s <= 0:
            raise DomainError(f"s must be positive, got {s}")
        if N <= 2 * s:
            raise DomainError(f"N = {N} must exceed 2s = {2 * s}")
        return coupling_from_t(1 - 2 * s / N, regime, prec)


def spontaneous_magnetisation(k: Number, prec: int = DEFAULT_PREC) -> mp.mpf:
    with mp.workdps(prec + GUARD_DIGITS):
        k = to_mpf(k)
        if k <= 0:
            raise DomainError(f"k must be positive, got {k}")
        if k <= 1:
            return mp.mpf(0)
        return (1 - 1 / (k * k)) ** (mp.mpf(1) / 8)


def correlation_length(t: Number, prec: int = DEFAULT_PREC) -> mp.mpf:
    with mp.workdps(prec + GUARD_DIGITS):
        t = to_mpf(t)
        if not 0 < t < 1:
            raise DomainError(f"t must lie in (0, 1), got {t}")
        return mp.sqrt(2) / abs(mp.log(t))


# -- Gauss hypergeometric function -------------------------------------------

_MAX_TERMS = 2_000_000


def _poch_ratio_series(a, b, c, z, eps):
    total = term = mp.mpf(1)
    n = 0
    while True:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        n += 1
        if abs(term) <= eps * abs(total) and n > 2:
            return total
        if n > _MAX_TERMS:
            raise PrecisionError(f"2F1({a},{b};{c};{z}) did not converge")


def _near_one(a, b, m: int, z, eps):
    """``2F1(a, b; a+b+m; z)`` for integer ``m >= 0`` from the expansion in ``1 - z``.

    Returns the value and the decimal digits lost to cancellation.
    """
    w = 1 - z
    c = a + b + m
    finite = mp.mpf(0)
    if m > 0:
        term = mp.mpf(1)
        for n in range(m):
            finite += term
            if n < m - 1:
                term *= (a + n) * (b + n) / ((n + 1) * (1 - m + n)) * w
        finite *= mp.gamma(m) * mp.gamma(c) / (mp.gamma(a + m) * mp.gamma(b + m))
    pre = -((z - 1) ** m) * mp.gamma(c) / (mp.gamma(a) * mp.gamma(b))
    logw = mp.log(w)
    psi_n1 = mp.digamma(1)
    psi_nm1 = mp.digamma(m + 1)
    psi_a = mp.digamma(a + m)
    psi_b = mp.digamma(b + m)
    term = 1 / mp.factorial(m)
    total = mp.mpf(0)
    biggest = abs(finite)
    n = 0
    while True:
        contrib = term * (logw - psi_n1 - psi_nm1 + psi_a + psi_b)
        total += contrib
        biggest = max(biggest, abs(pre * contrib))
        if n > 3 and abs(contrib) <= eps * abs(total):
            break
        psi_n1 += mp.mpf(1) / (n + 1)
        psi_nm1 += mp.mpf(1) / (n + m + 1)
        psi_a += 1 / (a + n + m)
        psi_b += 1 / (b + n + m)
        term *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * w
        n += 1
        if n > _MAX_TERMS:
            raise PrecisionError("near-one expansion of 2F1 did not converge")
    value = finite + pre * total
    lost = 0
    if value != 0 and biggest > abs(value):
        lost = int(mp.ceil(mp.log10(biggest / abs(value))))
    return value, lost


def _is_nonpositive_int(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def hyp2f1(a: Number, b: Number, c: Number, z: Number, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Gauss ``2F1(a, b; c; z)`` for ``0 <= z < 1`` and rational parameters.

    Below ``z = 0.9`` the Gauss series is summed directly.  Above it, when
    ``c - a - b`` is an integer the logarithmic expansion in ``1 - z`` is used
    (after an Euler transformation if ``c - a - b < 0``), with the working
    precision raised by the digits lost to cancellation.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if _is_nonpositive_int(c):
        raise DomainError(f"c = {c} is a non-positive integer")
    wp = prec + GUARD_DIGITS
    with mp.workdps(wp):
        z = to_mpf(z)
        if not 0 <= z < 1:
            raise DomainError(f"z must lie in [0, 1), got {z}")
        if z == 0:
            return mp.mpf(1)
        m = c - a - b
        polynomial = _is_nonpositive_int(a) or _is_nonpositive_int(b)
        if z <= mp.mpf("0.9") or m.denominator != 1 or polynomial:
            eps = mp.mpf(10) ** (-wp - 2)
            return _poch_ratio_series(to_mpf(a), to_mpf(b), to_mpf(c), z, eps)
        prefactor = mp.mpf(1)
        if m < 0:
            prefactor = (1 - z) ** to_mpf(m)
            a, b = c - a, c - b
            m = -m
        extra = 0
        for _ in range(4):
            with mp.workdps(wp + extra):
                eps = mp.mpf(10) ** (-(wp + extra) - 2)
                value, lost = _near_one(to_mpf(a), to_mpf(b), int(m), to_mpf(z), eps)
            if lost <= extra + GUARD_DIGITS // 2:
                return prefactor * value
            extra = lost + GUARD_DIGITS
        raise PrecisionError("could not control cancellation in 2F1 near z = 1")


# -- Fourier coefficients of the Onsager weight ------------------------------

def _central_ratio(n: int) -> Fraction:
    """``Gamma(n + 1/2) / (sqrt(pi) Gamma(n + 1)) = (2n)! / (4**n (n!)**2)``."""
    return Fraction(comb(2 * n, n), 4 ** n)


@dataclass(frozen=True)
class _CoeffForm:
    """``a_n = prefactor * t**power * 2F1(a, b; c; t)``."""
    prefactor: Fraction
    power: Fraction
    a: Fraction
    b: Fraction
    c: Fraction


def _coeff_form(n: int, regime: Regime) -> _CoeffForm:
    half = Fraction(1, 2)
    if regime is Regime.LOW:
        # t = k**-2, so k**-n = t**(n/2)
        if n >= 0:
            return _CoeffForm(_central_ratio(n), Fraction(n, 2), -half, n + half, Fraction(n + 1))
        n = -n
        return _CoeffForm(-_central_ratio(n) / (2 * n - 1), Fraction(n, 2),
                          half, n - half, Fraction(n + 1))
    # t = k**2
    if n >= 0:
        return _CoeffForm(_central_ratio(n) / (2 * (n + 1)), Fraction(n + 1, 2),
                          half, n + half, Fraction(n + 2))
    n = -n
    return _CoeffForm(-_central_ratio(n) * 2 * n / (2 * n - 1), Fraction(n - 1, 2),
                      -half, n - half, Fraction(n))


def _pow(t, p: Fraction):
    if p == 0:
        return mp.mpf(1)
    if p.denominator == 1:
        return t ** int(p)
    return mp.sqrt(t) ** int(2 * p)


def critical_fourier_coeff(n: int, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``a_n = 1 / (pi (n + 1/2))`` at ``k = 1``."""
    with mp.workdps(prec + GUARD_DIGITS):
        return 1 / (mp.pi * (n + mp.mpf(1) / 2))


def fourier_coeff(n: int, point: CouplingPoint, prec: int = DEFAULT_PREC) -> mp.mpf:
    f = _coeff_form(n, point.regime)
    with mp.workdps(prec + GUARD_DIGITS):
        t = point.t
        return to_mpf(f.prefactor) * _pow(t, f.power) * hyp2f1(f.a, f.b, f.c, t, prec)


def d_fourier_coeff_dt(n: int, point: CouplingPoint, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``d a_n / dt`` at fixed regime, from ``d/dz 2F1 = (ab/c) 2F1(a+1, b+1; c+1)``."""
    f = _coeff_form(n, point.regime)
    with mp.workdps(prec + GUARD_DIGITS):
        t = point.t
        value = mp.mpf(0)
        if f.power != 0:
            value += to_mpf(f.power) * _pow(t, f.power - 1) * hyp2f1(f.a, f.b, f.c, t, prec)
        shifted = f.a * f.b / f.c
        if shifted != 0:
            value += (to_mpf(shifted) * _pow(t, f.power)
                      * hyp2f1(f.a + 1, f.b + 1, f.c + 1, t, prec))
        return to_mpf(f.prefactor) * value


def onsager_weight(theta, k) -> mp.mpc:
    """The symbol ``a(e^{i theta})`` on the branch continuous around the circle.

    For ``k > 1`` this is the principal root, ``a(1) = 1``.  For ``k < 1`` the
    ratio winds once around the origin; the continuous branch whose Fourier
    coefficients are the closed forms used by :func:`fourier_coeff` has
    ``a(1) = -1``.
    """
    zeta = mp.expj(theta)
    k = mp.mpf(k)
    if k > 1:
        return mp.sqrt((1 - 1 / (k * zeta)) / (1 - zeta / k))
    if k < 1:
        return -mp.sqrt((1 - k * zeta) / (1 - k / zeta)) / zeta
    # k = 1: the ratio is -1/zeta; take the branch continuous on (0, 2 pi)
    return mp.expj((mp.pi - theta) / 2)


def fourier_coeff_quadrature(n: int, point_or_k, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``(1/2pi) int a(e^{i theta}) e^{-i n theta} d theta`` computed numerically.

    Off criticality the symbol is analytic and periodic, so the trapezoidal
    rule converges geometrically with rate set by the distance ``|log k|`` of
    its branch points from the unit circle; the node count is doubled until
    two successive sums agree.  At ``k = 1`` the symbol has a jump at
    ``theta = 0`` and is integrated on ``(0, 2 pi)`` by Gauss-Legendre instead.
    """
    k = point_or_k.k if isinstance(point_or_k, CouplingPoint) else point_or_k
    wp = prec + GUARD_DIGITS
    with mp.workdps(wp):
        k = to_mpf(k)
        if k == 1:
            with mp.workdps(wp + 10):
                val = mp.quad(lambda th: mp.re(onsager_weight(th, k) * mp.expj(-n * th)),
                              [0, mp.pi, 2 * mp.pi], method="gauss-legendre")
            return val / (2 * mp.pi)
        width = abs(mp.log(k))
        M = int(mp.ceil((wp + 5) * mp.log(10) / width)) + 2 * abs(n) + 16
        prev = None
        for _ in range(6):
            total = mp.mpf(0)
            for j in range(M):
                th = 2 * mp.pi * j / M
                total += mp.re(onsager_weight(th, k) * mp.expj(-n * th))
            val = total / M
            if prev is not None and abs(val - prev) <= tolerance(prec) * mp.mpf(10) ** -5:
                return val
            prev = val
            M *= 2
        raise PrecisionError("trapezoidal Fourier quadrature did not converge")


# -- constants ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _zeta_prime_minus_one(dps: int) -> mp.mpf:
    with mp.workdps(dps):
        return +mp.zeta(-1, 1, 1)


def zeta_prime_minus_one(prec: int = DEFAULT_PREC) -> mp.mpf:
    return _zeta_prime_minus_one(prec + GUARD_DIGITS)


@lru_cache(maxsize=None)
def _constant_A(dps: int) -> mp.mpf:
    with mp.workdps(dps):
        return mp.mpf(2) ** (mp.mpf(1) / 12) * mp.exp(3 * _zeta_prime_minus_one(dps))


def constant_A(prec: int = DEFAULT_PREC) -> mp.mpf:
    """``A = 2**(1/12) exp(3 zeta'(-1))``, the critical amplitude of ``C_{N,N}``."""
    if prec < 30:
        raise DomainError("constant_A needs prec >= 30")
    return _constant_A(prec + GUARD_DIGITS)


# -- Bessel K ----------------------------------------------------------------

def bessel_k(nu: int, s: Number, prec: int = DEFAULT_PREC, with_flag: bool = False):
    """Modified Bessel ``K_nu(s)`` for ``nu`` in ``{0, 1}``.

    Values below ``10**-(prec + GUARD_DIGITS)`` are flushed to zero; pass
    ``with_flag=True`` to get ``(value, flushed)``.
    """
    if nu not in (0, 1):
        raise DomainError("only K_0 and K_1 are provided")
    wp = prec + GUARD_DIGITS
    with mp.workdps(wp):
        s = to_mpf(s)
        if s <= 0:
            raise DomainError(f"s must be positive, got {s}")
        value = mp.besselk(nu, s)
        flushed = value < mp.mpf(10) ** (-wp)
        if flushed:
            value = mp.mpf(0)
    return (value, flushed) if with_flag else value


def digamma(x: Number, prec: int = DEFAULT_PREC) -> mp.mpf:
    with mp.workdps(prec + GUARD_DIGITS):
        return mp.digamma(to_mpf(x))
