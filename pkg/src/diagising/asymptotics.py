"""Large-``s`` behaviour: Bessel closed forms, form-factor integrals, and the
exponential large-``N`` expansions of the diagonal correlation.

The closed forms are kept twice: as plain numeric formulas
(:func:`bessel_asymptote`) and as exact symbolic polynomials in
``s, K0(s), K1(s)`` (:class:`BesselPoly`).  The symbolic copy lets the
relations between ``G, G_1, G_2, G^(2)`` be checked as identities.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

import mpmath as mp

from .golden import perk_auyang_table
from .lattice_core import (
    DEFAULT_PREC, GUARD_DIGITS, DomainError, PrecisionError, Regime, bessel_k, constant_A,
    to_mpf,
)

WHICH = ("g0", "g1", "g2", "g2corr")


class RangeWarning(UserWarning):
    """An expansion is being evaluated outside its intended window."""


# -- symbolic ring Q[s, 1/s, K0, K1] / pi**d ---------------------------------

Mono = Tuple[int, int, int, int]  # powers of s, K0, K1 and of 1/pi


class BesselPoly:
    """Exact polynomial in ``s**a K0**b K1**c pi**-d`` with rational coefficients.

    ``K0`` and ``K1`` are algebraically independent over rational functions of
    ``s``, so equality of the coefficient maps is equality of functions.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Mono, Fraction]] = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, c, pi_power: int = 0) -> "BesselPoly":
        return cls({(0, 0, 0, pi_power): c})

    @classmethod
    def mono(cls, a=0, b=0, c=0, d=0, coeff=1) -> "BesselPoly":
        return cls({(a, b, c, d): coeff})

    def __add__(self, other):
        other = other if isinstance(other, BesselPoly) else BesselPoly.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BesselPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BesselPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BesselPoly):
            c = Fraction(other)
            return BesselPoly({k: c * v for k, v in self.terms.items()})
        out: Dict[Mono, Fraction] = {}
        for (a1, b1, c1, d1), v1 in self.terms.items():
            for (a2, b2, c2, d2), v2 in other.terms.items():
                k = (a1 + a2, b1 + b2, c1 + c2, d1 + d2)
                out[k] = out.get(k, 0) + v1 * v2
        return BesselPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BesselPoly":
        out = BesselPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, BesselPoly) and self.terms == other.terms

    def __repr__(self):
        return f"BesselPoly({self.terms})"

    def diff(self) -> "BesselPoly":
        """``d/ds`` using ``K0' = -K1`` and ``K1' = -K0 - K1/s``."""
        out = BesselPoly()
        for (a, b, c, d), v in self.terms.items():
            if a:
                out = out + BesselPoly({(a - 1, b, c, d): a * v})
            if b:
                out = out + BesselPoly({(a, b - 1, c + 1, d): -b * v})
            if c:
                out = out + BesselPoly({(a, b + 1, c - 1, d): -c * v,
                                        (a - 1, b, c, d): -c * v})
        return out

    def evaluate(self, s, prec: int = DEFAULT_PREC) -> mp.mpf:
        with mp.workdps(prec + GUARD_DIGITS):
            s = to_mpf(s)
            k0, k1 = bessel_k(0, s, prec), bessel_k(1, s, prec)
            total = mp.mpf(0)
            for (a, b, c, d), v in self.terms.items():
                total += (mp.mpf(v.numerator) / v.denominator) * s ** a * k0 ** b * k1 ** c / mp.pi ** d
            return total


S = BesselPoly.mono(a=1)
K0 = BesselPoly.mono(b=1)
K1 = BesselPoly.mono(c=1)


def _q(n, d=1):
    return Fraction(n, d)


def bessel_forms(regime) -> Dict[str, BesselPoly]:
    """The printed large-``s`` forms of ``G_0, G_1, G_2`` and ``G^(2)``."""
    regime = Regime.parse(regime)
    s = S
    if regime is Regime.HIGH:
        inv_pi = BesselPoly.mono(d=1)
        return {
            "g0": inv_pi * K0,
            "g1": _q(1, 2) * inv_pi * s * (K0 - 2 * s * K1),
            "g2": _q(1, 24) * inv_pi * s * (s * (12 * s * s + 13) * K0 - (32 * s * s + 1) * K1),
            "g2corr": _q(-1, 24) * inv_pi * s * (2 * s * K0 + K1),
        }
    inv_pi2 = BesselPoly.mono(d=2)
    return {
        "g0": 1 + inv_pi2 * (s * s * (K1 * K1 - K0 * K0) - s * K0 * K1 + _q(1, 2) * K0 * K0),
        "g1": -1 * inv_pi2 * s * s * (s * (K0 * K0 - K1 * K1) + K1 * K0),
        "g2": _q(-1, 24) * inv_pi2 * s * (s * (32 * s * s - 1) * (K0 * K0 - K1 * K1)
                                          + (20 * s * s + 1) * K1 * K0),
        "g2corr": _q(-1, 24) * inv_pi2 * s * (s * (K1 * K1 - K0 * K0) + K1 * K0),
    }


def _extra(regime: Regime) -> Fraction:
    """``(1 +- 1)/4``."""
    return Fraction(1, 2) if regime is Regime.HIGH else Fraction(0)


def g1_from_g(G, regime):
    """``G_1 = s**2 G' + (1+-1)/4 s G``."""
    regime = Regime.parse(regime)
    return S * S * G.diff() + _extra(regime) * S * G


def g2_from_g(G, G2corr, regime):
    """``G_2`` from ``G`` and ``G^(2)``."""
    regime = Regime.parse(regime)
    e = _extra(regime)
    dG = G.diff()
    return (_q(1, 2) * S ** 4 * dG.diff() + (_q(4, 3) + e) * S ** 3 * dG
            + _q(5, 4) * e * S * S * G + G2corr)


def g2corr_from_gs(G0, G1, G2):
    """``G^(2) = G_2 - s**2 G_1' - s G_1/4 + s**4 G_0''/2 + 11 s**3 G_0'/12``."""
    dG0 = G0.diff()
    return (G2 - S * S * G1.diff() - _q(1, 4) * S * G1
            + _q(1, 2) * S ** 4 * dG0.diff() + _q(11, 12) * S ** 3 * dG0)


def identity_checks(regime) -> Dict[str, bool]:
    """Exact checks that the printed forms are mutually consistent."""
    f = bessel_forms(regime)
    return {
        "g1_identity": g1_from_g(f["g0"], regime) == f["g1"],
        "g2corr_identity": g2corr_from_gs(f["g0"], f["g1"], f["g2"]) == f["g2corr"],
        "g2_identity": g2_from_g(f["g0"], f["g2corr"], regime) == f["g2"],
    }


# -- numeric closed forms ----------------------------------------------------

@dataclass(frozen=True)
class AsymptoteRequest:
    which: str
    regime: Regime
    s: object

    def __post_init__(self):
        if self.which not in WHICH:
            raise DomainError(f"which must be one of {WHICH}")


_WINDOW = {("g0", Regime.HIGH): 0.4, ("g0", Regime.LOW): 0.4,
           ("g2", Regime.HIGH): 0.3, ("g2", Regime.LOW): 0.1}


def bessel_asymptote(which: str, regime, s, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Numeric value of the printed large-``s`` form (not normalized)."""
    regime = Regime.parse(regime)
    AsymptoteRequest(which, regime, s)
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        if s <= 0:
            raise DomainError("s must be positive")
        lo = _WINDOW.get((which, regime))
        if lo is not None and s < lo:
            warnings.warn(f"s={mp.nstr(s, 5)} is below the large-s window", RangeWarning, stacklevel=2)
        k0, k1 = bessel_k(0, s, prec), bessel_k(1, s, prec)
        pi = mp.pi
        if regime is Regime.HIGH:
            if which == "g0":
                return k0 / pi
            if which == "g1":
                return s / (2 * pi) * (k0 - 2 * s * k1)
            if which == "g2":
                return s / (24 * pi) * (s * (12 * s ** 2 + 13) * k0 - (32 * s ** 2 + 1) * k1)
            return -s / (24 * pi) * (2 * s * k0 + k1)
        d = k0 ** 2 - k1 ** 2
        if which == "g0":
            return 1 + (s ** 2 * (-d) - s * k0 * k1 + k0 ** 2 / 2) / pi ** 2
        if which == "g1":
            return -s ** 2 / pi ** 2 * (s * d + k1 * k0)
        if which == "g2":
            return -s / (24 * pi ** 2) * (s * (32 * s ** 2 - 1) * d + (20 * s ** 2 + 1) * k1 * k0)
        return -s / (24 * pi ** 2) * (-s * d + k1 * k0)


def g2corr_asymptote(regime, s, prec: int = DEFAULT_PREC) -> mp.mpf:
    return bessel_asymptote("g2corr", regime, s, prec)


def scaled_asymptote(which: str, regime, s, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``(2s)**(1/4)`` times the large-``s`` form: the matching ``a, b, c`` fit column."""
    with mp.workdps(prec + GUARD_DIGITS):
        return (2 * to_mpf(s)) ** (mp.mpf(1) / 4) * bessel_asymptote(which, regime, s, prec)


# -- form factors ------------------------------------------------------------

def _quad(f, intervals, prec, error_budget):
    with mp.workdps(prec + GUARD_DIGITS):
        value, err = mp.quad(f, intervals, error=True)
        if err > error_budget * (1 + abs(value)):
            raise PrecisionError(f"quadrature error estimate {mp.nstr(err, 3)} exceeds budget")
        return value


def form_factor_scaled(p: int, s, prec: int = 30) -> mp.mpf:
    """Scaling limit of ``f^(1)`` (``p=1``) or ``f^(2)`` (``p=2``) at ``s > 0``.

    ``X = u**2`` removes the inverse square-root endpoint singularity.  For
    ``p=1`` the prefactor is ``exp(-s)/pi``: that is what the limit
    ``t**(N/2) -> exp(-s)`` of the lattice integral produces.
    """
    if p not in (1, 2):
        raise DomainError("p must be 1 or 2")
    budget = mp.mpf(10) ** -12
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        if s <= 0:
            raise DomainError("s must be positive")
        if p == 1:
            # X = u^2: dX / sqrt(X (1+X)) = 2 du / sqrt(1 + u^2)
            f = lambda u: 2 * mp.exp(-2 * s * u * u) / mp.sqrt(1 + u * u)
            return mp.exp(-s) / mp.pi * _quad(f, [0, 1, mp.inf], prec, budget)

        def inner(u1):
            X1 = u1 * u1

            def g(u2):
                X2 = u2 * u2
                return (2 * u2 * mp.exp(-2 * s * X2) * mp.sqrt((1 + X2) * X2)
                        / (1 + X1 + X2) ** 2)
            return (2 * mp.exp(-2 * s * X1) / mp.sqrt(1 + X1)
                    * mp.quad(g, [0, 1, mp.inf]))
        return mp.exp(-2 * s) / mp.pi ** 2 * _quad(inner, [0, 1, mp.inf], prec, budget)


def form_factor_finite(p: int, N: int, t, prec: int = 30) -> mp.mpf:
    """Lattice ``f^(1)_{N,N}`` (``p=1``) or ``f^(2)_{N,N}`` (``p=2``) at ``0 < t < 1``."""
    if p not in (1, 2):
        raise DomainError("p must be 1 or 2")
    if N < 0:
        raise DomainError("N must be non-negative")
    budget = mp.mpf(10) ** -12
    with mp.workdps(prec + GUARD_DIGITS):
        t = to_mpf(t)
        if not 0 < t < 1:
            raise DomainError("t must lie in (0, 1)")
        if p == 1:
            # x = 1 - u^2; x^N / x (1-tx)^-1/2 (1/x - 1)^-1/2 dx = 2 x^(N-1/2) (1-tx)^-1/2 du
            def f(u):
                x = 1 - u * u
                return 2 * x ** (N - mp.mpf(1) / 2) / mp.sqrt(1 - t * x)
            return t ** (mp.mpf(N) / 2) / mp.pi * _quad(f, [0, 1], prec, budget)

        def inner(u1):
            x1 = 1 - u1 * u1

            def g(x2):
                return (x2 ** N * mp.sqrt((1 - t * x2) * (1 / x2 - 1))
                        / (1 - t * x1 * x2) ** 2) if x2 > 0 else mp.mpf(0)
            # (1/x1 - 1)^(-1/2) dx1 = 2 sqrt(x1) du1
            return 2 * x1 ** N * mp.sqrt(x1) / mp.sqrt(1 - t * x1) * mp.quad(g, [0, 1])
        return t ** (N + 1) / mp.pi ** 2 * _quad(inner, [0, 1], prec, budget)


# -- Perk--Au-Yang exponential expansions -------------------------------------

@dataclass(frozen=True)
class PerkAuYangParams:
    N: int
    t: object
    m: int = 10
    regime: Regime = Regime.HIGH

    def __post_init__(self):
        if not 1 <= self.m <= 10:
            raise DomainError("m must lie in 1..10")
        if not 0 < self.t < 1:
            raise DomainError("t must lie in (0, 1)")

    @property
    def x(self):
        t = to_mpf(self.t)
        return (1 + t) / (1 - t)


def perk_auyang_exponent(params: PerkAuYangParams, prec: int = DEFAULT_PREC) -> mp.mpf:
    table = perk_auyang_table(params.regime)
    with mp.workdps(prec + GUARD_DIGITS):
        x, N = params.x, mp.mpf(params.N)
        total = mp.mpf(0)
        last = mp.mpf(0)
        for j in range(1, params.m + 1):
            term = mp.mpf(0)
            for k, c in table[j].items():
                term += mp.mpf(c.numerator) / c.denominator * x ** (j - 2 * k)
            last = term / N ** j
            total += last
        if abs(total) >= 1 or abs(last) >= 1:
            warnings.warn("exponent of the large-N expansion is not small", RangeWarning, stacklevel=2)
        return total


def perk_auyang(params: PerkAuYangParams, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Truncated exponential large-``N`` form of ``C_{N,N}`` (high T) or ``C*_{N,N}`` (low T)."""
    with mp.workdps(prec + GUARD_DIGITS):
        t, N = to_mpf(params.t), params.N
        e = mp.exp(perk_auyang_exponent(params, prec))
        if params.regime is Regime.HIGH:
            return t ** (mp.mpf(N) / 2) / (mp.sqrt(mp.pi * N) * (1 - t) ** (mp.mpf(1) / 4)) * e
        return ((1 - t) ** (mp.mpf(1) / 4)
                + t ** (N + 1) / (2 * mp.pi * N ** 2 * (1 - t) ** (mp.mpf(7) / 4)) * e)


def polyfit_inverse_N(Ns: Sequence[int], values: Sequence, terms: int,
                      prec: int = DEFAULT_PREC):
    """Least-squares coefficients of ``sum_j c_j N**-j``, ``j < terms``."""
    if len(set(Ns)) < terms:
        raise DomainError("need at least as many distinct N as fit terms")
    with mp.workdps(prec + GUARD_DIGITS):
        # columns in (N0/N)**j keep the matrix well scaled for large N
        N0 = mp.mpf(min(Ns))
        A = mp.matrix([[(N0 / N) ** j for j in range(terms)] for N in Ns])
        b = mp.matrix([to_mpf(v) for v in values])
        sol, _res = mp.qr_solve(A, b)
        return [sol[j] * N0 ** j for j in range(terms)]


def perk_auyang_scaled_fit(s, regime, Ns: Sequence[int] = (200, 400, 800, 1600),
                           m: int = 10, prec: int = DEFAULT_PREC):
    """Fit ``N**(1/4) C`` at ``t = 1 - 2s/N`` in ``{1, 1/N, 1/N**2}``.

    In the scaling limit the three coefficients are ``(2s)**(1/4)`` times
    ``G_0, G_1, G_2``.
    """
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        vals = []
        for N in Ns:
            if N <= 2 * s:
                raise DomainError("every N must exceed 2s")
            t = 1 - 2 * s / N
            vals.append(mp.mpf(N) ** (mp.mpf(1) / 4) * perk_auyang(PerkAuYangParams(N, t, m, regime), prec))
        return polyfit_inverse_N(Ns, vals, 3, prec)


def crossover_gap(regime, s, order: int = 10, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``|G_0 series (through s**order) - G_0 Bessel form|`` at ``s``."""
    from .series.gseries import series_family
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        series = series_family(order, regime).g0.evaluate(s, prec, normalized=False)
        return abs(series - bessel_asymptote("g0", regime, s, prec))
