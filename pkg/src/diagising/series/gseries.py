"""Small-``s`` series of the scaling functions ``G_0, G_1, G_2`` and ``G^(2)``.

Every function here has the form ``A (2s)**(-1/4) * f(s)`` with ``f`` a
:class:`LogPolySeries`; only the body ``f`` is stored.  Derivatives of the full
function are taken through the prefactor with

    s**2 d/ds   [s**(-1/4) f] = s**(-1/4) (s**2 f' - s f/4)
    s**4 d2/ds2 [s**(-1/4) f] = s**(-1/4) (s**4 f'' - s**3 f'/2 + 5 s**2 f/16)

so the whole pipeline stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional

import mpmath as mp

from ..lattice_core import DEFAULT_PREC, GUARD_DIGITS, Regime, constant_A
from .logpoly import LogPolySeries, StructuralError, series_exp
from .solvers import s_series, sigma1_series, solve_sigma0, solve_sigma2

NORMALIZATION = "(2s)^{1/4}/A"
L_DEF = "log(s/8)+eulergamma"


@dataclass(frozen=True)
class NormalizedGSeries:
    """``(2s)**(1/4) G(s) / A`` as an exact log-power series."""
    body: LogPolySeries
    regime: Regime
    name: str = "G"

    @property
    def max_order(self) -> int:
        return self.body.max_order

    def evaluate(self, s, prec: int = DEFAULT_PREC, normalized: bool = True):
        with mp.workdps(prec + GUARD_DIGITS):
            v = self.body.evaluate(s)
            if not normalized:
                v *= constant_A(prec) * (2 * mp.mpf(s)) ** (-mp.mpf(1) / 4)
            return v

    def to_json(self) -> dict:
        return series_json(self.body, self.regime, NORMALIZATION)


def series_json(x: LogPolySeries, regime, normalization: str = "plain") -> dict:
    return {
        "regime": Regime.parse(regime).value if regime is not None else None,
        "normalization": normalization,
        "L_def": L_DEF,
        "max_order": x.max_order,
        "terms": x.to_records(),
    }


def _integral(x: LogPolySeries) -> LogPolySeries:
    if x.min_order is not None and x.min_order < 0:
        raise StructuralError("integrand has a pole at s = 0")
    return x.antideriv()


def _s():
    return s_series()


def _s2_d1(f: LogPolySeries) -> LogPolySeries:
    """Body of ``s**2 d/ds`` applied to ``s**(-1/4) f``."""
    s = _s()
    return s * s * f.diff() - Fraction(1, 4) * s * f


def _s3_d1(f: LogPolySeries) -> LogPolySeries:
    return _s() * _s2_d1(f)


def _s4_d2(f: LogPolySeries) -> LogPolySeries:
    s = _s()
    s2 = s * s
    df = f.diff()
    return s2 * s2 * df.diff() - Fraction(1, 2) * s2 * s * df + Fraction(5, 16) * s2 * f


# -- the bodies --------------------------------------------------------------

def g0_series(sigma0: LogPolySeries) -> NormalizedGSeries:
    """``exp(int_0^s (sigma0 + 1/4)/x dx)``."""
    shifted = sigma0 + Fraction(1, 4)
    if shifted.min_order is not None and shifted.min_order < 1:
        raise StructuralError("sigma0 + 1/4 must vanish at s = 0")
    body = series_exp(_integral(shifted.shift(-1)))
    return NormalizedGSeries(body.with_regime(sigma0.regime), sigma0.regime, "G0")


def g1_series(sigma0: LogPolySeries, g0: NormalizedGSeries,
              sigma1: Optional[LogPolySeries] = None) -> NormalizedGSeries:
    regime = g0.regime
    if sigma1 is None:
        sigma1 = sigma1_series(sigma0)
    braces = _integral(sigma1.shift(-1) + 2 * sigma0)
    if regime is Regime.HIGH:
        braces = braces + Fraction(1, 2) * _s()
    return NormalizedGSeries((g0.body * braces).with_regime(regime), regime, "G1")


def g2_series(sigma0: LogPolySeries, sigma2: LogPolySeries,
              g0: NormalizedGSeries) -> NormalizedGSeries:
    regime = g0.regime
    s = _s()
    ds0 = sigma0.diff()
    if regime is Regime.HIGH:
        lin, dcoef, const = 3, Fraction(5, 2), Fraction(5, 8) * s * s
    else:
        lin, dcoef, const = 2, Fraction(2), 0
    integrand = (sigma2.shift(-1) + lin * s * sigma0 + s * sigma0 * sigma0
                 + dcoef * s * s * ds0 + s * s * sigma0 * ds0)
    braces = Fraction(-1, 64) + const + _integral(integrand)
    return NormalizedGSeries((g0.body * braces).with_regime(regime), regime, "G2")


def g2corr_series(g0: NormalizedGSeries, g1: NormalizedGSeries, g2: NormalizedGSeries,
                  route: str = "case") -> NormalizedGSeries:
    """Body of ``G^(2)``.

    ``route="case"`` subtracts the regime-specific combination of ``G_0``
    derivatives; ``route="identities"`` uses ``G_1`` as well and is the same
    for both regimes.  :func:`g2corr_both_routes` checks that they coincide.
    """
    regime = g0.regime
    f0 = g0.body
    if route == "case":
        if regime is Regime.HIGH:
            sub = (Fraction(1, 2) * _s4_d2(f0) + Fraction(11, 6) * _s3_d1(f0)
                   + Fraction(5, 8) * _s() * _s() * f0)
        else:
            sub = Fraction(1, 2) * _s4_d2(f0) + Fraction(4, 3) * _s3_d1(f0)
        body = g2.body - sub
    elif route == "identities":
        f1 = g1.body
        body = (g2.body - _s2_d1(f1) - Fraction(1, 4) * _s() * f1
                + Fraction(1, 2) * _s4_d2(f0) + Fraction(11, 12) * _s3_d1(f0))
    else:
        raise ValueError(f"unknown route {route!r}")
    return NormalizedGSeries(body.with_regime(regime), regime, "G2corr")


def g2corr_both_routes(g0, g1, g2, order: Optional[int] = None) -> NormalizedGSeries:
    a = g2corr_series(g0, g1, g2, "case")
    b = g2corr_series(g0, g1, g2, "identities")
    upto = min(a.max_order, b.max_order) if order is None else order
    if not a.body.equal_through(b.body, upto):
        raise StructuralError("the two constructions of G^(2) disagree")
    return a


# -- cached pipeline ---------------------------------------------------------

@dataclass(frozen=True)
class SeriesFamily:
    """All exact small-``s`` series for one regime, valid through ``order``."""
    order: int
    regime: Regime
    sigma0: LogPolySeries
    sigma1: LogPolySeries
    sigma2: LogPolySeries
    g0: NormalizedGSeries
    g1: NormalizedGSeries
    g2: NormalizedGSeries
    g2corr: NormalizedGSeries

    def get(self, which: str):
        return {"sigma0": self.sigma0, "sigma1": self.sigma1, "sigma2": self.sigma2,
                "g0": self.g0, "g1": self.g1, "g2": self.g2, "g2corr": self.g2corr}[which]


@lru_cache(maxsize=16)
def _family(order: int, regime: Regime) -> SeriesFamily:
    sigma0 = solve_sigma0(order + 4, regime)
    sigma2 = solve_sigma2(order, regime, sigma0)
    sigma1 = sigma1_series(sigma0)
    g0 = g0_series(sigma0)
    g1 = g1_series(sigma0, g0, sigma1)
    g2 = g2_series(sigma0, sigma2, g0)
    g2c = g2corr_both_routes(g0, g1, g2)
    cut = lambda x: x.truncate(order)
    ncut = lambda g: NormalizedGSeries(cut(g.body), g.regime, g.name)
    fam = SeriesFamily(order, regime, cut(sigma0), cut(sigma1), cut(sigma2),
                       ncut(g0), ncut(g1), ncut(g2), ncut(g2c))
    for x in (fam.sigma0, fam.sigma1, fam.sigma2, fam.g0.body, fam.g1.body,
              fam.g2.body, fam.g2corr.body):
        if x.max_order < order:
            raise StructuralError(f"series only valid to s^{x.max_order} < {order}")
    return fam


def series_family(order: int, regime) -> SeriesFamily:
    return _family(int(order), Regime.parse(regime))


def evaluate_series(x, s, prec: int = DEFAULT_PREC, normalized: bool = True):
    """Numeric value of a plain or normalized series at ``s > 0``."""
    if not s > 0:
        raise ValueError("s must be positive")
    if isinstance(x, NormalizedGSeries):
        return x.evaluate(s, prec, normalized)
    with mp.workdps(prec + GUARD_DIGITS):
        return x.evaluate(s)
