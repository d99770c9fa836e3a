import warnings
from fractions import Fraction as F

import mpmath as mp
import pytest

from diagising.asymptotics import (
    K0, K1, S, AsymptoteRequest, BesselPoly, PerkAuYangParams, RangeWarning, bessel_asymptote,
    bessel_forms, crossover_gap, form_factor_finite, form_factor_scaled, g1_from_g, g2corr_asymptote,
    g2corr_from_gs, identity_checks, perk_auyang, perk_auyang_exponent, perk_auyang_scaled_fit,
    polyfit_inverse_N, scaled_asymptote,
)
from diagising.golden import perk_auyang_table
from diagising.lattice_core import DomainError, Regime, bessel_k
from diagising.toeplitz import small_t_reference


def numeric(poly, s):
    return poly.evaluate(s)


class TestBesselRing:
    def test_derivative_rules(self):
        assert K0.diff() == -1 * K1
        assert K1.diff() == -1 * K0 - BesselPoly.mono(a=-1, c=1)

    @pytest.mark.parametrize("regime", ["high", "low"])
    def test_identities(self, regime):
        assert all(identity_checks(regime).values())

    @pytest.mark.parametrize("regime", ["high", "low"])
    @pytest.mark.parametrize("s", ["1", "2", "5", "10"])
    def test_symbolic_equals_numeric(self, regime, s):
        s = mp.mpf(s)
        forms = bessel_forms(regime)
        for which in ("g0", "g1", "g2", "g2corr"):
            a = forms[which].evaluate(s)
            b = bessel_asymptote(which, regime, s)
            assert abs(a - b) < mp.mpf(10) ** -50 * max(1, abs(b))

    def test_numeric_transport(self):
        # G1 from d/ds of the numeric G0 form, against the closed G1 form
        s = mp.mpf(2)
        f = bessel_forms("high")
        lhs = g1_from_g(f["g0"], "high").evaluate(s)
        assert abs(lhs - bessel_asymptote("g1", "high", s)) < mp.mpf(10) ** -50


class TestClosedForms:
    def test_low_g0_tends_to_one(self):
        assert abs(bessel_asymptote("g0", "low", 40) - 1) < mp.mpf(10) ** -30
        assert abs(bessel_asymptote("g0", "low", 5) - 1) > mp.mpf(10) ** -9

    def test_printed_examples(self):
        s = mp.mpf(5)
        k0, k1 = bessel_k(0, s), bessel_k(1, s)
        want = -s / (24 * mp.pi ** 2) * (s * (32 * s ** 2 - 1) * (k0 ** 2 - k1 ** 2) + (20 * s ** 2 + 1) * k1 * k0)
        assert abs(bessel_asymptote("g2", "low", s) - want) < mp.mpf(10) ** -60
        assert abs(g2corr_asymptote("high", s) + s / (24 * mp.pi) * (2 * s * k0 + k1)) < mp.mpf(10) ** -60
        assert abs(bessel_asymptote("g0", "high", s) - k0 / mp.pi) < mp.mpf(10) ** -60

    def test_g2corr_consistency_at_3(self):
        f = bessel_forms("low")
        via = g2corr_from_gs(f["g0"], f["g1"], f["g2"]).evaluate(mp.mpf(3))
        assert abs(via - g2corr_asymptote("low", 3)) < mp.mpf(10) ** -50

    def test_window_warning(self):
        with pytest.warns(RangeWarning):
            bessel_asymptote("g2", "high", mp.mpf("0.1"))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            bessel_asymptote("g2", "low", mp.mpf("0.2"))
        # log divergence as s -> 0 is a value, not an error
        assert bessel_asymptote("g0", "high", mp.mpf("1e-20")) > 10

    def test_errors(self):
        with pytest.raises(DomainError):
            AsymptoteRequest("g7", Regime.HIGH, 1)
        with pytest.raises(DomainError):
            bessel_asymptote("g0", "high", 0)

    def test_scaled(self):
        s = mp.mpf(3)
        assert abs(scaled_asymptote("g1", "low", s) - (2 * s) ** 0.25 * bessel_asymptote("g1", "low", s)) < 1e-60


class TestFormFactors:
    def test_scaled_p1(self):
        s = mp.mpf(2)
        assert abs(form_factor_scaled(1, s) - bessel_k(0, s) / mp.pi) < mp.mpf(10) ** -12

    def test_scaled_p2_positive_and_smaller(self):
        s = mp.mpf(3)
        v1, v2 = form_factor_scaled(1, s, 20), form_factor_scaled(2, s, 20)
        assert v2 > 0 and v1 > 0
        assert v2 / v1 < mp.exp(-s)
        assert abs(v2 - (bessel_asymptote("g0", "low", s) - 1)) < mp.mpf(10) ** -12

    @pytest.mark.parametrize("N", [1, 3])
    def test_finite_small_t(self, N):
        t = mp.mpf("1e-3")
        r1 = (1 - t) ** (mp.mpf(1) / 4) * form_factor_finite(1, N, t) / small_t_reference(N, t, "high", 30)
        assert abs(r1 - 1) <= 2 * t
        c = mp.rf(mp.mpf(1) / 2, N) * mp.rf(mp.mpf(3) / 2, N) / (4 * mp.factorial(N + 1) ** 2)
        assert abs(form_factor_finite(2, N, t) / (c * t ** (N + 1)) - 1) <= 2 * t

    def test_vanish_as_t_goes_to_zero(self):
        t = mp.mpf("1e-12")
        assert form_factor_finite(1, 4, t) < 1e-20 and form_factor_finite(2, 4, t) < 1e-50

    def test_errors(self):
        with pytest.raises(DomainError):
            form_factor_scaled(3, 1)
        with pytest.raises(DomainError):
            form_factor_finite(1, 3, 1)


class TestPerkAuYang:
    def test_first_terms(self):
        assert perk_auyang_table("high")[1] == {0: F(-1, 8)}
        assert perk_auyang_table("low")[1] == {0: F(-7, 4)}
        p = PerkAuYangParams(1000, mp.mpf("0.9"), 1, Regime.HIGH)
        assert abs(perk_auyang_exponent(p) + p.x / (8 * 1000)) < mp.mpf(10) ** -60
        q = PerkAuYangParams(1000, mp.mpf("0.9"), 1, Regime.LOW)
        assert abs(perk_auyang_exponent(q) + 7 * q.x / (4 * 1000)) < mp.mpf(10) ** -60

    def test_degree_structure(self):
        # degree of x never exceeds the power of 1/N
        for regime in ("high", "low"):
            for j, row in perk_auyang_table(regime).items():
                assert all(j - 2 * k <= j for k in row) and len(row) <= j // 2 + 1

    def test_validity_guard(self):
        with pytest.warns(RangeWarning):
            perk_auyang(PerkAuYangParams(20, mp.mpf("0.99"), 10, Regime.HIGH))
        with pytest.raises(DomainError):
            PerkAuYangParams(20, mp.mpf("0.5"), 11)

    def test_matches_lattice_determinant(self):
        # m = 10 truncation: the error should fall like N**-11 at fixed t
        from diagising.toeplitz import correlation_at_t
        t = mp.mpf("0.8")
        for regime in ("high", "low"):
            errs = []
            for N in (120, 240):
                exact = correlation_at_t(N, t, regime, 40)
                errs.append(abs(perk_auyang(PerkAuYangParams(N, t, 10, Regime.parse(regime))) / exact - 1))
            assert errs[1] < 1e-12 and errs[1] < errs[0] / 2 ** 9

    def test_large_N_fit(self):
        """Supplementary to the s = 10 criterion: large N reaches the truncation floor."""
        s = 10
        Ns = [20000 * 2 ** k for k in range(7)]
        for regime in ("high", "low"):
            r = Regime.parse(regime)
            vals = [mp.mpf(N) ** 0.25 * perk_auyang(PerkAuYangParams(N, 1 - mp.mpf(2 * s) / N, 10, r)) for N in Ns]
            c = polyfit_inverse_N(Ns, vals, 6)
            for j, which in enumerate(("g0", "g1", "g2")):
                assert abs(c[j] / scaled_asymptote(which, regime, s) - 1) < 1e-4

    def test_polyfit_exact(self):
        Ns = [10, 20, 40, 80]
        vals = [3 + mp.mpf(2) / N - mp.mpf(5) / N ** 2 for N in Ns]
        c = polyfit_inverse_N(Ns, vals, 3)
        assert all(abs(a - b) < 1e-50 for a, b in zip(c, (3, 2, -5)))
        with pytest.raises(DomainError):
            polyfit_inverse_N([10, 10, 20], vals[:3], 3)


def test_crossover_gap_is_finite():
    g = crossover_gap("high", mp.mpf("11.4"))
    assert mp.isfinite(g) and g > 0
