import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from diagising.lattice_core import DomainError, Regime, coupling_from_t, scaling_embed
from diagising.series.logpoly import LogPolySeries
from diagising.series.solvers import (
    s_series, sigma0_jet, sigma1_series, solve_sigma0, solve_sigma2,
)
from diagising.sigma_system import (
    SigmaValue, linear_ode_residual, ode_coefficients, p1_p0_relation_check, pv_sigma0_residual,
    pvi_residual, sigma1_from_identity, sigma1_jet, sigma_from_correlation,
)
from diagising.toeplitz import log_deriv_correlation_t


def numeric_jet(series, s, k=4):
    out, x = [], series
    for _ in range(k):
        out.append(x.evaluate(s))
        x = x.diff()
    return out


class TestFiniteN:
    @pytest.mark.parametrize("regime", ["high", "low"])
    def test_pvi_residual(self, regime):
        sv = sigma_from_correlation(8, coupling_from_t(mp.mpf("0.5"), regime))
        assert pvi_residual(sv) < mp.mpf(10) ** -25

    def test_perturbation_is_detected(self):
        sv = sigma_from_correlation(8, coupling_from_t(mp.mpf("0.5"), "low"))
        bad = SigmaValue(sv.N, sv.t, sv.regime, sv.sigma + mp.mpf(10) ** -5, sv.dsigma, sv.d2sigma)
        assert pvi_residual(bad) > mp.mpf(10) ** -8

    def test_boundary_high(self):
        for N in (2, 5):
            sv = sigma_from_correlation(N, coupling_from_t(mp.mpf("1e-6"), "high"))
            assert abs(sv.sigma + mp.mpf(N) / 2 + mp.mpf(1) / 4) < mp.mpf(10) ** -4

    def test_boundary_low(self):
        t = mp.mpf("1e-3")
        sv = sigma_from_correlation(4, coupling_from_t(t, "low"))
        c = mp.rf(mp.mpf(1) / 2, 4) * mp.rf(mp.mpf(3) / 2, 4) / (4 * mp.factorial(5) * mp.factorial(4))
        assert abs(sv.sigma / (-c * t ** 5) - 1) < mp.mpf(10) ** -2

    def test_finite_low_t_value(self):
        sv = sigma_from_correlation(4, coupling_from_t(mp.mpf("0.9"), "low"))
        assert mp.isfinite(sv.sigma) and mp.isfinite(sv.d2sigma)
        with pytest.raises(DomainError):
            sigma_from_correlation(4, coupling_from_t(mp.mpf("1e-40"), "low"))


class TestScaledEquations:
    def test_constant_vector(self):
        assert abs(pv_sigma0_residual(mp.mpf(-1) / 4, 0, 0, mp.mpf("0.3")) - mp.mpf(1) / 4
                   / (1 + mp.mpf(1) / 4)) < mp.mpf(10) ** -50

    def test_series_sigma0_residual(self, sigma0_deep):
        s = mp.mpf("0.1")
        for r in ("high", "low"):
            # order 30 stops near 1e-19 at s = 0.1, order 40 reaches 1e-26
            y, dy, d2y, _ = numeric_jet(sigma0_deep[r].truncate(40), s)
            assert pv_sigma0_residual(y, dy, d2y, s) < mp.mpf(10) ** -25

    def test_truncation_order(self):
        # the residual of the truncated series falls as the order grows
        s = mp.mpf("0.2")
        res = []
        for order in (6, 10, 14):
            y, dy, d2y, _ = numeric_jet(solve_sigma0(order, "high"), s)
            res.append(pv_sigma0_residual(y, dy, d2y, s))
        assert res[0] > 10 * res[1] > 100 * res[2]

    def test_ode_coefficients_simple(self):
        co = ode_coefficients((mp.mpf(-1) / 4, mp.mpf(1), mp.mpf(0)), mp.mpf(2))
        assert co.A == 0
        # as s -> 0: s sigma0' - sigma0 -> 1/4 while sigma0' ~ +-(1 + L/2) grows
        s = mp.mpf("1e-12")
        y, dy, d2y = numeric_jet(solve_sigma0(12, "high"), s, 3)
        co = ode_coefficients((y, dy, d2y), s)
        L = mp.log(s / 8) + mp.euler
        assert abs(co.C + dy ** 2 - mp.mpf(1) / 2) < 1e-8
        assert abs(dy - (1 + L / 2)) < 1e-8

    def test_formal_and_numeric_D1(self, sigma0_deep):
        s = mp.mpf("0.1")
        sig0 = sigma0_deep["high"].truncate(50)
        formal = ode_coefficients(sigma0_jet(sig0), s_series()).D1.evaluate(s)
        numeric = ode_coefficients(numeric_jet(sig0, s, 3), s).D1
        assert abs(formal - numeric) < mp.mpf(10) ** -25

    @pytest.mark.parametrize("regime", ["high", "low"])
    @pytest.mark.parametrize("s", ["0.1", "0.2", "0.3"])
    def test_sigma1_linear_equation(self, regime, s, sigma0_deep):
        s = mp.mpf(s)
        jet = numeric_jet(sigma0_deep[regime], s)
        co = ode_coefficients(jet, s)
        assert linear_ode_residual(1, sigma1_jet(jet, s), co) < mp.mpf(10) ** -25

    @pytest.mark.parametrize("regime", ["high", "low"])
    def test_sigma2_linear_equation(self, regime, sigma0_deep):
        s = mp.mpf("0.1")
        sig0 = sigma0_deep[regime].truncate(48)
        co = ode_coefficients(numeric_jet(sig0, s), s)
        y2 = numeric_jet(solve_sigma2(44, regime, sig0), s, 3)
        assert linear_ode_residual(2, y2, co) < mp.mpf(10) ** -25

    def test_zero_function_residual(self):
        s = mp.mpf("0.1")
        co = ode_coefficients(numeric_jet(solve_sigma0(30, "low"), s), s)
        r = linear_ode_residual(1, (0, 0, 0), co)
        assert abs(r - abs(co.D1) / (1 + abs(co.D1))) < mp.mpf(10) ** -40
        with pytest.raises(DomainError):
            linear_ode_residual(3, (0, 0, 0), co)

    def test_sigma1_identity(self):
        assert sigma1_from_identity(mp.mpf(3), 0, mp.mpf(2)) == -6
        sig1 = sigma1_series(solve_sigma0(8, "high"))
        assert sig1.row(1) == [Fraction(1, 4)] and sig1.row(2) == [Fraction(1, 2)]


class TestP1P0:
    def test_on_solution_and_zero(self):
        assert p1_p0_relation_check(solve_sigma0(30, "low"))
        assert p1_p0_relation_check(LogPolySeries({}, 10))

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32))
    def test_random_series(self, seed):
        rnd = random.Random(seed)
        coeffs = {(m, n): Fraction(rnd.randint(-9, 9), rnd.randint(1, 9))
                  for n in range(11) for m in range(n + 1) if rnd.random() < 0.6}
        assert p1_p0_relation_check(LogPolySeries(coeffs, 10))


@pytest.mark.slow
@pytest.mark.parametrize("regime", ["high", "low"])
def test_scaled_expansion_remainder(regime, sigma0_deep):
    """sigma(t; N) - sigma0 - sigma1/N - sigma2/N^2 = O(N^-3) at s = 0.5."""
    s = mp.mpf("0.5")
    sig0 = sigma0_deep[regime]  # order 30 would leave a 2e-8 offset at s = 0.5
    sig1 = sigma1_series(sig0)
    sig2 = solve_sigma2(44, regime, sig0.truncate(48))
    r = Regime.parse(regime)
    Ns = (64, 128, 256)
    rem = []
    with mp.workdps(40):
        for N in Ns:
            p = scaling_embed(s, N, r, 30)
            t = p.t
            sigma = t * (t - 1) * log_deriv_correlation_t(N, p, 30) - (t / 4 if r is Regime.LOW else mp.mpf(1) / 4)
            rem.append(sigma - sig0.evaluate(s) - sig1.evaluate(s) / N - sig2.evaluate(s) / N ** 2)
        # least-squares slope of log|rem| against log N
        xs = [mp.log(N) for N in Ns]
        ys = [mp.log(abs(v)) for v in rem]
        xm, ym = sum(xs) / 3, sum(ys) / 3
        slope = sum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / sum((x - xm) ** 2 for x in xs)
    assert -slope >= 2.7
