"""The diagonal correlation ``C_{N,N}`` as an ``N x N`` Toeplitz determinant."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp

from .lattice_core import (
    DEFAULT_PREC, GUARD_DIGITS, CouplingPoint, DomainError, PrecisionError, Regime,
    constant_A, coupling_from_k, coupling_from_t, critical_fourier_coeff,
    d_fourier_coeff_dt, fourier_coeff, to_mpf,
)


@dataclass(frozen=True)
class CorrelationValue:
    N: int
    point: Optional[CouplingPoint]  # None at the critical point
    value: mp.mpf
    logderiv_t: Optional[mp.mpf] = None


def _as_point(point_or_k, prec) -> CouplingPoint:
    if isinstance(point_or_k, CouplingPoint):
        return point_or_k
    return coupling_from_k(point_or_k, prec)


def toeplitz_symbols(N: int, point: CouplingPoint, prec: int = DEFAULT_PREC,
                     derivative: bool = False) -> Dict[int, mp.mpf]:
    """``{n: a_n}`` (or ``{n: da_n/dt}``) for ``|n| < N``."""
    f = d_fourier_coeff_dt if derivative else fourier_coeff
    return {n: f(n, point, prec) for n in range(-(N - 1), N)}


def toeplitz_matrix(symbols: Dict[int, mp.mpf], N: int) -> List[List[mp.mpf]]:
    M = [[symbols[i - j] for j in range(N)] for i in range(N)]
    # shift structure: entry (i, j) depends only on i - j
    assert all(M[i][j] is M[i + 1][j + 1] for i in range(N - 1) for j in range(N - 1))
    return M


class LU:
    """Dense LU factorisation with partial pivoting, ``P A = L U``."""

    def __init__(self, A: Sequence[Sequence[mp.mpf]]):
        n = len(A)
        a = [list(row) for row in A]
        perm = list(range(n))
        sign = 1
        for k in range(n):
            p = max(range(k, n), key=lambda i: abs(a[i][k]))
            if a[p][k] == 0:
                raise PrecisionError("matrix is singular to working precision")
            if p != k:
                a[k], a[p] = a[p], a[k]
                perm[k], perm[p] = perm[p], perm[k]
                sign = -sign
            pivot = a[k][k]
            row_k = a[k]
            for i in range(k + 1, n):
                row_i = a[i]
                f = row_i[k] / pivot
                row_i[k] = f
                if f:
                    for j in range(k + 1, n):
                        row_i[j] -= f * row_k[j]
        self.n = n
        self.lu = a
        self.perm = perm
        self.sign = sign

    def det(self) -> mp.mpf:
        d = mp.mpf(self.sign)
        for k in range(self.n):
            d *= self.lu[k][k]
        return d

    def solve(self, b: Sequence[mp.mpf]) -> List[mp.mpf]:
        n, a = self.n, self.lu
        y = [b[self.perm[i]] for i in range(n)]
        for i in range(n):
            row = a[i]
            acc = y[i]
            for j in range(i):
                acc -= row[j] * y[j]
            y[i] = acc
        for i in range(n - 1, -1, -1):
            row = a[i]
            acc = y[i]
            for j in range(i + 1, n):
                acc -= row[j] * y[j]
            y[i] = acc / row[i]
        return y


def determinant(A: Sequence[Sequence[mp.mpf]]) -> mp.mpf:
    return LU(A).det()


def correlation(N: int, point_or_k, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``C_{N,N}(t) = det[a_{i-j}]`` off criticality."""
    if N < 1:
        raise DomainError("N must be at least 1")
    point = _as_point(point_or_k, prec)
    with mp.workdps(prec + GUARD_DIGITS):
        return determinant(toeplitz_matrix(toeplitz_symbols(N, point, prec), N))


def correlation_at_t(N: int, t, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    return correlation(N, coupling_from_t(t, regime, prec), prec)


def critical_path_correlation(N: int, prec: int = DEFAULT_PREC) -> mp.mpf:
    """The determinant itself at ``k = 1`` with ``a_n = 1/(pi (n + 1/2))``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    with mp.workdps(prec + GUARD_DIGITS):
        sym = {n: critical_fourier_coeff(n, prec) for n in range(-(N - 1), N)}
        return determinant(toeplitz_matrix(sym, N))


def critical_product(N: int) -> Fraction:
    """The rational factor ``prod_{p<N} (1 - 1/(4p**2))**(p - N)``."""
    r = Fraction(1)
    for p in range(1, N):
        r *= Fraction(4 * p * p - 1, 4 * p * p) ** (p - N)
    return r


def critical_correlation(N: int, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Closed form ``(2/pi)**N prod_{p=1}^{N-1} (1 - 1/(4p**2))**(p-N)``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    with mp.workdps(prec + GUARD_DIGITS):
        return (2 / mp.pi) ** N * to_mpf(critical_product(N))


def critical_asymptote(N: int, order: int = 2, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``A N**(-1/4) (1 - 1/(64 N**2))`` truncated at ``order`` in ``1/N``."""
    if order not in (0, 2):
        raise DomainError("order must be 0 or 2")
    with mp.workdps(prec + GUARD_DIGITS):
        value = constant_A(prec) * mp.mpf(N) ** (-mp.mpf(1) / 4)
        if order == 2:
            value *= 1 - mp.mpf(1) / (64 * N * N)
        return value


def correlation_with_logderiv(N: int, point: CouplingPoint,
                              prec: int = DEFAULT_PREC) -> CorrelationValue:
    """Determinant and ``d log C / dt`` from Jacobi's formula ``tr(T^-1 dT/dt)``."""
    if N < 1:
        raise DomainError("N must be at least 1")
    with mp.workdps(prec + GUARD_DIGITS):
        sym = toeplitz_symbols(N, point, prec)
        dsym = toeplitz_symbols(N, point, prec, derivative=True)
        lu = LU(toeplitz_matrix(sym, N))
        trace = mp.mpf(0)
        for j in range(N):
            # column j of dT: dT[i][j] = da_{i-j}
            x = lu.solve([dsym[i - j] for i in range(N)])
            trace += x[j]
        return CorrelationValue(N, point, lu.det(), trace)


def log_deriv_correlation_t(N: int, point: CouplingPoint, prec: int = DEFAULT_PREC) -> mp.mpf:
    return correlation_with_logderiv(N, point, prec).logderiv_t


def small_t_reference(N: int, t, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    """Leading small-``t`` behaviour of ``C_{N,N}(t)`` on either side of criticality."""
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        t = to_mpf(t)
        if regime is Regime.LOW:
            half = mp.mpf(1) / 2
            c = mp.rf(half, N) * mp.rf(3 * half, N) / (4 * mp.factorial(N + 1) ** 2)
            return (1 - t) ** (mp.mpf(1) / 4) + c * t ** (N + 1)
        return mp.gamma(N + mp.mpf(1) / 2) / (mp.sqrt(mp.pi) * mp.gamma(N + 1)) * t ** (mp.mpf(N) / 2)
