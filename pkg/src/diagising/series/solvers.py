"""Order-by-order exact solution of the scaled sigma equations.

Both unknown series are sought as ``sum_n s**n p_n(L)`` with ``deg p_n <= n``.
Inserting the ansatz, the unknown ``p_n`` first appears (linearly) in the
coefficient of ``s**(n-1)`` of the residual.  At each order we therefore

1. evaluate that residual coefficient with ``p_n = 0``, as a polynomial in L;
2. build the linear map ``p_n -> (change in that coefficient)``;
3. solve the over-determined exact system and require it to be consistent.

Any inconsistency raises :class:`SolverError`: it would mean the ansatz or the
boundary data are wrong, and is never patched over.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from ..lattice_core import Regime
from ..sigma_system import ode_coefficients
from .logpoly import (
    LogPolySeries, StructuralError, poly_add, poly_dL, poly_mul, poly_scale, poly_trim,
)

Poly = List[Fraction]
EXACT = 10 ** 9  # max_order of series that are exact at every order (monomials)


class SolverError(StructuralError):
    """The order-by-order linear system was singular or inconsistent."""


def s_series() -> LogPolySeries:
    return LogPolySeries.monomial(0, 1, 1, max_order=EXACT)


# -- exact linear algebra ----------------------------------------------------

def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> List[Fraction]:
    """Unique solution of an over-determined consistent system, by Gauss-Jordan."""
    n_unknowns = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n_unknowns):
        piv = next((i for i in range(r, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            raise SolverError(f"singular system: unknown {col} is not determined")
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][-1] != 0:
            raise SolverError("inconsistent system: the ansatz admits no solution at this order")
    return [aug[i][-1] for i in range(n_unknowns)]


def _solve_order(base: Poly, linear_images: List[Poly]) -> List[Fraction]:
    """Find x with ``base + sum_j x_j * linear_images[j] == 0`` as polynomials in L."""
    degree = max([len(base)] + [len(p) for p in linear_images]) or 1
    rows = [[(p[d] if d < len(p) else Fraction(0)) for p in linear_images] for d in range(degree)]
    rhs = [-(base[d] if d < len(base) else Fraction(0)) for d in range(degree)]
    return solve_exact(rows, rhs)


def _conv(x: Dict[int, Poly], y: Dict[int, Poly], r: int, lo_x: int = 0, lo_y: int = 0) -> Poly:
    """Coefficient of ``s**r`` in the product of two row-dicts."""
    out: Poly = []
    for i in range(lo_x, r - lo_y + 1):
        p, q = x.get(i), y.get(r - i)
        if p and q:
            out = poly_add(out, poly_mul(p, q))
    return out


def _d_row(p_next: Poly, n_next: int) -> Poly:
    """Row ``n_next - 1`` of ``d/ds`` applied to ``s**n_next * p_next(L)``."""
    return poly_trim(poly_add(poly_scale(p_next, Fraction(n_next)), poly_dL(p_next)))


# -- sigma_0 -----------------------------------------------------------------

@dataclass
class Sigma0Solver:
    """Incremental solver of ``(s y'')**2 = 4(s y'-y)**2 - 4 y'**2 (s y'-y) + y'**2``.

    Rows kept per order: ``a`` (y), ``b`` (y'), ``sc`` (s y''), ``u`` (s y' - y)
    and ``bb`` (y'**2).
    """
    regime: Regime
    c01: Optional[Fraction] = None
    a: Dict[int, Poly] = field(default_factory=dict)
    b: Dict[int, Poly] = field(default_factory=dict)
    sc: Dict[int, Poly] = field(default_factory=dict)
    u: Dict[int, Poly] = field(default_factory=dict)
    bb: Dict[int, Poly] = field(default_factory=dict)

    def __post_init__(self):
        sign = self.regime.sign
        c11 = Fraction(sign, 2)
        c01 = Fraction(sign, 2) if self.c01 is None else Fraction(self.c01)
        self.a[0] = [Fraction(-1, 4)]
        self.a[1] = [c01, c11]
        self.u[0] = [Fraction(1, 4)]
        self.n = 1
        self._refresh(0)
        if poly_trim(self.residual(0)):
            raise SolverError("boundary data do not satisfy the equation at order s^0")

    def _refresh(self, k: int) -> None:
        """Recompute rows of order ``k`` of b, sc, bb and order ``k+1`` of u."""
        self.b[k] = _d_row(self.a.get(k + 1, []), k + 1)
        self.sc[k] = poly_add(poly_scale(self.b[k], Fraction(k)), poly_dL(self.b[k]))
        self.bb[k] = _conv(self.b, self.b, k)
        self.u[k + 1] = poly_add(self.b[k], poly_scale(self.a.get(k + 1, []), Fraction(-1)))

    def residual(self, r: int) -> Poly:
        """Row ``r`` of ``(s y'')**2 - 4u**2 + 4 y'**2 u - y'**2``."""
        out = _conv(self.sc, self.sc, r)
        out = poly_add(out, poly_scale(_conv(self.u, self.u, r), Fraction(-4)))
        out = poly_add(out, poly_scale(_conv(self.bb, self.u, r), Fraction(4)))
        return poly_add(out, poly_scale(self.bb.get(r, []), Fraction(-1)))

    def step(self) -> None:
        n = self.n + 1
        r = n - 1
        self.a[n] = []
        self._refresh(r)
        base = self.residual(r)
        images = []
        sc0, b0, u0 = self.sc[0], self.b[0], self.u[0]
        for j in range(n + 1):
            q = [Fraction(0)] * j + [Fraction(1)]
            db = _d_row(q, n)
            dsc = poly_add(poly_scale(db, Fraction(r)), poly_dL(db))
            dbb = poly_scale(poly_mul(b0, db), Fraction(2))
            img = poly_scale(poly_mul(sc0, dsc), Fraction(2))
            img = poly_add(img, poly_scale(poly_mul(dbb, u0), Fraction(4)))
            img = poly_add(img, poly_scale(dbb, Fraction(-1)))
            images.append(img)
        x = _solve_order(base, images)
        self.a[n] = poly_trim(list(x))
        self._refresh(r)
        if poly_trim(self.residual(r)):
            raise SolverError(f"order s^{r} residual does not vanish after solving")
        self.n = n

    def series(self) -> LogPolySeries:
        return LogPolySeries.from_rows(self.a, self.n, self.regime)


def solve_sigma0(order: int, regime, c01: Optional[Fraction] = None) -> LogPolySeries:
    """Series solution ``sigma_0`` through ``s**order``.

    Seeds ``c00 = -1/4``, ``c11 = +-1/2`` and ``c01 = +-1/2`` (overridable via
    ``c01``); the equation does not fix ``c01`` on its own, see
    :func:`c01_is_free`.
    """
    regime = Regime.parse(regime)
    if order < 2:
        raise StructuralError("order must be at least 2")
    solver = Sigma0Solver(regime, c01)
    while solver.n < order:
        solver.step()
    return solver.series()


def c01_is_free(regime, order: int = 8) -> bool:
    """True when the recurrence also closes for a shifted ``c01``.

    Then ``c01`` is a genuine free parameter (a shift of the constant inside
    ``L``) and must be supplied from boundary data rather than the equation.
    """
    regime = Regime.parse(regime)
    try:
        solve_sigma0(order, regime, c01=Fraction(regime.sign, 2) + 1)
    except SolverError:
        return False
    return True


# -- sigma_2 -----------------------------------------------------------------

def _rows_of(x: LogPolySeries) -> Dict[int, Poly]:
    return {n: x.row(n) for n in x.orders()}


def sigma0_jet(sigma0: LogPolySeries):
    d1 = sigma0.diff()
    d2 = d1.diff()
    d3 = d2.diff()
    return sigma0, d1, d2, d3


def solve_linear_sigma(which: int, order: int, regime,
                       sigma0: Optional[LogPolySeries] = None) -> LogPolySeries:
    """Series solution of ``A y'' + B y' + C y = D_which`` (``which`` in {1, 2}).

    Boundary data: ``k00 = 0`` and ``k01 = 1/4`` for ``which = 1``, ``-+1/24``
    for ``which = 2``; ``k11`` is fixed by the order ``s**0`` equation.
    """
    regime = Regime.parse(regime)
    if which not in (1, 2):
        raise StructuralError("which must be 1 or 2")
    if order < 2:
        raise StructuralError("order must be at least 2")
    if sigma0 is None:
        sigma0 = solve_sigma0(order + 4, regime)
    co = ode_coefficients(sigma0_jet(sigma0), s_series())
    D_series = co.D1 if which == 1 else co.D2
    if D_series.max_order < order - 1:
        raise StructuralError(f"sigma0 to order {sigma0.max_order} is too short for order {order}")
    A, B, C, D = (_rows_of(co.A), _rows_of(co.B), _rows_of(co.C), _rows_of(D_series))
    # A starts at s**1; B and C are regular at s = 0 (B even vanishes there)
    if co.A.min_order != 1 or min(co.B.min_order, co.C.min_order) < 0:
        raise SolverError("unexpected leading orders of the linear operator")
    lo_A, lo_B, lo_C = 1, 0, 0
    k01 = Fraction(1, 4) if which == 1 else Fraction(-regime.sign, 24)

    q: Dict[int, Poly] = {0: [], 1: [k01]}
    d1: Dict[int, Poly] = {}
    d2: Dict[int, Poly] = {}

    def refresh(n):
        # rows touching q[n]: y'[n-1], y''[n-2]
        d1[n - 1] = _d_row(q.get(n, []), n)
        if n >= 1:
            d2[n - 2] = _d_row(d1[n - 1], n - 1)

    def residual(r):
        out = _conv(A, d2, r, lo_A, -1) if r >= 0 else []
        out = poly_add(out, _conv(B, d1, r, lo_B, -1))
        out = poly_add(out, _conv(C, q, r, lo_C, 0))
        return poly_add(out, poly_scale(D.get(r, []), Fraction(-1)))

    def linear_images(n, first):
        images = []
        for j in range(first, n + 1):
            e = [Fraction(0)] * j + [Fraction(1)]
            dd1 = _d_row(e, n)
            dd2 = _d_row(dd1, n - 1)
            images.append(poly_add(poly_mul(A.get(1, []), dd2), poly_mul(B.get(0, []), dd1)))
        return images

    refresh(0)
    refresh(1)
    # order s^0 fixes k11; k01 is pinned by the boundary data
    x = _solve_order(residual(0), linear_images(1, first=1))
    q[1] = poly_trim([k01] + list(x))
    refresh(1)
    for r in (-1, 0):
        if poly_trim(residual(r)):
            raise SolverError(f"boundary data inconsistent at order s^{r}")

    for n in range(2, order + 1):
        q[n] = []
        refresh(n)
        x = _solve_order(residual(n - 1), linear_images(n, first=0))
        q[n] = poly_trim(list(x))
        refresh(n)
        if poly_trim(residual(n - 1)):
            raise SolverError(f"residual does not vanish at order s^{n - 1}")
    return LogPolySeries.from_rows(q, order, regime)


def solve_sigma2(order: int, regime, sigma0: Optional[LogPolySeries] = None) -> LogPolySeries:
    """``sigma_2`` with ``k00 = 0``, ``k01 = -+1/24``."""
    return solve_linear_sigma(2, order, regime, sigma0)


def solve_sigma1_ode(order: int, regime, sigma0: Optional[LogPolySeries] = None) -> LogPolySeries:
    """``sigma_1`` straight from its linear equation; an independent route to the identity."""
    return solve_linear_sigma(1, order, regime, sigma0)


def sigma1_series(sigma0: LogPolySeries) -> LogPolySeries:
    """``sigma_1 = s**2 sigma_0' - s sigma_0``."""
    s = s_series()
    return (s * s * sigma0.diff() - s * sigma0).with_regime(sigma0.regime)
