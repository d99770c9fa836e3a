"""Exact formal series in ``s`` and ``L = log(s/8) + euler_gamma``.

A :class:`LogPolySeries` is a finite double sum ``sum c[m, n] L**m s**n`` with
rational coefficients, known exactly for every ``n <= max_order``.  Negative
``n`` is allowed so that derivatives of ``L`` terms (``dL/ds = 1/s``) can be
represented without special cases.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import mpmath as mp

from ..lattice_core import Regime

Rational = Fraction
Key = Tuple[int, int]  # (m, n): power of L, power of s


class StructuralError(ValueError):
    """Raised when a series operation's structural precondition fails."""


# -- dense polynomials in L, lowest degree first ---------------------------

def poly_trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return poly_trim(out)


def poly_scale(p, c):
    if c == 0:
        return []
    return [c * x for x in p]


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] += a * b
    return poly_trim(out)


def poly_dL(p):
    return [i * p[i] for i in range(1, len(p))]


class LogPolySeries:
    """Immutable truncated series ``sum c[m, n] L(s)**m s**n``.

    ``max_order`` is the highest power of ``s`` whose coefficient is exact;
    anything beyond it is unknown, not zero.
    """

    __slots__ = ("_c", "max_order", "regime")

    def __init__(self, coeffs: Mapping[Key, object], max_order: int,
                 regime: Optional[Regime] = None):
        c: Dict[Key, Fraction] = {}
        for (m, n), v in coeffs.items():
            if m < 0:
                raise StructuralError(f"negative power of L in term {(m, n)}")
            if n > max_order:
                continue
            v = Fraction(v)
            if v != 0:
                c[(int(m), int(n))] = v
        self._c = c
        self.max_order = int(max_order)
        self.regime = regime

    # -- construction helpers ------------------------------------------------
    @classmethod
    def constant(cls, value, max_order: int, regime=None) -> "LogPolySeries":
        return cls({(0, 0): value}, max_order, regime)

    @classmethod
    def monomial(cls, m: int, n: int, value=1, max_order: int = 0,
                 regime=None) -> "LogPolySeries":
        return cls({(m, n): value}, max(max_order, n), regime)

    @classmethod
    def from_rows(cls, rows: Mapping[int, Iterable], max_order: int,
                  regime=None) -> "LogPolySeries":
        """Build from ``{n: [c(0, n), c(1, n), ...]}``."""
        coeffs = {}
        for n, row in rows.items():
            for m, v in enumerate(row):
                coeffs[(m, n)] = v
        return cls(coeffs, max_order, regime)

    # -- accessors -----------------------------------------------------------
    @property
    def coeffs(self) -> Dict[Key, Fraction]:
        return dict(self._c)

    def __getitem__(self, key: Key) -> Fraction:
        m, n = key
        if n > self.max_order:
            raise KeyError(f"order {n} exceeds max_order {self.max_order}")
        return self._c.get((m, n), Fraction(0))

    def row(self, n: int) -> List[Fraction]:
        """Coefficients of ``s**n`` as a polynomial in ``L`` (low degree first)."""
        if n > self.max_order:
            raise KeyError(f"order {n} exceeds max_order {self.max_order}")
        deg = max((m for (m, k) in self._c if k == n), default=-1)
        return [self._c.get((m, n), Fraction(0)) for m in range(deg + 1)]

    def orders(self) -> List[int]:
        return sorted({n for (_, n) in self._c})

    @property
    def min_order(self) -> Optional[int]:
        return min((n for (_, n) in self._c), default=None)

    def is_zero(self) -> bool:
        return not self._c

    def is_triangular(self) -> bool:
        return all(m <= n for (m, n) in self._c)

    def truncate(self, order: int) -> "LogPolySeries":
        return LogPolySeries(self._c, min(order, self.max_order), self.regime)

    def with_regime(self, regime) -> "LogPolySeries":
        return LogPolySeries(self._c, self.max_order, regime)

    def __iter__(self) -> Iterator[Tuple[Key, Fraction]]:
        return iter(sorted(self._c.items(), key=lambda kv: (kv[0][1], kv[0][0])))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogPolySeries):
            return NotImplemented
        return self._c == other._c and self.max_order == other.max_order

    def __hash__(self):
        return hash((frozenset(self._c.items()), self.max_order))

    def equal_through(self, other: "LogPolySeries", order: int) -> bool:
        """Termwise equality of all coefficients with ``n <= order``."""
        mine = {k: v for k, v in self._c.items() if k[1] <= order}
        theirs = {k: v for k, v in other._c.items() if k[1] <= order}
        return mine == theirs

    def __repr__(self) -> str:
        return f"LogPolySeries({self.to_text(limit=6)}, max_order={self.max_order})"

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "LogPolySeries":
        if isinstance(other, LogPolySeries):
            return other
        return LogPolySeries.constant(other, self.max_order, self.regime)

    def __add__(self, other) -> "LogPolySeries":
        other = self._coerce(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return LogPolySeries(out, min(self.max_order, other.max_order),
                             self.regime or other.regime)

    __radd__ = __add__

    def __neg__(self) -> "LogPolySeries":
        return LogPolySeries({k: -v for k, v in self._c.items()},
                             self.max_order, self.regime)

    def __sub__(self, other) -> "LogPolySeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LogPolySeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LogPolySeries":
        if not isinstance(other, LogPolySeries):
            c = Fraction(other)
            return LogPolySeries({k: c * v for k, v in self._c.items()},
                                 self.max_order, self.regime)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogPolySeries":
        return self * (1 / Fraction(other))

    def __pow__(self, k: int) -> "LogPolySeries":
        if k < 0:
            raise StructuralError("negative powers are not supported")
        if k == 0:
            return LogPolySeries.constant(1, self.max_order, self.regime)
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def shift(self, j: int) -> "LogPolySeries":
        """Multiply by ``s**j``."""
        return LogPolySeries({(m, n + j): v for (m, n), v in self._c.items()},
                             self.max_order + j, self.regime)

    def diff(self) -> "LogPolySeries":
        return series_diff(self)

    def antideriv(self) -> "LogPolySeries":
        return series_antideriv(self)

    def parity_flip(self) -> "LogPolySeries":
        """``c[m, n] -> (-1)**n c[m, n]``: the effect of ``s -> -s`` off ``L``."""
        return LogPolySeries({(m, n): (-v if n % 2 else v)
                              for (m, n), v in self._c.items()},
                             self.max_order, self.regime)

    # -- evaluation and export ----------------------------------------------
    def evaluate(self, s, L=None):
        """Numeric value at ``s`` using the current mpmath precision."""
        s = mp.mpf(s)
        if L is None:
            L = log_L(s)
        total = mp.mpf(0)
        for (m, n), v in self._c.items():
            total += mp.mpf(v.numerator) / v.denominator * L ** m * s ** n
        return total

    def to_records(self) -> List[dict]:
        return [{"m": m, "n": n, "numerator": v.numerator,
                 "denominator": v.denominator} for (m, n), v in self]

    def to_text(self, limit: Optional[int] = None) -> str:
        parts = []
        for n in self.orders():
            if limit is not None and n > limit:
                parts.append("...")
                break
            row = self.row(n)
            inner = " + ".join(f"({c})" + (f"*L^{m}" if m else "")
                               for m, c in enumerate(row) if c)
            parts.append(f"[{inner}]*s^{n}")
        return " + ".join(parts) if parts else "0"


def log_L(s):
    """``L(s) = log(s/8) + euler_gamma`` at the current precision."""
    return mp.log(mp.mpf(s) / 8) + mp.euler


def _rows(x: LogPolySeries) -> Dict[int, List[Fraction]]:
    rows: Dict[int, List[Fraction]] = {}
    for (m, n), v in x._c.items():
        r = rows.setdefault(n, [])
        if len(r) <= m:
            r.extend([Fraction(0)] * (m + 1 - len(r)))
        r[m] = v
    return rows


def series_add(x: LogPolySeries, y: LogPolySeries) -> LogPolySeries:
    return x + y


def series_mul(x: LogPolySeries, y: LogPolySeries) -> LogPolySeries:
    xmin, ymin = x.min_order, y.min_order
    regime = x.regime or y.regime
    if xmin is None or ymin is None:
        order = min(x.max_order + (ymin or 0), y.max_order + (xmin or 0))
        return LogPolySeries({}, order, regime)
    order = min(x.max_order + ymin, y.max_order + xmin)
    xr, yr = _rows(x), _rows(y)
    out: Dict[int, List[Fraction]] = {}
    for i, p in xr.items():
        for j, q in yr.items():
            if i + j > order:
                continue
            out[i + j] = poly_add(out.get(i + j, []), poly_mul(p, q))
    return LogPolySeries.from_rows(out, order, regime)


def series_diff(x: LogPolySeries) -> LogPolySeries:
    out: Dict[Key, Fraction] = {}
    for (m, n), v in x._c.items():
        if n:
            out[(m, n - 1)] = out.get((m, n - 1), 0) + n * v
        if m:
            out[(m - 1, n - 1)] = out.get((m - 1, n - 1), 0) + m * v
    return LogPolySeries(out, x.max_order - 1, x.regime)


def series_antideriv(x: LogPolySeries) -> LogPolySeries:
    """Antiderivative vanishing at ``s = 0``.

    Uses ``int_0^s x**n L**m dx = s**(n+1) sum_j (-1)**j m!/(m-j)! L**(m-j) / (n+1)**(j+1)``,
    valid for ``n >= 0``.
    """
    out: Dict[Key, Fraction] = {}
    for (m, n), v in x._c.items():
        if n < 0:
            raise StructuralError(
                f"antiderivative of s^{n} L^{m} does not vanish at s=0")
        for j in range(m + 1):
            c = Fraction((-1) ** j * factorial(m) // factorial(m - j), (n + 1) ** (j + 1))
            key = (m - j, n + 1)
            out[key] = out.get(key, 0) + c * v
    return LogPolySeries(out, x.max_order + 1, x.regime)


def series_exp(x: LogPolySeries) -> LogPolySeries:
    """``exp(x)`` for a series without constant term and with ``min_order >= 1``."""
    if x.min_order is not None and x.min_order < 1:
        if any(n < 1 for (_, n) in x._c):
            raise StructuralError("exp requires a series vanishing at s=0")
    order = x.max_order
    result = LogPolySeries.constant(1, order, x.regime)
    if x.is_zero():
        return result
    term = result
    k = 1
    # every factor raises the minimum s-order by at least one
    while k <= order:
        term = (term * x) / k
        if term.is_zero():
            break
        result = result + term
        k += 1
    return LogPolySeries(result.coeffs, order, x.regime)
