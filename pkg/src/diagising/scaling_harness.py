"""Finite-``N`` extrapolation at fixed ``s`` and its comparison with the
series and large-``s`` predictions.

At fixed ``s`` the correlation on the line ``t = 1 - 2s/N`` is fitted to
``sum_j c_j N**(-1/4 - j)``; ``c_0, c_1, c_2`` estimate ``(2s)**(1/4)``
times ``G_0, G_1, G_2``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import mpmath as mp

from .asymptotics import scaled_asymptote
from .lattice_core import (
    DEFAULT_PREC, GUARD_DIGITS, DomainError, PrecisionError, Regime, constant_A,
    scaling_embed, to_mpf,
)
from .series.gseries import series_family
from .toeplitz import correlation

DEFAULT_NS = (97, 98, 99, 100)
LARGE_S_NS = tuple(range(97, 105))  # eight terms; see the large-s window in the README
SERIES_ORDER = 30
COLUMNS = ("a", "b", "c")
_G_OF = {"a": "g0", "b": "g1", "c": "g2"}

GRIDS = {
    "verysmall": (0.0, 0.1, 50),
    "small": (0.0, 1.0, 100),
    "large": (1.0, 6.0, 60),
}


@dataclass(frozen=True)
class FitResult:
    s: mp.mpf
    regime: Regime
    coeffs: tuple
    Ns: tuple
    condition_estimate: mp.mpf

    @property
    def a(self):
        return self.coeffs[0]

    @property
    def b(self):
        return self.coeffs[1]

    @property
    def c(self):
        return self.coeffs[2]

    @property
    def d(self):
        return self.coeffs[3] if len(self.coeffs) > 3 else None

    def model(self, N: int) -> mp.mpf:
        N = mp.mpf(N)
        return sum(c * N ** (-mp.mpf(1) / 4 - j) for j, c in enumerate(self.coeffs))


def _check_Ns(s, Ns: Sequence[int]) -> tuple:
    Ns = tuple(int(N) for N in Ns)
    if len(Ns) < 3:
        raise DomainError("need at least three N values")
    if len(set(Ns)) != len(Ns):
        raise DomainError("N values must be distinct")
    if any(N <= 2 * s for N in Ns):
        raise DomainError("every N must exceed 2s")
    return Ns


def line_value(s, N: int, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``C_{N,N}`` at ``t = 1 - 2s/N``."""
    return correlation(N, scaling_embed(s, N, regime, prec), prec)


def _line_value_job(args):
    s, N, regime, prec = args
    with mp.workdps(prec + GUARD_DIGITS):
        return mp.nstr(line_value(mp.mpf(s), N, regime, prec), prec + GUARD_DIGITS)


def line_values(s, Ns, regime, prec=DEFAULT_PREC, workers: int = 1) -> List[mp.mpf]:
    """Values on the scaling line; the same decimal rounding is used with or without workers."""
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        jobs = [(mp.nstr(to_mpf(s), prec + GUARD_DIGITS), N, regime, prec) for N in Ns]
        if workers <= 1:
            return [mp.mpf(_line_value_job(j)) for j in jobs]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return [mp.mpf(v) for v in ex.map(_line_value_job, jobs)]


def fit_from_values(s, regime, Ns: Sequence[int], values: Sequence,
                    prec: int = DEFAULT_PREC) -> FitResult:
    """Solve the square system in the basis ``N**(-1/4 - j)``, ``j < len(Ns)``."""
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        Ns = _check_Ns(s, Ns)
        n = len(Ns)
        N0 = mp.mpf(min(Ns))
        # scaled columns (N0/N)**(1/4 + j): entries of order one
        A = mp.matrix([[(N0 / N) ** (mp.mpf(1) / 4 + j) for j in range(n)] for N in Ns])
        b = mp.matrix([to_mpf(v) for v in values])
        try:
            Ainv = mp.inverse(A)
        except ZeroDivisionError as exc:
            raise PrecisionError("fit matrix is singular") from exc
        cond = mp.mnorm(A, 1) * mp.mnorm(Ainv, 1)
        if cond > mp.mpf(10) ** (prec - 2 * GUARD_DIGITS):
            raise PrecisionError(f"fit condition estimate {mp.nstr(cond, 3)} exceeds the precision budget")
        x = mp.lu_solve(A, b)
        coeffs = tuple(x[j] * N0 ** (mp.mpf(1) / 4 + j) for j in range(n))
        return FitResult(s, regime, coeffs, Ns, cond)


def fit_scaling_coeffs(s, regime, Ns: Sequence[int] = DEFAULT_NS, prec: int = DEFAULT_PREC,
                       workers: int = 1) -> FitResult:
    regime = Regime.parse(regime)
    with mp.workdps(prec + GUARD_DIGITS):
        s = to_mpf(s)
        Ns = _check_Ns(s, Ns)
        return fit_from_values(s, regime, Ns, line_values(s, Ns, regime, prec, workers), prec)


def holdout_ratio(fit: FitResult, N: int, prec: int = DEFAULT_PREC) -> mp.mpf:
    """``|C(N) - model(N)| / |model(N)|`` at an ``N`` not used in the fit."""
    with mp.workdps(prec + GUARD_DIGITS):
        actual = line_value(fit.s, N, fit.regime, prec)
        model = fit.model(N)
        return abs(actual - model) / abs(model)


def series_column(column: str, s, regime, order: int = SERIES_ORDER,
                  prec: int = DEFAULT_PREC) -> mp.mpf:
    """``(2s)**(1/4) G_j(s)`` from the exact small-``s`` series."""
    fam = series_family(order, regime)
    with mp.workdps(prec + GUARD_DIGITS):
        return constant_A(prec) * fam.get(_G_OF[column]).evaluate(s, prec)


def asym_column(column: str, s, regime, prec: int = DEFAULT_PREC) -> mp.mpf:
    return scaled_asymptote(_G_OF[column], regime, s, prec)


@dataclass
class ComparisonRecord:
    s: mp.mpf
    fit: Dict[str, mp.mpf]
    series: Dict[str, mp.mpf]
    asym: Dict[str, mp.mpf]

    def abs_delta(self, other: str, column: str = "c") -> mp.mpf:
        return abs(self.fit[column] - getattr(self, other)[column])

    def rel_delta(self, other: str, column: str = "c") -> mp.mpf:
        ref = getattr(self, other)[column]
        return abs(self.fit[column] / ref - 1)


def grid_points(s_min, s_max, steps: int) -> List[mp.mpf]:
    """``steps`` equally spaced points in ``(s_min, s_max]``; ``s_min`` is excluded when it is 0."""
    s_min, s_max = to_mpf(s_min), to_mpf(s_max)
    if not 0 <= s_min < s_max:
        raise DomainError("need 0 <= s_min < s_max")
    if steps < 1:
        raise DomainError("steps must be positive")
    if s_min == 0:
        return [s_max * i / steps for i in range(1, steps + 1)]
    if steps == 1:
        return [s_min]
    return [s_min + (s_max - s_min) * i / (steps - 1) for i in range(steps)]


def compare_at(s, regime, Ns=DEFAULT_NS, prec: int = DEFAULT_PREC,
               order: int = SERIES_ORDER, workers: int = 1) -> ComparisonRecord:
    fit = fit_scaling_coeffs(s, regime, Ns, prec, workers)
    return ComparisonRecord(
        fit.s,
        {c: fit.coeffs[i] for i, c in enumerate(COLUMNS)},
        {c: series_column(c, s, regime, order, prec) for c in COLUMNS},
        {c: asym_column(c, s, regime, prec) for c in COLUMNS},
    )


def compare_grid(s_min, s_max, steps: int, regime, prec: int = DEFAULT_PREC,
                 Ns=DEFAULT_NS, order: int = SERIES_ORDER, workers: int = 1) -> List[ComparisonRecord]:
    with mp.workdps(prec + GUARD_DIGITS):
        return [compare_at(s, regime, Ns, prec, order, workers) for s in grid_points(s_min, s_max, steps)]


def _fmt(v, prec: int) -> str:
    return mp.nstr(v, prec, strip_zeros=False)


def records_csv(records: Iterable[ComparisonRecord], prec: int = DEFAULT_PREC,
                fields: Optional[Sequence[str]] = None) -> str:
    """CSV text; ``fields`` picks among ``s, fit_x, series_x, asym_x, abs_series_x, rel_asym_x``."""
    if fields is None:
        fields = (["s"] + [f"fit_{c}" for c in COLUMNS] + [f"series_{c}" for c in COLUMNS]
                  + [f"asym_{c}" for c in COLUMNS] + ["abs_series_c", "rel_asym_c"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in records:
        row = []
        for f in fields:
            if f == "s":
                v = r.s
            elif f.startswith("abs_series_"):
                v = r.abs_delta("series", f[-1])
            elif f.startswith("rel_asym_"):
                v = r.rel_delta("asym", f[-1])
            else:
                kind, col = f.split("_")
                v = getattr(r, kind)[col]
            row.append(_fmt(v, prec))
        w.writerow(row)
    return buf.getvalue()


REPORT_FIELDS = {
    "verysmall": ("s", "fit_c", "series_c"),
    "small": ("s", "fit_c", "series_c"),
    "large": ("s", "fit_c", "asym_c"),
}


def report_bundle(out_dir, regime, prec: int = DEFAULT_PREC, Ns=DEFAULT_NS,
                  large_Ns=LARGE_S_NS, order: int = SERIES_ORDER,
                  grids: Optional[Dict[str, tuple]] = None, workers: int = 1) -> Dict[str, str]:
    """Write ``g2_<window>.csv`` files and ``manifest.json``; returns ``{file: sha256}``."""
    regime = Regime.parse(regime)
    grids = dict(GRIDS if grids is None else grids)
    os.makedirs(out_dir, exist_ok=True)
    hashes: Dict[str, str] = {}
    for name, (lo, hi, steps) in grids.items():
        ns = large_Ns if name == "large" else Ns
        recs = compare_grid(lo, hi, steps, regime, prec, ns, order, workers)
        text = records_csv(recs, prec, REPORT_FIELDS.get(name))
        fname = f"g2_{name}.csv"
        with open(os.path.join(out_dir, fname), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        hashes[fname] = hashlib.sha256(text.encode()).hexdigest()
    content = hashlib.sha256("".join(f"{k}:{v}\n" for k, v in sorted(hashes.items())).encode())
    manifest = {
        "regime": regime.value,
        "precision": prec,
        "Ns": list(Ns),
        "large_Ns": list(large_Ns),
        "series_order": order,
        "grids": {k: list(v) for k, v in grids.items()},
        "files": hashes,
        "content_hash": content.hexdigest(),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return hashes
