"""Command line entry point (``diagising``)."""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import mpmath as mp

from .lattice_core import DEFAULT_PREC, DomainError, coupling_from_t
from .series.logpoly import StructuralError

EXIT_OK, EXIT_DOMAIN, EXIT_PRECISION = 0, 2, 3


def _ints(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _num(text: str):
    return mp.mpf(text)


def _print(v, prec):
    print(mp.nstr(v, prec))


def cmd_corr(a):
    from .toeplitz import correlation
    _print(correlation(a.N, mp.mpf(a.k), a.prec), a.prec)


def cmd_corr_critical(a):
    from .toeplitz import critical_correlation
    _print(critical_correlation(a.N, a.prec), a.prec)


def cmd_sigma_residual(a):
    from .sigma_system import pvi_residual, sigma_from_correlation
    sv = sigma_from_correlation(a.N, coupling_from_t(mp.mpf(a.t), a.regime, a.prec), a.prec)
    print(f"sigma={mp.nstr(sv.sigma, a.prec)}")
    print(f"residual={mp.nstr(pvi_residual(sv, a.prec), 5)}")


def cmd_series(a):
    from .series.gseries import NormalizedGSeries, series_family, series_json
    fam = series_family(a.order, a.regime)
    x = fam.get(a.which)
    if a.format == "json":
        data = x.to_json() if isinstance(x, NormalizedGSeries) else series_json(x, a.regime)
        data["which"] = a.which
        print(json.dumps(data, indent=1))
    else:
        body = x.body if isinstance(x, NormalizedGSeries) else x
        prefix = "(2s)^(1/4)/A * G = " if isinstance(x, NormalizedGSeries) else ""
        print(prefix + body.to_text())


def cmd_scale_fit(a):
    from .scaling_harness import fit_scaling_coeffs
    fit = fit_scaling_coeffs(_num(a.s), a.regime, a.Ns, a.prec, a.workers)
    for name, v in zip("abcdefgh", fit.coeffs):
        print(f"{name}={mp.nstr(v, a.prec)}")
    print(f"condition={mp.nstr(fit.condition_estimate, 4)}")


def cmd_compare(a):
    from .scaling_harness import compare_grid, records_csv
    recs = compare_grid(_num(a.s_min), _num(a.s_max), a.steps, a.regime, a.prec, a.Ns,
                        workers=a.workers)
    text = records_csv(recs, a.prec)
    if a.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_asymptote(a):
    from .asymptotics import bessel_asymptote
    _print(bessel_asymptote(a.which, a.regime, _num(a.s), a.prec), a.prec)


def cmd_form_factor(a):
    from .asymptotics import form_factor_finite, form_factor_scaled
    if a.s is not None:
        if a.N is not None or a.t is not None:
            raise DomainError("give either --s or --N with --t")
        v = form_factor_scaled(a.p, _num(a.s), a.prec)
    else:
        if a.N is None or a.t is None:
            raise DomainError("--N and --t are both required without --s")
        v = form_factor_finite(a.p, a.N, _num(a.t), a.prec)
    _print(v, a.prec)


def cmd_report(a):
    from .scaling_harness import report_bundle
    hashes = report_bundle(a.out, a.regime, a.prec, a.Ns, workers=a.workers)
    for name, h in sorted(hashes.items()):
        print(f"{name} {h}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diagising",
                                description="Diagonal Ising correlations and their scaling functions.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    def prec(sp, default=DEFAULT_PREC):
        sp.add_argument("--prec", type=int, default=default, help="decimal digits (default %(default)s)")

    def regime(sp):
        sp.add_argument("--regime", choices=("high", "low"), required=True)

    def workers(sp):
        sp.add_argument("--workers", type=int, default=1, help="processes for determinant grids")

    sp = add("corr", cmd_corr, "C_{N,N} at coupling k (k != 1)")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--k", required=True)
    prec(sp)

    sp = add("corr-critical", cmd_corr_critical, "closed-form C_{N,N} at k = 1")
    sp.add_argument("--N", type=int, required=True)
    prec(sp)

    sp = add("sigma-residual", cmd_sigma_residual, "Painleve VI residual of the finite-N sigma")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--t", required=True)
    regime(sp)
    prec(sp)

    sp = add("series", cmd_series, "exact small-s series")
    sp.add_argument("--which", required=True,
                    choices=("sigma0", "sigma1", "sigma2", "g0", "g1", "g2", "g2corr"))
    regime(sp)
    sp.add_argument("--order", type=int, default=30)
    sp.add_argument("--format", choices=("json", "text"), default="text")

    sp = add("scale-fit", cmd_scale_fit, "finite-N fit at fixed s")
    sp.add_argument("--s", required=True)
    regime(sp)
    sp.add_argument("--Ns", type=_ints, default=(97, 98, 99, 100))
    prec(sp)
    workers(sp)

    sp = add("compare", cmd_compare, "fit vs series vs asymptote on an s grid (CSV)")
    sp.add_argument("--s-min", required=True)
    sp.add_argument("--s-max", required=True)
    sp.add_argument("--steps", type=int, required=True)
    regime(sp)
    sp.add_argument("--out")
    sp.add_argument("--Ns", type=_ints, default=(97, 98, 99, 100))
    prec(sp)
    workers(sp)

    sp = add("asymptote", cmd_asymptote, "large-s Bessel form")
    sp.add_argument("--which", required=True, choices=("g0", "g1", "g2", "g2corr"))
    regime(sp)
    sp.add_argument("--s", required=True)
    prec(sp)

    sp = add("form-factor", cmd_form_factor, "scaled (--s) or lattice (--N --t) form factor")
    sp.add_argument("--p", type=int, choices=(1, 2), required=True)
    sp.add_argument("--s")
    sp.add_argument("--N", type=int)
    sp.add_argument("--t")
    prec(sp, 30)

    sp = add("report", cmd_report, "CSV bundle for the three s windows")
    regime(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--Ns", type=_ints, default=(97, 98, 99, 100))
    prec(sp)
    workers(sp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except (DomainError, StructuralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ArithmeticError as exc:  # PrecisionError and friends
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
