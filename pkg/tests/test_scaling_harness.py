import csv
import io
import json
import os

import mpmath as mp
import pytest

from diagising.lattice_core import DomainError, PrecisionError
from diagising.scaling_harness import (
    DEFAULT_NS, GRIDS, asym_column, compare_at, fit_from_values, fit_scaling_coeffs, grid_points,
    holdout_ratio, line_values, records_csv, report_bundle, series_column,
)


@pytest.fixture(scope="module")
def fit_half():
    return fit_scaling_coeffs(mp.mpf("0.5"), "high")


def test_exact_recovery_on_model_data():
    coeffs = (mp.mpf("0.7"), mp.mpf("-0.2"), mp.mpf("0.05"), mp.mpf("1.5"))
    vals = [sum(c * mp.mpf(N) ** (-mp.mpf(1) / 4 - j) for j, c in enumerate(coeffs)) for N in DEFAULT_NS]
    fit = fit_from_values(1, "low", DEFAULT_NS, vals)
    assert all(abs(a - b) < mp.mpf(10) ** -40 for a, b in zip(fit.coeffs, coeffs))
    assert abs(fit.model(150) - sum(c * mp.mpf(150) ** (-mp.mpf(1) / 4 - j) for j, c in enumerate(coeffs))) < 1e-50


def test_preconditions():
    with pytest.raises(DomainError):
        fit_from_values(1, "high", (97, 97, 98, 99), [1, 1, 1, 1])
    with pytest.raises(DomainError):
        fit_from_values(1, "high", (97, 98), [1, 1])
    with pytest.raises(DomainError):
        fit_scaling_coeffs(60, "high", (97, 110, 120, 130))
    with pytest.raises(PrecisionError):
        fit_from_values(1, "high", DEFAULT_NS, [1, 2, 3, 4], prec=25)


def test_fit_against_series(fit_half):
    assert abs(fit_half.a / series_column("a", mp.mpf("0.5"), "high") - 1) < 1e-6
    assert fit_half.condition_estimate < 1e10
    assert fit_half.Ns == DEFAULT_NS and fit_half.d is not None


def test_stability_in_Ns(fit_half):
    other = fit_scaling_coeffs(mp.mpf("0.5"), "high", (81, 91, 101, 111))
    assert abs(fit_half.c - other.c) < 1e-5


def test_holdout(fit_half):
    assert holdout_ratio(fit_half, 110) < 1e-3
    assert holdout_ratio(fit_scaling_coeffs(1, "low"), 110) < 1e-3


def test_large_s_g0_column():
    fit = fit_scaling_coeffs(2, "high")
    assert abs(fit.a / asym_column("a", 2, "high") - 1) < 1e-4


def test_workers_give_identical_values():
    Ns = (20, 21, 22)
    assert line_values(mp.mpf("0.5"), Ns, "low", 30) == line_values(mp.mpf("0.5"), Ns, "low", 30, workers=2)


def test_grid_points():
    assert grid_points(0, 1, 4) == [mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4, 1]
    pts = grid_points(1, 6, 60)
    assert pts[0] == 1 and pts[-1] == 6 and len(pts) == 60
    assert GRIDS["verysmall"] == (0.0, 0.1, 50) and GRIDS["small"][2] == 100
    with pytest.raises(DomainError):
        grid_points(1, 1, 3)


def test_record_and_csv():
    rec = compare_at(mp.mpf("0.5"), "low", (20, 21, 22, 23), 30)
    assert abs(rec.series["a"] - series_column("a", mp.mpf("0.5"), "low", prec=30)) < 1e-25
    assert rec.abs_delta("series") == abs(rec.fit["c"] - rec.series["c"])
    text = records_csv([rec], 30)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:4] == ["s", "fit_a", "fit_b", "fit_c"]
    # round-trip: the decimal strings carry the requested digits
    assert abs(mp.mpf(rows[1][1]) - rec.fit["a"]) < mp.mpf(10) ** -28


def test_report_bundle(tmp_path):
    grids = {"verysmall": (0.0, 0.1, 1), "small": (0.0, 1.0, 1), "large": (1.0, 6.0, 1)}
    kw = dict(prec=30, Ns=(20, 21, 22, 23), large_Ns=(20, 21, 22, 23, 24), grids=grids)
    a = report_bundle(tmp_path / "a", "high", **kw)
    b = report_bundle(tmp_path / "b", "high", **kw)
    assert a == b
    for name in a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "g2_small.csv").read_text().splitlines()[0]
    assert header == "s,fit_c,series_c"
    assert (tmp_path / "a" / "g2_large.csv").read_text().splitlines()[0] == "s,fit_c,asym_c"
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["Ns"] == [20, 21, 22, 23] and manifest["precision"] == 30
    assert set(manifest["files"]) == {"g2_verysmall.csv", "g2_small.csv", "g2_large.csv"}
    assert len(manifest["content_hash"]) == 64


def test_manifest_default_Ns():
    import inspect
    assert inspect.signature(report_bundle).parameters["Ns"].default == (97, 98, 99, 100)
