import json
import shutil
import subprocess

import mpmath as mp
import pytest

from diagising.cli import main
from diagising.toeplitz import critical_correlation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_corr(capsys):
    code, out, _ = run(capsys, "corr", "--N", "3", "--k", "0.5", "--prec", "30")
    assert code == 0 and 0 < float(out) < 1


def test_corr_at_critical_is_domain_error(capsys):
    code, _, err = run(capsys, "corr", "--N", "3", "--k", "1")
    assert code == 2 and "critical" in err


def test_corr_critical(capsys):
    code, out, _ = run(capsys, "corr-critical", "--N", "5")
    assert code == 0 and abs(mp.mpf(out) - critical_correlation(5)) < mp.mpf(10) ** -55


def test_sigma_residual(capsys):
    code, out, _ = run(capsys, "sigma-residual", "--N", "4", "--t", "0.5", "--regime", "low")
    assert code == 0
    assert float(out.splitlines()[1].split("=")[1]) < 1e-25


def test_series_json(capsys):
    code, out, _ = run(capsys, "series", "--which", "g0", "--regime", "high", "--order", "6", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["which"] == "g0" and data["normalization"] == "(2s)^{1/4}/A"
    code, out, _ = run(capsys, "series", "--which", "sigma0", "--regime", "low", "--order", "6")
    assert code == 0 and out.startswith("[(-1/4)]*s^0")


def test_asymptote_and_form_factor(capsys):
    code, out, _ = run(capsys, "asymptote", "--which", "g0", "--regime", "high", "--s", "2")
    assert code == 0
    code, out2, _ = run(capsys, "form-factor", "--p", "1", "--s", "2", "--prec", "20")
    assert code == 0 and abs(float(out) - float(out2)) < 1e-12
    code, _, _ = run(capsys, "form-factor", "--p", "1", "--s", "2", "--N", "4", "--t", "0.5")
    assert code == 2
    code, out, _ = run(capsys, "form-factor", "--p", "2", "--N", "3", "--t", "0.2", "--prec", "20")
    assert code == 0 and float(out) > 0


def test_scale_fit_precision_error(capsys):
    code, _, err = run(capsys, "scale-fit", "--s", "0.5", "--regime", "high", "--Ns", "20,21,22,23", "--prec", "25")
    assert code == 3 and "precision" in err


def test_scale_fit_domain_error(capsys):
    code, _, _ = run(capsys, "scale-fit", "--s", "0.5", "--regime", "high", "--Ns", "20,20,21,22")
    assert code == 2


def test_compare_csv(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "compare", "--s-min", "0.4", "--s-max", "0.5", "--steps", "2", "--regime", "low",
                     "--Ns", "20,21,22,23", "--prec", "30", "--out", str(out))
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3 and lines[0].startswith("s,fit_a")


def test_bad_arguments():
    with pytest.raises(SystemExit) as exc:
        main(["series", "--which", "g9", "--regime", "high"])
    assert exc.value.code == 2


@pytest.mark.skipif(shutil.which("diagising") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["diagising", "corr-critical", "--N", "2", "--prec", "20"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("0.5403")
