import json
import subprocess
import sys

import pytest

from spectral_lab import counting_function, parse_descriptor
from spectral_lab.analysis import CoefficientTable, RemainderStudy
from spectral_lab.cli import RunConfig, UsageError, main, parse_config, run
from spectral_lab.counting import CountingTable


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_examples(monkeypatch):
    monkeypatch.delenv("SPECTRAL_LAB_THREADS", raising=False)
    cfg = parse_config(["table2", "--lambda", "1e7"])
    assert cfg.command == "table2" and cfg.lam == 10**7 and cfg.format == "csv"
    assert isinstance(cfg.lam, int)
    cfg = parse_config(["gamma-c", "--c", "2", "--tol", "1e-10"])
    assert cfg.command == "gamma_c" and cfg.c == [2] and cfg.tol == 1e-10
    cfg = parse_config(["count", "--op", "circle(c=2)⊗circle(c=2)", "--lambda", "12"])
    assert cfg.op == "circle(c=2)⊗circle(c=2)" and cfg.lam == [12]


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["frobnicate"], "frobnicate"),
        (["count", "--lambda", "12"], "--op"),
        (["count", "--op", "circle(c=2)⊗nope", "--lambda", "1"], "--op"),
        (["gamma-c", "--c", "x"], "--c"),
    ],
)
def test_usage_errors_name_the_flag(argv, flag):
    with pytest.raises(UsageError) as info:
        parse_config(argv)
    assert flag in str(info.value)


def test_exit_codes(capsys):
    assert call(["count", "--lambda", "12"], capsys)[0] == 2
    code, out, err = call(["gamma-c", "--c", "0"], capsys)
    assert code == 1 and out == ""
    assert err.count("\n") == 1 and "constants" in err
    code, _, err = call(["wres", "--op", "circle(c=1)⊗circle(c=1,k=2)"], capsys)
    assert code == 1 and "weyl" in err


def test_count_output(capsys):
    code, out, _ = call(["count", "--op", "circle(c=2)⊗circle(c=2)", "--lambda", "12"], capsys)
    assert code == 0
    assert out.splitlines() == ["lambda,exact", "12,13"]
    code, out, _ = call(["count", "--op", "circle(c=2) x circle(c=2)", "--lambda", "12", "1e4", "--predict"], capsys)
    table = CountingTable.from_csv(out)
    op = parse_descriptor("circle(c=2)⊗circle(c=2)")
    assert [r.exact for r in table.rows] == [13, counting_function(op, 10**4)]


def test_count_predict_roundtrip(capsys):
    _, out, _ = call(["count", "--op", "circle(c=3)⊗circle(c=3)", "--lambda", "100", "1000", "--predict"], capsys)
    t = CountingTable.from_csv(out)
    assert CountingTable.from_csv(t.to_csv()).rows == t.rows
    assert all(r.residual == r.exact - r.predicted for r in t.rows)


def test_table2_output(capsys):
    code, out, _ = call(["table2", "--lambda", "1e7"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "c,estimate,closed_form,error" and len(lines) == 20
    t = CoefficientTable.from_csv(out)
    assert [r[0] for r in t.rows] == list(range(2, 21))
    assert t.rows[0][1] == pytest.approx(0.40048285, abs=5e-3)
    _, out, _ = call(["table2", "--lambda", "1e7", "--closed-form-tau", "1000"], capsys)
    assert CoefficientTable.from_csv(out).rows[0][2] == pytest.approx(0.401484386, abs=5e-8)


def test_weyl_coeffs(capsys):
    _, out, _ = call(["weyl-coeffs", "--op", "folded(c=2)⊗folded(c=2)"], capsys)
    d = json.loads(out)
    assert d["z0"] == 0.5 and d["coeff_log"] == 2.0 and d["method"] == "closed-form"
    assert d["coeff_plain"] == pytest.approx(1.6019342557, abs=1e-9)
    _, out, _ = call(["weyl-coeffs", "--op", "circle(c=2)⊗circle(c=2)"], capsys)
    d = json.loads(out)
    assert d["convention"] == "lattice"
    assert d["coeff_plain"] == pytest.approx(1.6019342557 - 4 / 2**0.5, abs=1e-9)


def test_laurent_and_aramaki(capsys):
    _, out, _ = call(["laurent", "--op", "circle(c=2)⊗circle(c=2)", "--z0", "0.5", "--order", "2"], capsys)
    d = json.loads(out)
    assert set(d) == {"z0", "order", "A2", "A1", "finite_part", "err"}
    assert d["A2"] == pytest.approx(1.0, abs=1e-8)
    _, out, _ = call(["aramaki", "--order", "2", "--A2", "1", "--A1", "0", "--z0", "1"], capsys)
    d = json.loads(out)
    assert (d["coeff_log"], d["coeff_plain"]) == (1.0, -1.0)


def test_small_commands(capsys):
    assert call(["sieve", "--n", "6"], capsys)[1].splitlines()[-1] == "6,4"
    assert call(["divisor-sum", "--lambda", "10", "100"], capsys)[1].splitlines()[1:] == ["10,27", "100,482"]
    assert call(["dc", "--c", "2", "--lambda", "1000"], capsys)[1].splitlines()[1] == "2,1000,from_zero,7314"
    _, out, _ = call(["zeta", "--op", "circle(c=1)", "--s", "1"], capsys)
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(3.1533480949, abs=1e-9)
    _, out, _ = call(["gamma-c", "--c", "2", "--format", "json"], capsys)
    assert json.loads(out)[0]["value"] == pytest.approx(0.7002417819677, abs=1e-12)
    _, out, _ = call(["wres", "--op", "circle(c=2)⊗circle(c=2)"], capsys)
    assert json.loads(out)["wres"] == pytest.approx(4.0, abs=1e-12)
    _, out, _ = call(["wres", "--A2", "0", "--m1", "2", "--m2", "2"], capsys)
    assert json.loads(out)["wres"] == 0.0


def test_remainder(capsys):
    code, out, err = call(["remainder", "--min", "1e4", "--max", "1e7", "--points", "60"], capsys)
    assert code == 0 and "fitted exponent" in err
    study = RemainderStudy.from_csv(out)
    assert len(study.samples) == 60
    _, out, _ = call(["remainder", "--min", "1e4", "--max", "1e7", "--points", "60", "--format", "json"], capsys)
    assert json.loads(out)["fitted_exponent"] is not None


def test_out_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    assert main(["table1", "--lambda", "1e5", "--c-max", "4", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("c,estimate,closed_form,error\n")


def test_threads_env_and_determinism(monkeypatch, capsys):
    monkeypatch.setenv("SPECTRAL_LAB_THREADS", "4")
    cfg = parse_config(["table2", "--lambda", "1e6", "--threads", "1"])
    assert cfg.threads == 4
    _, many, _ = call(["table2", "--lambda", "1e6"], capsys)
    monkeypatch.setenv("SPECTRAL_LAB_THREADS", "1")
    _, one, _ = call(["table2", "--lambda", "1e6"], capsys)
    _, again, _ = call(["table2", "--lambda", "1e6"], capsys)
    assert one == again == many
    monkeypatch.setenv("SPECTRAL_LAB_THREADS", "zero")
    with pytest.raises(UsageError):
        parse_config(["table2"])


def test_run_accepts_config_object(capsys):
    assert run(RunConfig("divisor_sum", params={"lam": [10]})) == 0
    assert capsys.readouterr().out == "lambda,D\n10,27\n"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "spectral_lab.cli", "count", "--op", "circle(c=2)⊗circle(c=2)", "--lambda", "12"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[-1] == "12,13"
