import argparse
import csv
import io
import json
import subprocess
import sys

import pytest

from cyclichyp.cli import format_complex, main, parse_complex, parse_n_range


@pytest.mark.parametrize(
    "text,value",
    [
        ("0.3-0.1i", 0.3 - 0.1j),
        ("2", 2),
        ("-1.5", -1.5),
        ("i", 1j),
        ("-i", -1j),
        ("3i", 3j),
        ("1+i", 1 + 1j),
        ("1e-3-2e+2i", 1e-3 - 200j),
        ("1.5e-2i", 0.015j),
        ("0.5+0.25j", 0.5 + 0.25j),
        (" -2 - 3i ", -2 - 3j),
    ],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+2k", "i+1"])
def test_parse_complex_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex(text)


def test_format_round_trip():
    for z in (0.3 - 0.1j, -2.5 + 0j, 1e-20 + 3j, complex(0.1, 0.2)):
        assert parse_complex(format_complex(z)) == z
    assert format_complex(0.3 - 0.1j) == "0.3-0.1i"


def test_parse_n_range():
    assert parse_n_range("2..7") == (2, 3, 4, 5, 6, 7)
    assert parse_n_range("3") == (3,)
    assert parse_n_range("2,3,5") == (2, 3, 5)
    for bad in ("1..3", "x", "5..4"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_n_range(bad)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_p(capsys):
    code, out, _ = run(["eval", "p", "--N", "2", "--z", "1"], capsys)
    assert code == 0
    assert parse_complex(out.split()[0]) == pytest.approx(2**0.5, rel=1e-15)


def test_eval_order_param(capsys):
    code, out, _ = run(["eval", "order-param", "--N", "2", "--n", "1", "--kprime", "0.6"], capsys)
    assert code == 0
    assert float(out.split()[0]) == pytest.approx(0.9457416090031758, rel=1e-15)


def test_eval_series_json(capsys):
    code, out, _ = run(
        ["eval", "series", "--N", "3", "--alpha", "0.3+0.1i", "--beta", "0.2-0.5i", "--z", "1", "--json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] and doc["command"] == "eval"
    assert doc["kind"] == "series" and doc["N"] == 3
    assert "numeric_config" in doc
    assert len(doc["value"]) == 2


def test_eval_closed_form_matches_series(capsys):
    args = ["--N", "3", "--alpha", "0.5+0.6i", "--beta", "1+1i", "--k", "1", "--json"]
    _, out, _ = run(["eval", "closed-form", *args], capsys)
    closed = json.loads(out)["value"]
    assert complex(*closed) == pytest.approx(complex(0.029432112502200038969, -0.5663570895934472143), rel=1e-12)


def test_eval_weight(capsys):
    code, out, _ = run(["eval", "weight", "--N", "3", "--n", "1", "--kprime", "0.6", "--json"], capsys)
    assert code == 0
    w = complex(*json.loads(out)["value"])
    assert w == pytest.approx(complex(-0.1400237632810712185, 0.354384195498375574), rel=1e-13)
    _, out, _ = run(
        ["eval", "weight", "--N", "3", "--n", "1", "--kprime", "0.6", "--weight-kind", "Wbar", "--json"], capsys
    )
    assert complex(*json.loads(out)["value"]) == pytest.approx(
        complex(2.8121989407893127879, -3.6401806175600132057), rel=1e-13
    )


def test_domain_error_exit_code(capsys):
    code, _, err = run(["eval", "order-param", "--N", "3", "--n", "1", "--kprime", "1.5"], capsys)
    assert code == 2
    assert "DomainError" in err
    code, _, err = run(
        ["eval", "series", "--N", "3", "--alpha", "0.5", "--beta", "1", "--z", "1", "--json"], capsys
    )
    assert code == 2
    assert json.loads(err)["error"] == "PoleInDenominator"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["eval", "nonsense", "--N", "3"])
    assert e.value.code == 2


def test_verify_pass(capsys):
    code, out, _ = run(["verify", "z4", "--N", "2..3", "--samples", "20"], capsys)
    assert code == 0
    assert out.startswith("PASS z4: 40/40 passed")


def test_verify_tight_tolerance_escalates(capsys):
    # a tolerance below double precision is met by raising the working precision
    code, out, _ = run(["verify", "z4", "--N", "3", "--samples", "3", "--tolerance", "1e-30"], capsys)
    assert code == 0
    assert "3 escalated" in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    import cyclichyp.sweeps as sweeps

    real = sweeps.verify_z4

    def broken(p):
        chk = real(p)
        return type(chk)(chk.name, chk.lhs, 2 * chk.rhs, 0.5, chk.extra, chk.condition)

    monkeypatch.setattr(sweeps, "verify_z4", broken)
    code, out, _ = run(["verify", "z4", "--N", "3", "--samples", "4"], capsys)
    assert code == 1
    assert out.splitlines()[0].startswith("FAIL z4 N=3 #0")
    assert "FAIL z4: 0/4 passed" in out


def test_verify_json_stream(tmp_path, capsys):
    path = tmp_path / "out.jsonl"
    code, out, _ = run(
        ["verify", "summation", "--N", "2,4", "--samples", "15", "--seed", "9", "--json", "--output", str(path)],
        capsys,
    )
    assert code == 0 and out == ""
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    assert lines[0]["type"] == "header"
    reports = lines[1:-1]
    assert len(reports) == 30
    assert {r["N"] for r in reports} == {2, 4}
    assert all(r["residual"] < 1e-10 for r in reports)
    summary = lines[-1]
    assert summary["type"] == "summary"
    assert summary["samples"] == 30 and summary["failures"] == 0


def test_verify_deterministic_across_jobs(tmp_path):
    outs = []
    for jobs in ("1", "3"):
        path = tmp_path / f"j{jobs}.jsonl"
        main(["verify", "convolution", "--N", "2..4", "--samples", "40", "--seed", "5", "--json",
              "--jobs", jobs, "--output", str(path)])
        outs.append(path.read_text())
    assert outs[0] == outs[1]


def test_scan_regions_csv(capsys):
    code, out, _ = run(["scan-regions", "--N", "2", "--alpha", "0.6+0.5i", "--steps", "9"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and set(rows[0]) >= {"beta_re", "beta_im", "region", "phase_classifier", "phase_oracle", "agree"}
    assert all(r["agree"] in ("True", "true", "1") for r in rows if r["status"] == "ok")


def test_scan_regions_json(capsys):
    code, out, _ = run(["scan-regions", "--N", "3", "--alpha", "0.9+0.3i", "--k", "1", "--steps", "15", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["disagreements"] == 0
    assert sum(doc["region_counts"].values()) + doc["skipped"] == 15 * 15


def test_rapidity(capsys):
    code, out, _ = run(["rapidity", "--N", "3", "--kprime", "0.6", "--t", "0.3+0.2i", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    res = doc["residuals"]
    assert max(res.values()) < 1e-12


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cyclichyp", "eval", "p", "--N", "2", "--z", "0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("1.0+0.0i")
