import json

import pytest

from hurstbayes import harness
from hurstbayes.cli import main
from hurstbayes.harness import read_report_json


def _run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_simulate_deterministic(tmp_path, capsys):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    rc1, out1, _ = _run(capsys, "simulate", "--h", "0.7", "--n", "64",
                        "--seed", "5", "--out", a)
    rc2, _, _ = _run(capsys, "simulate", "--h", "0.7", "--n", "64",
                     "--seed", "5", "--out", b)
    assert rc1 == rc2 == 0
    assert "wrote 64 increments" in out1
    assert open(a).read() == open(b).read()


def test_simulate_rejects_bad_h(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--h", "1.0", "--n", "8",
              "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2
    assert "(0, 1)" in capsys.readouterr().err


def test_estimate_file_and_inline_agree(tmp_path, capsys):
    csv_path = str(tmp_path / "path.csv")
    rc, _, _ = _run(capsys, "simulate", "--h", "0.7", "--n", "512",
                    "--seed", "42", "--out", csv_path)
    assert rc == 0
    rc, out, _ = _run(capsys, "estimate", "--in", csv_path)
    assert rc == 0
    doc = json.loads(out)
    assert set(doc) == {"map", "mean", "sd", "ci95", "alpha_n", "c_n",
                        "normal_approx_sd", "n", "flags"}
    assert doc["n"] == 512
    assert abs(doc["map"] - 0.7) < 0.1
    assert doc["ci95"][0] < doc["map"] < doc["ci95"][1]
    assert doc["alpha_n"] is not None and doc["c_n"] > 0.0

    # the CSV round trip is bitwise, so the inline route must agree exactly
    rc, out2, _ = _run(capsys, "estimate", "--h", "0.7", "--n", "512",
                       "--seed", "42")
    assert rc == 0
    doc2 = json.loads(out2)
    assert doc2["map"] == doc["map"]
    assert doc2["mean"] == doc["mean"]


def test_estimate_writes_json_file(tmp_path, capsys):
    out_path = str(tmp_path / "summary.json")
    rc, out, _ = _run(capsys, "estimate", "--h", "0.6", "--n", "128",
                      "--seed", "3", "--out", out_path)
    assert rc == 0
    assert "map:" in out and out_path in out
    doc = json.load(open(out_path))
    assert abs(doc["map"] - 0.6) < 0.15


def test_estimate_input_mutual_exclusion(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--in", str(tmp_path / "x.csv"), "--h", "0.5",
              "--n", "8"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["estimate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_estimate_malformed_csv(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("# fgn h=0.5 n=2 spacing=0.5 seed=1\n0.1\nxyz\n")
    rc, _, err = _run(capsys, "estimate", "--in", str(bad))
    assert rc == 2
    assert "error:" in err and "line 3" in err


def test_estimate_missing_file_is_runtime_failure(tmp_path, capsys):
    rc, _, err = _run(capsys, "estimate", "--in", str(tmp_path / "nope.csv"))
    assert rc == 1
    assert "failure:" in err


def test_estimate_single_observation_flags(capsys):
    rc, out, _ = _run(capsys, "estimate", "--h", "0.5", "--n", "1")
    assert rc == 0
    doc = json.loads(out)
    assert doc["alpha_n"] is None
    joined = " ".join(doc["flags"])
    assert "n=1" in joined and "n >= 8" in joined


def test_verify_moments_writes_reports(tmp_path, capsys):
    prefix = str(tmp_path / "rep")
    rc, out, _ = _run(capsys, "verify", "moments", "--paths", "5",
                      "--out", prefix)
    assert rc == 0
    assert "moments: pass" in out
    report = read_report_json(prefix + ".json")
    assert report.passed() and len(report.records) == 5
    assert (tmp_path / "rep.csv").exists()


def test_verify_unknown_experiment(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_slln_requires_symbols(tmp_path, capsys):
    rc, _, err = _run(capsys, "verify", "slln",
                      "--out", str(tmp_path / "r"))
    assert rc == 2
    assert "slln needs --alpha and --beta" in err


def test_verify_slln_small_with_tol_scale(tmp_path, capsys):
    before = dict(harness.THRESHOLDS)
    rc, out, _ = _run(capsys, "verify", "slln", "--alpha", "0.2",
                      "--beta", "-0.1", "--nlist", "64,128", "--paths", "3",
                      "--tol-scale", "10", "--out", str(tmp_path / "r"))
    assert rc == 0
    assert harness.THRESHOLDS == before  # context manager restored the table


def test_verify_inverse_skip_exits_nonzero(tmp_path, capsys):
    rc, out, _ = _run(capsys, "verify", "inverse", "--alpha", "0",
                      "--out", str(tmp_path / "r"))
    assert rc == 1
    assert "skip" in out
    assert read_report_json(str(tmp_path / "r.json")).verdict == "skip"


def test_env_seed_resolution(tmp_path, capsys, monkeypatch):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    monkeypatch.setenv("HURST_SEED", "7")
    _run(capsys, "simulate", "--h", "0.6", "--n", "32", "--out", a)
    monkeypatch.delenv("HURST_SEED")
    _run(capsys, "simulate", "--h", "0.6", "--n", "32", "--seed", "7",
         "--out", b)
    assert open(a).read() == open(b).read()

    monkeypatch.setenv("HURST_SEED", "not-a-number")
    rc, _, err = _run(capsys, "simulate", "--h", "0.6", "--n", "32",
                      "--out", str(tmp_path / "c.csv"))
    assert rc == 2
    assert "HURST_SEED" in err
