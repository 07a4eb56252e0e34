import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nucalc import MLParams, deriv_chain, deriv_limit, extended_beta, integral, ml3, parse
from nucalc.cli import main


def run(*argv, env_config=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def record(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out)


def test_eval_matches_library_bit_for_bit():
    assert record("eval", "--fn", "gamma", "--x", "5")["value"] == 24.0
    assert record("eval", "--fn", "extbeta", "--z", "2", "--y", "3", "--p", "1")["value"] == extended_beta(2, 3, 1)
    rec = record("eval", "--fn", "ml3", "--rho", "1.5", "--lambda", "0.8", "--delta", "1.2", "--z", "-0.7")
    assert rec["value"] == ml3(1.5, 0.8, 1.2, -0.7).value
    assert rec["terms_used"] > 0 and rec["tail_estimate"] >= 0
    assert record("eval", "--fn", "ml1", "--alpha", "2", "--z", "1")["value"] == pytest.approx(math.cosh(1), rel=1e-15)


def test_eval_other_functions():
    assert record("eval", "--fn", "beta", "--z", "2", "--y", "3")["value"] == pytest.approx(1 / 12, rel=1e-15)
    assert record("eval", "--fn", "mltrunc", "--i", "1", "--z", "0.1")["value"] == pytest.approx(1.1, rel=1e-15)
    rec = record("eval", "--fn", "mlext", "--theta", "1", "--vartheta", "1", "--nu", "1", "--c", "2",
                 "--p", "1", "--x", "0.5")
    assert rec["value"] > 0
    rec = record("eval", "--fn", "mlextgen", "--mu", "1", "--delta", "1", "--vartheta", "1", "--q", "2",
                 "--c", "3", "--p", "0", "--z", "0.2")
    assert rec["value"] == pytest.approx(1.0936937829392122, rel=1e-12)


def test_deriv_and_integ_match_library():
    p = MLParams(1.9, 0.6, 0.8, 1.5, 0.5)
    rec = record("deriv", "--expr", "sin(t)*t", "--t", "1.3", "--mu", "0.4", "--params", "1.9,0.6,0.8,1.5,0.5")
    assert rec["value"] == deriv_chain(parse("sin(t)*t"), 1.3, 0.4, p)
    rec = record("deriv", "--expr", "exp(t)", "--t", "0.8", "--mu", "0.7", "--method", "limit")
    lib = deriv_limit(parse("exp(t)"), 0.8, 0.7)
    assert rec["value"] == lib.value and rec["observed_order"] == lib.observed_order
    assert len(rec["per_eps"]) == 5
    rec = record("integ", "--expr", "1", "--a", "0", "--t", "1", "--mu", "0.5")
    assert rec["value"] == integral(parse("1"), 0, 1, 0.5) == pytest.approx(2.0, rel=1e-14)


def test_deriv_nth_order():
    rec = record("deriv", "--expr", "t^3", "--t", "1", "--mu", "1.5", "--n", "1")
    assert rec["method"] == "nth" and rec["value"] == pytest.approx(6.0, rel=1e-6)


def test_table_csv_and_json_round_trip():
    args = ["table", "--expr", "t^2", "--op", "deriv", "--t-min", "1", "--t-max", "2", "--steps", "3"]
    code, out, _ = run(*args)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    code, out_json, _ = run(*args, "--format", "json")
    js = json.loads(out_json)
    assert [float(r["t"]) for r in rows] == [r["t"] for r in js] == [1.0, 1.5, 2.0]
    assert [float(r["value"]) for r in rows] == [r["value"] for r in js]
    assert js[1]["value"] == deriv_chain(parse("t^2"), 1.5, 0.5)


def test_table_integ_and_ml3():
    code, out, _ = run("table", "--expr", "1", "--op", "integ", "--a", "0", "--t-min", "0.25",
                       "--t-max", "1", "--steps", "4", "--format", "json")
    rows = json.loads(out)
    assert rows[-1]["value"] == pytest.approx(2.0, rel=1e-14)
    code, out, _ = run("table", "--op", "ml3", "--t-min", "0", "--t-max", "1", "--steps", "2", "--format", "json")
    assert json.loads(out)[-1]["value"] == pytest.approx(math.e, rel=1e-15)


@pytest.mark.parametrize("argv, code", [
    (["eval", "--fn", "gamma"], 2),                                        # missing flag
    (["eval", "--fn", "nope", "--x", "1"], 2),                             # bad choice
    (["eval", "--fn", "gamma", "--x", "0"], 2),                            # pole
    (["deriv", "--expr", "t +", "--t", "1", "--mu", "0.5"], 2),            # parse error
    (["deriv", "--expr", "t", "--t", "1", "--mu", "1.5"], 2),              # order out of range
    (["deriv", "--expr", "t", "--t", "1", "--mu", "0.5", "--params", "1,1,1,0.5"], 2),
    (["deriv", "--expr", "t", "--t", "1", "--mu", "0.5", "--method", "limit",
      "--params", "1,1,1,2,0.5"], 4),                                      # p > 0 limit form
    (["eval", "--fn", "mlextgen", "--mu", "1", "--delta", "1", "--vartheta", "1", "--q", "2",
      "--c", "3", "--p", "0", "--z", "0.3"], 3),                           # divergent series
    (["eval", "--fn", "ml3", "--rho", "1", "--lambda", "1", "--delta", "1", "--z", "40",
      "--config", "CFG"], 3),                                              # term budget from config
    (["table", "--op", "ml3", "--t-min", "0", "--t-max", "1", "--steps", "1"], 2),
    (["table", "--op", "deriv", "--t-min", "0", "--t-max", "1", "--steps", "3"], 2),
    (["verify", "--cases", "0"], 2),
    (["verify", "--cases", "1", "--out", "/nonexistent/dir/r.jsonl"], 5),
    (["integ", "--expr", "1", "--a", "0", "--t", "1", "--mu", "0.5", "--config", "/nonexistent.cfg"], 5),
    ([], 2),
])
def test_exit_codes(argv, code, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("series.max_terms = 5\n")
    argv = [str(cfg) if a == "CFG" else a for a in argv]
    got, out, err = run(*argv)
    assert got == code, err
    if code not in (0, 1) and argv:
        assert err and not out


def test_config_via_environment(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("params = 1.9,0.6,0.8,1.5,0.5\n")
    monkeypatch.setenv("NUCALC_CONFIG", str(cfg))
    rec = record("deriv", "--expr", "t^2", "--t", "1", "--mu", "0.5")
    assert rec["value"] == deriv_chain(parse("t^2"), 1.0, 0.5, MLParams(1.9, 0.6, 0.8, 1.5, 0.5))


def test_verify_writes_report(tmp_path):
    out_path = tmp_path / "r.jsonl"
    rec = record("verify", "--seed", "3", "--cases", "2", "--out", str(out_path))
    assert rec["failed"] == 0 and rec["passed"] == rec["cases"]
    header = json.loads(out_path.read_text().splitlines()[0])
    assert header["seed"] == 3 and header["totals"]["cases"] == rec["cases"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nucalc", "eval", "--fn", "gamma", "--x", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"fn": "gamma", "value": 6.0}
    proc = subprocess.run([sys.executable, "-m", "nucalc", "deriv", "--expr", "(", "--t", "1", "--mu", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and "offset" in proc.stderr
