import json
from fractions import Fraction

import pytest

from medimax.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, UsageError, main, parse_rational, parse_universe
from medimax.grid import DomainError
from medimax.stepfn import StepFunction


def run(*argv):
    return main([str(a) for a in argv])


def load(path):
    return StepFunction.from_json(json.loads(path.read_text()))


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("2") == 2
    with pytest.raises(UsageError, match="--tau"):
        parse_rational("1/x", "--tau")


def test_parse_universe():
    u = parse_universe("-1:1,0:1/2", Fraction(1, 4))
    assert u.extent == (8, 2)
    with pytest.raises((UsageError, DomainError)):
        parse_universe("1:0", Fraction(1, 4))


def test_gen_indicator_and_tau_max(tmp_path):
    src, out = tmp_path / "chi.json", tmp_path / "m.json"
    assert run("gen", "indicator", "--from", -1, "--to", 1, "--out", src) == EXIT_OK
    assert run("run", src, "--op", "tau-max", "--tau", "1/2", "--family", "rn", "--out", out) == EXIT_OK
    m = load(out)
    support = [i for i, v in enumerate(m.values.tolist()) if v == 1]
    assert support == list(range(70, 130))
    assert set(m.values.tolist()) <= {0, 1}


def test_round_trip_bytes(tmp_path):
    a = tmp_path / "a.json"
    run("gen", "ramp", "--universe", "0:1", "--cell", "1/8", "--out", a)
    first = a.read_text()
    assert StepFunction.from_json(json.loads(first)).dumps() == first


def test_gen_random_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("gen", "random", "--seed", 7, "--universe", "0:2", "--out", a)
    run("gen", "random", "--seed", 7, "--universe", "0:2", "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_gen_csv_stdout(capsys):
    assert run("gen", "step", "--universe", "0:1", "--cell", "1/2", "--at", "1/2", "--format", "csv") == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "index,coordinate,value"
    assert rows[1:] == ["0,0.25,0/1", "1,0.75,1/1"]


def test_char_wt(tmp_path):
    w, out = tmp_path / "w.json", tmp_path / "c.json"
    run("gen", "w_t", "--t", "1/2", "--radius", 3, "--cell", "1/2", "--out", w)
    assert run("char", w, "--which", "a1,ap", "--replay-witness", "--out", out) == EXIT_OK
    recs = json.loads(out.read_text())
    a1 = Fraction(recs[0]["value"])
    # (1/t)(R - 1 + t h)/(R - 1 + h) with R = 3, h = 1/2
    assert a1 == 2 * (2 + Fraction(1, 4)) / (2 + Fraction(1, 2))
    assert all(r["replay_ok"] for r in recs)
    assert recs[1]["p"] == "2/1"


def test_mollify_and_domination(tmp_path):
    f, out = tmp_path / "f.json", tmp_path / "o.json"
    run("gen", "indicator", "--universe=-2:2", "--cell", "1/4", "--out", f)
    assert run("run", f, "--op", "mollify", "--r", "1/4", "--out", out) == EXIT_OK
    assert run("run", f, "--op", "domination", "--tau", "1/2", "--out", out) == EXIT_OK
    assert run("run", f, "--op", "dyadic-hl", "--out", out) == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["run", "missing.json", "--op", "hl"],
    ["gen", "indicator", "--from", "1/0x"],
    ["verify", "no-such-suite"],
    ["gen", "nonsense"],
    [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_tau_required(tmp_path):
    f = tmp_path / "f.json"
    run("gen", "indicator", "--universe", "0:1", "--cell", "1/4", "--out", f)
    assert run("run", f, "--op", "tau-max") == EXIT_USAGE
    assert run("run", f, "--op", "dyadic-hl", "--grid-shift", "0,0") == EXIT_USAGE


def test_config_replay(tmp_path):
    out, cfg = tmp_path / "o.json", tmp_path / "cfg.json"
    run("gen", "indicator", "--universe", "0:2", "--cell", "1/4", "--out", out, "--save-config", cfg)
    first = out.read_bytes()
    out.unlink()
    assert run("--config", cfg) == EXIT_OK
    assert out.read_bytes() == first


def test_verify_and_report(tmp_path, capsys):
    lines = tmp_path / "v.jsonl"
    assert run("verify", "sharpness", "--out", lines) == EXIT_OK
    rec = json.loads(lines.read_text())
    assert rec["claim"] == "sharpness" and rec["status"] == "pass"
    csv = tmp_path / "r.csv"
    assert run("report", lines, "--format", "csv", "--out", csv) == EXIT_OK
    assert csv.read_text().splitlines()[1].startswith("sharpness,pass,3,17/1")
    assert "sharpness: PASS" in capsys.readouterr().err


def test_verify_failure_exit_and_replay(tmp_path):
    from test_verify import bad_expansion_report

    lines = tmp_path / "bad.jsonl"
    lines.write_text(bad_expansion_report().dumps() + "\n")
    assert run("report", lines) == EXIT_FAIL
    assert run("verify", "--replay", lines, "--out", tmp_path / "again.jsonl") == EXIT_FAIL


def test_report_rejects_garbage(tmp_path):
    bad = tmp_path / "x.jsonl"
    bad.write_text('{"nope": 1}\n')
    assert run("report", bad) == EXIT_USAGE
