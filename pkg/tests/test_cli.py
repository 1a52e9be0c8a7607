import csv
import io
import json

import pytest

from sideinfo.cli import CSV_COLUMNS, main
from sideinfo.generators import make_erasure_parity
from sideinfo.io import write_channel


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ep2(tmp_path):
    p = tmp_path / "erasure_parity_2.json"
    write_channel(make_erasure_parity(2), p)
    return str(p)


def _value(text, quantity):
    for line in text.splitlines():
        if line.startswith(quantity + " "):
            return float(line.split()[-4])
    raise KeyError(quantity)


def test_solve_causal_and_no_si(capsys, ep2):
    code, out, _ = run(capsys, "solve", ep2, "--case", "causal")
    assert code == 0
    assert abs(_value(out, "causal") - 1.58496) <= 1e-5
    code, out, _ = run(capsys, "solve", ep2, "--case", "no-si")
    assert code == 0 and "1.000000" in out


def test_solve_is_byte_identical(capsys, ep2):
    a = run(capsys, "solve", ep2, "--case", "noncausal", "--format", "csv")[1]
    b = run(capsys, "solve", ep2, "--case", "noncausal", "--format", "csv")[1]
    assert a == b
    assert "# input_sha256: " in a and "# seed: 0" in a


def test_solve_bad_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    doc = {"format_version": "1.0", "kind": "single", "alphabets": {"x": 2, "y": 2, "s": 1, "s_t": 1, "s_r": 1},
           "state_law": [1.0], "transition": [[[1.0, 0.0]], [[0.5]]]}
    p.write_text(json.dumps(doc))
    code, _, err = run(capsys, "solve", str(p), "--case", "causal")
    assert code == 2
    assert "transition[1][0]" in err


def test_solve_missing_file(capsys, tmp_path):
    assert run(capsys, "solve", str(tmp_path / "nope.json"), "--case", "causal")[0] == 2


def test_solve_cap_exit(capsys, ep2):
    code, _, err = run(capsys, "solve", ep2, "--case", "causal", "--cap-strategies", "8")
    assert code == 3 and "cap" in err


def test_solve_nonconvergence_exit(capsys, ep2):
    code, out, _ = run(capsys, "solve", ep2, "--case", "causal", "--max-iter", "1")
    assert code == 4
    assert "false" in out


def test_hypothesis_failure_is_input_error(capsys, ep2):
    assert run(capsys, "solve", ep2, "--case", "rx-knows-tx")[0] == 2


def test_verify_csv(capsys, tmp_path):
    out = tmp_path / "t4.csv"
    code, _, _ = run(capsys, "verify", "theorem4", "--count", "3", "--format", "csv", "--out", str(out))
    assert code == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    assert list(rows[0]) == CSV_COLUMNS
    assert [int(r["instance_seed"]) for r in rows] == [0, 1, 2]
    assert all(r["satisfied"] == "true" and r["wall_ms"] == "0" for r in rows)


def test_verify_erasure_gap_suite(capsys):
    code, out, _ = run(capsys, "verify", "theorem3")
    assert code == 0
    row4 = [l for l in out.splitlines() if l.split() and l.split()[0] == "4"][0].split()
    assert float(row4[2]) >= 0.5  # gap at N = 4


def test_verify_observation1(capsys):
    code, out, _ = run(capsys, "verify", "observation1", "--count", "50", "--seed", "7")
    assert code == 0 and "summary: 50/50 satisfied" in out


def test_verify_violation_exit(capsys):
    # a negative tolerance cannot be met by an equality check
    code, _, _ = run(capsys, "verify", "theorem1", "--count", "2", "--tol-gap", "-1")
    assert code == 1


@pytest.mark.parametrize("argv,expect", [
    (["scenario", "random-access", "--p-on", "0.5", "--rx-knows"], ("C causal", 0.5)),
    (["scenario", "block-static", "--n", "4", "--p-on", "0.5"], ("bound H(S)/n", 0.25)),
    (["scenario", "erasure-parity", "--n", "1"], ("C_G causal Tx SI", 1.0)),
])
def test_scenarios(capsys, tmp_path, argv, expect):
    target = tmp_path / "ch.json"
    code, out, _ = run(capsys, *argv, "--channel-out", str(target))
    assert code == 0
    assert target.exists()
    assert abs(_value(out, expect[0]) - expect[1]) <= 1e-6


def test_scenario_erasure_no_si(capsys, tmp_path):
    code, out, _ = run(capsys, "scenario", "erasure-parity", "--n", "1", "--channel-out", str(tmp_path / "e.json"))
    assert abs(_value(out, "C no SI") - 0.5) <= 1e-6


def test_scenario_bad_param(capsys, tmp_path):
    assert run(capsys, "scenario", "random-access", "--p-on", "1.5")[0] == 2
