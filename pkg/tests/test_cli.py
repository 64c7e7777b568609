import csv
import io
import json
import re
import subprocess
import sys

import pytest

from normcf import exactnum as en
from normcf.cli import main

EXACT = re.compile(r"^-?\d+(/\d+)?$|^\(?-?\d*[+-]?\d*√\d+\)?(/\d+)?$")
ENCLOSURE = re.compile(r"^-?\d+\.\d+~-?\d+$")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def is_number_string(s):
    return bool(EXACT.match(s) or ENCLOSURE.match(s))


def walk(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from walk(v)
    else:
        yield obj


# ---------------------------------------------------------------------------
# examples


def test_expand_sup_norm_golden(capsys):
    code, out, _ = run(["expand", "--norm", "p:inf", "--alpha", "surd:-1,1,5,2", "--terms", "10"], capsys)
    assert code == 0
    r = rows(out)
    assert r[1]["m"] == "1" and r[1]["eps"] == "-1" and r[1]["a"] == "2"
    assert all(row["eps"] == "1" and row["a"] == "1" for row in r[2:])
    # delta(alpha; m) tends to (5 + sqrt5)/10 and is printed exactly
    assert all("√5" in row["delta"] for row in r[1:])


def test_expand_p2_sqrt3_not_singularized(capsys):
    code, out, _ = run(["expand", "--norm", "p:2", "--alpha", "surd:-1,1,3,2", "--terms", "10"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 11
    assert all(row["singularized"] == "0" for row in r)
    assert [row["n"] for row in r] == [str(k) for k in range(11)]


def test_expand_p1_euler_matches_lattice(capsys):
    from normcf.fcf import lattice_oracle
    from normcf.norms import parse_norm
    from normcf.regcf import ArithmeticDigits

    code, out, _ = run(["expand", "--norm", "p:1", "--alpha", "cf-arith:0;2,4", "--terms", "5"], capsys)
    assert code == 0
    qs = [int(row["q"]) for row in rows(out)]
    orc = lattice_oracle(parse_norm("p:1"), ArithmeticDigits(0, 2, 4), 5, q_cap=10**12)
    assert qs == [b.q for b in orc][: len(qs)]


def test_delta_p2_sqrt3(capsys):
    code, out, _ = run(["delta", "--norm", "p:2", "--alpha", "surd:-1,1,3,2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["value"] == "1" and doc["result"]["status"] == "ExactCycle"
    assert doc["schema_version"] == 1
    assert doc["config"]["alpha"] == "surd:-1,1,3,2"


def test_critdet_oct1(capsys):
    code, out, _ = run(["critdet", "--norm", "oct1"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["branch"] == "General"
    assert res["delta"].startswith("0.91421356")
    assert res["delta_closed_form"] == "(-1+2√2)/2"


def test_region_p1_matches_S1(capsys):
    from fractions import Fraction

    code, out, _ = run(["region", "--norm", "p:1", "--grid", "512"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 512 * 512
    for row in r:
        u, v = Fraction(row["u"]), Fraction(row["v"])
        # grid centres never hit the curve exactly, so S is exactly u(2 - v) > 1
        assert (row["label"] == "S") == (u >= Fraction(1, 2) and u * (2 - v) >= 1), (u, v)


def test_mindelta_and_simulate(capsys):
    code, out, _ = run(["mindelta", "--norm", "p:inf"], capsys)
    assert code == 0 and json.loads(out)["result"]["value"] == "(5+√5)/10"
    code, out, _ = run(["simulate", "--norm", "p:2", "--samples", "2", "--terms", "100", "--format", "csv"], capsys)
    assert code == 0
    r = rows(out)
    assert len(r) == 50 and list(r[0]) == ["lo", "hi", "mass"]


# ---------------------------------------------------------------------------
# error contract


def test_exit_code_parse(capsys):
    assert run(["expand", "--norm", "p:9x", "--alpha", "surd:-1,1,5,2"], capsys)[0] == 2
    assert run(["delta", "--norm", "p:2", "--alpha", "nonsense"], capsys)[0] == 2
    assert run(["delta", "--norm", "p:2", "--alpha", "surd:3,2,4,7"], capsys)[0] == 2
    assert run(["critdet", "--norm", "p:1/2"], capsys)[0] == 2


def test_exit_code_ambiguous(capsys):
    # the finite prefix cannot decide whether u exceeds 1/2
    code, _, err = run(["expand", "--norm", "p:2", "--alpha", "cf-prefix:0;1,2", "--terms", "10"], capsys)
    assert code == 3 and "ambiguous" in err


def test_exit_code_precision(capsys):
    try:
        code, _, err = run(["expand", "--norm", "p:3", "--alpha", "random:1", "--terms", "5", "--max-bits", "20"], capsys)
        assert code == 4 and "precision" in err
    finally:
        en.DEFAULT_MAX_BITS = 4096


# ---------------------------------------------------------------------------
# invariants


@pytest.mark.parametrize("argv", [
    ["expand", "--norm", "oct1", "--alpha", "random:7", "--terms", "15"],
    ["delta", "--norm", "p:3", "--alpha", "surd:-1,1,5,2", "--format", "csv"],
    ["critdet", "--norm", "p:3"],
    ["region", "--norm", "oct2", "--grid", "32"],
    ["simulate", "--norm", "p:1", "--samples", "3", "--terms", "200", "--seed", "5"],
])
def test_byte_identical_reruns(argv, capsys):
    a = run(argv, capsys)[1]
    b = run(argv, capsys)[1]
    assert a == b and a


@pytest.mark.parametrize("argv", [
    ["critdet", "--norm", "p:3"],
    ["critdet", "--norm", "compose(p:2;p:1;p:inf)"],
    ["delta", "--norm", "oct1", "--alpha", "random:3", "--terms", "80"],
    ["mindelta", "--norm", "p:3/2"],
    ["simulate", "--norm", "oct1", "--samples", "2", "--terms", "150"],
])
def test_no_bare_floats_json(argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(out)
    for leaf in walk(doc["result"]):
        assert not isinstance(leaf, float), leaf
        if isinstance(leaf, str) and re.match(r"[-(\d√]", leaf):
            assert is_number_string(leaf), leaf


def test_no_bare_floats_csv(capsys):
    _, out, _ = run(["expand", "--norm", "p:3", "--alpha", "random:2", "--terms", "12"], capsys)
    for row in rows(out):
        for key in ("nu", "mu", "delta"):
            assert is_number_string(row[key]), row[key]


def test_out_file_and_config_echo(tmp_path, capsys):
    path = tmp_path / "c.json"
    assert run(["critdet", "--norm", "p:2", "--out", str(path)], capsys)[1] == ""
    doc = json.loads(path.read_text())
    assert doc["config"] == {"command": "critdet", "format": "json", "max_bits": 4096, "norm": "p:2"}
    assert doc["result"]["delta"] == "√3/2"


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "normcf.cli", "critdet", "--norm", "p:inf"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["result"]["delta"] == "1"
