import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from ctrfact.cli import detect_qbf_format, run

ROOT = Path(__file__).resolve().parent.parent
SUZY = str(ROOT / "models" / "suzy.json")
GAME = str(ROOT / "models" / "videogame.json")
GAME_FORMULA = "(ac3 <>-> ju) & ((ac3 & D(ac3 -> ju)) []-> ju)"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_cause_st_is_a_cause():
    code, out, _ = call("cause", SUZY, "st", "bs", "--via", "both")
    assert code == 0
    assert "interventions: true" in out and "counterfactuals: true" in out


def test_cause_bt_is_not_a_cause():
    code, out, _ = call("cause", SUZY, "bt", "bs", "--via", "both")
    assert code == 1
    assert "interventions: false" in out and "counterfactuals: false" in out


def test_cause_all_routes_json():
    code, out, _ = call("--format", "json", "cause", SUZY, "st", "bs", "--via", "all")
    data = json.loads(out)
    assert code == 0
    assert data["verdicts"] == {"interventions": True, "counterfactuals": True, "qbf": True}
    assert data["witness"] == {"intervention": {"st": False}, "frozen": ["bh"]}


def test_disagreement_exit_code(tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps({"equations": {"v0": "u0", "v2": "v0"}, "valuation": ["u0", "v0", "v2"]}))
    code, out, _ = call("cause", str(path), "v2", "v0", "--via", "both")
    assert code == 3
    assert "DISAGREEMENT" in out


def test_check_videogame():
    code, out, _ = call("check", GAME, GAME_FORMULA)
    assert code == 0 and "brute: true" in out
    code, out, _ = call("check", GAME, GAME_FORMULA, "--via", "both")
    assert code == 0 and "qbf: true" in out
    code, _, _ = call("check", GAME, "ac3 []-> ju")
    assert code == 1


def test_check_on_equational_model_uses_the_base():
    code, _, _ = call("check", SUZY, "~st & sd & bd <>-> bs")
    assert code == 0


def test_closest_lists_states():
    code, out, _ = call("--format", "json", "closest", GAME, "ac3")
    data = json.loads(out)
    assert code == 0
    assert {"base": ["ac1 -> fo", "ac2 -> ba", "ac3 -> ju"], "valuation": ["ac3", "ju"]} in data["closest"]


def test_causes_with_figure(tmp_path):
    fig = tmp_path / "g.png"
    code, out, _ = call("causes", SUZY, "bs", "--max-size", "2", "--figure", str(fig))
    assert code == 0
    assert out.splitlines()[1:] == ["  bs", "  sh", "  st"]
    assert fig.read_bytes()[:4] == b"\x89PNG"


@pytest.mark.parametrize("fmt", ["qcir", "qdimacs"])
def test_encode_then_eval(tmp_path, fmt):
    path = tmp_path / f"q.{fmt}"
    code, _, _ = call("encode", GAME, "ac3 <>-> ju", "--format", fmt, "-o", str(path))
    assert code == 0
    assert detect_qbf_format(path.read_text()) == fmt
    code, out, _ = call("eval-qbf", str(path))
    assert code == 0 and out.strip() == f"{fmt}: true"


def test_encode_cause_query(tmp_path):
    path = tmp_path / "c.qcir"
    code, out, _ = call("--format", "json", "encode", SUZY, "cause(bt, bs)", "-o", str(path))
    assert code == 0
    assert json.loads(out)["prefix"] == "eae"
    assert call("eval-qbf", str(path), "--method", "bdd")[0] == 1


@pytest.mark.parametrize("argv, message", [
    (("cause", GAME, "ac3", "ju"), "needs an equational model"),
    (("check", GAME, "ac3 &"), "cannot parse formula"),
    (("cause", SUZY, "st | bt", "bs"), "not a conjunction of literals"),
    (("cause", SUZY, "true", "bs", "--via", "counterfactuals"), "nonempty"),
    (("check", "/nonexistent.json", "p"), "<file>"),
    (("encode", SUZY, "cause(st)"), "cause(TERM, EFFECT)"),
])
def test_errors_exit_2(argv, message):
    code, _, err = call(*argv)
    assert code == 2
    assert message in err


def test_usage_error_exit_2(capsys):
    assert run(["cause", SUZY]) == 2


def test_eval_qbf_rejects_unknown_format(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("hello\n")
    code, _, err = call("eval-qbf", str(path))
    assert code == 2 and "unrecognized" in err


def test_validate_report(tmp_path):
    code, out, _ = call("validate", "--suite", "strong-centering", "--suite", "hardness",
                        "--samples", "20", "--report-dir", str(tmp_path))
    assert code == 0
    assert out.startswith("PASS strong-centering")
    rows = (tmp_path / "validation.csv").read_text().splitlines()
    assert rows[0] == "suite,passed,instances,failures,seconds"
    assert rows[1].startswith("strong-centering,True,1,0,")
    assert rows[2].startswith("hardness,True,20,0,")
    assert (tmp_path / "validation.png").read_bytes()[:4] == b"\x89PNG"


def test_validate_is_deterministic():
    a = json.loads(call("--format", "json", "validate", "--suite", "but-might", "--seed", "3",
                        "--samples", "30")[1])
    b = json.loads(call("--format", "json", "validate", "--suite", "but-might", "--seed", "3",
                        "--samples", "30")[1])
    for s in a["suites"] + b["suites"]:
        s.pop("seconds")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ctrfact.cli", "cause", SUZY, "st", "bs"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "interventions: true" in proc.stdout
