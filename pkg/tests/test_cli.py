import json
from importlib import resources

import pytest
from jsonschema import Draft202012Validator

from vworkbench.cli import REPRO, main

CR = '{"mode": "cofinite", "support": ["inf+1"]}'
FIVE = '{"mode": "finite", "support": ["n:5"]}'
THREE = '{"mode": "finite", "support": ["n:3"]}'
MODEL = '{"worlds": ["a", "b"], "relations": {"0": [["a", "b"]]}, "valuation": {"0": ["b"]}}'


def schema(name):
    text = resources.files("vworkbench").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


CASES = [
    (["parse", "[]<>top -> []bot"], "parse", 0),
    (["eval", "--formula", "[]<>top"], "eval", 0),
    (["eval", "--formula", "[]p0", "--valuation", '{"p0": {"mode": "cofinite", "support": ["n:5"]}}'], "eval", 0),
    (["eval", "--formula", "<e>([]<>top & <>top)", "--family", "vbe"], "eval", 0),
    (["eval", "--formula", "[]p0", "--frame", MODEL], "eval", 0),
    (["eval", "--formula", "[]bot", "--family", "vbi", "--I", "2,4"], "eval", 0),
    (["decide", "--logic", "id", "--formula", "top"], "decide", 0),
    (["decide", "--logic", "id", "--formula", "[]<>top -> []bot", "--witness"], "decide", 1),
    (["decide", "--logic", "ide", "--formula", "<e>([]<>top & <>top)"], "decide", 0),
    (["check-r", "--a", '{"mode": "finite", "support": ["inf+1"]}', "--b", "top"], "check_r", 1),
    (["check-r", "--a", FIVE, "--b", THREE], "check_r", 0),
    (["find-r-failure", "--bound", "1"], "find_r_failure", 0),
    (["find-r-failure", "--family", "vbe", "--modality", "e"], "find_r_failure", 1),
    (["v-witness"], "v_witness", 0),
    (["jvb"], "jvb", 0),
    (["jvb", "--y", "top", "--z", CR], "jvb", 1),
    (["great-report", "--preset", "vb"], "great_report", 0),
    (["great-report", "--preset", "vbe"], "great_report", 0),
    (["great-report", "--preset", "vbi"], "great_report", 0),
    (["great-report", "--a", "bot"], "great_report", 1),
    (["prove", "--calculus", "K", "--script", "1. p0 -> p0 ; TAUT"], "prove", 0),
    (["prove", "--calculus", "K", "--script", "1. []p0 -> p0 ; TAUT"], "prove", 1),
    (["fixtures", "--name", "F1"], "fixtures", 0),
    (["repro", "lemma2"], "repro", 0),
]


@pytest.mark.parametrize("argv,name,code", CASES, ids=[" ".join(c[0][:3]) for c in CASES])
def test_json_output_validates(capsys, argv, name, code):
    got, payload = run_json(capsys, argv)
    assert got == code
    Draft202012Validator(schema(name)).validate(payload)


@pytest.mark.parametrize("argv", [
    ["parse", "p0 & q"],
    ["decide", "--logic", "id", "--formula", "i0"],
    ["eval", "--formula", "top", "--family", "vb", "--frame", MODEL],
    ["eval", "--formula", "top", "--family", "vbi", "--I", "1"],
    ["prove", "--calculus", "K", "--script", "1. p0 ->; TAUT"],
    ["prove", "--calculus", "nope", "--script", "1. top ; TAUT"],
    ["check-r", "--a", "p0", "--b", "top"],
])
def test_errors_exit_2_with_schema(capsys, argv):
    code, payload = run_json(capsys, argv)
    assert code == 2
    Draft202012Validator(schema("error")).validate(payload)


def test_syntax_error_offset(capsys):
    _, payload = run_json(capsys, ["parse", "p0 & q"])
    assert payload["offset"] == 5
    assert payload["kind"] == "FormulaSyntaxError"


def test_usage_error_exit_2(capsys):
    assert main(["decide", "--formula", "top"]) == 2
    assert main(["nosuch"]) == 2


def test_lemma2_text(capsys):
    assert main(["repro", "lemma2"]) == 0
    out = capsys.readouterr().out
    assert "vB-axiom valid over VB: yes; Box Dia top -> Box bot valid: no" in out


def test_decide_text(capsys):
    assert main(["decide", "--logic", "id", "--formula", "top"]) == 0
    assert main(["decide", "--logic", "id", "--formula", "[]<>top -> []bot"]) == 1


@pytest.mark.parametrize("target", sorted(REPRO))
def test_repro_targets(capsys, target):
    code, payload = run_json(capsys, ["repro", target])
    Draft202012Validator(schema("repro")).validate(payload)
    assert code == 0 and payload["pass"], payload


def test_vinc_repro_details(capsys):
    _, payload = run_json(capsys, ["repro", "vinc-vb"])
    d = payload["details"]
    assert d["v_witness"]["join"] == {"mode": "cofinite", "support": []}
    assert d["v_witness"]["separation"] == {"mode": "finite", "support": ["inf+1"]}
    assert d["report"]["v_failure"] and d["report"]["premise_holds"]


def test_script_from_file(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text("1. p0 -> p0 ; TAUT\n2. [](p0 -> p0) ; NEC(1)\n")
    code, payload = run_json(capsys, ["prove", "--calculus", "K", "--script", f"@{p}"])
    assert code == 0 and payload["accepted"]


def test_v_witness_from_json(capsys):
    w = '{"a": {"mode": "finite", "support": ["inf+1"]}, "b": {"mode": "cofinite", "support": []}, "modality": 0}'
    code, payload = run_json(capsys, ["v-witness", "--witness", w])
    assert code == 0
    assert payload["join"] == {"mode": "cofinite", "support": []}
