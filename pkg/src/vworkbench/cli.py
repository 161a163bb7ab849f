"""Command-line front end.

Exit codes: 0 affirmative (valid, accepted, witness found, check passed),
1 negative, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import additivity as av
from . import cofin, decision, finite
from .formula import (
    ConvBox,
    Formula,
    HOLE_FORMULA,
    FormulaSyntaxError,
    Neg,
    UBox,
    box_indices,
    length,
    modal_depth,
    nominals,
    parse,
    standard_translation,
    to_json,
    to_text,
    uses,
)
from .proof import (
    ScriptSyntaxError,
    check_script,
    fixture_corpus,
    get_calculus,
    parse_script,
)
from .proof.calculi import VB_AXIOM

BOX_DIA_TOP = parse("[]<>top")
LEMMA2_FORMULA = parse("[]<>top -> []bot")
VBE_AXIOM = parse("<e>([]<>top & <>top)")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input helpers


def _read_text(arg: str) -> str:
    """Inline text, ``@path`` or ``-`` for stdin."""
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        return Path(arg[1:]).read_text()
    return arg


def _json_arg(arg: str):
    text = _read_text(arg)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"invalid JSON: {e}") from e


def _formula(text: str) -> Formula:
    return parse(_read_text(text))


def _family(args) -> cofin.FrameFamily:
    sel = args.family
    if sel.strip().startswith("{") or sel.startswith("@"):
        return cofin.family_from_selector(_json_arg(sel))
    if sel == "vbi":
        return cofin.vb_i(args.I or [])
    return cofin.family_from_selector(sel)


def _modality(text: str) -> int:
    return cofin.E_MODALITY if text == "e" else int(text)


def _adm(F: cofin.FrameFamily, text: str) -> cofin.AdmSet:
    """An admissible set given as JSON or as a variable-free formula."""
    raw = _read_text(text)
    if raw.strip().startswith("{"):
        return F.check(cofin.admset_from_json(json.loads(raw)))
    return cofin.eval(F, {}, parse(raw))


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------- output


class Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, payload: dict, lines: list[str]) -> None:
        if self.as_json:
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            for ln in lines:
                print(ln)


# ---------------------------------------------------------------- subcommands


def cmd_parse(args, out: Out) -> int:
    phi = _formula(args.formula)
    st = None
    if box_indices(phi) <= {0} and not nominals(phi) and not uses(phi, ConvBox) and not uses(phi, UBox):
        st = standard_translation(phi)
    payload = {
        "formula": to_text(phi),
        "ast": to_json(phi),
        "length": length(phi),
        "modal_depth": modal_depth(phi),
        "standard_translation": st,
    }
    lines = [to_text(phi), f"l = {payload['length']}, modal depth = {payload['modal_depth']}"]
    if st is not None:
        lines.append(f"ST_x: {st}")
    out.emit(payload, lines)
    return 0


def cmd_eval(args, out: Out) -> int:
    phi = _formula(args.formula)
    if args.frame and args.family:
        raise UsageError("give either --family or --frame, not both")
    if args.frame:
        model = finite.model_from_json(_json_arg(args.frame))
        truth = finite.truth_set(model, phi)
        worlds = [w for w in model.frame.worlds if w in truth]
        payload = {"formula": to_text(phi), "frame": True, "worlds": worlds,
                   "globally_true": len(worlds) == len(model.frame.worlds)}
        out.emit(payload, [f"{to_text(phi)} is true at: {{{', '.join(worlds)}}}"])
        return 0
    args.family = args.family or "vb"
    F = _family(args)
    theta = cofin.valuation_from_json(_json_arg(args.valuation)) if args.valuation else {}
    result = cofin.eval(F, theta, phi)
    payload = {"formula": to_text(phi), "family": cofin.family_to_json(F), "result": cofin.admset_to_json(result)}
    out.emit(payload, [f"[[{to_text(phi)}]] = {result}"])
    return 0


def cmd_decide(args, out: Out) -> int:
    phi = _formula(args.formula)
    fn = decision.in_ID if args.logic == "id" else decision.in_IDe
    member = fn(phi, max_vars=args.max_vars)
    witness = None
    if not member and args.witness:
        w = decision.good_sat(Neg(phi), max_vars=args.max_vars)
        witness = w.to_json() if w is not None else None
    name = args.logic.upper() if args.logic == "id" else "IDe"
    payload = {"logic": args.logic, "formula": to_text(phi), "in_logic": member,
               "collapse_size": length(phi) + 3, "witness": witness}
    lines = [f"{to_text(phi)} {'is' if member else 'is not'} in {name}"]
    if witness is not None and not out.as_json:
        lines.append(json.dumps(witness, indent=2))
    out.emit(payload, lines)
    return 0 if member else 1


def cmd_check_r(args, out: Out) -> int:
    F = _family(args)
    m = _modality(args.modality)
    a, b = _adm(F, args.a), _adm(F, args.b)
    holds = av.check_R_at(F, m, a, b)
    payload = {"family": cofin.family_to_json(F), "modality": args.modality,
               "a": cofin.admset_to_json(a), "b": cofin.admset_to_json(b), "holds": holds}
    out.emit(payload, [f"R at (a={a}, b={b}): {'holds' if holds else 'fails'}"])
    return 0 if holds else 1


def cmd_find_r_failure(args, out: Out) -> int:
    F = _family(args)
    w = av.find_R_failure(F, _modality(args.modality), args.bound)
    payload = {"family": cofin.family_to_json(F), "bound": args.bound,
               "witness": None if w is None else w.to_json()}
    if w is None:
        lines = [f"no R failure with supports within bound {args.bound}"]
    else:
        lines = [f"R fails at a = {w.a}, b = {w.b}"]
    out.emit(payload, lines)
    return 0 if w is not None else 1


def _r_witness_from_json(data: dict, args) -> av.RFailureWitness:
    """Witness JSON as printed by find-r-failure; family and modality fall back to the flags."""
    if "a" not in data or "b" not in data:
        raise UsageError("witness JSON needs 'a' and 'b'")
    F = cofin.family_from_selector(data["family"]) if "family" in data else _family(args)
    m = data.get("modality", args.modality)
    m = cofin.E_MODALITY if m == "e" else int(m)
    return av.RFailureWitness(F, m, F.check(cofin.admset_from_json(data["a"])),
                              F.check(cofin.admset_from_json(data["b"])))


def cmd_v_witness(args, out: Out) -> int:
    if args.witness:
        rw = _r_witness_from_json(_json_arg(args.witness), args)
    else:
        F = _family(args)
        rw = av.find_R_failure(F, _modality(args.modality), args.bound)
        if rw is None:
            out.emit({"witness": None}, [f"no R failure within bound {args.bound}"])
            return 1
    vw = av.v_witness(rw.family, rw)
    payload = vw.to_json()
    lines = [
        f"B = {{d <= b : d != 0, a & <m>d = 0}} with a = {rw.a}, b = {rw.b}",
        f"join of B = {vw.join} (equals b)",
        f"a & <m>b = {vw.separation} is nonzero while a & <m>d = 0 for every d in B",
        "sample members: " + ", ".join(str(s) for s in vw.samples),
    ]
    out.emit(payload, lines)
    return 0


def cmd_jvb(args, out: Out) -> int:
    F = _family(args)
    m = _modality(args.modality)
    if args.y and args.z:
        y, z = _adm(F, args.y), _adm(F, args.z)
        holds = av.check_jvb(F, m, y, z)
        payload = {"family": cofin.family_to_json(F), "y": cofin.admset_to_json(y),
                   "z": cofin.admset_to_json(z), "holds": holds, "failure": None}
        out.emit(payload, [f"jvb at (y={y}, z={z}): {'holds' if holds else 'fails'}"])
        return 0 if holds else 1
    found = av.find_jvb_failure(F, m, args.bound)
    payload = {"family": cofin.family_to_json(F), "bound": args.bound, "holds": found is None,
               "failure": None if found is None else
               {"y": cofin.admset_to_json(found[0]), "z": cofin.admset_to_json(found[1])}}
    if found is None:
        lines = [f"no jvb failure within bound {args.bound}"]
    else:
        lines = [f"jvb fails at y = {found[0]}, z = {found[1]}"]
    out.emit(payload, lines)
    return 0 if found is not None else 1


PRESETS = {
    # name -> (family, default a, default box0 context or None for [])
    "vb": (lambda I: cofin.vb(), lambda: BOX_DIA_TOP, None),
    "vbe": (lambda I: cofin.vbe(), lambda: parse("[]<>top & <>top"), None),
    "vbi": (lambda I: cofin.vb_i(I or [2]), cofin.name_c, lambda: cofin.box_alpha1(HOLE_FORMULA)),
}


def _great_report(args) -> av.GreatReport:
    box0 = av.OperatorContext.parse(args.box0) if args.box0 else None
    box1 = av.OperatorContext.parse(args.box1) if args.box1 else av.OperatorContext.modality(0)
    if args.preset:
        make, default_a, default_box0 = PRESETS[args.preset]
        F = make(args.I)
        a = _adm(F, args.a) if args.a else default_a()
        if box0 is None and default_box0 is not None:
            box0 = av.OperatorContext(default_box0())
    else:
        if not args.a:
            raise UsageError("great-report needs --preset, or --family with --a")
        F = _family(args)
        a = _adm(F, args.a)
    if box0 is None:
        box0 = av.OperatorContext.modality(0)
    return av.theorem_great_report(F, box0, box1, a)


def cmd_great_report(args, out: Out) -> int:
    rep = _great_report(args)
    lines = [
        f"a = {rep.a}",
        f"premise a <= box1(box0(box0 x -> x) -> x) on {rep.samples_checked} samples: "
        + ("holds" if rep.premise_holds else f"fails ({len(rep.premise_failures)})"),
        f"conclusion a <= box1(bot): {'holds' if rep.conclusion_holds else 'fails'}",
        f"verdict: {rep.verdict}",
    ]
    out.emit(rep.to_json(), lines)
    return 0 if rep.v_failure else 1


def cmd_prove(args, out: Out) -> int:
    calc = get_calculus(_read_text(args.calculus) if args.calculus.startswith("@") else args.calculus)
    script = parse_script(_read_text(args.script))
    res = check_script(calc, script)
    payload = {"calculus": calc.name, **res.to_json()}
    if res.accepted:
        lines = [f"accepted in {calc.name}: {to_text(res.conclusion)}"]
    else:
        lines = [f"rejected at line {res.line}: {res.reason}: {res.message}"]
    out.emit(payload, lines)
    return 0 if res.accepted else 1


def _fixture_report(fx) -> dict:
    res = check_script(fx.calculus, fx.script)
    proved = {ln.formula for ln in fx.script.lines}
    muts = []
    for label in fx.mutations:
        m = check_script(fx.calculus, fx.mutated(label))
        muts.append({"label": label, "rejected": not m.accepted, "line": m.line, "reason": m.reason})
    ok = (res.accepted and res.conclusion == fx.expected and all(f in proved for f in fx.milestones)
          and all(m["rejected"] for m in muts))
    return {
        "name": fx.name,
        "calculus": fx.calculus.name,
        "accepted": res.accepted,
        "conclusion": None if res.conclusion is None else to_text(res.conclusion),
        "expected": to_text(fx.expected),
        "milestones": [to_text(f) for f in fx.milestones],
        "mutations": muts,
        "ok": ok,
    }


def cmd_fixtures(args, out: Out) -> int:
    reports = [_fixture_report(fx) for fx in fixture_corpus() if not args.name or fx.name.startswith(args.name)]
    if not reports:
        raise UsageError(f"no fixture matches {args.name!r}")
    lines = []
    for r in reports:
        rej = sum(m["rejected"] for m in r["mutations"])
        lines.append(f"{'PASS' if r['ok'] else 'FAIL'} {r['name']} ({r['calculus']}): {r['conclusion']}; "
                     f"{rej}/{len(r['mutations'])} mutations rejected")
    out.emit({"fixtures": reports, "ok": all(r["ok"] for r in reports)}, lines)
    return 0 if all(r["ok"] for r in reports) else 1


# ---------------------------------------------------------------- reproduction targets


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def repro_lemma2() -> tuple[bool, list[str], dict]:
    ax = decision.in_ID(VB_AXIOM)
    target = decision.in_ID(LEMMA2_FORMULA)
    line = f"vB-axiom valid over VB: {_yes(ax)}; Box Dia top -> Box bot valid: {_yes(target)}"
    return ax and not target, [line], {"vb_axiom_valid": ax, "box_dia_top_implies_box_bot_valid": target}


def repro_vinc_vb() -> tuple[bool, list[str], dict]:
    F = cofin.vb()
    w = av.find_R_failure(F, 0, 2)
    if w is None:
        return False, ["no R failure within bound 2"], {"r_failure": None}
    vw = av.v_witness(F, w)
    box = av.OperatorContext.modality(0)
    rep = av.theorem_great_report(F, box, box, BOX_DIA_TOP)
    ok = cofin.adm_eq(F, vw.join, w.b) and not cofin.adm_is_bot(vw.separation) and rep.v_failure
    lines = [
        f"R fails at a = {w.a}, b = {w.b}",
        f"join of the failure family = {vw.join}; separation a & <>b = {vw.separation}",
        f"a = [[[]<>top]] = {rep.a}; premise holds on {rep.samples_checked} samples: {_yes(rep.premise_holds)}; "
        f"a <= []bot: {_yes(rep.conclusion_holds)}",
        f"verdict: {rep.verdict}",
    ]
    return ok, lines, {"r_failure": w.to_json(), "v_witness": vw.to_json(), "report": rep.to_json()}


def repro_vbe() -> tuple[bool, list[str], dict]:
    sound = decision.in_IDe(VBE_AXIOM)
    F = cofin.vbe()
    box = av.OperatorContext.modality(0)
    rep = av.theorem_great_report(F, box, box, parse("[]<>top & <>top"))
    ok = sound and rep.v_failure and rep.forces_bottom
    lines = [
        f"<e>([]<>top & <>top) in IDe: {_yes(sound)}",
        f"a = [[[]<>top & <>top]] = {rep.a}; premise holds on samples: {_yes(rep.premise_holds)}; "
        f"forces a = bot in completely additive algebras: {_yes(rep.forces_bottom)}",
    ]
    return ok, lines, {"in_IDe": sound, "report": rep.to_json()}


def _fixture_target(prefix: str, check_id: bool) -> tuple[bool, list[str], dict]:
    fxs = [fx for fx in fixture_corpus() if fx.name.startswith(prefix)]
    reports = [_fixture_report(fx) for fx in fxs]
    ok = all(r["ok"] for r in reports)
    lines = [f"{r['name']}: accepted {_yes(r['accepted'])}, conclusion {r['conclusion']}, "
             f"{sum(m['rejected'] for m in r['mutations'])}/{len(r['mutations'])} mutations rejected"
             for r in reports]
    data = {"fixtures": reports}
    if check_id:
        outside = not decision.in_ID(LEMMA2_FORMULA)
        ok = ok and outside
        lines.append(f"[]<>top -> []bot outside ID: {_yes(outside)}")
        data["outside_ID"] = outside
    return ok, lines, data


def repro_blok() -> tuple[bool, list[str], dict]:
    I = [2, 4, 5]
    F = cofin.vb_i(I)
    expected = {k: cofin.Finite([k] + ([cofin.vbi_primed(k)] if k in I else [])) for k in range(7)}
    names_ok = all(cofin.eval_names_vbi(I, k) == expected[k] for k in range(7))
    c_ok = cofin.eval_names_vbi(I, -1) == cofin.Finite(["c"])
    refutable = {i: av.find_countervaluation(F, cofin.distinguishing(i), bound=4) is not None for i in (2, 3, 4, 5)}
    ok = names_ok and c_ok and refutable == {2: True, 3: False, 4: True, 5: True}
    lines = [f"name formulas denote level k (with its primed copy when k in I) for k <= 6: {_yes(names_ok)}; c-name denotes {{c}}: {_yes(c_ok)}"]
    lines += [f"distinguishing formula for i = {i} refutable: {_yes(r)}" for i, r in refutable.items()]
    return ok, lines, {"names_ok": names_ok, "c_ok": c_ok, "refutable": {str(k): v for k, v in refutable.items()}}


REPRO = {
    "lemma2": repro_lemma2,
    "vinc-vb": repro_vinc_vb,
    "vbe-inconsistent": repro_vbe,
    "glb-theorems": lambda: _fixture_target("F4", False),
    "tense-nonconservativity": lambda: _fixture_target("F1", True),
    "nominal-nonconservativity": lambda: _fixture_target("F2", True),
    "universal-nonconservativity": lambda: _fixture_target("F3", True),
    "vmod-admissibility": lambda: _fixture_target("F5", True),
    "blok-names": repro_blok,
}


def cmd_repro(args, out: Out) -> int:
    t0 = time.perf_counter()
    ok, lines, data = REPRO[args.target]()
    elapsed = time.perf_counter() - t0
    lines = lines + [f"{args.target}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s)"]
    out.emit({"target": args.target, "pass": ok, "seconds": round(elapsed, 3), "details": data}, lines)
    return 0 if ok else 1


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", default="vb", help="vb, vbe, vbi, or a JSON selector (inline or @file)")
    fam.add_argument("--I", type=_int_list, default=None, help="index set for vbi, e.g. 2,4,5")
    fam.add_argument("--modality", default="0", help="modality index or 'e'")

    p = argparse.ArgumentParser(prog="vworkbench", description="Algebraic and proof-theoretic checks for modal logics.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    s.add_argument("formula")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula on a frame family or a finite model")
    s.add_argument("--formula", required=True)
    s.add_argument("--family", default=None)
    s.add_argument("--I", type=_int_list, default=None)
    s.add_argument("--frame", default=None, help="finite model JSON (inline or @file)")
    s.add_argument("--valuation", default=None, help="valuation JSON for the family")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("decide", parents=[common], help="membership in ID or IDe")
    s.add_argument("--logic", choices=("id", "ide"), required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--witness", action="store_true", help="print a satisfying valuation for the negation")
    s.add_argument("--max-vars", type=int, default=decision.DEFAULT_MAX_VARS)
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("check-r", parents=[common, fam], help="condition R at a pair (a, b)")
    s.add_argument("--a", required=True, help="AdmSet JSON or a variable-free formula")
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_check_r)

    s = sub.add_parser("find-r-failure", parents=[common, fam], help="search for a pair where R fails")
    s.add_argument("--bound", type=int, default=2)
    s.set_defaults(func=cmd_find_r_failure)

    s = sub.add_parser("v-witness", parents=[common, fam], help="build the additivity counterexample from an R failure")
    s.add_argument("--bound", type=int, default=2)
    s.add_argument("--witness", default=None, help="RFailureWitness JSON (inline, @file or -)")
    s.set_defaults(func=cmd_v_witness)

    s = sub.add_parser("jvb", parents=[common, fam], help="join-based reformulation of complete additivity")
    s.add_argument("--bound", type=int, default=2)
    s.add_argument("--y", default=None)
    s.add_argument("--z", default=None)
    s.set_defaults(func=cmd_jvb)

    s = sub.add_parser("great-report", parents=[common, fam], help="two-box additivity criterion")
    s.add_argument("--preset", choices=sorted(PRESETS), default=None)
    s.add_argument("--a", default=None, help="the element a (formula or AdmSet JSON)")
    s.add_argument("--box0", default=None, help="operator context with hole $, default []$")
    s.add_argument("--box1", default=None, help="operator context with hole $, default []$")
    s.set_defaults(func=cmd_great_report)

    s = sub.add_parser("prove", parents=[common], help="check a proof script")
    s.add_argument("--calculus", required=True, help="built-in name or JSON spec (@file)")
    s.add_argument("--script", required=True, help="script text, @file or -")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("fixtures", parents=[common], help="check the shipped derivations and their mutations")
    s.add_argument("--name", default=None)
    s.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("repro", parents=[common], help="reproduce a result")
    s.add_argument("target", choices=sorted(REPRO))
    s.set_defaults(func=cmd_repro)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    out = Out(args.json)
    try:
        return args.func(args, out)
    except (UsageError, FormulaSyntaxError, ScriptSyntaxError, decision.DecisionError,
            ValueError, KeyError, OSError, cofin.ClosureError) as e:
        msg = str(e)
        if out.as_json:
            payload = {"error": msg, "kind": type(e).__name__}
            if isinstance(e, FormulaSyntaxError):
                payload["offset"] = e.offset
            print(json.dumps(payload))
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
