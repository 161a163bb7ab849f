"""Calculus descriptions and the built-in catalogue."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from ..formula import Formula, Imp, Neg, Nominal, Or, Var, box_upto, parse, to_text

ALL_RULES = frozenset({
    "Taut", "AxiomInst", "MP", "Nec", "US", "RK", "Residuation", "COV", "VInf", "VSpec", "VMod", "VlMod",
})
BASE_RULES = frozenset({"Taut", "AxiomInst", "MP", "Nec", "US", "RK"})
NOMINAL_DEPTH = 3


@dataclass(frozen=True)
class CalculusSpec:
    """A Hilbert calculus: axiom schemas, premises and enabled rules.

    Schema variables ``pN`` match arbitrary formulas; in nominal calculi schema
    nominals match nominals. Premises are closed under uniform substitution unless
    ``closed_premises`` is false, in which case US and Nec may not touch lines that
    depend on them.
    """

    name: str
    modalities: frozenset[int]
    axioms: Mapping[str, Formula] = field(default_factory=dict)
    rules: frozenset[str] = BASE_RULES
    premises: tuple[Formula, ...] = ()
    converse: bool = False
    universal: bool = False
    nominals: bool = False
    v_modalities: frozenset[int] = frozenset()
    closed_premises: bool = True

    def __post_init__(self):
        unknown = set(self.rules) - ALL_RULES
        if unknown:
            raise ValueError(f"unknown rules {sorted(unknown)}")
        if "Residuation" in self.rules and not self.converse:
            raise ValueError("residuation needs converse modalities")
        if "COV" in self.rules and not self.nominals:
            raise ValueError("COV needs nominals")
        if "VSpec" in self.rules or "VInf" in self.rules:
            if not self.universal:
                raise ValueError("VSpec and VInf need the universal modality")


def _box(i: int) -> str:
    return "[]" if i == 0 else f"[{i}]"


def _dia(i: int) -> str:
    return "<>" if i == 0 else f"<{i}>"


def k_axioms(modalities, converse: bool = False, universal: bool = False) -> dict[str, Formula]:
    out = {}
    for i in sorted(modalities):
        b = _box(i)
        out[f"K[{i}]"] = parse(f"{b}(p0 -> p1) -> {b}p0 -> {b}p1")
        if converse:
            out[f"K[~{i}]"] = parse(f"[~{i}](p0 -> p1) -> [~{i}]p0 -> [~{i}]p1")
    if universal:
        out["K[A]"] = parse("A(p0 -> p1) -> A p0 -> A p1")
    return out


def tense_axioms(modalities) -> dict[str, Formula]:
    out = {}
    for i in sorted(modalities):
        out[f"T1[{i}]"] = parse(f"p0 -> {_box(i)}<~{i}>p0")
        out[f"T2[{i}]"] = parse(f"p0 -> [~{i}]{_dia(i)}p0")
    return out


def nominal_axioms(depth: int = NOMINAL_DEPTH, modality: int = 0) -> dict[str, Formula]:
    """[]^{<=n}(i -> p) | []^{<=n}(i -> ~p) for n up to depth."""
    i0, p0 = Nominal(0), Var(0)
    return {
        f"NOM[{n}]": Or(box_upto(modality, n, Imp(i0, p0)), box_upto(modality, n, Imp(i0, Neg(p0))))
        for n in range(depth + 1)
    }


def universal_axioms(modalities) -> dict[str, Formula]:
    out = {
        "T[A]": parse("A p0 -> p0"),
        "4[A]": parse("A p0 -> A A p0"),
        "5[A]": parse("E p0 -> A E p0"),
    }
    for i in sorted(modalities):
        out[f"AB[{i}]"] = parse(f"A p0 -> {_box(i)}p0")
    return out


VB_AXIOM = parse("[]<>top -> []([]([]p0 -> p0) -> p0)")
CHI_VB = parse("[]([]p0 -> p0) -> p0")


def builtin_calculi() -> dict[str, CalculusSpec]:
    k = k_axioms({0})
    vbt_ax = {**k_axioms({0}, converse=True), **tense_axioms({0})}
    glb = {
        **k_axioms({0, 1}),
        "Lob[0]": parse("[]([]p0 -> p0) -> []p0"),
        "Lob[1]": parse("[1]([1]p0 -> p0) -> [1]p0"),
        "GLB2": parse("[]p0 -> [1]p0"),
        "GLB3": parse("<>p0 -> [1]<>p0"),
    }
    vmod_premises = (
        parse("p0 -> []([]p0 -> p0) -> p0"),
        parse("([]([]p0 -> p0) -> p0) & []([]([]p0 -> p0) -> p0) -> p0"),
        VB_AXIOM,
    )
    cats = [
        CalculusSpec("K", frozenset({0}), k),
        CalculusSpec("vB", frozenset({0}), k, premises=(VB_AXIOM,)),
        CalculusSpec("vB.t", frozenset({0}), vbt_ax, BASE_RULES | {"Residuation"}, (VB_AXIOM,), converse=True),
        CalculusSpec("vB.n", frozenset({0}), {**k, **nominal_axioms()}, BASE_RULES | {"COV"}, (VB_AXIOM,),
                     nominals=True),
        CalculusSpec("vB.A", frozenset({0}), {**k_axioms({0}, universal=True), **universal_axioms({0})},
                     BASE_RULES | {"VSpec", "VInf"}, (VB_AXIOM,), universal=True, v_modalities=frozenset({0})),
        CalculusSpec("GLB", frozenset({0, 1}), glb),
        CalculusSpec("GLB+VMod", frozenset({0, 1}), glb, BASE_RULES | {"VMod", "VlMod"},
                     v_modalities=frozenset({1})),
        CalculusSpec("K.t+Vmod-premises", frozenset({0}), vbt_ax, BASE_RULES | {"Residuation"}, vmod_premises,
                     converse=True),
    ]
    return {c.name: c for c in cats}


def calculus_to_json(c: CalculusSpec) -> dict:
    return {
        "name": c.name,
        "modalities": sorted(c.modalities),
        "axioms": {k: to_text(v) for k, v in c.axioms.items()},
        "rules": sorted(c.rules),
        "premises": [to_text(p) for p in c.premises],
        "converse": c.converse,
        "universal": c.universal,
        "nominals": c.nominals,
        "v_modalities": sorted(c.v_modalities),
        "closed_premises": c.closed_premises,
    }


def calculus_from_json(data: Mapping | str) -> CalculusSpec:
    if isinstance(data, str):
        data = json.loads(data)
    return CalculusSpec(
        name=data["name"],
        modalities=frozenset(int(i) for i in data.get("modalities", [0])),
        axioms={k: parse(v) for k, v in data.get("axioms", {}).items()},
        rules=frozenset(data.get("rules", BASE_RULES)),
        premises=tuple(parse(p) for p in data.get("premises", [])),
        converse=bool(data.get("converse", False)),
        universal=bool(data.get("universal", False)),
        nominals=bool(data.get("nominals", False)),
        v_modalities=frozenset(int(i) for i in data.get("v_modalities", [])),
        closed_premises=bool(data.get("closed_premises", True)),
    )


def get_calculus(name_or_json: str) -> CalculusSpec:
    cats = builtin_calculi()
    if name_or_json in cats:
        return cats[name_or_json]
    return calculus_from_json(name_or_json)
