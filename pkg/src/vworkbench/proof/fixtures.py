"""Reference derivations with their expected conclusions and single-line mutations.

Steps that the prose versions call "normal modal reasoning" are expanded here into
Taut/RK/MP/Nec steps; the extra lines get dotted labels so the main numbering
matches the published derivations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..formula import Formula, parse
from .calculi import CalculusSpec, builtin_calculi
from .script import ProofScript, parse_script


@dataclass(frozen=True)
class Fixture:
    name: str
    calculus: CalculusSpec
    script: ProofScript
    expected: Formula
    milestones: tuple[Formula, ...] = ()
    # label -> replacement line text; each must make the script fail at that label
    mutations: dict[str, str] = field(default_factory=dict)
    # mutations that leave their own line valid and surface at a later line
    reject_at: dict[str, str] = field(default_factory=dict)

    def rejection_line(self, label: str) -> str:
        return self.reject_at.get(label, label)

    def mutated(self, label: str) -> ProofScript:
        new = parse_script(self.mutations[label]).lines[0]
        return ProofScript(tuple(new if ln.label == label else ln for ln in self.script.lines))


D = "[]<>top"
X = "<~0>[]<>top"

VB_LINES = f"""
1. {D} -> []([]([]p0 -> p0) -> p0) ; PREM
2. {D} -> []([]([]p1 -> p1) -> p1) ; US(1, p0 := p1)
3. p0 -> []([]p0 -> p0) -> p0 ; TAUT
4. []p0 -> []([]([]p0 -> p0) -> p0) ; RK(3)
5. {D} -> []([]([]top -> top) -> top) ; US(1, p0 := top)
6. ([]([]top -> top) -> top) ; TAUT
7. []([]([]top -> top) -> top) ; NEC(6)
"""

TENSE = f"""
0. {D} -> []([]([]~{X} -> ~{X}) -> ~{X}) ; PREM
1. {D} -> []<~0>[]<>top ; AX(T1[0])
2. {D} -> []{X} ; DEF(1)
2.1. {X} & ([]([]~{X} -> ~{X}) -> ~{X}) -> ~[]([]~{X} -> ~{X}) ; TAUT
2.2. []{X} & []([]([]~{X} -> ~{X}) -> ~{X}) -> []~[]([]~{X} -> ~{X}) ; RK(2.1)
2.3. ([]{X} & []([]([]~{X} -> ~{X}) -> ~{X}) -> []~[]([]~{X} -> ~{X})) -> ({D} -> []{X}) -> ({D} -> []([]([]~{X} -> ~{X}) -> ~{X})) -> {D} -> []~[]([]~{X} -> ~{X}) ; TAUT
2.4. ({D} -> []{X}) -> ({D} -> []([]([]~{X} -> ~{X}) -> ~{X})) -> {D} -> []~[]([]~{X} -> ~{X}) ; MP(2.2, 2.3)
2.5. ({D} -> []([]([]~{X} -> ~{X}) -> ~{X})) -> {D} -> []~[]([]~{X} -> ~{X}) ; MP(2, 2.4)
3. {D} -> []~[]([]~{X} -> ~{X}) ; MP(0, 2.5)
4. {X} -> ~[]([]~{X} -> ~{X}) ; RES(3, fwd)
5. {X} -> ~[]([]~{X} -> ~{X}) ; DEF(4)
5.1. ~({X} & []~{X}) -> []~{X} -> ~{X} ; TAUT
5.2. []~({X} & []~{X}) -> []([]~{X} -> ~{X}) ; RK(5.1)
5.3. ([]~({X} & []~{X}) -> []([]~{X} -> ~{X})) -> ({X} -> ~[]([]~{X} -> ~{X})) -> {X} -> <>({X} & []~{X}) ; TAUT
5.4. ({X} -> ~[]([]~{X} -> ~{X})) -> {X} -> <>({X} & []~{X}) ; MP(5.2, 5.3)
6. {X} -> <>({X} & []~{X}) ; MP(5, 5.4)
6.1. ({X} -> <>({X} & []~{X})) -> {X} & []~{X} -> <>({X} & []~{X}) & []~{X} ; TAUT
6.2. {X} & []~{X} -> <>({X} & []~{X}) & []~{X} ; MP(6, 6.1)
6.3. ({X} & []~{X} -> <>({X} & []~{X}) & []~{X}) -> ~(<>({X} & []~{X}) & []~{X}) -> ~({X} & []~{X}) ; TAUT
6.4. ~(<>({X} & []~{X}) & []~{X}) -> ~({X} & []~{X}) ; MP(6.2, 6.3)
6.5. []~(<>({X} & []~{X}) & []~{X}) -> []~({X} & []~{X}) ; RK(6.4)
6.6. ([]~(<>({X} & []~{X}) & []~{X}) -> []~({X} & []~{X})) -> ({X} -> <>({X} & []~{X})) -> {X} -> <>(<>({X} & []~{X}) & []~{X}) ; TAUT
6.7. ({X} -> <>({X} & []~{X})) -> {X} -> <>(<>({X} & []~{X}) & []~{X}) ; MP(6.5, 6.6)
7. {X} -> <>(<>({X} & []~{X}) & []~{X}) ; MP(6, 6.7)
7.1. ~{X} -> ~({X} & []~{X}) ; TAUT
7.2. []~{X} -> []~({X} & []~{X}) ; RK(7.1)
7.3. ([]~{X} -> []~({X} & []~{X})) -> ~(<>({X} & []~{X}) & []~{X}) ; TAUT
7.4. ~(<>({X} & []~{X}) & []~{X}) ; MP(7.2, 7.3)
7.5. []~(<>({X} & []~{X}) & []~{X}) ; NEC(7.4)
7.6. []~(<>({X} & []~{X}) & []~{X}) -> ({X} -> <>(<>({X} & []~{X}) & []~{X})) -> {X} -> bot ; TAUT
7.7. ({X} -> <>(<>({X} & []~{X}) & []~{X})) -> {X} -> bot ; MP(7.5, 7.6)
8. {X} -> bot ; MP(7, 7.7)
9. <~0>[]<>top -> bot ; DEF(8)
10. {D} -> []bot ; RES(9, bwd)
"""

_G = "i0 -> [](i0 -> <>i0)"
_H = "i0 -> <>(i0 & []~i0)"
NOMINAL = f"""
1. (i0 -> <>i0) & [](i0 -> <>i0) | (i0 -> ~<>i0) & [](i0 -> ~<>i0) ; AX(NOM[1])
2. ~i0 -> i0 -> <>i0 ; TAUT
3. []~i0 -> [](i0 -> <>i0) ; RK(2)
4. ([]~i0 -> [](i0 -> <>i0)) -> ((i0 -> <>i0) & [](i0 -> <>i0) | (i0 -> ~<>i0) & [](i0 -> ~<>i0)) -> {_G} ; TAUT
5. ((i0 -> <>i0) & [](i0 -> <>i0) | (i0 -> ~<>i0) & [](i0 -> ~<>i0)) -> {_G} ; MP(3, 4)
6. {_G} ; MP(1, 5)
7. []({_G}) ; NEC(6)
8. {D} -> []([]([]~i0 -> ~i0) -> ~i0) ; PREM
8.1. ~(i0 & []~i0) -> []~i0 -> ~i0 ; TAUT
8.2. []~(i0 & []~i0) -> []([]~i0 -> ~i0) ; RK(8.1)
8.3. ([]~(i0 & []~i0) -> []([]~i0 -> ~i0)) -> ([]([]~i0 -> ~i0) -> ~i0) -> {_H} ; TAUT
8.4. ([]([]~i0 -> ~i0) -> ~i0) -> {_H} ; MP(8.2, 8.3)
8.5. []([]([]~i0 -> ~i0) -> ~i0) -> []({_H}) ; RK(8.4)
8.6. ([]([]([]~i0 -> ~i0) -> ~i0) -> []({_H})) -> ({D} -> []([]([]~i0 -> ~i0) -> ~i0)) -> {D} -> []({_H}) ; TAUT
8.7. ({D} -> []([]([]~i0 -> ~i0) -> ~i0)) -> {D} -> []({_H}) ; MP(8.5, 8.6)
9. {D} -> []({_H}) ; MP(8, 8.7)
9.1. (i0 -> <>i0) -> ~(i0 & []~i0) ; TAUT
9.2. [](i0 -> <>i0) -> []~(i0 & []~i0) ; RK(9.1)
9.3. ([](i0 -> <>i0) -> []~(i0 & []~i0)) -> ({_G}) & ({_H}) -> ~i0 ; TAUT
9.4. ({_G}) & ({_H}) -> ~i0 ; MP(9.2, 9.3)
9.5. []({_G}) & []({_H}) -> []~i0 ; RK(9.4)
9.6. ([]({_G}) & []({_H}) -> []~i0) -> []({_G}) -> ({D} -> []({_H})) -> {D} -> []~i0 ; TAUT
9.7. []({_G}) -> ({D} -> []({_H})) -> {D} -> []~i0 ; MP(9.5, 9.6)
9.8. ({D} -> []({_H})) -> {D} -> []~i0 ; MP(7, 9.7)
10. {D} -> []~i0 ; MP(9, 9.8)
11. {D} -> []bot ; COV(10, i0)
"""

_CHI = "[]([]p0 -> p0) -> p0"
UNIVERSAL = f"""
1. p0 -> {_CHI} ; TAUT
2. p0 -> []p0 -> p0 ; TAUT
3. []p0 -> []([]p0 -> p0) ; RK(2)
4. ([]p0 -> []([]p0 -> p0)) -> ({_CHI}) -> []p0 -> p0 ; TAUT
5. ({_CHI}) -> []p0 -> p0 ; MP(3, 4)
6. A({_CHI}) -> A([]p0 -> p0) ; RK(5)
7. A p1 -> A A p1 ; AX(4[A])
8. A p1 -> []p1 ; AX(AB[0])
9. A A p1 -> A []p1 ; RK(8)
10. (A p1 -> A A p1) -> (A A p1 -> A []p1) -> A p1 -> A []p1 ; TAUT
11. (A A p1 -> A []p1) -> A p1 -> A []p1 ; MP(7, 10)
12. A p1 -> A []p1 ; MP(9, 11)
13. A([]p0 -> p0) -> A []([]p0 -> p0) ; US(12, p1 := []p0 -> p0)
14. A({_CHI}) -> A []([]p0 -> p0) -> A p0 ; AX(K[A])
15. (A({_CHI}) -> A([]p0 -> p0)) -> (A([]p0 -> p0) -> A []([]p0 -> p0)) -> (A({_CHI}) -> A []([]p0 -> p0) -> A p0) -> A({_CHI}) -> A p0 ; TAUT
16. (A([]p0 -> p0) -> A []([]p0 -> p0)) -> (A({_CHI}) -> A []([]p0 -> p0) -> A p0) -> A({_CHI}) -> A p0 ; MP(6, 15)
17. (A({_CHI}) -> A []([]p0 -> p0) -> A p0) -> A({_CHI}) -> A p0 ; MP(13, 16)
18. A({_CHI}) -> A p0 ; MP(14, 17)
19. {D} -> []({_CHI}) ; PREM
20. {D} -> []bot ; VSPEC(1, 18, 19, p0)
"""

GLB_LINES = f"""
1. ~~p0 -> p0 ; TAUT
2. []~~p0 -> []p0 ; RK(1)
3. p0 -> ~~p0 ; TAUT
4. []p0 -> []~~p0 ; RK(3)
5. <>~p0 -> [1]<>~p0 ; AX(GLB3)
6. []p0 -> [1]p0 ; AX(GLB2)
7. p0 -> []p0 -> p0 ; TAUT
8. [1]p0 -> [1]([]p0 -> p0) ; RK(7)
9. ([]p0 -> []~~p0) -> <>~p0 -> []p0 -> p0 ; TAUT
10. <>~p0 -> []p0 -> p0 ; MP(4, 9)
11. [1]<>~p0 -> [1]([]p0 -> p0) ; RK(10)
12. ([]~~p0 -> []p0) -> (<>~p0 -> [1]<>~p0) -> ([]p0 -> [1]p0) -> ([1]p0 -> [1]([]p0 -> p0)) -> ([1]<>~p0 -> [1]([]p0 -> p0)) -> [1]([]p0 -> p0) ; TAUT
13. (<>~p0 -> [1]<>~p0) -> ([]p0 -> [1]p0) -> ([1]p0 -> [1]([]p0 -> p0)) -> ([1]<>~p0 -> [1]([]p0 -> p0)) -> [1]([]p0 -> p0) ; MP(2, 12)
14. ([]p0 -> [1]p0) -> ([1]p0 -> [1]([]p0 -> p0)) -> ([1]<>~p0 -> [1]([]p0 -> p0)) -> [1]([]p0 -> p0) ; MP(5, 13)
15. ([1]p0 -> [1]([]p0 -> p0)) -> ([1]<>~p0 -> [1]([]p0 -> p0)) -> [1]([]p0 -> p0) ; MP(6, 14)
16. ([1]<>~p0 -> [1]([]p0 -> p0)) -> [1]([]p0 -> p0) ; MP(8, 15)
17. [1]([]p0 -> p0) ; MP(11, 16)
18. []([]p0 -> p0) -> []p0 ; AX(Lob[0])
19. [1]([]([]p0 -> p0) -> []p0) ; NEC(18)
20. ([]([]p0 -> p0) -> []p0) & ([]p0 -> p0) -> {_CHI} ; TAUT
21. [1]([]([]p0 -> p0) -> []p0) & [1]([]p0 -> p0) -> [1]({_CHI}) ; RK(20)
22. ([1]([]([]p0 -> p0) -> []p0) & [1]([]p0 -> p0) -> [1]({_CHI})) -> [1]([]([]p0 -> p0) -> []p0) -> [1]([]p0 -> p0) -> [1]({_CHI}) ; TAUT
23. [1]([]([]p0 -> p0) -> []p0) -> [1]([]p0 -> p0) -> [1]({_CHI}) ; MP(21, 22)
24. [1]([]p0 -> p0) -> [1]({_CHI}) ; MP(19, 23)
25. [1]({_CHI}) ; MP(17, 24)
"""

K_THEOREM = f"""
7. p0 -> []p0 -> p0 ; TAUT
26. []p0 -> []([]p0 -> p0) ; RK(7)
27. ([]p0 -> []([]p0 -> p0)) -> ({_CHI}) -> []p0 -> p0 ; TAUT
28. ({_CHI}) -> []p0 -> p0 ; MP(26, 27)
29. []({_CHI}) -> []([]p0 -> p0) ; RK(28)
30. ([]({_CHI}) -> []([]p0 -> p0)) -> ({_CHI}) & []({_CHI}) -> p0 ; TAUT
31. ({_CHI}) & []({_CHI}) -> p0 ; MP(29, 30)
"""

VMOD_TAIL = f"""
32. p0 -> {_CHI} ; TAUT
33. [1]({_CHI}) -> top -> [1]({_CHI}) ; TAUT
34. top -> [1]({_CHI}) ; MP(25, 33)
35. top -> [1]bot ; VMOD(32, 31, 34, p0)
36. top ; TAUT
37. [1]bot ; MP(36, 35)
"""

_P = "[~0]~[]<>top"
_C = f"([]([]{_P} -> {_P}) -> {_P})"
ADMISSIBILITY = f"""
1. {_C} & []{_C} -> {_P} ; PREM
2. <>({_C} & []{_C}) -> ~{D} ; RES(1, fwd)
2.1. (<>({_C} & []{_C}) -> ~{D}) -> {D} -> []~({_C} & []{_C}) ; TAUT
3. {D} -> []~({_C} & []{_C}) ; MP(2, 2.1)
4. {D} -> []{_C} ; PREM
4.1. ~~{_C} -> {_C} ; TAUT
4.2. []~~{_C} -> []{_C} ; RK(4.1)
4.3. ([]~~{_C} -> []{_C}) -> ~({_C} & []{_C}) & {_C} -> <>~{_C} ; TAUT
4.4. ~({_C} & []{_C}) & {_C} -> <>~{_C} ; MP(4.2, 4.3)
4.5. []~({_C} & []{_C}) & []{_C} -> []<>~{_C} ; RK(4.4)
4.6. ([]~({_C} & []{_C}) & []{_C} -> []<>~{_C}) -> ({D} -> []~({_C} & []{_C})) -> ({D} -> []{_C}) -> {D} -> []<>~{_C} ; TAUT
4.7. ({D} -> []~({_C} & []{_C})) -> ({D} -> []{_C}) -> {D} -> []<>~{_C} ; MP(4.5, 4.6)
4.8. ({D} -> []{_C}) -> {D} -> []<>~{_C} ; MP(3, 4.7)
5. {D} -> []<>~{_C} ; MP(4, 4.8)
6. <~0>{D} -> {_C} ; RES(4, fwd)
6.1. {_P} -> {_C} ; PREM
6.2. ({_P} -> {_C}) -> ~{_C} -> <~0>{D} ; TAUT
7. ~{_C} -> <~0>{D} ; MP(6.1, 6.2)
7.1. (<~0>{D} -> {_C}) -> (~{_C} -> <~0>{D}) -> ~{_C} -> bot ; TAUT
7.2. (~{_C} -> <~0>{D}) -> ~{_C} -> bot ; MP(6, 7.1)
8. ~{_C} -> bot ; MP(7, 7.2)
8.1. (~{_C} -> bot) -> ~~{_C} ; TAUT
8.2. ~~{_C} ; MP(8, 8.1)
8.3. []~~{_C} ; NEC(8.2)
8.4. []~~{_C} -> <>~{_C} -> bot ; TAUT
9. <>~{_C} -> bot ; MP(8.3, 8.4)
9.1. []<>~{_C} -> []bot ; RK(9)
9.2. ([]<>~{_C} -> []bot) -> ({D} -> []<>~{_C}) -> {D} -> []bot ; TAUT
9.3. ({D} -> []<>~{_C}) -> {D} -> []bot ; MP(9.1, 9.2)
10. {D} -> []bot ; MP(5, 9.3)
"""

TARGET = parse(f"{D} -> []bot")


def fixture_corpus() -> list[Fixture]:
    cats = builtin_calculi()
    glb_script = parse_script(GLB_LINES)
    return [
        Fixture(
            "F0-vB", cats["vB"], parse_script(VB_LINES), parse("[]([]([]top -> top) -> top)"),
            mutations={
                "2": f"2. {D} -> []([]([]p1 -> p1) -> p1) ; US(1, p0 := p2)",
                "4": "4. []p0 -> []([]([]p0 -> p0) -> p0) ; RK(2)",
                "6": "6. ([]([]top -> top) -> bot) ; TAUT",
            },
        ),
        Fixture(
            "F1-tense", cats["vB.t"], parse_script(TENSE), TARGET,
            mutations={
                "4": f"4. {X} -> ~[]([]~{X} -> ~{X}) ; RES(3, bwd)",
                "3": f"3. {D} -> []~[]([]~{X} -> ~{X}) ; MP(1, 2.5)",
                "10": f"10. {D} -> []~{X} ; RES(9, bwd)",
                "7.5": f"7.5. []~(<>({X} & []~{X}) & []~{X}) ; NEC(7.3)",
            },
        ),
        Fixture(
            "F2-nominal", cats["vB.n"], parse_script(NOMINAL), TARGET,
            mutations={
                "11": f"11. ({_G}) & ({_H}) -> bot ; COV(9.4, i0)",
                "10": f"10. {D} -> []~i0 ; MP(8, 9.8)",
                "7": f"7. []({_G}) ; NEC(5)",
                "1": "1. (i0 -> <>i0) & [](i0 -> <>i0) | (i0 -> ~<>i0) & [](i0 -> <>i0) ; AX(NOM[1])",
            },
        ),
        Fixture(
            "F3-universal", cats["vB.A"], parse_script(UNIVERSAL), TARGET,
            mutations={
                "19": f"19. []({_CHI}) -> []({_CHI}) ; TAUT",
                "20": f"20. {D} -> []bot ; VSPEC(1, 17, 19, p0)",
                "6": f"6. A({_CHI}) -> A p0 ; RK(5)",
            },
            reject_at={"19": "20"},
        ),
        Fixture(
            "F4-GLB", cats["GLB+VMod"],
            parse_script(GLB_LINES + K_THEOREM.replace("7. p0 -> []p0 -> p0 ; TAUT\n", "") + VMOD_TAIL),
            parse("[1]bot"),
            milestones=(
                parse("[1]([]p0 -> p0)"),
                parse(f"[1]({_CHI})"),
                parse(f"({_CHI}) & []({_CHI}) -> p0"),
                parse("[1]bot"),
            ),
            mutations={
                "34": f"34. [1]({_CHI}) -> [1]({_CHI}) ; TAUT",
                "35": "35. top -> [1]bot ; VMOD(32, 30, 34, p0)",
                "17": "17. [1]([]p0 -> p0) ; MP(10, 16)",
                "19": "19. [1]([]([]p0 -> p0) -> p0) ; NEC(18)",
            },
            reject_at={"34": "35"},
        ),
        Fixture(
            "F4-GLB-plain", cats["GLB"], glb_script, parse(f"[1]({_CHI})"),
            mutations={
                "18": "18. [1]([]p0 -> p0) -> [1]p0 ; AX(Lob[0])",
                "25": f"25. [1]({_CHI}) ; MP(17, 23)",
                "12": "12. ([]~~p0 -> []p0) -> [1]([]p0 -> p0) ; TAUT",
            },
        ),
        Fixture(
            "F4-K", cats["K"], parse_script(K_THEOREM), parse(f"({_CHI}) & []({_CHI}) -> p0"),
            mutations={
                "26": "26. []p0 -> [1]([]p0 -> p0) ; RK(7)",
                "28": f"28. ({_CHI}) -> []p0 -> p0 ; MP(7, 27)",
                "30": f"30. ([]({_CHI}) -> []([]p0 -> p0)) -> ({_CHI}) & []({_CHI}) -> []p0 ; TAUT",
            },
        ),
        Fixture(
            "F5-admissibility", cats["K.t+Vmod-premises"], parse_script(ADMISSIBILITY), TARGET,
            mutations={
                "2": f"2. <>({_C} & []{_C}) -> ~{D} ; RES(1, bwd)",
                "6": f"6. <~0>{D} -> {_C} ; RES(3, fwd)",
                "8.3": f"8.3. []~~{_C} ; NEC(8)",
                "10": f"10. {D} -> bot ; MP(5, 9.3)",
            },
        ),
    ]


def get_fixture(name: str) -> Fixture:
    for fx in fixture_corpus():
        if fx.name == name or fx.name.split("-")[0] == name:
            return fx
    raise KeyError(name)

