"""Line-by-line proof checking."""

from __future__ import annotations

from dataclasses import dataclass

from ..formula import (
    BOT,
    And,
    Bot,
    Box,
    ConvBox,
    Formula,
    Iff,
    Imp,
    Neg,
    Nominal,
    Or,
    Top,
    UBox,
    Var,
    conv_dia,
    dia,
    exists,
    form_antecedents,
    form_boxes,
    match_form,
    nominals,
    split_form,
    substitute,
    substitute_nominals,
    subformulas,
    to_text,
    variables,
)
from .calculi import CalculusSpec
from .script import ProofLine, ProofScript, Subst, Word

MAX_TAUT_ATOMS = 12

# script keyword -> rule name in CalculusSpec.rules; None means always available
RULE_KEYWORDS = {
    "PREM": None,
    "DEF": None,
    "TAUT": "Taut",
    "AX": "AxiomInst",
    "MP": "MP",
    "NEC": "Nec",
    "US": "US",
    "RK": "RK",
    "RES": "Residuation",
    "COV": "COV",
    "VINF": "VInf",
    "VSPEC": "VSpec",
    "VMOD": "VMod",
    "VLMOD": "VlMod",
}


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    line: str | None = None
    reason: str | None = None
    message: str = ""
    conclusion: Formula | None = None

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "line": self.line,
            "reason": self.reason,
            "message": self.message,
            "conclusion": None if self.conclusion is None else to_text(self.conclusion),
        }


class Reject(Exception):
    def __init__(self, reason: str, message: str = ""):
        super().__init__(message)
        self.reason = reason
        self.message = message


# ---------------------------------------------------------------- propositional skeletons

_BOOLEAN = (Neg, And, Or, Imp, Iff, Top, Bot)
_ROW_MASKS: dict[int, list[int]] = {}


def _row_masks(n: int) -> list[int]:
    if n not in _ROW_MASKS:
        rows = 1 << n
        _ROW_MASKS[n] = [sum(1 << r for r in range(rows) if r >> j & 1) for j in range(n)]
    return _ROW_MASKS[n]


def skeleton_atoms(phi: Formula) -> list[Formula]:
    out, seen = [], set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, _BOOLEAN):
            stack.extend(reversed([getattr(f, a) for a in ("left", "right", "arg") if hasattr(f, a)]))
        elif f not in seen:
            seen.add(f)
            out.append(f)
    return out


def is_tautology(phi: Formula) -> bool:
    atoms = skeleton_atoms(phi)
    if len(atoms) > MAX_TAUT_ATOMS:
        raise Reject("too-many-atoms", f"propositional skeleton has {len(atoms)} atoms")
    n = len(atoms)
    full = (1 << (1 << n)) - 1
    masks = dict(zip(atoms, _row_masks(n)))
    memo: dict[Formula, int] = {}

    def ev(f: Formula) -> int:
        if f in masks:
            return masks[f]
        if f in memo:
            return memo[f]
        if isinstance(f, Top):
            r = full
        elif isinstance(f, Bot):
            r = 0
        elif isinstance(f, Neg):
            r = full & ~ev(f.arg)
        elif isinstance(f, And):
            r = ev(f.left) & ev(f.right)
        elif isinstance(f, Or):
            r = ev(f.left) | ev(f.right)
        elif isinstance(f, Imp):
            r = (full & ~ev(f.left)) | ev(f.right)
        else:
            r = full & ~(ev(f.left) ^ ev(f.right))
        memo[f] = r
        return r

    return ev(phi) == full


# ---------------------------------------------------------------- schema matching


def match(schema: Formula, phi: Formula, binding: dict, nominal_binding: dict | None) -> bool:
    """First-order matching of schema variables (and, optionally, schema nominals)."""
    stack = [(schema, phi)]
    while stack:
        s, f = stack.pop()
        if isinstance(s, Var):
            prev = binding.get(s.index)
            if prev is None:
                binding[s.index] = f
            elif prev != f:
                return False
            continue
        if isinstance(s, Nominal) and nominal_binding is not None:
            if not isinstance(f, Nominal):
                return False
            prev = nominal_binding.get(s.index)
            if prev is None:
                nominal_binding[s.index] = f.index
            elif prev != f.index:
                return False
            continue
        if type(s) is not type(f):
            return False
        if isinstance(s, (Box, ConvBox)):
            if s.index != f.index:
                return False
            stack.append((s.arg, f.arg))
        elif isinstance(s, (Neg, UBox)):
            stack.append((s.arg, f.arg))
        elif isinstance(s, (And, Or, Imp, Iff)):
            stack.append((s.left, f.left))
            stack.append((s.right, f.right))
        elif s != f:
            return False
    return True


def is_instance(schema: Formula, phi: Formula, with_nominals: bool) -> bool:
    return match(schema, phi, {}, {} if with_nominals else None)


# ---------------------------------------------------------------- the checker


class Checker:
    def __init__(self, calculus: CalculusSpec):
        self.calc = calculus
        self.proved: dict[str, Formula] = {}
        self.depends: dict[str, bool] = {}

    def check(self, script: ProofScript) -> CheckResult:
        for line in script.lines:
            try:
                if line.label in self.proved:
                    raise Reject("duplicate-label", f"label {line.label} used twice")
                self._language(line.formula)
                dep = self._check_line(line)
            except Reject as r:
                return CheckResult(False, line.label, r.reason, r.message)
            self.proved[line.label] = line.formula
            self.depends[line.label] = dep
        if not script.lines:
            return CheckResult(False, None, "empty", "script has no lines")
        return CheckResult(True, conclusion=script.lines[-1].formula)

    def _language(self, phi: Formula) -> None:
        c = self.calc
        for f in subformulas(phi):
            if isinstance(f, Box) and f.index not in c.modalities:
                raise Reject("language", f"modality {f.index} is not in {c.name}")
            if isinstance(f, ConvBox) and (not c.converse or f.index not in c.modalities):
                raise Reject("language", f"converse modality {f.index} is not in {c.name}")
            if isinstance(f, UBox) and not c.universal:
                raise Reject("language", f"{c.name} has no universal modality")
            if isinstance(f, Nominal) and not c.nominals:
                raise Reject("language", f"{c.name} has no nominals")

    def _ref(self, label: str) -> Formula:
        if label not in self.proved:
            raise Reject("bad-reference", f"line {label} is not an earlier line")
        return self.proved[label]

    def _refs(self, line: ProofLine, n: int) -> list[Formula]:
        refs = line.refs()
        if len(refs) != n:
            raise Reject("bad-args", f"{line.rule} expects {n} line references, got {len(refs)}")
        return [self._ref(r) for r in refs]

    def _one_word(self, line: ProofLine, what: str) -> str:
        words = line.words()
        if len(words) != 1:
            raise Reject("bad-args", f"{line.rule} expects one {what}")
        return words[0]

    def _fresh_var(self, line: ProofLine) -> int:
        w = self._one_word(line, "propositional variable")
        if not (w.startswith("p") and w[1:].isdigit()):
            raise Reject("bad-args", f"expected a propositional variable, got {w!r}")
        return int(w[1:])

    def _check_line(self, line: ProofLine) -> bool:
        kw = line.rule
        if kw not in RULE_KEYWORDS:
            raise Reject("unknown-rule", f"unknown rule {kw}")
        rule = RULE_KEYWORDS[kw]
        if rule is not None and rule not in self.calc.rules:
            raise Reject("rule-disabled", f"{rule} is not a rule of {self.calc.name}")
        deps = any(self.depends.get(r, False) for r in line.refs())
        getattr(self, f"_rule_{kw.lower()}")(line, line.formula)
        return deps or kw == "PREM"

    # individual rules -------------------------------------------------

    def _rule_prem(self, line: ProofLine, phi: Formula) -> None:
        for p in self.calc.premises:
            if p == phi or (self.calc.closed_premises and is_instance(p, phi, self.calc.nominals)):
                return
        raise Reject("not-premise", "formula is not an instance of a premise")

    def _rule_def(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        if src != phi:
            raise Reject("def-mismatch", "a restatement must repeat the referenced formula")

    def _rule_taut(self, line: ProofLine, phi: Formula) -> None:
        if not is_tautology(phi):
            raise Reject("not-tautology", "propositional skeleton is not a tautology")

    def _rule_ax(self, line: ProofLine, phi: Formula) -> None:
        names = line.words()
        axioms = self.calc.axioms
        if names:
            missing = [n for n in names if n not in axioms]
            if missing:
                raise Reject("no-axiom-match", f"unknown axiom {missing[0]}")
            cands = [axioms[n] for n in names]
        else:
            cands = list(axioms.values())
        if not any(is_instance(s, phi, self.calc.nominals) for s in cands):
            raise Reject("no-axiom-match", "formula is not an instance of the named axiom")

    def _rule_mp(self, line: ProofLine, phi: Formula) -> None:
        a, b = self._refs(line, 2)
        if b == Imp(a, phi) or a == Imp(b, phi):
            return
        raise Reject("mp-mismatch", "modus ponens does not yield this formula")

    def _no_premise_closure(self, line: ProofLine, what: str) -> None:
        if not self.calc.closed_premises and any(self.depends.get(r, False) for r in line.refs()):
            raise Reject("premise-closure", f"{what} may not be applied to lines resting on premises")

    def _rule_nec(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        self._no_premise_closure(line, "necessitation")
        if isinstance(phi, (Box, ConvBox, UBox)) and phi.arg == src:
            return
        raise Reject("nec-mismatch", "formula is not a necessitation of the referenced line")

    def _rule_us(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        self._no_premise_closure(line, "substitution")
        sigma, nu = {}, {}
        for s in line.substs():
            if isinstance(s.target, Var):
                sigma[s.target.index] = s.value
            else:
                nu[s.target.index] = s.value.index
        if not line.substs():
            raise Reject("bad-args", "US expects at least one substitution")
        if substitute_nominals(substitute(src, sigma), nu) != phi:
            raise Reject("us-mismatch", "substitution does not yield this formula")

    def _rule_rk(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        if not (isinstance(src, Imp) and isinstance(phi, Imp)):
            raise Reject("rk-mismatch", "RK needs an implication")
        op = phi.right
        if not isinstance(op, (Box, ConvBox, UBox)) or op.arg != src.right:
            raise Reject("rk-mismatch", "consequent is not the boxed consequent of the premise")

        def boxed(a: Formula, b: Formula) -> bool:
            if _same_op(b, op) and b.arg == a:
                return True
            return isinstance(a, And) and isinstance(b, And) and boxed(a.left, b.left) and boxed(a.right, b.right)

        if not boxed(src.left, phi.left):
            raise Reject("rk-mismatch", "antecedent conjuncts are not boxed conjuncts of the premise")

    def _rule_res(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        direction = self._one_word(line, "direction (fwd or bwd)")
        if direction not in ("fwd", "bwd"):
            raise Reject("bad-args", "residuation direction must be fwd or bwd")
        expected = _residuate(src, direction)
        if expected is None or expected != phi:
            raise Reject("res-mismatch", f"residuation ({direction}) does not yield this formula")

    def _rule_cov(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        w = self._one_word(line, "nominal")
        if not (w.startswith("i") and w[1:].isdigit()):
            raise Reject("bad-args", f"expected a nominal, got {w!r}")
        nom = int(w[1:])
        form = match_form(src, Neg(Nominal(nom)), phi)
        if form is None:
            raise Reject("cov-mismatch", "premise and conclusion are not l(~i) and l(bot) for a necessity form l")
        if any(nom in nominals(a) for a in form_antecedents(form)):
            raise Reject("freshness", f"nominal i{nom} occurs in the necessity form")

    def _v_common(self, line: ProofLine, p: int, alpha: Formula, k: int) -> None:
        if p in variables(alpha):
            raise Reject("freshness", f"p{p} occurs in the antecedent")
        if k not in self.calc.v_modalities:
            raise Reject("non-additive-modality", f"modality {k} is not declared completely additive")

    def _first_premise(self, src: Formula, p: int) -> Formula:
        if not (isinstance(src, Imp) and src.left == Var(p)):
            raise Reject("v-premise-mismatch", f"first premise must read p{p} -> chi(p{p})")
        return src.right

    def _rule_vspec(self, line: ProofLine, phi: Formula) -> None:
        p1, p2, p3 = self._refs(line, 3)
        p = self._fresh_var(line)
        chi = self._first_premise(p1, p)
        if p2 != Imp(UBox(chi), UBox(Var(p))):
            raise Reject("v-premise-mismatch", "second premise must read A chi(p) -> A p")
        if not (isinstance(p3, Imp) and isinstance(p3.right, Box) and p3.right.arg == chi):
            raise Reject("v-premise-mismatch", "third premise must read alpha -> [k]chi(p)")
        alpha, k = p3.left, p3.right.index
        self._v_common(line, p, alpha, k)
        if phi != Imp(alpha, Box(k, BOT)):
            raise Reject("v-premise-mismatch", "conclusion must read alpha -> [k]bot")

    def _rule_vinf(self, line: ProofLine, phi: Formula) -> None:
        (src,) = self._refs(line, 1)
        p = self._fresh_var(line)
        if not (isinstance(phi, Imp) and isinstance(phi.right, Box)):
            raise Reject("v-premise-mismatch", "conclusion must read alpha -> [k]beta")
        alpha, k, beta = phi.left, phi.right.index, phi.right.arg
        try:
            chi = src.right.left.left.arg.right
        except AttributeError:
            raise Reject("v-premise-mismatch", "premise does not have the expected shape") from None
        P = Var(p)
        expected = Imp(
            And(UBox(Imp(beta, P)), exists(Neg(P))),
            And(And(UBox(Imp(P, chi)), exists(Neg(chi))), UBox(Imp(alpha, Box(k, chi)))),
        )
        if src != expected:
            raise Reject("v-premise-mismatch", "premise does not have the expected shape")
        if p in variables(beta):
            raise Reject("freshness", f"p{p} occurs in the consequent")
        self._v_common(line, p, alpha, k)

    def _rule_vmod(self, line: ProofLine, phi: Formula) -> None:
        p1, p2, p3 = self._refs(line, 3)
        p = self._fresh_var(line)
        chi = self._first_premise(p1, p)
        if not (isinstance(p2, Imp) and isinstance(p2.left, And) and isinstance(p2.left.right, Box)):
            raise Reject("v-premise-mismatch", "second premise must read [.i]chi(p) -> p")
        i = p2.left.right.index
        if p2 != Imp(And(chi, Box(i, chi)), Var(p)):
            raise Reject("v-premise-mismatch", "second premise must read [.i]chi(p) -> p")
        if not (isinstance(p3, Imp) and isinstance(p3.right, Box) and p3.right.arg == chi):
            raise Reject("v-premise-mismatch", "third premise must read alpha -> [j]chi(p)")
        alpha, j = p3.left, p3.right.index
        self._v_common(line, p, alpha, j)
        if phi != Imp(alpha, Box(j, BOT)):
            raise Reject("v-premise-mismatch", "conclusion must read alpha -> [j]bot")

    def _rule_vlmod(self, line: ProofLine, phi: Formula) -> None:
        p1, p2, p3 = self._refs(line, 3)
        p = self._fresh_var(line)
        chi = self._first_premise(p1, p)
        chain = []
        cur = p2
        while cur != Var(p):
            if not isinstance(cur, Imp):
                raise Reject("v-premise-mismatch", "second premise must read l1(chi) -> ... -> ln(chi) -> p")
            chain.append(cur.left)
            cur = cur.right
        if not chain or any(split_form(a, chi) is None for a in chain):
            raise Reject("v-premise-mismatch", "second premise antecedents must be necessity forms of chi")
        form = match_form(p3, chi, phi)
        if form is None:
            raise Reject("v-premise-mismatch", "third premise and conclusion must be l(chi) and l(bot)")
        if any(p in variables(a) for a in form_antecedents(form)):
            raise Reject("freshness", f"p{p} occurs in the necessity form")
        for k in form_boxes(form):
            if k not in self.calc.v_modalities:
                raise Reject("non-additive-modality", f"principal box {k} is not declared completely additive")


def _same_op(a: Formula, op: Formula) -> bool:
    if isinstance(op, UBox):
        return isinstance(a, UBox)
    return type(a) is type(op) and a.index == op.index


def _residuate(src: Formula, direction: str) -> Formula | None:
    """phi -> [i]psi  <=>  <~i>phi -> psi, and phi -> [~i]psi  <=>  <i>phi -> psi."""
    if not isinstance(src, Imp):
        return None
    if direction == "fwd":
        r = src.right
        if isinstance(r, Box):
            return Imp(conv_dia(r.index, src.left), r.arg)
        if isinstance(r, ConvBox):
            return Imp(dia(r.index, src.left), r.arg)
        return None
    left = src.left
    if isinstance(left, Neg) and isinstance(left.arg, (Box, ConvBox)) and isinstance(left.arg.arg, Neg):
        inner = left.arg.arg.arg
        if isinstance(left.arg, ConvBox):
            return Imp(inner, Box(left.arg.index, src.right))
        return Imp(inner, ConvBox(left.arg.index, src.right))
    return None


def check_script(calculus: CalculusSpec, script: ProofScript) -> CheckResult:
    return Checker(calculus).check(script)


def rename_script(script: ProofScript, mapping: dict[int, int]) -> ProofScript:
    """Apply a propositional-variable renaming uniformly to every line and argument."""
    sigma = {a: Var(b) for a, b in mapping.items()}

    def arg(x):
        if isinstance(x, Subst):
            tgt = x.target
            if isinstance(tgt, Var) and tgt.index in mapping:
                tgt = Var(mapping[tgt.index])
            return Subst(tgt, substitute(x.value, sigma))
        if isinstance(x, Word) and x.text.startswith("p") and x.text[1:].isdigit():
            n = int(x.text[1:])
            return Word(f"p{mapping.get(n, n)}")
        return x

    return ProofScript(tuple(
        ProofLine(ln.label, substitute(ln.formula, sigma), ln.rule, tuple(arg(a) for a in ln.args))
        for ln in script.lines
    ))
