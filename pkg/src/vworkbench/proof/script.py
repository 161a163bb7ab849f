"""Line-oriented proof scripts.

Each line reads ``<label>. <formula> ; <RULE>(<args>)``. Labels are dotted
numbers (``3`` or ``2.1``) and must be unique. Arguments are comma separated:
line labels, bare words (``fwd``, ``p0``, axiom names), or substitutions
``p0 := <formula>`` / ``i0 := i1``. Blank lines and lines starting with ``#``
are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..formula import Formula, FormulaSyntaxError, Nominal, Var, parse, to_text

LABEL_RE = re.compile(r"^\d+(?:\.\d+)*$")
_LINE_RE = re.compile(r"^\s*(\d+(?:\.\d+)*)\.\s+(.*?)\s*;\s*([A-Za-z]+)\s*(?:\((.*)\))?\s*$")
_SUBST_RE = re.compile(r"^\s*([pi])(\d+)\s*:=\s*(.+?)\s*$")


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Ref:
    label: str


@dataclass(frozen=True)
class Word:
    text: str


@dataclass(frozen=True)
class Subst:
    target: Var | Nominal
    value: Formula


Arg = Ref | Word | Subst


@dataclass(frozen=True)
class ProofLine:
    label: str
    formula: Formula
    rule: str
    args: tuple[Arg, ...] = ()

    def refs(self) -> list[str]:
        return [a.label for a in self.args if isinstance(a, Ref)]

    def words(self) -> list[str]:
        return [a.text for a in self.args if isinstance(a, Word)]

    def substs(self) -> list[Subst]:
        return [a for a in self.args if isinstance(a, Subst)]


@dataclass(frozen=True)
class ProofScript:
    lines: tuple[ProofLine, ...]

    @property
    def conclusion(self) -> Formula | None:
        return self.lines[-1].formula if self.lines else None

    def line(self, label: str) -> ProofLine:
        for ln in self.lines:
            if ln.label == label:
                return ln
        raise KeyError(label)


def _parse_arg(text: str, line_no: int) -> Arg:
    text = text.strip()
    if LABEL_RE.match(text):
        return Ref(text)
    m = _SUBST_RE.match(text)
    if m:
        kind, idx, rhs = m.groups()
        try:
            value = parse(rhs)
        except FormulaSyntaxError as e:
            raise ScriptSyntaxError(f"bad substitution value: {e}", line_no) from e
        if kind == "i" and not isinstance(value, Nominal):
            raise ScriptSyntaxError("nominals may only be replaced by nominals", line_no)
        return Subst(Var(int(idx)) if kind == "p" else Nominal(int(idx)), value)
    if not text:
        raise ScriptSyntaxError("empty argument", line_no)
    return Word(text)


def parse_script(text: str) -> ProofScript:
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        if not m:
            raise ScriptSyntaxError("expected '<label>. <formula> ; <RULE>(<args>)'", no)
        label, ftext, rule, args = m.groups()
        try:
            phi = parse(ftext)
        except FormulaSyntaxError as e:
            raise ScriptSyntaxError(str(e), no) from e
        parsed = tuple(_parse_arg(a, no) for a in args.split(",")) if args and args.strip() else ()
        lines.append(ProofLine(label, phi, rule.upper(), parsed))
    return ProofScript(tuple(lines))


def _format_arg(a: Arg) -> str:
    if isinstance(a, Ref):
        return a.label
    if isinstance(a, Word):
        return a.text
    return f"{to_text(a.target)} := {to_text(a.value)}"


def format_line(line: ProofLine) -> str:
    args = ", ".join(_format_arg(a) for a in line.args)
    return f"{line.label}. {to_text(line.formula)} ; {line.rule}({args})"


def format_script(script: ProofScript) -> str:
    return "\n".join(format_line(ln) for ln in script.lines) + "\n"
