"""Formula syntax: AST, parser, printer, substitution and related utilities.

Modalities are indexed by non-negative integers. Index 0 is the default box
``[]``. The reserved index ``E_MODALITY`` stands for the extra modality
``[e]`` interpreted as the universal relation on the extended frame. ``A`` is
the universal modality of the language with ``A`` and is a separate node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

E_MODALITY = -1
_HOLE_INDEX = -1


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        super().__init__(f"{message} at offset {offset}; expected one of {sorted(expected)}")
        self.offset = offset
        self.expected = expected


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Neg(self)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Imp(self, other)

    def __str__(self) -> str:
        return to_text(self)


def _node(cls):
    """Frozen dataclass with a cached structural hash."""
    cls = dataclass(frozen=True, eq=True, repr=True)(cls)
    fields_ = [f.name for f in cls.__dataclass_fields__.values() if f.compare]
    name = cls.__name__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((name,) + tuple(getattr(self, f) for f in fields_))
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if other.__class__ is not self.__class__ or hash(self) != hash(other):
            return False
        return all(getattr(self, f) == getattr(other, f) for f in fields_)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


@_node
class Var(Formula):
    index: int


@_node
class Nominal(Formula):
    index: int


@_node
class Bot(Formula):
    pass


@_node
class Top(Formula):
    pass


@_node
class Neg(Formula):
    arg: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Imp(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class Box(Formula):
    index: int
    arg: Formula


@_node
class ConvBox(Formula):
    index: int
    arg: Formula


@_node
class UBox(Formula):
    arg: Formula


BOT = Bot()
TOP = Top()
BINARY = (And, Or, Imp, Iff)


def dia(index: int, phi: Formula) -> Formula:
    return Neg(Box(index, Neg(phi)))


def conv_dia(index: int, phi: Formula) -> Formula:
    return Neg(ConvBox(index, Neg(phi)))


def exists(phi: Formula) -> Formula:
    return Neg(UBox(Neg(phi)))


def boxdot(index: int, phi: Formula) -> Formula:
    return And(phi, Box(index, phi))


def diadot(index: int, phi: Formula) -> Formula:
    return Or(phi, dia(index, phi))


def box_n(index: int, n: int, phi: Formula) -> Formula:
    for _ in range(n):
        phi = Box(index, phi)
    return phi


def dia_n(index: int, n: int, phi: Formula) -> Formula:
    for _ in range(n):
        phi = dia(index, phi)
    return phi


def box_upto(index: int, n: int, phi: Formula) -> Formula:
    """phi & []phi & ... & []^n phi."""
    out = phi
    for k in range(1, n + 1):
        out = And(out, box_n(index, k, phi))
    return out


def conj(items) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for x in items[1:]:
        out = And(out, x)
    return out


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, (Neg, Box, ConvBox, UBox)):
        return (phi.arg,)
    return ()


def rebuild(phi: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(phi, BINARY):
        return type(phi)(kids[0], kids[1])
    if isinstance(phi, Neg):
        return Neg(kids[0])
    if isinstance(phi, (Box, ConvBox)):
        return type(phi)(phi.index, kids[0])
    if isinstance(phi, UBox):
        return UBox(kids[0])
    return phi


def transform(phi: Formula, leaf: Callable[[Formula], Formula | None]) -> Formula:
    """Bottom-up rewrite where ``leaf`` may replace any node before recursion."""
    memo: dict[Formula, Formula] = {}

    def go(f: Formula) -> Formula:
        hit = memo.get(f)
        if hit is not None:
            return hit
        r = leaf(f)
        if r is None:
            kids = children(f)
            r = rebuild(f, tuple(go(k) for k in kids)) if kids else f
        memo[f] = r
        return r

    return go(phi)


def substitute(phi: Formula, sigma: Mapping[int, Formula]) -> Formula:
    """Simultaneous substitution of formulas for propositional variables."""
    if not sigma:
        return phi
    return transform(phi, lambda f: sigma.get(f.index) if isinstance(f, Var) else None)


def substitute_nominals(phi: Formula, sigma: Mapping[int, int]) -> Formula:
    if not sigma:
        return phi
    return transform(
        phi, lambda f: Nominal(sigma[f.index]) if isinstance(f, Nominal) and f.index in sigma else None
    )


def subformulas(phi: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: set[Formula] = set()
    out: list[Formula] = []
    stack: list[tuple[Formula, bool]] = [(phi, False)]
    while stack:
        f, expanded = stack.pop()
        if expanded:
            if f not in seen:
                seen.add(f)
                out.append(f)
            continue
        if f in seen:
            continue
        stack.append((f, True))
        for k in reversed(children(f)):
            if k not in seen:
                stack.append((k, False))
    return out


def nsub(phi: Formula) -> list[Formula]:
    """Subformulas closed under single negation of non-negations."""
    sub = subformulas(phi)
    seen = set(sub)
    out = list(sub)
    for s in sub:
        if not isinstance(s, Neg):
            n = Neg(s)
            if n not in seen:
                seen.add(n)
                out.append(n)
    return out


def length(phi: Formula) -> int:
    """l(phi) = |nsub(phi)|; it fixes the collapse size used by the decision procedure."""
    return len(nsub(phi))


def modal_depth(phi: Formula) -> int:
    memo: dict[Formula, int] = {}
    for f in subformulas(phi):
        kids = children(f)
        d = max((memo[k] for k in kids), default=0)
        memo[f] = d + 1 if isinstance(f, (Box, ConvBox, UBox)) else d
    return memo[phi]


def variables(phi: Formula) -> set[int]:
    return {f.index for f in subformulas(phi) if isinstance(f, Var)}


def nominals(phi: Formula) -> set[int]:
    return {f.index for f in subformulas(phi) if isinstance(f, Nominal)}


def box_indices(phi: Formula) -> set[int]:
    return {f.index for f in subformulas(phi) if isinstance(f, Box)}


def uses(phi: Formula, kind: type) -> bool:
    return any(isinstance(f, kind) for f in subformulas(phi))


def iter_tree(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(children(f))


# ---------------------------------------------------------------- necessity forms


@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class Guard:
    antecedent: Formula
    body: "NecessityForm"


@dataclass(frozen=True)
class BoxForm:
    index: int
    body: "NecessityForm"


NecessityForm = Hole | Guard | BoxForm
HOLE_FORMULA = Var(_HOLE_INDEX)


def apply_form(form: NecessityForm, phi: Formula) -> Formula:
    if isinstance(form, Hole):
        return phi
    if isinstance(form, Guard):
        return Imp(form.antecedent, apply_form(form.body, phi))
    return Box(form.index, apply_form(form.body, phi))


def form_antecedents(form: NecessityForm) -> list[Formula]:
    out = []
    while not isinstance(form, Hole):
        if isinstance(form, Guard):
            out.append(form.antecedent)
        form = form.body
    return out


def form_boxes(form: NecessityForm) -> list[int]:
    """Indices of the principal boxes of a necessity form."""
    out = []
    while not isinstance(form, Hole):
        if isinstance(form, BoxForm):
            out.append(form.index)
        form = form.body
    return out


def form_from_formula(phi: Formula) -> NecessityForm:
    """Read a formula containing the hole marker ``$`` as a necessity form."""
    if phi == HOLE_FORMULA:
        return Hole()
    if isinstance(phi, Imp) and HOLE_FORMULA not in set(iter_tree(phi.left)):
        return Guard(phi.left, form_from_formula(phi.right))
    if isinstance(phi, Box):
        return BoxForm(phi.index, form_from_formula(phi.arg))
    raise ValueError(f"not a necessity form: {to_text(phi)}")


def form_to_formula(form: NecessityForm) -> Formula:
    return apply_form(form, HOLE_FORMULA)


def match_form(target: Formula, filled: Formula, bottom: Formula) -> NecessityForm | None:
    """Find the necessity form l with l(filled) == target_with_filled and l(bottom) == bottom-version.

    ``target`` is the instance containing ``filled`` at the hole; ``bottom`` is the
    instance containing the replacement. Both are walked in lockstep.
    """
    a, b = target, bottom
    path: list[tuple[str, object]] = []
    while True:
        if a == filled and b == BOT:
            break
        if isinstance(a, Imp) and isinstance(b, Imp) and a.left == b.left:
            path.append(("g", a.left))
            a, b = a.right, b.right
        elif isinstance(a, Box) and isinstance(b, Box) and a.index == b.index:
            path.append(("b", a.index))
            a, b = a.arg, b.arg
        else:
            return None
    form: NecessityForm = Hole()
    for kind, val in reversed(path):
        form = Guard(val, form) if kind == "g" else BoxForm(val, form)
    return form


def split_form(target: Formula, filled: Formula) -> NecessityForm | None:
    """Find a necessity form l with l(filled) == target, preferring the shallowest hole."""
    path = []
    a = target
    while a != filled:
        if isinstance(a, Imp):
            path.append(("g", a.left))
            a = a.right
        elif isinstance(a, Box):
            path.append(("b", a.index))
            a = a.arg
        else:
            return None
    form: NecessityForm = Hole()
    for kind, val in reversed(path):
        form = Guard(val, form) if kind == "g" else BoxForm(val, form)
    return form


# ---------------------------------------------------------------- printing

_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Imp: "->", Or: "|", And: "&"}
_UNARY_PREC = 5


def _prec(phi: Formula) -> int:
    return _PREC.get(type(phi), _UNARY_PREC)


def _mod(index: int) -> str:
    if index == E_MODALITY:
        return "e"
    return str(index)


def _as_dia(phi: Formula):
    if isinstance(phi, Neg) and isinstance(phi.arg, (Box, ConvBox, UBox)) and isinstance(phi.arg.arg, Neg):
        return phi.arg, phi.arg.arg.arg
    return None


def to_text(phi: Formula) -> str:
    """Print in the concrete syntax; ``parse(to_text(phi)) == phi``."""
    parts: list[str] = []
    _emit(phi, parts)
    return "".join(parts)


def _emit(phi: Formula, out: list[str]) -> None:
    if isinstance(phi, Var):
        out.append("$" if phi.index == _HOLE_INDEX else f"p{phi.index}")
    elif isinstance(phi, Nominal):
        out.append(f"i{phi.index}")
    elif isinstance(phi, Bot):
        out.append("bot")
    elif isinstance(phi, Top):
        out.append("top")
    elif isinstance(phi, BINARY):
        p = _PREC[type(phi)]
        right_assoc = isinstance(phi, Imp)
        lp = _prec(phi.left)
        rp = _prec(phi.right)
        left_paren = lp < p or (right_assoc and lp == p)
        right_paren = rp < p or (not right_assoc and rp == p)
        _wrap(phi.left, out, left_paren)
        out.append(f" {_OPS[type(phi)]} ")
        _wrap(phi.right, out, right_paren)
    else:
        d = _as_dia(phi)
        if d is not None:
            op, body = d
            if isinstance(op, Box):
                out.append("<>" if op.index == 0 else f"<{_mod(op.index)}>")
            elif isinstance(op, ConvBox):
                out.append(f"<~{op.index}>")
            else:
                out.append("E ")
            _wrap(body, out, _prec(body) < _UNARY_PREC)
            return
        if isinstance(phi, Neg):
            out.append("~")
        elif isinstance(phi, Box):
            out.append("[]" if phi.index == 0 else f"[{_mod(phi.index)}]")
        elif isinstance(phi, ConvBox):
            out.append(f"[~{phi.index}]")
        elif isinstance(phi, UBox):
            out.append("A ")
        else:
            raise TypeError(f"not a formula: {phi!r}")
        _wrap(phi.arg, out, _prec(phi.arg) < _UNARY_PREC)


def _wrap(phi: Formula, out: list[str], paren: bool) -> None:
    if paren:
        out.append("(")
        _emit(phi, out)
        out.append(")")
    else:
        _emit(phi, out)


# ---------------------------------------------------------------- parsing

_ATOM_START = frozenset({"p<N>", "i<N>", "bot", "top", "(", "~", "[...]", "<...>", "A", "E"})


class _Parser:
    def __init__(self, text: str, allow_hole: bool):
        self.text = text
        self.pos = 0
        self.allow_hole = allow_hole

    def error(self, message: str, expected) -> FormulaSyntaxError:
        offset = len(self.text[: self.pos].encode("utf-8"))
        return FormulaSyntaxError(message, offset, frozenset(expected))

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def number(self, expected) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a number", expected)
        return int(self.text[start : self.pos])

    def parse(self) -> Formula:
        phi = self.iff()
        self.skip()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.text[self.pos]!r}", {"&", "|", "->", "<->", ")", "<end>"})
        return phi

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek("<->"):
            self.pos += 3
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek("->"):
            self.pos += 2
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek("|"):
            self.pos += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek("&"):
            self.pos += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        self.skip()
        t = self.text
        i = self.pos
        if i >= len(t):
            raise self.error("unexpected end of input", _ATOM_START)
        c = t[i]
        if c == "~":
            self.pos += 1
            return Neg(self.unary())
        if c == "(":
            self.pos += 1
            phi = self.iff()
            if not self.peek(")"):
                raise self.error("unbalanced parenthesis", {")", "&", "|", "->", "<->"})
            self.pos += 1
            return phi
        if c == "[":
            self.pos += 1
            kind, idx = self.modality("]")
            arg = self.unary()
            if kind == "box":
                return Box(idx, arg)
            if kind == "conv":
                return ConvBox(idx, arg)
            return boxdot(idx, arg)
        if c == "<" and not t.startswith("<->", i):
            self.pos += 1
            kind, idx = self.modality(">")
            arg = self.unary()
            if kind == "box":
                return dia(idx, arg)
            if kind == "conv":
                return conv_dia(idx, arg)
            return diadot(idx, arg)
        if t.startswith("bot", i):
            self.pos += 3
            return BOT
        if t.startswith("top", i):
            self.pos += 3
            return TOP
        if c == "A":
            self.pos += 1
            return UBox(self.unary())
        if c == "E":
            self.pos += 1
            return exists(self.unary())
        if c in "pi" and i + 1 < len(t) and t[i + 1].isdigit():
            self.pos += 1
            n = self.number({"<N>"})
            return Var(n) if c == "p" else Nominal(n)
        if c == "$" and self.allow_hole:
            self.pos += 1
            return HOLE_FORMULA
        raise self.error(f"unexpected {c!r}", _ATOM_START)

    def modality(self, close: str) -> tuple[str, int]:
        t = self.text
        exp = {close, "<N>", "~", "e", "."}
        kind = "box"
        if self.pos < len(t) and t[self.pos] == "~":
            kind = "conv"
            self.pos += 1
        elif self.pos < len(t) and t[self.pos] == ".":
            kind = "dot"
            self.pos += 1
        if self.pos < len(t) and t[self.pos] == close:
            self.pos += 1
            return kind, 0
        if kind == "box" and self.pos < len(t) and t[self.pos] == "e":
            self.pos += 1
            idx = E_MODALITY
        else:
            idx = self.number(exp)
        if self.pos >= len(t) or t[self.pos] != close:
            raise self.error("unterminated modality", {close})
        self.pos += 1
        return kind, idx


def parse(text: str) -> Formula:
    """Parse the concrete syntax. Raises FormulaSyntaxError with byte offset and expected tokens."""
    return _Parser(text, allow_hole=False).parse()


def parse_with_hole(text: str) -> Formula:
    """Parse a formula that may contain the hole marker ``$``."""
    return _Parser(text, allow_hole=True).parse()


def parse_form(text: str) -> NecessityForm:
    return form_from_formula(parse_with_hole(text))


# ---------------------------------------------------------------- standard translation


def standard_translation(phi: Formula, var: str = "x") -> str:
    """First-order standard translation of a unimodal, nominal-free formula."""
    idx = box_indices(phi)
    if len(idx) > 1 or any(isinstance(f, (ConvBox, UBox, Nominal)) for f in iter_tree(phi)):
        raise ValueError("standard translation needs a unimodal nominal-free formula")
    counter = [0]

    def st(f: Formula, x: str) -> str:
        if isinstance(f, Var):
            return f"P{f.index}({x})"
        if isinstance(f, Top):
            return "true"
        if isinstance(f, Bot):
            return "false"
        if isinstance(f, Neg):
            return "~" + st(f.arg, x)
        if isinstance(f, BINARY):
            return f"({st(f.left, x)} {_OPS[type(f)]} {st(f.right, x)})"
        y = f"y{counter[0]}"
        counter[0] += 1
        return f"forall {y} (R({x},{y}) -> {st(f.arg, y)})"

    return st(phi, var)


def to_json(phi: Formula):
    """Nested list encoding of the AST."""
    if isinstance(phi, Var):
        return ["var", phi.index]
    if isinstance(phi, Nominal):
        return ["nom", phi.index]
    if isinstance(phi, Bot):
        return ["bot"]
    if isinstance(phi, Top):
        return ["top"]
    if isinstance(phi, Neg):
        return ["not", to_json(phi.arg)]
    if isinstance(phi, BINARY):
        return [type(phi).__name__.lower(), to_json(phi.left), to_json(phi.right)]
    if isinstance(phi, Box):
        return ["box", phi.index, to_json(phi.arg)]
    if isinstance(phi, ConvBox):
        return ["convbox", phi.index, to_json(phi.arg)]
    return ["ubox", to_json(phi.arg)]
