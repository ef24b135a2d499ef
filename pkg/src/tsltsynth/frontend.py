"""Specification frontend: concrete syntax, AST, validation, atom inventory.

Spec files are UTF-8 text: header lines ``state <name>:<int|real>;`` /
``input <name>:<int|real>;`` followed by ``spec <formula>;``.  The formula
syntax uses ``G F X U R``, ``&& || -> !``, comparisons ``<= < = != >= >``,
updates ``[x <- e]`` and the bounded sugar ``G[1,c] phi`` which expands to
``X(phi && X(phi && ...))`` with c nested levels.  See docs/spec-format.md
for the grammar.

Parsing is pure and the resulting values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .theory import (LIA, LRA, Atom, Term, atom_cmp, canon_literal,
                     canonicalize)


class SpecError(Exception):
    """Parse or validation failure, with 1-based line/column when known."""

    def __init__(self, message: str, line: int = None, col: int = None):
        self.line, self.col = line, col
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(message + where)


# --- formula AST ----------------------------------------------------------

@dataclass(frozen=True)
class TslFormula:
    """Tree node; kind is one of
    atom, update, true, false, not, and, or, implies, next, until, release,
    globally, finally."""

    kind: str
    atom: Optional[Atom] = None
    var: Optional[str] = None
    term: Optional[Term] = None
    args: tuple["TslFormula", ...] = ()

    def __str__(self) -> str:
        return format_formula(self)


def f_atom(a: Atom) -> TslFormula:
    return TslFormula("atom", atom=a)


def f_update(var: str, term: Term) -> TslFormula:
    return TslFormula("update", var=var, term=term)


F_TRUE = TslFormula("true")
F_FALSE = TslFormula("false")


def f_not(a: TslFormula) -> TslFormula:
    return TslFormula("not", args=(a,))


def f_and(*args: TslFormula) -> TslFormula:
    return TslFormula("and", args=tuple(args))


def f_or(*args: TslFormula) -> TslFormula:
    return TslFormula("or", args=tuple(args))


def f_implies(a: TslFormula, b: TslFormula) -> TslFormula:
    return TslFormula("implies", args=(a, b))


def f_next(a: TslFormula) -> TslFormula:
    return TslFormula("next", args=(a,))


def f_until(a: TslFormula, b: TslFormula) -> TslFormula:
    return TslFormula("until", args=(a, b))


def f_release(a: TslFormula, b: TslFormula) -> TslFormula:
    return TslFormula("release", args=(a, b))


def f_globally(a: TslFormula) -> TslFormula:
    return TslFormula("globally", args=(a,))


def f_finally(a: TslFormula) -> TslFormula:
    return TslFormula("finally", args=(a,))


@dataclass(frozen=True)
class TslSpec:
    state_vars: tuple[str, ...]
    input_vars: tuple[str, ...]
    theory: str
    formula: TslFormula
    var_types: tuple[tuple[str, str], ...] = ()

    @property
    def all_vars(self) -> frozenset[str]:
        return frozenset(self.state_vars) | frozenset(self.input_vars)


# --- lexer ----------------------------------------------------------------

_SYMBOLS = ["<-", "<=", ">=", "!=", "&&", "||", "->",
            "<", ">", "=", "!", "(", ")", "[", "]", "+", "-", "*", "/", ";", ":", ","]
_KEYWORDS = {"state", "input", "spec", "int", "real", "true", "false"}
_TEMPORAL = {"G", "F", "X", "U", "R"}


@dataclass
class _Tok:
    kind: str  # sym | ident | num | kw | temporal | eof
    text: str
    line: int
    col: int
    value: Optional[Fraction] = None


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#" or text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = None
        for s in _SYMBOLS:
            if text.startswith(s, i):
                matched = s
                break
        if matched:
            toks.append(_Tok("sym", matched, line, col))
            i += len(matched)
            col += len(matched)
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            lit = text[i:j]
            val = Fraction(lit) if "." in lit else Fraction(int(lit))
            t = _Tok("num", lit, line, col, value=val)
            toks.append(t)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                toks.append(_Tok("kw", word, line, col))
            elif word in _TEMPORAL:
                toks.append(_Tok("temporal", word, line, col))
            else:
                toks.append(_Tok("ident", word, line, col))
            col += j - i
            i = j
            continue
        raise SpecError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, toks: list[_Tok], theory: str, declared: dict[str, str],
                 state_vars: set[str]):
        self.toks = toks
        self.pos = 0
        self.theory = theory
        self.declared = declared
        self.state_vars = state_vars

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, text: str = None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SpecError(f"expected {want!r}, found {t.text!r}", t.line, t.col)
        return self.take()

    def at_sym(self, s: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == s

    def formula(self) -> TslFormula:
        lhs = self.or_expr()
        if self.at_sym("->"):
            self.take()
            return f_implies(lhs, self.formula())
        return lhs

    def or_expr(self) -> TslFormula:
        parts = [self.and_expr()]
        while self.at_sym("||"):
            self.take()
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else f_or(*parts)

    def and_expr(self) -> TslFormula:
        parts = [self.until_expr()]
        while self.at_sym("&&"):
            self.take()
            parts.append(self.until_expr())
        return parts[0] if len(parts) == 1 else f_and(*parts)

    def until_expr(self) -> TslFormula:
        lhs = self.unary()
        t = self.peek()
        if t.kind == "temporal" and t.text in ("U", "R"):
            self.take()
            rhs = self.until_expr()
            return f_until(lhs, rhs) if t.text == "U" else f_release(lhs, rhs)
        return lhs

    def unary(self) -> TslFormula:
        t = self.peek()
        if t.kind == "sym" and t.text == "!":
            self.take()
            return f_not(self.unary())
        if t.kind == "temporal":
            if t.text == "X":
                self.take()
                return f_next(self.unary())
            if t.text == "F":
                self.take()
                return f_finally(self.unary())
            if t.text == "G":
                self.take()
                if self.at_sym("["):
                    return self.bounded_globally(t)
                return f_globally(self.unary())
        return self.primary()

    def bounded_globally(self, gtok: _Tok) -> TslFormula:
        self.expect("sym", "[")
        lo = self.expect("num")
        self.expect("sym", ",")
        hi = self.expect("num")
        self.expect("sym", "]")
        if lo.value != 1 or hi.value.denominator != 1 or hi.value < 1:
            raise SpecError("bounded globally must be G[1,c] with integer c >= 1",
                            gtok.line, gtok.col)
        body = self.unary()
        c = int(hi.value)
        # G[1,c] p  ==  X(p && X(p && ...)) with c nested next operators
        out = body
        for _ in range(c - 1):
            out = f_and(body, f_next(out))
        return f_next(out)

    def primary(self) -> TslFormula:
        t = self.peek()
        if t.kind == "kw" and t.text in ("true", "false"):
            self.take()
            return F_TRUE if t.text == "true" else F_FALSE
        if self.at_sym("["):
            return self.update()
        if self.at_sym("("):
            snapshot = self.pos
            self.take()
            try:
                inner = self.formula()
                self.expect("sym", ")")
                return inner
            except SpecError:
                self.pos = snapshot
                return self.comparison()
        return self.comparison()

    def update(self) -> TslFormula:
        open_tok = self.expect("sym", "[")
        name = self.expect("ident")
        self.expect("sym", "<-")
        term = self.term()
        self.expect("sym", "]")
        if name.text not in self.state_vars:
            raise SpecError("update target not a state variable: " + name.text,
                            name.line, name.col)
        _ = open_tok
        return f_update(name.text, term)

    def comparison(self) -> TslFormula:
        t = self.peek()
        lhs = self.term()
        op = self.peek()
        if op.kind != "sym" or op.text not in ("<=", "<", "=", "!=", ">=", ">"):
            raise SpecError("expected comparison operator", op.line, op.col)
        self.take()
        rhs = self.term()
        if op.text == "!=":
            a = atom_cmp(lhs, "=", rhs, self.theory)
            return f_not(f_atom(a))
        _ = t
        return f_atom(atom_cmp(lhs, op.text, rhs, self.theory))

    def term(self) -> Term:
        out = self.mul()
        while self.peek().kind == "sym" and self.peek().text in ("+", "-"):
            op = self.take()
            rhs = self.mul()
            out = out.add(rhs) if op.text == "+" else out.sub(rhs)
        return out

    def mul(self) -> Term:
        out = self.factor()
        while self.peek().kind == "sym" and self.peek().text == "*":
            star = self.take()
            rhs = self.factor()
            if out.is_constant:
                out = rhs.scale(out.const)
            elif rhs.is_constant:
                out = out.scale(rhs.const)
            else:
                raise SpecError("non-linear product", star.line, star.col)
        return out

    def factor(self) -> Term:
        t = self.peek()
        if t.kind == "num":
            self.take()
            value = t.value
            if self.at_sym("/"):  # exact rational literal p/q
                self.take()
                den = self.expect("num")
                if den.value == 0 or den.value.denominator != 1:
                    raise SpecError("bad rational literal", den.line, den.col)
                value = value / den.value
            if self.theory == LIA and value.denominator != 1:
                raise SpecError("decimal literal in an integer specification",
                                t.line, t.col)
            return Term.constant(value)
        if t.kind == "ident":
            self.take()
            if t.text not in self.declared:
                raise SpecError("undeclared variable: " + t.text, t.line, t.col)
            return Term.var(t.text)
        if self.at_sym("-"):
            self.take()
            return self.factor().scale(-1)
        if self.at_sym("("):
            self.take()
            inner = self.term()
            self.expect("sym", ")")
            return inner
        raise SpecError(f"expected a term, found {t.text!r}", t.line, t.col)


def parse_spec(text: str) -> TslSpec:
    """Parse and validate a specification file."""
    toks = _lex(text)
    pos = 0
    decls: list[tuple[str, str, str]] = []  # (role, name, type)
    while toks[pos].kind == "kw" and toks[pos].text in ("state", "input"):
        role = toks[pos].text
        pos += 1
        name = toks[pos]
        if name.kind != "ident":
            raise SpecError("expected variable name", name.line, name.col)
        pos += 1
        if not (toks[pos].kind == "sym" and toks[pos].text == ":"):
            raise SpecError("expected ':'", toks[pos].line, toks[pos].col)
        pos += 1
        ty = toks[pos]
        if ty.kind != "kw" or ty.text not in ("int", "real"):
            raise SpecError("expected 'int' or 'real'", ty.line, ty.col)
        pos += 1
        if not (toks[pos].kind == "sym" and toks[pos].text == ";"):
            raise SpecError("expected ';'", toks[pos].line, toks[pos].col)
        pos += 1
        decls.append((role, name.text, ty.text))

    names = [n for _, n, _ in decls]
    if len(set(names)) != len(names):
        dup = sorted(n for n in names if names.count(n) > 1)[0]
        raise SpecError(f"variable declared twice: {dup}")
    types = {t for _, _, t in decls}
    if len(types) > 1:
        raise SpecError("mixed-theory declarations (int and real)")
    theory = LIA if (types or {"int"}) == {"int"} else LRA

    state_vars = tuple(n for r, n, _ in decls if r == "state")
    input_vars = tuple(n for r, n, _ in decls if r == "input")

    if not (toks[pos].kind == "kw" and toks[pos].text == "spec"):
        t = toks[pos]
        raise SpecError("expected 'spec'", t.line, t.col)
    pos += 1
    parser = _Parser(toks[pos:], theory, {n: t for _, n, t in decls},
                     set(state_vars))
    formula = parser.formula()
    end = parser.peek()
    if not (end.kind == "sym" and end.text == ";"):
        raise SpecError("expected ';' after the formula", end.line, end.col)
    parser.take()
    if parser.peek().kind != "eof":
        t = parser.peek()
        raise SpecError(f"trailing input {t.text!r}", t.line, t.col)
    return TslSpec(state_vars, input_vars, theory, formula,
                   tuple((n, t) for _, n, t in decls))


# --- printing ---------------------------------------------------------------

def format_term(t: Term) -> str:
    return str(t)


def format_atom(a: Atom) -> str:
    """Readable rendering: negative-coefficient parts move to the right side."""
    pos_parts, neg_parts = [], []
    for v, c in a.term.coeffs:
        (pos_parts if c > 0 else neg_parts).append((v, abs(c)))
    const = a.term.const

    def side(parts: list, k: Fraction) -> str:
        bits = [v if c == 1 else f"{c}*{v}" for v, c in parts]
        if k or not bits:
            bits.append(str(k))
        return " + ".join(bits)

    lhs = side(pos_parts, const if const > 0 else Fraction(0))
    rhs = side(neg_parts, -const if const < 0 else Fraction(0))
    rel = a.rel
    return f"{lhs} {rel} {rhs}"


def format_formula(f: TslFormula) -> str:
    def paren(child: TslFormula) -> str:
        if child.kind in ("atom", "update", "true", "false", "not",
                          "next", "globally", "finally"):
            return format_formula(child)
        return "(" + format_formula(child) + ")"

    k = f.kind
    if k == "true":
        return "true"
    if k == "false":
        return "false"
    if k == "atom":
        return format_atom(f.atom)
    if k == "update":
        return f"[{f.var} <- {format_term(f.term)}]"
    if k == "not":
        return "!" + paren(f.args[0])
    if k == "and":
        return " && ".join(paren(a) for a in f.args)
    if k == "or":
        return " || ".join(paren(a) for a in f.args)
    if k == "implies":
        return f"{paren(f.args[0])} -> {paren(f.args[1])}"
    if k == "next":
        return "X " + paren(f.args[0])
    if k == "globally":
        return "G " + paren(f.args[0])
    if k == "finally":
        return "F " + paren(f.args[0])
    if k == "until":
        return f"{paren(f.args[0])} U {paren(f.args[1])}"
    if k == "release":
        return f"{paren(f.args[0])} R {paren(f.args[1])}"
    raise SpecError(f"bad formula node {k!r}")


def print_spec(spec: TslSpec) -> str:
    lines = []
    ty = dict(spec.var_types)
    default = "int" if spec.theory == LIA else "real"
    for v in spec.state_vars:
        lines.append(f"state {v}:{ty.get(v, default)};")
    for v in spec.input_vars:
        lines.append(f"input {v}:{ty.get(v, default)};")
    lines.append(f"spec {format_formula(spec.formula)};")
    return "\n".join(lines) + "\n"


# --- inventory ---------------------------------------------------------------

def collect_atoms(spec: TslSpec) -> tuple[tuple[Atom, ...], tuple[tuple[str, Term], ...]]:
    """Distinct predicates and updates in document order of first occurrence.

    Predicates are sign-normalized representatives, so an atom and its
    negation count once.  Update terms are canonicalized by constant folding
    at parse time (Term.make), so textual variants of the same assignment
    unify.
    """
    preds: list[Atom] = []
    updates: list[tuple[str, Term]] = []
    seen_p: set[Atom] = set()
    seen_u: set[tuple[str, Term]] = set()

    def walk(f: TslFormula) -> None:
        if f.kind == "atom":
            cl = canon_literal(f.atom, True, spec.theory)
            if isinstance(cl, bool):
                return
            rep, _ = cl
            if rep not in seen_p:
                seen_p.add(rep)
                preds.append(rep)
        elif f.kind == "update":
            key = (f.var, f.term)
            if key not in seen_u:
                seen_u.add(key)
                updates.append(key)
        for a in f.args:
            walk(a)

    walk(spec.formula)
    return tuple(preds), tuple(updates)


def validate(spec: TslSpec) -> None:
    """Check the TslSpec invariants; parse_spec already enforces them."""
    overlap = set(spec.state_vars) & set(spec.input_vars)
    if overlap:
        raise SpecError(f"state and input overlap: {sorted(overlap)}")

    def walk(f: TslFormula) -> None:
        if f.kind == "atom":
            bad = f.atom.free_vars() - spec.all_vars
            if bad:
                raise SpecError(f"undeclared variable: {sorted(bad)[0]}")
        if f.kind == "update":
            if f.var not in spec.state_vars:
                raise SpecError("update target not a state variable: " + f.var)
            bad = f.term.free_vars() - spec.all_vars
            if bad:
                raise SpecError(f"undeclared variable: {sorted(bad)[0]}")
        for a in f.args:
            walk(a)

    walk(spec.formula)
