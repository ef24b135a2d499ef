"""Propositional LTL formulas over integer variable ids.

The Boolean abstraction layer works with these: predicate variables appear
in input position, update variables in output position.  Includes negation
normal form and direct semantics on ultimately-periodic words, which the
automata tests use as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence


@dataclass(frozen=True)
class Ltl:
    """Node kinds: var, true, false, not, and, or, implies, next, until,
    release, globally, finally."""

    kind: str
    var: Optional[int] = None
    args: tuple["Ltl", ...] = ()

    def __str__(self) -> str:
        return format_ltl(self)


LTRUE = Ltl("true")
LFALSE = Ltl("false")


def lvar(v: int) -> Ltl:
    return Ltl("var", var=v)


def lnot(a: Ltl) -> Ltl:
    if a.kind == "true":
        return LFALSE
    if a.kind == "false":
        return LTRUE
    if a.kind == "not":
        return a.args[0]
    return Ltl("not", args=(a,))


def land(*args: Ltl) -> Ltl:
    flat: list[Ltl] = []
    for a in args:
        if a.kind == "false":
            return LFALSE
        if a.kind == "true":
            continue
        flat.extend(a.args if a.kind == "and" else [a])
    if not flat:
        return LTRUE
    return flat[0] if len(flat) == 1 else Ltl("and", args=tuple(flat))


def lor(*args: Ltl) -> Ltl:
    flat: list[Ltl] = []
    for a in args:
        if a.kind == "true":
            return LTRUE
        if a.kind == "false":
            continue
        flat.extend(a.args if a.kind == "or" else [a])
    if not flat:
        return LFALSE
    return flat[0] if len(flat) == 1 else Ltl("or", args=tuple(flat))


def limplies(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("implies", args=(a, b))


def lnext(a: Ltl) -> Ltl:
    if a.kind in ("true", "false"):
        return a
    return Ltl("next", args=(a,))


def luntil(a: Ltl, b: Ltl) -> Ltl:
    if b.kind in ("true", "false"):
        return b
    if a.kind == "false":
        return b
    return Ltl("until", args=(a, b))


def lrelease(a: Ltl, b: Ltl) -> Ltl:
    if b.kind in ("true", "false"):
        return b
    if a.kind == "true":
        return b
    return Ltl("release", args=(a, b))


def lglobally(a: Ltl) -> Ltl:
    return Ltl("globally", args=(a,))


def lfinally(a: Ltl) -> Ltl:
    return Ltl("finally", args=(a,))


def variables_of(f: Ltl) -> frozenset[int]:
    if f.kind == "var":
        return frozenset((f.var,))
    out: frozenset[int] = frozenset()
    for a in f.args:
        out |= variables_of(a)
    return out


def format_ltl(f: Ltl, namer: Callable[[int], str] = None) -> str:
    """Conventional infix text; `namer` renders variable ids."""
    name = namer or (lambda v: f"v{v}")

    def paren(a: Ltl) -> str:
        if a.kind in ("var", "true", "false", "not", "next",
                      "globally", "finally"):
            return go(a)
        return "(" + go(a) + ")"

    def go(a: Ltl) -> str:
        k = a.kind
        if k == "var":
            return name(a.var)
        if k in ("true", "false"):
            return k
        if k == "not":
            return "!" + paren(a.args[0])
        if k == "and":
            return " && ".join(paren(x) for x in a.args)
        if k == "or":
            return " || ".join(paren(x) for x in a.args)
        if k == "implies":
            return f"{paren(a.args[0])} -> {paren(a.args[1])}"
        if k == "next":
            return "X " + paren(a.args[0])
        if k == "globally":
            return "G " + paren(a.args[0])
        if k == "finally":
            return "F " + paren(a.args[0])
        if k == "until":
            return f"{paren(a.args[0])} U {paren(a.args[1])}"
        if k == "release":
            return f"{paren(a.args[0])} R {paren(a.args[1])}"
        raise ValueError(k)

    return go(f)


def to_nnf(f: Ltl, negated: bool = False) -> Ltl:
    """Negation normal form over the core operators.

    Output kinds: var, not(var), true, false, and, or, next, until, release.
    G and F lower to release/until.
    """
    k = f.kind
    if k == "true":
        return LFALSE if negated else LTRUE
    if k == "false":
        return LTRUE if negated else LFALSE
    if k == "var":
        return Ltl("not", args=(f,)) if negated else f
    if k == "not":
        return to_nnf(f.args[0], not negated)
    if k == "implies":
        return to_nnf(lor(lnot(f.args[0]), f.args[1]), negated)
    if k == "and":
        parts = tuple(to_nnf(a, negated) for a in f.args)
        return lor(*parts) if negated else land(*parts)
    if k == "or":
        parts = tuple(to_nnf(a, negated) for a in f.args)
        return land(*parts) if negated else lor(*parts)
    if k == "next":
        return lnext(to_nnf(f.args[0], negated))
    if k == "globally":
        return to_nnf(lrelease(LFALSE, f.args[0]), negated)
    if k == "finally":
        return to_nnf(luntil(LTRUE, f.args[0]), negated)
    if k == "until":
        a, b = f.args
        if negated:
            return lrelease(to_nnf(a, True), to_nnf(b, True))
        return luntil(to_nnf(a), to_nnf(b))
    if k == "release":
        a, b = f.args
        if negated:
            return luntil(to_nnf(a, True), to_nnf(b, True))
        return lrelease(to_nnf(a), to_nnf(b))
    raise ValueError(k)


Letter = Mapping[int, bool]


def eval_lasso(f: Ltl, prefix: Sequence[Letter], cycle: Sequence[Letter]) -> bool:
    """Direct LTL semantics on the ultimately periodic word prefix . cycle^w.

    Fixpoint iteration over the lasso positions; used as the bounded-word
    oracle for the automaton construction.
    """
    if not cycle:
        raise ValueError("cycle must be nonempty")
    letters = list(prefix) + list(cycle)
    n = len(letters)
    loop = len(prefix)

    def succ(p: int) -> int:
        return p + 1 if p + 1 < n else loop

    cache: dict[Ltl, list[bool]] = {}

    def values(g: Ltl) -> list[bool]:
        if g in cache:
            return cache[g]
        k = g.kind
        if k == "true":
            out = [True] * n
        elif k == "false":
            out = [False] * n
        elif k == "var":
            out = [bool(letters[p].get(g.var, False)) for p in range(n)]
        elif k == "not":
            out = [not v for v in values(g.args[0])]
        elif k == "and":
            parts = [values(a) for a in g.args]
            out = [all(p[i] for p in parts) for i in range(n)]
        elif k == "or":
            parts = [values(a) for a in g.args]
            out = [any(p[i] for p in parts) for i in range(n)]
        elif k == "implies":
            va, vb = values(g.args[0]), values(g.args[1])
            out = [(not va[i]) or vb[i] for i in range(n)]
        elif k == "next":
            va = values(g.args[0])
            out = [va[succ(p)] for p in range(n)]
        elif k in ("until", "finally"):
            if k == "finally":
                va, vb = [True] * n, values(g.args[0])
            else:
                va, vb = values(g.args[0]), values(g.args[1])
            out = [False] * n
            for _ in range(n + 1):
                nxt = [vb[p] or (va[p] and out[succ(p)]) for p in range(n)]
                if nxt == out:
                    break
                out = nxt
        elif k in ("release", "globally"):
            if k == "globally":
                va, vb = [False] * n, values(g.args[0])
            else:
                va, vb = values(g.args[0]), values(g.args[1])
            out = [True] * n
            for _ in range(n + 1):
                nxt = [vb[p] and (va[p] or out[succ(p)]) for p in range(n)]
                if nxt == out:
                    break
                out = nxt
        else:
            raise ValueError(k)
        cache[g] = out
        return out

    return values(f)[0]
