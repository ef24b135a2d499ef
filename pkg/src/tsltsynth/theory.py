"""Linear-arithmetic engine: terms, atoms, cubes, satisfiability, cores and QE.

Everything here is exact: coefficients and models are `fractions.Fraction`
(integral for LIA).  All functions are pure and all values immutable, so the
engine is safe to use from any number of threads.

Two theories are supported, identified by the tags ``LIA`` (linear integer
arithmetic) and ``LRA`` (linear real arithmetic).  Satisfiability of
conjunctions is decided by quantifier elimination: Fourier-Motzkin for LRA
and Cooper-style integer elimination for LIA.  The same elimination kernels
back `qe_exists`, so the decision procedure and the projection cannot drift
apart.

Representation note: public cubes carry sign-normalized literals (an atom and
its complement share one representative, distinguished by polarity).  The
elimination kernels internally rewrite literals into positive form
(LE/LT/EQ with positive polarity, DIV with either polarity); `_positivize`
is the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence, Union

LIA = "LIA"
LRA = "LRA"

LE = "<="
LT = "<"
EQ = "="
DIV = "div"  # divisibility atom `modulus | term`, only inside LIA elimination


class TheoryError(Exception):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class Term:
    """Linear term: sum of coeff*var plus a constant, no zero coefficients."""

    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction

    @staticmethod
    def make(coeffs: Mapping[str, Fraction] | Iterable[tuple[str, Fraction]] = (),
             const=0) -> "Term":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[str, Fraction] = {}
        for v, c in items:
            c = _frac(c)
            if c:
                acc[v] = acc.get(v, Fraction(0)) + c
        cleaned = tuple(sorted((v, c) for v, c in acc.items() if c))
        return Term(cleaned, _frac(const))

    @staticmethod
    def var(name: str) -> "Term":
        return Term(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def constant(value) -> "Term":
        return Term((), _frac(value))

    def coeff(self, var: str) -> Fraction:
        for v, c in self.coeffs:
            if v == var:
                return c
        return Fraction(0)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def free_vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    def scale(self, k) -> "Term":
        k = _frac(k)
        if k == 0:
            return Term((), Fraction(0))
        return Term(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def add(self, other: "Term") -> "Term":
        return Term.make(list(self.coeffs) + list(other.coeffs),
                         self.const + other.const)

    def sub(self, other: "Term") -> "Term":
        return self.add(other.scale(-1))

    def drop(self, var: str) -> "Term":
        return Term(tuple((v, c) for v, c in self.coeffs if v != var), self.const)

    def substitute(self, subst: Mapping[str, "Term"]) -> "Term":
        out = Term.constant(self.const)
        for v, c in self.coeffs:
            out = out.add(subst[v].scale(c) if v in subst else
                          Term(((v, c),), Fraction(0)))
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Term":
        return Term.make([(mapping.get(v, v), c) for v, c in self.coeffs], self.const)

    def evaluate(self, valuation: Mapping[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            if v not in valuation:
                raise TheoryError(f"no binding for variable {v!r}")
            total += c * _frac(valuation[v])
        return total

    def __str__(self) -> str:
        parts = []
        for v, c in self.coeffs:
            if c == 1:
                parts.append(v)
            elif c == -1:
                parts.append(f"-{v}")
            else:
                parts.append(f"{c}*{v}")
        if self.const or not parts:
            parts.append(str(self.const))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


@dataclass(frozen=True)
class Atom:
    """Atom ``term REL 0``, or ``modulus | term`` when rel is DIV."""

    term: Term
    rel: str
    modulus: Optional[int] = None

    def free_vars(self) -> frozenset[str]:
        return self.term.free_vars()

    def evaluate(self, valuation: Mapping[str, Fraction]) -> bool:
        val = self.term.evaluate(valuation)
        if self.rel == LE:
            return val <= 0
        if self.rel == LT:
            return val < 0
        if self.rel == EQ:
            return val == 0
        if self.rel == DIV:
            return val.denominator == 1 and val.numerator % self.modulus == 0
        raise TheoryError(f"bad relation {self.rel!r}")

    def substitute(self, subst: Mapping[str, Term]) -> "Atom":
        return Atom(self.term.substitute(subst), self.rel, self.modulus)

    def rename(self, mapping: Mapping[str, str]) -> "Atom":
        return Atom(self.term.rename(mapping), self.rel, self.modulus)

    def __str__(self) -> str:
        if self.rel == DIV:
            return f"{self.modulus} | {self.term}"
        return f"{self.term} {self.rel} 0"


Lit = tuple[Atom, bool]
Cube = tuple[Lit, ...]

TRUE_ATOM = Atom(Term((), Fraction(0)), LE)    # 0 <= 0
FALSE_ATOM = Atom(Term((), Fraction(1)), LE)   # 1 <= 0


def atom_cmp(lhs: Term, rel: str, rhs: Term, theory: str) -> Atom:
    """Comparison helper: lhs REL rhs with >=, >, != folded away."""
    if rel in (">=", ">"):
        lhs, rhs = rhs, lhs
        rel = LE if rel == ">=" else LT
    if rel == "!=":
        raise TheoryError("build != as a negated equality literal")
    return canonicalize(Atom(lhs.sub(rhs), rel), theory)


def _int_scaled(term: Term) -> Term:
    """Scale a term by the positive factor that makes everything integral."""
    mult = 1
    for d in [c.denominator for _, c in term.coeffs] + [term.const.denominator]:
        mult = _lcm(mult, d)
    return term.scale(mult)


def canonicalize(a: Atom, theory: str) -> Atom:
    """Unique representative for an atom.

    LIA: integer coefficients with gcd 1, strictness folded (t<0 -> t+1<=0),
    unreachable constants folded.  LRA: LE/LT kept distinct, leading
    coefficient scaled to unit magnitude.  Trivial atoms collapse to
    TRUE_ATOM / FALSE_ATOM.
    """
    term, rel, modulus = a.term, a.rel, a.modulus
    if rel == DIV:
        mult = 1
        for d in [c.denominator for _, c in term.coeffs] + [term.const.denominator]:
            mult = _lcm(mult, d)
        term = term.scale(mult)
        modulus = abs(modulus) * mult
        if modulus == 1:
            return TRUE_ATOM
        coeffs = tuple((v, Fraction(int(c) % modulus)) for v, c in term.coeffs
                       if int(c) % modulus)
        const = Fraction(int(term.const) % modulus)
        if not coeffs:
            return TRUE_ATOM if const == 0 else FALSE_ATOM
        g = int(const)
        for _, c in coeffs:
            g = gcd(g, int(c))
        g = gcd(g, modulus)
        if g > 1:
            coeffs = tuple((v, c / g) for v, c in coeffs)
            const = const / g
            modulus //= g
        if modulus == 1:
            return TRUE_ATOM
        if coeffs[0][1] * 2 > modulus:
            # d | t  <=>  d | -t ; prefer the small leading residue
            coeffs = tuple((v, Fraction((-int(c)) % modulus)) for v, c in coeffs)
            const = Fraction((-int(const)) % modulus)
            coeffs = tuple((v, c) for v, c in coeffs if c)
            if not coeffs:
                return TRUE_ATOM if const == 0 else FALSE_ATOM
        return Atom(Term(coeffs, const), DIV, modulus)

    if term.is_constant:
        val = term.const
        holds = {LE: val <= 0, LT: val < 0, EQ: val == 0}[rel]
        return TRUE_ATOM if holds else FALSE_ATOM

    if theory == LIA:
        term = _int_scaled(term)
        if rel == LT:
            term, rel = term.add(Term.constant(1)), LE
        g = 0
        for _, c in term.coeffs:
            g = gcd(g, abs(int(c)))
        if rel == EQ:
            if int(term.const) % g:
                return FALSE_ATOM
            term = term.scale(Fraction(1, g))
            if term.coeffs[0][1] < 0:
                term = term.scale(-1)
        else:  # a.x + c <= 0  <=>  (a/g).x <= floor(-c/g)
            bound = -int(term.const)
            coeffs = tuple((v, c / g) for v, c in term.coeffs)
            term = Term(coeffs, Fraction(-(bound // g)))
        return Atom(term, rel)

    lead = abs(term.coeffs[0][1])
    term = term.scale(Fraction(1, lead))
    if rel == EQ and term.coeffs[0][1] < 0:
        term = term.scale(-1)
    return Atom(term, rel)


def negate_atom(a: Atom, theory: str) -> Atom:
    """The canonical atom equivalent to the negation of a non-EQ, non-DIV atom."""
    if a.rel == LE:
        if theory == LIA:
            return canonicalize(Atom(a.term.scale(-1).add(Term.constant(1)), LE), theory)
        return canonicalize(Atom(a.term.scale(-1), LT), theory)
    if a.rel == LT:
        return canonicalize(Atom(a.term.scale(-1), LE), theory)
    raise TheoryError(f"no single-atom negation for {a.rel}")


def canon_literal(a: Atom, positive: bool, theory: str) -> Union[bool, Lit]:
    """Canonical (atom, polarity) with a sign-normalized representative.

    An atom and its complement share one representative (the variant whose
    leading coefficient is positive), so e.g. LIA ``x < 1`` is the negation
    of the ``x >= 1`` entry.  Returns a plain bool for trivial literals.
    """
    a = canonicalize(a, theory)
    if a == TRUE_ATOM:
        return positive
    if a == FALSE_ATOM:
        return not positive
    if a.rel in (DIV, EQ):
        return (a, positive)
    if a.term.coeffs[0][1] > 0:
        return (a, positive)
    return (negate_atom(a, theory), not positive)


def make_cube(lits: Iterable[Lit], theory: str) -> Union[bool, Cube]:
    """Canonicalize and deduplicate literals; False on a syntactic clash."""
    seen: dict[Atom, bool] = {}
    order: list[Lit] = []
    for at, pos in lits:
        cl = canon_literal(at, pos, theory)
        if cl is True:
            continue
        if cl is False:
            return False
        rep, p = cl
        if rep in seen:
            if seen[rep] != p:
                return False
            continue
        seen[rep] = p
        order.append((rep, p))
    return tuple(order)


def eval_cube(cube: Cube, valuation: Mapping[str, Fraction]) -> bool:
    return all(at.evaluate(valuation) == pos for at, pos in cube)


def cube_vars(cube: Cube) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for at, _ in cube:
        out |= at.free_vars()
    return out


def substitute_cube(cube: Cube, subst: Mapping[str, Term], theory: str) -> Union[bool, Cube]:
    return make_cube([(at.substitute(subst), pos) for at, pos in cube], theory)


def wp(update: Mapping[str, Term], post: Cube, theory: str,
       prime: str = "'") -> Union[bool, Cube]:
    """Weakest precondition of an assignment block against a primed cube.

    `post` must mention only primed variables; primed state variables are
    replaced by their update terms (over current-step variables) and primed
    inputs survive for later projection.
    """
    subst = {r + prime: t for r, t in update.items()}
    for at, _ in post:
        for v in at.free_vars():
            if not v.endswith(prime):
                raise TheoryError(f"wp postcondition mentions unprimed {v!r}")
    return substitute_cube(post, subst, theory)


# ---------------------------------------------------------------------------
# Quantifier-free formulas in NNF (used for QE results and consistency checks)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QF:
    """NNF formula node: kind in {'lit','and','or','true','false'}."""

    kind: str
    lit: Optional[Lit] = None
    args: tuple["QF", ...] = ()

    @staticmethod
    def true() -> "QF":
        return QF("true")

    @staticmethod
    def false() -> "QF":
        return QF("false")

    @staticmethod
    def of_cube(cube: Union[bool, Cube], theory: str) -> "QF":
        if cube is True:
            return QF.true()
        if cube is False:
            return QF.false()
        lits = []
        for at, pos in cube:
            cl = canon_literal(at, pos, theory)
            if cl is True:
                continue
            if cl is False:
                return QF.false()
            lits.append(QF("lit", lit=cl))
        return QF.conj(lits)

    @staticmethod
    def conj(args: Sequence["QF"]) -> "QF":
        flat: list[QF] = []
        for a in args:
            if a.kind == "false":
                return QF.false()
            if a.kind == "true":
                continue
            flat.extend(a.args if a.kind == "and" else [a])
        if not flat:
            return QF.true()
        return flat[0] if len(flat) == 1 else QF("and", args=tuple(flat))

    @staticmethod
    def disj(args: Sequence["QF"]) -> "QF":
        flat: list[QF] = []
        for a in args:
            if a.kind == "true":
                return QF.true()
            if a.kind == "false":
                continue
            flat.extend(a.args if a.kind == "or" else [a])
        if not flat:
            return QF.false()
        return flat[0] if len(flat) == 1 else QF("or", args=tuple(flat))

    def negate(self, theory: str) -> "QF":
        if self.kind == "true":
            return QF.false()
        if self.kind == "false":
            return QF.true()
        if self.kind == "lit":
            return QF("lit", lit=(self.lit[0], not self.lit[1]))
        if self.kind == "and":
            return QF.disj([a.negate(theory) for a in self.args])
        return QF.conj([a.negate(theory) for a in self.args])

    def evaluate(self, valuation: Mapping[str, Fraction]) -> bool:
        if self.kind == "true":
            return True
        if self.kind == "false":
            return False
        if self.kind == "lit":
            at, pos = self.lit
            return at.evaluate(valuation) == pos
        if self.kind == "and":
            return all(a.evaluate(valuation) for a in self.args)
        return any(a.evaluate(valuation) for a in self.args)

    def free_vars(self) -> frozenset[str]:
        if self.kind == "lit":
            return self.lit[0].free_vars()
        out: frozenset[str] = frozenset()
        for a in self.args:
            out |= a.free_vars()
        return out

    def dnf_cubes(self, theory: str) -> list[Cube]:
        """Expand to a disjunction of cubes (empty list = unsatisfiable)."""
        if self.kind == "true":
            return [()]
        if self.kind == "false":
            return []
        if self.kind == "lit":
            c = make_cube([self.lit], theory)
            return [] if c is False else [c]
        if self.kind == "and":
            acc: list[Cube] = [()]
            for a in self.args:
                nxt: list[Cube] = []
                for part in a.dnf_cubes(theory):
                    for pre in acc:
                        c = make_cube(list(pre) + list(part), theory)
                        if c is not False:
                            nxt.append(c)
                acc = nxt
            return _prune_cubes(acc)
        out: list[Cube] = []
        for a in self.args:
            out.extend(a.dnf_cubes(theory))
        return _prune_cubes(out)

    def conjuncts(self) -> list["QF"]:
        return list(self.args) if self.kind == "and" else [self]

    def __str__(self) -> str:
        if self.kind == "true":
            return "true"
        if self.kind == "false":
            return "false"
        if self.kind == "lit":
            at, pos = self.lit
            return str(at) if pos else f"!({at})"
        op = " && " if self.kind == "and" else " || "
        return "(" + op.join(str(a) for a in self.args) + ")"


def _prune_cubes(cubes: list[Cube]) -> list[Cube]:
    """Drop duplicate and subsumed disjuncts (fewer literals = weaker)."""
    out: list[Cube] = []
    sets: list[frozenset] = []
    for c in cubes:
        s = frozenset(c)
        if any(o <= s for o in sets):
            continue
        keep = [(oc, os) for oc, os in zip(out, sets) if not s < os]
        out = [oc for oc, _ in keep] + [c]
        sets = [os for _, os in keep] + [s]
    return out


# ---------------------------------------------------------------------------
# Internal positive form and the elimination kernels
# ---------------------------------------------------------------------------

def _raw_cube(lits: Iterable[Lit], theory: str) -> Union[bool, Cube]:
    """Cube in positive form: canonicalize atoms, no sign normalization."""
    out: list[Lit] = []
    seen: set[Lit] = set()
    for at, pos in lits:
        at = canonicalize(at, theory)
        if at == TRUE_ATOM:
            if not pos:
                return False
            continue
        if at == FALSE_ATOM:
            if pos:
                return False
            continue
        l = (at, pos)
        if (at, not pos) in seen:
            return False
        if l not in seen:
            seen.add(l)
            out.append(l)
    return tuple(out)


def _positivize(cube: Cube, theory: str) -> list[Cube]:
    """Rewrite to positive form, splitting disequalities into < / > branches."""
    branches: list[list[Lit]] = [[]]
    for at, pos in cube:
        at = canonicalize(at, theory)
        if at in (TRUE_ATOM, FALSE_ATOM):
            holds = (at == TRUE_ATOM) == pos
            if holds:
                continue
            return []
        if at.rel == DIV:
            for b in branches:
                b.append((at, pos))
            continue
        if at.rel == EQ and not pos:
            lo = canonicalize(Atom(at.term, LT), theory)
            hi = canonicalize(Atom(at.term.scale(-1), LT), theory)
            branches = [b + [(o, True)] for b in branches
                        for o in (lo, hi) if o != FALSE_ATOM]
            continue
        if not pos:
            at = negate_atom(at, theory)
        for b in branches:
            b.append((at, True))
    cubes = []
    for b in branches:
        c = _raw_cube(b, theory)
        if c is not False:
            cubes.append(c)
    return cubes


def simplify_cube(cube: Cube, theory: str) -> Union[bool, Cube]:
    """Remove literals implied by parallel literals over the same slope.

    Cheap pairwise checks; enough to collapse threshold ladders such as
    x>=1, x>=2 into the strongest bound.
    """
    lits = list(cube)
    changed = True
    while changed:
        changed = False
        for i, li in enumerate(lits):
            for j, lj in enumerate(lits):
                if i != j and _lit_implies(li, lj):
                    del lits[j]
                    changed = True
                    break
            if changed:
                break
    for i, li in enumerate(lits):
        for lj in lits[i + 1:]:
            if _lits_conflict(li, lj):
                return False
    return tuple(lits)


def _lit_implies(l1: Lit, l2: Lit) -> bool:
    (a1, p1), (a2, p2) = l1, l2
    if not p1 or not p2 or a1.rel not in (LE, LT) or a2.rel not in (LE, LT):
        return False
    if a1.term.coeffs != a2.term.coeffs:
        return False
    c1, c2 = a1.term.const, a2.term.const
    if a1.rel == a2.rel:
        return c1 >= c2
    if a1.rel == LT and a2.rel == LE:
        return c1 >= c2
    return c1 > c2

def _lits_conflict(l1: Lit, l2: Lit) -> bool:
    (a1, p1), (a2, p2) = l1, l2
    if a1.rel not in (LE, LT) or a2.rel not in (LE, LT) or not p1 or not p2:
        return False
    if a1.term.coeffs != tuple((v, -c) for v, c in a2.term.coeffs):
        return False
    s = a1.term.const + a2.term.const
    strict = a1.rel == LT or a2.rel == LT
    return s > 0 or (strict and s == 0)


def _fm_eliminate(cube: Cube, var: str) -> Union[bool, Cube]:
    """Fourier-Motzkin step (LRA, positive-form cube)."""
    for l in cube:
        at, pos = l
        if at.rel == EQ and pos and at.term.coeff(var):
            c = at.term.coeff(var)
            sol = at.term.drop(var).scale(Fraction(-1) / c)
            rest = [x for x in cube if x != l]
            return _raw_cube([(a.substitute({var: sol}), p) for a, p in rest], LRA)
    lowers, uppers, keep = [], [], []
    for at, pos in cube:
        if at.rel == DIV:
            raise TheoryError("divisibility atom in LRA")
        c = at.term.coeff(var)
        if c == 0:
            keep.append((at, pos))
        elif c > 0:  # c*var + rest REL 0  ->  var REL (-rest)/c (upper)
            uppers.append((at.term.drop(var).scale(Fraction(-1) / c), at.rel))
        else:
            lowers.append((at.term.drop(var).scale(Fraction(-1) / c), at.rel))
    new = list(keep)
    for lterm, lrel in lowers:   # lterm REL var
        for uterm, urel in uppers:  # var REL uterm
            rel = LT if LT in (lrel, urel) else LE
            new.append((Atom(lterm.sub(uterm), rel), True))
    return _raw_cube(new, LRA)


def _cooper_eliminate(cube: Cube, var: str) -> list[Cube]:
    """Cooper's method (left-infinite projection) on a positive-form cube."""
    with_var, keep = [], []
    for l in cube:
        (with_var if l[0].term.coeff(var) else keep).append(l)
    if not with_var:
        return [tuple(keep)]

    # Gauss fast path: a unit-coefficient equality pins the variable exactly.
    for at, pos in with_var:
        c = at.term.coeff(var)
        if at.rel == EQ and pos and abs(c) == 1:
            sol = at.term.drop(var).scale(-c)
            rest = [(a.substitute({var: sol}), p) for a, p in cube
                    if (a, p) != (at, pos)]
            r = _raw_cube(rest, LIA)
            return [] if r is False else [r]

    delta = 1
    for at, _ in with_var:
        delta = _lcm(delta, abs(int(at.term.coeff(var))))
    norm: list[Lit] = []
    for at, pos in with_var:
        f = delta // abs(int(at.term.coeff(var)))
        t = at.term.scale(f)
        norm.append((Atom(t, at.rel, at.modulus * f if at.rel == DIV else None), pos))
    # Work in X = delta*var; every coefficient of var below is +-delta,
    # meaning +-1 in X, with the side constraint delta | X.
    big_d = delta
    for at, _ in norm:
        if at.rel == DIV:
            big_d = _lcm(big_d, at.modulus)

    lowers: list[Term] = []
    eqs: list[Term] = []
    has_upper = False
    for at, pos in norm:
        if at.rel == DIV:
            continue
        if at.rel == LT:
            raise TheoryError("strict LIA atom survived canonicalization")
        c = int(at.term.coeff(var))
        rest = at.term.drop(var)
        if at.rel == EQ:
            eqs.append(rest.scale(Fraction(-delta, c)))  # X = this
        elif c > 0:
            has_upper = True
        else:
            lowers.append(rest)  # -delta*var + rest <= 0  ->  X >= rest

    def subst_x(xval: Term) -> Union[bool, Cube]:
        lits: list[Lit] = list(keep)
        for at, pos in norm:
            c = int(at.term.coeff(var))
            sign = c // delta
            newt = at.term.drop(var).add(xval.scale(sign))
            lits.append((Atom(newt, at.rel, at.modulus), pos))
        if delta > 1:
            lits.append((Atom(xval, DIV, delta), True))
        return _raw_cube(lits, LIA)

    results: list[Cube] = []
    if eqs:
        c = subst_x(eqs[0])
        return [] if c is False else [c]
    if not lowers:
        # X can shrink without bound: uppers and the var vanish, DIV residues
        # are swept over one full period.
        for j in range(1, big_d + 1):
            lits = list(keep)
            for at, pos in norm:
                if at.rel != DIV:
                    continue
                sign = int(at.term.coeff(var)) // delta
                lits.append((Atom(at.term.drop(var).add(Term.constant(sign * j)),
                                  DIV, at.modulus), pos))
            if delta > 1:
                lits.append((Atom(Term.constant(j), DIV, delta), True))
            c = _raw_cube(lits, LIA)
            if c is not False:
                results.append(c)
        return _prune_cubes(results)
    for low in lowers:
        for j in range(0, big_d):
            c = subst_x(low.add(Term.constant(j)))
            if c is not False:
                results.append(c)
    return _prune_cubes(results)


def _project_var(cubes: list[Cube], var: str, theory: str) -> list[Cube]:
    out: list[Cube] = []
    for c in cubes:
        if theory == LRA:
            r = _fm_eliminate(c, var)
            if r is not False:
                out.append(r)
        else:
            out.extend(_cooper_eliminate(c, var))
    cleaned = [s for s in (simplify_cube(c, theory) for c in out) if s is not False]
    return _prune_cubes(cleaned)


def _elim_cost(cubes: list[Cube], var: str) -> tuple:
    """Rough Cooper fan-out estimate used to pick elimination order."""
    total = 0
    for c in cubes:
        delta, lowers, has_eq_unit = 1, 0, False
        for at, pos in c:
            k = at.term.coeff(var)
            if not k:
                continue
            if at.rel == EQ and pos and abs(k) == 1:
                has_eq_unit = True
            delta = _lcm(delta, abs(int(k)) if k.denominator == 1 else 1)
            if at.rel != DIV and at.rel != EQ and k < 0:
                lowers += 1
        total += 1 if has_eq_unit else delta * max(1, lowers)
    return (total, var)


def _project_all(cubes: list[Cube], variables: Sequence[str], theory: str) -> list[Cube]:
    acc = list(cubes)
    remaining = sorted(set(variables))
    while remaining:
        if theory == LIA and len(remaining) > 1:
            _, v = min(_elim_cost(acc, x) for x in remaining)
        else:
            v = remaining[0]
        remaining.remove(v)
        acc = _project_var(acc, v, theory)
    return acc


# ---------------------------------------------------------------------------
# Satisfiability with deterministic minimal models
# ---------------------------------------------------------------------------

def _value_order_key(v: Fraction):
    return (abs(v), 0 if v >= 0 else 1)


def _min_magnitude_int(lo: Optional[Fraction], hi: Optional[Fraction],
                       residue: int, modulus: int) -> Optional[int]:
    """Minimal-magnitude integer in [lo, hi] congruent to residue, closed form."""
    def ceil_to(x: Fraction) -> int:
        return -((-x.numerator) // x.denominator)

    def floor_to(x: Fraction) -> int:
        return x.numerator // x.denominator

    def up_from(n: int) -> int:
        return n + (residue - n) % modulus

    def down_from(n: int) -> int:
        return n - (n - residue) % modulus

    lo_i = None if lo is None else ceil_to(lo)
    hi_i = None if hi is None else floor_to(hi)
    if lo_i is not None and hi_i is not None and lo_i > hi_i:
        return None
    cands = []
    if (lo_i is None or lo_i <= 0) and (hi_i is None or hi_i >= 0):
        c = up_from(0)
        if hi_i is None or c <= hi_i:
            cands.append(c)
        c = down_from(0)
        if lo_i is None or c >= lo_i:
            cands.append(c)
    elif lo_i is not None and lo_i > 0:
        c = up_from(lo_i)
        if hi_i is None or c <= hi_i:
            cands.append(c)
    elif hi_i is not None and hi_i < 0:
        c = down_from(hi_i)
        if lo_i is None or c >= lo_i:
            cands.append(c)
    if not cands:
        return None
    return min(cands, key=lambda n: _value_order_key(Fraction(n)))


def _min_magnitude_rat(lo, hi, lo_strict: bool, hi_strict: bool) -> Optional[Fraction]:
    """Deterministic minimal-magnitude rational in an interval.

    Closed finite endpoints are preferred; open endpoints step inward by
    min(1, width)/2, which keeps regressions stable.
    """
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            return None
    zero = Fraction(0)
    lo_ok = lo is None or lo < zero or (lo == zero and not lo_strict)
    hi_ok = hi is None or hi > zero or (hi == zero and not hi_strict)
    if lo_ok and hi_ok:
        return zero
    if lo is not None and lo >= zero:
        if not lo_strict:
            return lo
        if hi is None:
            return lo + 1
        return lo + min(Fraction(1), hi - lo) / 2
    if not hi_strict:
        return hi
    if lo is None:
        return hi - 1
    return hi - min(Fraction(1), hi - lo) / 2


def _solve_1var(cube: Cube, var: str, theory: str) -> Optional[Fraction]:
    """Minimal-magnitude value of `var` for a positive-form single-var cube."""
    lo = hi = None
    lo_s = hi_s = False
    eqs: list[Fraction] = []
    divs: list[tuple[int, int, int, bool]] = []
    for at, pos in cube:
        c = at.term.coeff(var)
        k = at.term.const
        if at.rel == DIV:
            divs.append((at.modulus, int(c), int(k), pos))
            continue
        if c == 0:
            if at.evaluate({}) != pos:
                return None
            continue
        if at.rel == EQ:
            eqs.append(-k / c)
            continue
        bound = -k / c
        strict = at.rel == LT
        if c > 0:
            if hi is None or bound < hi or (bound == hi and strict):
                hi, hi_s = bound, strict
        else:
            if lo is None or bound > lo or (bound == lo and strict):
                lo, lo_s = bound, strict
    if eqs:
        v = eqs[0]
        if any(e != v for e in eqs):
            return None
        if theory == LIA and v.denominator != 1:
            return None
        if lo is not None and (v < lo or (v == lo and lo_s)):
            return None
        if hi is not None and (v > hi or (v == hi and hi_s)):
            return None
        for d, c, k, pos in divs:
            if (((int(c * v) + k) % d == 0) if v.denominator == 1 else False) != pos:
                return None
        return v
    if theory == LRA:
        if divs:
            raise TheoryError("divisibility atom in LRA")
        return _min_magnitude_rat(lo, hi, lo_s, hi_s)
    if lo is not None and lo_s:
        lo = Fraction(lo.numerator // lo.denominator + 1)
    if hi is not None and hi_s:
        hi = Fraction(-((-hi.numerator) // hi.denominator) - 1)
    modulus = 1
    for d, _, _, _ in divs:
        modulus = _lcm(modulus, d)
    residues = [r for r in range(modulus)
                if all((((c * r + k) % d) == 0) == pos for d, c, k, pos in divs)]
    best = None
    for r in residues:
        v = _min_magnitude_int(lo, hi, r, modulus)
        if v is not None and (best is None or
                              _value_order_key(Fraction(v)) < _value_order_key(Fraction(best))):
            best = v
    return None if best is None else Fraction(best)


def _best_1var_value(proj: Cube, var: str, theory: str) -> Optional[Fraction]:
    for at, pos in proj:
        if var not in at.free_vars():
            if at.free_vars():
                raise TheoryError("projection left a stray variable")
            if at.evaluate({}) != pos:
                return None
    only_v = tuple(l for l in proj if var in l[0].free_vars())
    return _solve_1var(only_v, var, theory)


def is_sat_cube(cube: Union[bool, Cube], theory: str) -> Optional[dict[str, Fraction]]:
    """Model (lexicographically smallest by var order, then magnitude) or None."""
    if cube is False:
        return None
    if cube is True:
        cube = ()
    variables = sorted(cube_vars(cube))
    branches = _positivize(cube, theory)
    # decide satisfiability per branch first; the minimal-model sweep below
    # only has to look at live branches
    live = []
    for b in branches:
        done = _project_all([b], variables, theory)
        if any(all(at.evaluate({}) == pos for at, pos in c) for c in done):
            live.append(b)
    branches = live
    if not branches:
        return None
    model: dict[str, Fraction] = {}
    for i, v in enumerate(variables):
        later = variables[i + 1:]
        best = None
        for b in branches:
            for proj in _project_all([b], later, theory):
                val = _best_1var_value(proj, v, theory)
                if val is not None and (best is None or
                                        _value_order_key(val) < _value_order_key(best)):
                    best = val
        if best is None:
            return None
        model[v] = best
        sub = {v: Term.constant(best)}
        nxt = []
        for b in branches:
            c = _raw_cube([(a.substitute(sub), p) for a, p in b], theory)
            if c is not False:
                nxt.append(c)
        branches = nxt
        if not branches:
            return None
    ok = any(all(at.evaluate({}) == pos for at, pos in b) for b in branches)
    return model if ok else None


def unsat_core(cube: Cube, theory: str, keep: frozenset[int] = frozenset()) -> Cube:
    """Deletion-minimized unsatisfiable subset; indices in `keep` are pinned."""
    if is_sat_cube(cube, theory) is not None:
        raise TheoryError("unsat_core called on a satisfiable cube")
    lits = list(cube)
    active = [True] * len(lits)
    for i in range(len(lits)):
        if i in keep or not active[i]:
            continue
        active[i] = False
        trial = tuple(l for l, a in zip(lits, active) if a)
        if is_sat_cube(trial, theory) is None:
            continue
        active[i] = True
    return tuple(l for l, a in zip(lits, active) if a)


# ---------------------------------------------------------------------------
# Quantifier elimination entry points
# ---------------------------------------------------------------------------

def qe_exists(variables: Iterable[str], phi: Union[Cube, QF], theory: str) -> QF:
    """Equivalent quantifier-free formula with `variables` projected out."""
    if isinstance(phi, bool):
        return QF.true() if phi else QF.false()
    cubes = phi.dnf_cubes(theory) if isinstance(phi, QF) else [phi]
    pieces: list[Cube] = []
    for c in cubes:
        pieces.extend(_positivize(c, theory))
    order = sorted(set(variables))
    done = _project_all(pieces, order, theory)
    return minimize_qf(QF.disj([QF.of_cube(c, theory) for c in done]), theory)


def entails(f: QF, g: QF, theory: str) -> bool:
    return is_sat_formula(QF.conj([f, g.negate(theory)]), theory) is None


def minimize_qf(phi: QF, theory: str) -> QF:
    """Equivalence-preserving shrinking of a DNF-shaped formula.

    Drops disjuncts implied by the rest and literals whose removal keeps the
    formula equivalent; elimination results stay readable and the atoms that
    get promoted to predicates stay few.
    """
    cubes = phi.dnf_cubes(theory)
    if len(cubes) > 12 or sum(len(c) for c in cubes) > 48:
        return phi  # not worth quadratic sat calls

    def build(cs: list[Cube]) -> QF:
        return QF.disj([QF.of_cube(c, theory) for c in cs])

    changed = True
    while changed:
        changed = False
        for i in range(len(cubes)):
            rest = build(cubes[:i] + cubes[i + 1:])
            if entails(QF.of_cube(cubes[i], theory), rest, theory):
                del cubes[i]
                changed = True
                break
        if changed:
            continue
        for i, c in enumerate(cubes):
            for j in range(len(c)):
                trial = cubes[:i] + [c[:j] + c[j + 1:]] + cubes[i + 1:]
                # removal only weakens; accept if still entails the original
                if entails(build(trial), build(cubes), theory):
                    cubes = trial
                    changed = True
                    break
            if changed:
                break
    return build(cubes)


def forall_is_sat(variables: Iterable[str], phi: Union[Cube, QF], theory: str) -> bool:
    """Is (forall variables. phi) satisfiable over the remaining variables?

    Implemented as quantifier elimination on the negation; this is the
    trigger test for precision analysis of abstract transitions.
    """
    body = phi if isinstance(phi, QF) else QF.of_cube(phi, theory)
    inner = qe_exists(variables, body.negate(theory), theory)
    return is_sat_formula(inner.negate(theory), theory) is not None


def is_sat_formula(phi: QF, theory: str) -> Optional[dict[str, Fraction]]:
    for cube in phi.dnf_cubes(theory):
        m = is_sat_cube(cube, theory)
        if m is not None:
            return m
    return None


def to_smtlib(phi: Union[Cube, QF], theory: str) -> str:
    """Debug rendering in SMT-LIB2 flavor (human inspection only)."""
    def term_s(t: Term) -> str:
        parts = [f"(* {c} {v})" for v, c in t.coeffs]
        if t.const or not parts:
            parts.append(str(t.const))
        return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"

    def lit_s(l: Lit) -> str:
        at, pos = l
        if at.rel == DIV:
            body = f"(= (mod {term_s(at.term)} {at.modulus}) 0)"
        else:
            body = f"({at.rel} {term_s(at.term)} 0)"
        return body if pos else f"(not {body})"

    def go(f: QF) -> str:
        if f.kind == "true":
            return "true"
        if f.kind == "false":
            return "false"
        if f.kind == "lit":
            return lit_s(f.lit)
        op = "and" if f.kind == "and" else "or"
        return f"({op} " + " ".join(go(a) for a in f.args) + ")"

    body = phi if isinstance(phi, QF) else QF.of_cube(phi, theory)
    sort = "Int" if theory == LIA else "Real"
    decls = "".join(f"(declare-const {v} {sort})\n" for v in sorted(body.free_vars()))
    return decls + f"(assert {go(body)})\n"
