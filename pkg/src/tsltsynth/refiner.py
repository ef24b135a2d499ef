"""Theory-consistency analysis of Boolean Moore counterstrategies.

Three checks run in order over the reachable part of the machine, and all
findings of the first check that fires are returned together:

1. state outputs that are unsatisfiable as theory cubes;
2. transitions whose source cube, update equations and primed target cube
   are jointly unsatisfiable;
3. transitions that are possible for some but not all source values: the
   weakest precondition (with next-step inputs projected out by QE) yields
   a guard, whose atoms become newly learned predicates.

Every emitted assumption is generalized with a deletion-based unsat core, so
it blocks the whole family of situations sharing the conflicting literals,
not just the counterstrategy at hand.  The analysis is deliberately local
(single states and single transitions); it can flag globally-consistent
strategies, which costs extra refinements but never a wrong answer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

from .encoder import AtomTable
from .machines import BooleanMoore, reachable_moore
from .theory import (DIV, EQ, Atom, QF, Term, forall_is_sat, is_sat_cube,
                     make_cube, qe_exists, unsat_core, wp)

PRIME = "'"


@dataclass(frozen=True)
class Assumption:
    """One generated temporal assumption in template form.

    kind "state": G(cons-clause) at every step.
    kind "transition"/"precision": G(ant_preds && ant_updates -> X cons).
    Predicate literals are (pred id, polarity); updates are update ids.
    """

    kind: str
    ant_preds: tuple[tuple[int, bool], ...]
    ant_updates: tuple[int, ...]
    cons: tuple[tuple[int, bool], ...]
    provenance: tuple = ()
    new_predicates: tuple[Atom, ...] = ()

    def key(self) -> tuple:
        return (self.kind, tuple(sorted(self.ant_preds)),
                tuple(sorted(self.ant_updates)), tuple(sorted(self.cons)))


@dataclass
class ConsistencyVerdict:
    consistent: bool
    assumptions: list[Assumption] = field(default_factory=list)
    fired_case: Optional[int] = None


def _state_tagged(table: AtomTable, m: BooleanMoore, q: int):
    """Theory literals of o(q) with their predicate ids, in id order."""
    return [((table.pred_atoms[i], pol), i) for i, pol in enumerate(m.outputs[q])]


def _prime_lit(lit):
    at, pol = lit
    return (at.rename({v: v + PRIME for v in at.free_vars()}), pol)


def _core_indices(lits: tuple, theory: str,
                  keep: frozenset[int] = frozenset()) -> list[int]:
    core = list(unsat_core(lits, theory, keep=keep))
    out = []
    for i, l in enumerate(lits):
        if l in core:
            out.append(i)
            core.remove(l)
    return out


def check_state(table: AtomTable, m: BooleanMoore, q: int) -> Optional[Assumption]:
    """Case 1: unsatisfiable state output yields G(negated core)."""
    tagged = _state_tagged(table, m, q)
    lits = tuple(l for l, _ in tagged)
    if is_sat_cube(lits, table.theory) is not None:
        return None
    idx = _core_indices(lits, table.theory)
    cons = tuple(sorted((tagged[i][1], not tagged[i][0][1]) for i in idx))
    return Assumption("state", (), (), cons, provenance=("state", q))


def _transition_payload(table: AtomTable, m: BooleanMoore, qi: int, combo,
                        qj: int):
    """Tagged literal list for o(qi) && update equations && o(qj)'."""
    lits = []
    tags = []
    for (at, pol), pid in _state_tagged(table, m, qi):
        lits.append((at, pol))
        tags.append(("src", pid, pol))
    update = table.combo_update(combo)
    uid_of = {table.update_defs[u][0]: u for u in combo}
    for var in table.state_vars:
        lits.append((Atom(Term.var(var + PRIME).sub(update[var]), EQ), True))
        tags.append(("upd", uid_of[var], True))
    for (at, pol), pid in _state_tagged(table, m, qj):
        lits.append(_prime_lit((at, pol)))
        tags.append(("dst", pid, pol))
    return lits, tags


def _assumption_from_core(kind, table, lits, tags, provenance,
                          new_preds=()) -> Optional[Assumption]:
    raw = tuple(lits)
    pinned = frozenset(i for i in range(len(raw)) if tags[i][0] == "rho")
    idx = _core_indices(raw, table.theory, keep=pinned)
    ant_preds, ant_updates, cons = [], [], []
    for i in idx:
        tag = tags[i]
        if tag[0] in ("src", "rho"):
            ant_preds.append((tag[1], tag[2]))
        elif tag[0] == "upd":
            ant_updates.append(tag[1])
        else:  # dst
            cons.append((tag[1], not tag[2]))
    if not cons:
        return None  # source side alone contradictory; case 1 territory
    return Assumption(kind, tuple(sorted(set(ant_preds))),
                      tuple(sorted(set(ant_updates))),
                      tuple(sorted(set(cons))),
                      provenance=provenance, new_predicates=tuple(new_preds))


def check_transition(table: AtomTable, m: BooleanMoore, qi: int, combo,
                     qj: int) -> Optional[Assumption]:
    """Case 2: jointly unsatisfiable transition yields
    G(src-core && update-core -> X negated dst-core)."""
    lits, tags = _transition_payload(table, m, qi, combo, qj)
    if is_sat_cube(tuple(lits), table.theory) is not None:
        return None
    return _assumption_from_core("transition", table, lits, tags,
                                 provenance=("transition", qi, combo, qj))


def check_precision(table: AtomTable, m: BooleanMoore, qi: int, combo,
                    qj: int) -> list[Assumption]:
    """Case 3: transition valid for some, but not all, source values.

    Trigger: (forall next inputs: source && update && not target') is
    satisfiable.  The enabling guard rho = QE(exists next inputs: wp &&
    source) is split into clauses; each yields
    G(not rho_l && src && upd -> X not dst) with the guard literals pinned
    during core generalization.  Atoms of rho are registered as predicates.
    """
    theory = table.theory
    src = tuple(l for l, _ in _state_tagged(table, m, qi))
    dst_primed = tuple(_prime_lit(l) for l, _ in _state_tagged(table, m, qj))
    update = table.combo_update(combo)
    eq_lits = tuple((Atom(Term.var(v + PRIME).sub(update[v]), EQ), True)
                    for v in table.state_vars)

    primed_inputs = sorted(v + PRIME for v in table.input_vars)
    body = QF.conj([QF.of_cube(make_cube(src, theory), theory),
                    QF.of_cube(make_cube(eq_lits, theory), theory),
                    QF.of_cube(make_cube(dst_primed, theory), theory).negate(theory)])
    if not forall_is_sat(primed_inputs, body, theory):
        return []

    post = wp(update, make_cube(dst_primed, theory), theory, prime=PRIME)
    if post is False:
        rho = QF.false()
    else:
        rho = qe_exists(primed_inputs,
                        QF.conj([QF.of_cube(post, theory),
                                 QF.of_cube(make_cube(src, theory), theory)]),
                        theory)

    n_before = table.n_preds
    out: list[Assumption] = []
    for clause in _cnf_clauses(rho):
        neg_lits = []
        skip = False
        for at, pol in clause:
            if at.rel == DIV:
                warnings.warn("divisibility atom survived quantifier "
                              "elimination; dropping one guard clause")
                skip = True
                break
            neg_lits.append((at, not pol))
        if skip:
            continue
        rho_tagged = []
        for at, pol in neg_lits:
            entry = table.literal(at, pol)
            if entry is True:
                continue
            if entry is False:
                rho_tagged = None
                break
            rho_tagged.append((at, pol, entry))
        if rho_tagged is None:
            continue
        lits, tags = _transition_payload(table, m, qi, combo, qj)
        for at, pol, (pid, ppol) in rho_tagged:
            lits.append((at, pol))
            tags.append(("rho", pid, ppol))
        a = _assumption_from_core("precision", table, lits, tags,
                                  provenance=("precision", qi, combo, qj))
        if a is not None:
            out.append(a)
    minted = tuple(table.pred_atoms[n_before:])
    return [Assumption(a.kind, a.ant_preds, a.ant_updates, a.cons,
                       a.provenance, minted) for a in out]


def _cnf_clauses(phi: QF) -> list[tuple]:
    """CNF of a small NNF formula; clauses as literal tuples."""
    if phi.kind == "true":
        return []
    if phi.kind == "false":
        return [()]
    if phi.kind == "lit":
        return [(phi.lit,)]
    if phi.kind == "and":
        out = []
        for a in phi.args:
            out.extend(_cnf_clauses(a))
        return out
    acc: list[tuple] = [()]
    for a in phi.args:
        acc = [c1 + c2 for c1 in acc for c2 in _cnf_clauses(a)]
    return [tuple(dict.fromkeys(c)) for c in acc]


def analyze(table: AtomTable, m: BooleanMoore) -> ConsistencyVerdict:
    """Case 1 over reachable states, then case 2, then case 3 over reachable
    transitions; all findings of the first case that fires are batched."""
    states, edges = reachable_moore(m)

    found: list[Assumption] = []
    seen_keys = set()

    def push(a: Optional[Assumption]):
        if a is not None and a.key() not in seen_keys:
            seen_keys.add(a.key())
            found.append(a)

    for q in states:
        push(check_state(table, m, q))
    if found:
        return ConsistencyVerdict(False, found, fired_case=1)

    for qi, combo, qj in edges:
        push(check_transition(table, m, qi, combo, qj))
    if found:
        return ConsistencyVerdict(False, found, fired_case=2)

    for qi, combo, qj in edges:
        for a in check_precision(table, m, qi, combo, qj):
            push(a)
    if found:
        return ConsistencyVerdict(False, found, fired_case=3)
    return ConsistencyVerdict(True, [])
