"""Boolean abstraction: the atom table and the propositional encoding.

The atom table owns the bijections between theory atoms / updates and the
Boolean variable ids used in LTL formulas: predicate variables are
environment inputs, update variables are system outputs grouped per state
variable with an exactly-one constraint.  Learned predicates only ever grow
the table, and numbering is first-registration order, so identical
spec + refinement history gives identical variable ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .frontend import TslSpec, TslFormula, collect_atoms, format_atom
from .ltl import (Ltl, LTRUE, LFALSE, land, lfinally, lglobally, limplies,
                  lnext, lnot, lor, lrelease, luntil, lvar)
from .theory import Atom, Term, canon_literal


class EncodeError(Exception):
    pass


@dataclass
class AtomTable:
    """Mutable registry; mutation happens only between synthesis calls."""

    theory: str
    state_vars: tuple[str, ...]
    input_vars: tuple[str, ...]
    pred_atoms: list[Atom] = field(default_factory=list)
    update_defs: list[tuple[str, Term]] = field(default_factory=list)
    _pred_ids: dict[Atom, int] = field(default_factory=dict)
    _update_ids: dict[tuple[str, Term], int] = field(default_factory=dict)
    _var_counter: int = 0
    pred_vars: dict[int, int] = field(default_factory=dict)    # pred id -> var id
    update_vars: dict[int, int] = field(default_factory=dict)  # update id -> var id
    _var_kind: dict[int, tuple[str, int]] = field(default_factory=dict)

    @staticmethod
    def for_spec(spec: TslSpec) -> "AtomTable":
        table = AtomTable(spec.theory, spec.state_vars, spec.input_vars)
        preds, updates = collect_atoms(spec)
        for a in preds:
            table.pred_id(a)
        for var, term in updates:
            table.update_id(var, term)
        for r in spec.state_vars:
            if not table.group(r):
                table.update_id(r, Term.var(r))  # implicit identity update
        return table

    def pred_id(self, atom: Atom) -> int:
        if atom not in self._pred_ids:
            self._pred_ids[atom] = len(self.pred_atoms)
            self.pred_atoms.append(atom)
            vid = self._var_counter
            self._var_counter += 1
            self.pred_vars[len(self.pred_atoms) - 1] = vid
            self._var_kind[vid] = ("pred", len(self.pred_atoms) - 1)
        return self._pred_ids[atom]

    def lookup_pred(self, atom: Atom) -> Optional[int]:
        return self._pred_ids.get(atom)

    def update_id(self, var: str, term: Term) -> int:
        key = (var, term)
        if key not in self._update_ids:
            self._update_ids[key] = len(self.update_defs)
            self.update_defs.append(key)
            vid = self._var_counter
            self._var_counter += 1
            self.update_vars[len(self.update_defs) - 1] = vid
            self._var_kind[vid] = ("update", len(self.update_defs) - 1)
        return self._update_ids[key]

    def group(self, state_var: str) -> list[int]:
        return [i for i, (v, _) in enumerate(self.update_defs) if v == state_var]

    def groups(self) -> list[tuple[str, list[int]]]:
        return [(r, self.group(r)) for r in self.state_vars]

    @property
    def n_preds(self) -> int:
        return len(self.pred_atoms)

    def literal(self, atom: Atom, positive: bool = True):
        """Sign-normalized (pred id, polarity); bool for trivial atoms."""
        cl = canon_literal(atom, positive, self.theory)
        if isinstance(cl, bool):
            return cl
        rep, pol = cl
        return (self.pred_id(rep), pol)

    def var_name(self, var_id: int) -> str:
        kind, idx = self._var_kind[var_id]
        if kind == "pred":
            return "p[" + format_atom(self.pred_atoms[idx]) + "]"
        v, t = self.update_defs[idx]
        return f"u[{v} <- {t}]"

    def combos(self) -> list[tuple[int, ...]]:
        """All update-function letters: one update id per state variable."""
        out: list[tuple[int, ...]] = [()]
        for _, g in self.groups():
            out = [c + (u,) for c in out for u in g]
        return out

    def combo_update(self, combo: tuple[int, ...]) -> dict[str, Term]:
        return {self.update_defs[u][0]: self.update_defs[u][1] for u in combo}


def exclusion_block(table: AtomTable) -> Ltl:
    """G of per-variable exactly-one-update, as disjunction of conjunctions."""
    conj: list[Ltl] = []
    for _, group in table.groups():
        options: list[Ltl] = []
        for u in group:
            this = [lvar(table.update_vars[u])]
            this += [lnot(lvar(table.update_vars[o])) for o in group if o != u]
            options.append(land(*this))
        conj.append(lor(*options))
    return lglobally(land(*conj))


def encode_body(spec: TslSpec, table: AtomTable) -> Ltl:
    """phi with theory atoms and updates replaced by Boolean variables."""
    def go(f: TslFormula) -> Ltl:
        k = f.kind
        if k == "true":
            return LTRUE
        if k == "false":
            return LFALSE
        if k == "atom":
            lit = table.literal(f.atom)
            if isinstance(lit, bool):
                return LTRUE if lit else LFALSE
            pid, pol = lit
            v = lvar(table.pred_vars[pid])
            return v if pol else lnot(v)
        if k == "update":
            uid = table.update_id(f.var, f.term)
            return lvar(table.update_vars[uid])
        if k == "not":
            return lnot(go(f.args[0]))
        if k == "and":
            return land(*[go(a) for a in f.args])
        if k == "or":
            return lor(*[go(a) for a in f.args])
        if k == "implies":
            return limplies(go(f.args[0]), go(f.args[1]))
        if k == "next":
            return lnext(go(f.args[0]))
        if k == "until":
            return luntil(go(f.args[0]), go(f.args[1]))
        if k == "release":
            return lrelease(go(f.args[0]), go(f.args[1]))
        if k == "globally":
            return lglobally(go(f.args[0]))
        if k == "finally":
            return lfinally(go(f.args[0]))
        raise EncodeError(f"bad node {k}")

    return go(spec.formula)


def encode(spec: TslSpec, table: AtomTable) -> Ltl:
    """Full propositional abstraction: exclusion block and rewritten body."""
    body = encode_body(spec, table)
    return land(exclusion_block(table), body)


def encode_assumption(assumption, table: AtomTable) -> Ltl:
    """LTL rendering of a generated assumption (see refiner.Assumption)."""
    cons = lor(*[_pred_lit(table, p, pol) for p, pol in assumption.cons])
    if assumption.kind == "state":
        return lglobally(cons)
    ant = [_pred_lit(table, p, pol) for p, pol in assumption.ant_preds]
    ant += [lvar(table.update_vars[u]) for u in assumption.ant_updates]
    return lglobally(limplies(land(*ant), lnext(cons)))


def _pred_lit(table: AtomTable, pid: int, pol: bool) -> Ltl:
    v = lvar(table.pred_vars[pid])
    return v if pol else lnot(v)


def refine_formula(phi_b: Ltl, assumption_ltls: Iterable[Ltl],
                   table: AtomTable) -> Ltl:
    """(and of assumptions) -> phi, with the exclusion block conjoined outside.

    The exclusion block is regenerated over the current table so freshly
    minted update variables (if any) are covered.
    """
    parts = list(assumption_ltls)
    if not parts:
        return land(exclusion_block(table), phi_b)
    return land(exclusion_block(table), limplies(land(*parts), phi_b))


def assumption_text(assumption, table: AtomTable) -> str:
    """Human-readable theory-level rendering, for reports and traces."""
    def plit(p, pol):
        s = format_atom(table.pred_atoms[p])
        return s if pol else f"!({s})"

    cons = " || ".join(plit(p, pol) for p, pol in assumption.cons)
    if assumption.kind == "state":
        return f"G ({cons})"
    ant = [plit(p, pol) for p, pol in assumption.ant_preds]
    for u in assumption.ant_updates:
        v, t = table.update_defs[u]
        ant.append(f"[{v} <- {t}]")
    return f"G ({' && '.join(ant)} -> X ({cons}))"
