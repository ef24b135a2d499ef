"""Boolean and theory Mealy/Moore machines, concretization and simulation.

Boolean Mealy machines branch on predicate valuations and emit one update
per state variable; Boolean Moore machines read update letters and emit full
predicate valuations.  Their theory counterparts attach atom semantics, an
initial valuation, and exact-arithmetic stepping.  Machines are immutable
after construction; simulations keep their own cursors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .encoder import AtomTable
from .frontend import TslSpec, TslFormula
from .theory import (Atom, Term, Cube, eval_cube, is_sat_cube, make_cube,
                     substitute_cube)


class MachineError(Exception):
    pass


PredVal = tuple[bool, ...]  # full valuation of predicate ids 0..n_preds-1
Combo = tuple[int, ...]     # one update id per state variable


@dataclass(frozen=True)
class BooleanMealy:
    """delta/mu over input cells.

    The machine reads the predicate bits in `bits`; `letter_cell` maps every
    assignment of those bits (encoded as an integer, bit i = bits[i]) to its
    cell, so delta and mu are total over full predicate cubes."""

    n_states: int
    bits: tuple[int, ...]                      # pred ids the machine reads
    letter_cell: tuple[int, ...]               # 2^len(bits) -> cell id
    delta: tuple[tuple[int, ...], ...]         # [state][cell] -> state
    mu: tuple[tuple[Combo, ...], ...]          # [state][cell] -> update combo
    initial: int = 0

    @property
    def n_cells(self) -> int:
        return max(self.letter_cell) + 1 if self.letter_cell else 1

    def cell_of(self, preds: Mapping[int, bool]) -> int:
        idx = 0
        for i, b in enumerate(self.bits):
            if preds.get(b, False):
                idx |= 1 << i
        return self.letter_cell[idx]

    def step(self, state: int, preds: Mapping[int, bool]) -> tuple[int, Combo]:
        c = self.cell_of(preds)
        return self.delta[state][c], self.mu[state][c]


@dataclass(frozen=True)
class BooleanMoore:
    n_states: int
    n_preds: int
    outputs: tuple[PredVal, ...]               # [state] -> full predicate cube
    delta: dict[tuple[int, Combo], int]        # total over the update alphabet
    combos: tuple[Combo, ...]
    initial: int = 0

    def output_cube(self, state: int) -> PredVal:
        return self.outputs[state]


def reachable_moore(m: BooleanMoore) -> tuple[list[int], list[tuple[int, Combo, int]]]:
    """Graph reachability from the initial state over the update alphabet."""
    seen = [m.initial]
    edges: list[tuple[int, Combo, int]] = []
    frontier = [m.initial]
    visited = {m.initial}
    while frontier:
        q = frontier.pop(0)
        for u in m.combos:
            t = m.delta[(q, u)]
            edges.append((q, u, t))
            if t not in visited:
                visited.add(t)
                seen.append(t)
                frontier.append(t)
    return seen, edges


@dataclass(frozen=True)
class TheoryMealy:
    boolean: BooleanMealy
    table: AtomTable
    r0: dict[str, Fraction]

    def eval_preds(self, valuation: Mapping[str, Fraction]) -> dict[int, bool]:
        return {i: a.evaluate(valuation)
                for i, a in enumerate(self.table.pred_atoms)}


@dataclass(frozen=True)
class TheoryMoore:
    boolean: BooleanMoore
    table: AtomTable
    r0: dict[str, Fraction]

    def choose_input(self, state: int, r: Mapping[str, Fraction]) -> Optional[dict[str, Fraction]]:
        """Input valuation keeping this state's output cube satisfied at r."""
        cube = output_theory_cube(self.boolean, self.table, state)
        if cube is False:
            return None
        bound = substitute_cube(cube, {v: Term.constant(val) for v, val in r.items()},
                                self.table.theory)
        if bound is False:
            return None
        model = is_sat_cube(bound, self.table.theory)
        if model is None:
            return None
        out = {v: model.get(v, Fraction(0)) for v in self.table.input_vars}
        return out


def output_theory_cube(m: BooleanMoore, table: AtomTable, state: int):
    lits = [(table.pred_atoms[i], pol) for i, pol in enumerate(m.outputs[state])]
    return make_cube(lits, table.theory)


@dataclass(frozen=True)
class TraceStep:
    state: int
    r: dict[str, Fraction]
    i: dict[str, Fraction]
    update: Optional[dict[str, Term]]  # None on the final entry


Trace = list[TraceStep]


def step_theory_mealy(m: TheoryMealy, state: int, r: Mapping[str, Fraction],
                      i: Mapping[str, Fraction]) -> tuple[int, dict[str, Fraction], dict[str, Term]]:
    """One transition: predicate evaluation, Boolean step, exact update."""
    v = dict(r)
    v.update(i)
    preds = m.eval_preds(v)
    nxt, combo = m.boolean.step(state, preds)
    update = m.table.combo_update(combo)
    r2 = {var: t.evaluate(v) for var, t in update.items()}
    return nxt, r2, update


def simulate(m: TheoryMealy, r0: Mapping[str, Fraction],
             inputs: Sequence[Mapping[str, Fraction]]) -> Trace:
    trace: Trace = []
    state = m.boolean.initial
    r = dict(r0)
    for i in inputs:
        nxt, r2, update = step_theory_mealy(m, state, r, i)
        trace.append(TraceStep(state, dict(r), dict(i), update))
        state, r = nxt, r2
    trace.append(TraceStep(state, dict(r), {}, None))
    return trace


def initial_cube(spec: TslSpec):
    """Top-level non-temporal atoms of the implication antecedent, as a cube."""
    f = spec.formula
    if f.kind != "implies":
        return ()
    lits = []

    def conjuncts(g: TslFormula):
        if g.kind == "and":
            for a in g.args:
                yield from conjuncts(a)
        else:
            yield g

    for c in conjuncts(f.args[0]):
        if c.kind == "atom":
            lits.append((c.atom, True))
        elif c.kind == "not" and c.args[0].kind == "atom":
            lits.append((c.args[0].atom, False))
    return make_cube(lits, spec.theory)


def concretize(m: BooleanMealy, spec: TslSpec, table: AtomTable,
               r0: Optional[Mapping[str, Fraction]] = None) -> TheoryMealy:
    """Attach atom semantics and pick the initial valuation.

    The initial valuation is the deterministic minimal model of the
    specification's initial cube (all-zeros when the antecedent is empty),
    unless the caller supplies one.
    """
    if r0 is None:
        cube = initial_cube(spec)
        if cube is False:
            raise MachineError("initial-state cube is unsatisfiable")
        model = is_sat_cube(cube, spec.theory)
        if model is None:
            raise MachineError("initial-state cube is unsatisfiable")
        r0 = {v: model.get(v, Fraction(0)) for v in spec.state_vars}
    return TheoryMealy(m, table, dict(r0))


def concretize_moore(m: BooleanMoore, spec: TslSpec, table: AtomTable) -> TheoryMoore:
    cube = output_theory_cube(m, table, m.initial)
    if cube is False:
        raise MachineError("initial output cube is unsatisfiable")
    model = is_sat_cube(cube, table.theory)
    if model is None:
        raise MachineError("initial output cube is unsatisfiable")
    r0 = {v: model.get(v, Fraction(0)) for v in spec.state_vars}
    return TheoryMoore(m, table, r0)


def moore_witness_run(m: TheoryMoore, steps: int,
                      update_choice: Optional[Sequence[Combo]] = None) -> Optional[Trace]:
    """Concrete run with every valuation satisfying its state's output cube.

    Update letters (the adversary's moves) default to a round-robin sweep of
    the alphabet.  Returns None as soon as a step cannot be completed, which
    a theory-consistent counterstrategy never exhibits.
    """
    b = m.boolean
    table = m.table
    theory = table.theory
    state = b.initial
    r = dict(m.r0)
    trace: Trace = []
    for t in range(steps):
        cube = output_theory_cube(b, table, state)
        if cube is False:
            return None
        subst = {v: Term.constant(val) for v, val in r.items()}
        bound = substitute_cube(cube, subst, theory)
        if bound is False:
            return None
        model = is_sat_cube(bound, theory)
        if model is None:
            return None
        i = {v: model.get(v, Fraction(0)) for v in table.input_vars}
        full = dict(r)
        full.update(i)
        if not eval_theory_output(b, table, state, full):
            return None
        combo = (update_choice[t] if update_choice is not None
                 else b.combos[t % len(b.combos)])
        update = table.combo_update(combo)
        r2 = {var: tm.evaluate(full) for var, tm in update.items()}
        trace.append(TraceStep(state, dict(r), i, update))
        state = b.delta[(state, combo)]
        r = r2
    trace.append(TraceStep(state, dict(r), {}, None))
    return trace


def eval_theory_output(m: BooleanMoore, table: AtomTable, state: int,
                       valuation: Mapping[str, Fraction]) -> bool:
    return all(a.evaluate(valuation) == pol
               for a, pol in zip(table.pred_atoms, m.outputs[state]))
