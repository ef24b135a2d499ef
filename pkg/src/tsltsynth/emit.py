"""Result rendering: imperative program extraction, DOT graphs, JSON reports.

The extracted program is documentation output in a C-like pseudocode skin,
but it is built from structured data (guard cubes, assignment blocks,
successor states) and ships with a tiny interpreter, so tests can check
that program and machine produce identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Optional, Sequence

from .encoder import AtomTable
from .frontend import format_atom, format_term
from .machines import (BooleanMealy, BooleanMoore, TheoryMealy, TheoryMoore,
                       Trace, reachable_moore)
from .theory import Atom, Term

SCHEMA_VERSION = 1

GuardCube = tuple[tuple[int, bool], ...]  # conjunction over predicate ids


@dataclass(frozen=True)
class Branch:
    guard: Optional[tuple[GuardCube, ...]]  # DNF over predicate ids; None = else
    combo: tuple[int, ...]
    next_state: int


@dataclass(frozen=True)
class Program:
    """One infinite loop; per machine state a guard chain over theory atoms."""

    table: AtomTable
    n_states: int
    initial: int
    branches: tuple[tuple[Branch, ...], ...]  # per state, ordered if/elif/else

    def render(self) -> str:
        table = self.table
        lines = ["while (true):"]
        pad = "    "
        if table.input_vars:
            lines.append(pad + ", ".join(table.input_vars) + " := receive()")

        def guard_text(guard) -> str:
            cubes = []
            for cube in guard:
                lits = []
                for pid, pol in cube:
                    a = table.pred_atoms[pid]
                    lits.append(format_atom(a) if pol
                                else "!(" + format_atom(a) + ")")
                cubes.append(" && ".join(lits) if lits else "true")
            return " || ".join(cubes)

        def assign_text(branch: Branch, with_mode: bool) -> list[str]:
            update = table.combo_update(branch.combo)
            nontrivial = [(v, t) for v, t in update.items()
                          if t != Term.var(v)]
            out = []
            if nontrivial:
                lhs = ", ".join(v for v, _ in nontrivial)
                rhs = ", ".join(format_term(t) for _, t in nontrivial)
                out.append(f"{lhs} := {rhs}")
            else:
                out.append("skip")
            if with_mode:
                out.append(f"mode := {branch.next_state}")
            return out

        def emit_state(state: int, indent: str):
            chain = self.branches[state]
            with_mode = self.n_states > 1
            for bi, br in enumerate(chain):
                if br.guard is None:
                    head = "else:" if len(chain) > 1 else None
                else:
                    kw = "if" if bi == 0 else "else if"
                    head = f"{kw} ({guard_text(br.guard)}):"
                body_indent = indent + ("    " if head else "")
                if head:
                    lines.append(indent + head)
                for stmt in assign_text(br, with_mode):
                    lines.append(body_indent + stmt)

        if self.n_states == 1:
            emit_state(0, pad)
        else:
            for q in range(self.n_states):
                kw = "if" if q == 0 else "else if"
                lines.append(pad + f"{kw} (mode = {q}):")
                emit_state(q, pad + "    ")
        lines.append(pad + "send(" + ", ".join(table.state_vars) + ")")
        header = []
        if self.n_states > 1:
            header.append(f"mode := {self.initial}")
        return "\n".join(header + lines) + "\n"

    def interpret(self, r0: Mapping[str, Fraction],
                  inputs: Sequence[Mapping[str, Fraction]]) -> list[dict[str, Fraction]]:
        """State-variable trace, matching machines.simulate step for step."""
        table = self.table
        mode = self.initial
        r = dict(r0)
        out = [dict(r)]
        for i in inputs:
            v = dict(r)
            v.update(i)
            chain = self.branches[mode]
            chosen = None
            for br in chain:
                if br.guard is None:
                    chosen = br
                    break
                ok = any(all(table.pred_atoms[p].evaluate(v) == pol
                             for p, pol in cube)
                         for cube in br.guard)
                if ok:
                    chosen = br
                    break
            update = table.combo_update(chosen.combo)
            r = {var: t.evaluate(v) for var, t in update.items()}
            mode = chosen.next_state
            out.append(dict(r))
        return out


def _letters_of_literal(bits, n_letters, pos, pol) -> int:
    mask = 0
    for letter in range(n_letters):
        if bool(letter >> pos & 1) == pol:
            mask |= 1 << letter
    return mask


def extract_program(m: TheoryMealy) -> Program:
    """Guard-chain extraction with syntactic simplification.

    Cells selecting the same (update, successor) pair merge into one branch;
    branch guards prefer a single atom literal, then two-literal cubes, and
    fall back to a disjunction of cell cubes.  Branch order is chosen so that
    guards only need to exclude later branches.
    """
    b = m.boolean
    table = m.table
    nbits = len(b.bits)
    n_letters = 1 << nbits

    lit_masks = {}
    for i, pid in enumerate(b.bits):
        for pol in (False, True):
            lit_masks[(pid, pol)] = _letters_of_literal(b.bits, n_letters, i, pol)

    state_branches: list[tuple[Branch, ...]] = []
    for q in range(b.n_states):
        groups: dict[tuple, int] = {}
        for letter in range(n_letters):
            c = b.letter_cell[letter]
            key = (b.mu[q][c], b.delta[q][c])
            groups[key] = groups.get(key, 0) | (1 << letter)

        entries = sorted(groups.items(),
                         key=lambda kv: (-bin(kv[1]).count("1"), kv[0]))

        def guard_for(mask: int, later: int) -> Optional[tuple[GuardCube, ...]]:
            # single literal
            for (pid, pol), lm in sorted(lit_masks.items()):
                if mask & ~lm == 0 and lm & later == 0:
                    return ((((pid, pol)),),)
            # two-literal cube
            items = sorted(lit_masks.items())
            for i1 in range(len(items)):
                for i2 in range(i1 + 1, len(items)):
                    (l1, m1), (l2, m2) = items[i1], items[i2]
                    if l1[0] == l2[0]:
                        continue
                    lm = m1 & m2
                    if mask & ~lm == 0 and lm & later == 0:
                        return (tuple(sorted((l1, l2))),)
            return None

        def cell_cubes(mask: int) -> tuple[GuardCube, ...]:
            cubes = []
            seen_cells = set()
            mm = mask
            while mm:
                low = mm & -mm
                letter = low.bit_length() - 1
                mm ^= low
                c = b.letter_cell[letter]
                if c in seen_cells:
                    continue
                seen_cells.add(c)
                cube = tuple((pid, bool(letter >> i & 1))
                             for i, pid in enumerate(b.bits))
                cubes.append(cube)
            return tuple(cubes)

        best: Optional[list[Branch]] = None
        orders = list(permutations(entries)) if len(entries) <= 4 else [tuple(entries)]
        for order in orders:
            chain: list[Branch] = []
            exact = True
            for bi, ((combo, nxt), mask) in enumerate(order):
                if bi == len(order) - 1:
                    chain.append(Branch(None, combo, nxt))
                    continue
                later = 0
                for _, m2 in order[bi + 1:]:
                    later |= m2
                g = guard_for(mask, later)
                if g is None:
                    exact = False
                    g = cell_cubes(mask)
                chain.append(Branch(g, combo, nxt))
            score = (0 if exact else 1,
                     sum(len(c) for br in chain if br.guard
                         for c in br.guard))
            if best is None or score < best[0]:
                best = (score, chain)
        state_branches.append(tuple(best[1]))

    return Program(table, b.n_states, b.initial, tuple(state_branches))


# ---------------------------------------------------------------------------
# DOT and JSON
# ---------------------------------------------------------------------------

def mealy_to_dot(m: BooleanMealy, table: AtomTable) -> str:
    lines = ["digraph mealy {", '  rankdir=LR;', '  node [shape=circle];']
    lines.append(f'  init [shape=point]; init -> s{m.initial};')
    nbits = len(m.bits)
    for q in range(m.n_states):
        lines.append(f'  s{q} [label="q{q}"];')
    edges: dict[tuple[int, int, tuple], list[int]] = {}
    for q in range(m.n_states):
        for c in range(m.n_cells):
            key = (q, m.delta[q][c], m.mu[q][c])
            edges.setdefault(key, []).append(c)
    for (q, t, combo), cs in sorted(edges.items()):
        ups = ", ".join(f"{v} <- {tm}" for v, tm in
                        sorted(table.combo_update(combo).items()))
        guard = f"{len(cs)}/{m.n_cells} cells" if nbits else "true"
        lines.append(f'  s{q} -> s{t} [label="{guard} / {ups}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def moore_to_dot(m: BooleanMoore, table: AtomTable) -> str:
    lines = ["digraph moore {", '  rankdir=LR;', '  node [shape=box];']
    lines.append(f'  init [shape=point]; init -> s{m.initial};')
    for q in range(m.n_states):
        lits = []
        for pid, pol in enumerate(m.outputs[q]):
            a = format_atom(table.pred_atoms[pid])
            lits.append(a if pol else f"!({a})")
        label = "\\n".join([f"q{q}"] + lits)
        lines.append(f'  s{q} [label="{label}"];')
    _, edges = reachable_moore(m)
    grouped: dict[tuple[int, int], list] = {}
    for qi, combo, qj in edges:
        grouped.setdefault((qi, qj), []).append(combo)
    for (qi, qj), combos in sorted(grouped.items()):
        labels = []
        for cb in sorted(combos):
            ups = ", ".join(f"{v} <- {tm}" for v, tm in
                            sorted(table.combo_update(cb).items()))
            labels.append(ups)
        lines.append(f'  s{qi} -> s{qj} [label="{"; ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_to_json(trace: Trace) -> str:
    entries = []
    for st in trace:
        entries.append({
            "state": st.state,
            "r": {k: str(v) for k, v in sorted(st.r.items())},
            "i": {k: str(v) for k, v in sorted(st.i.items())},
            "update": None if st.update is None else
                      {k: str(t) for k, t in sorted(st.update.items())},
        })
    return json.dumps({"schema": SCHEMA_VERSION, "trace": entries}, indent=2)


def outcome_to_json(outcome) -> str:
    """Structured run report for a cegar.LoopOutcome."""
    doc = {
        "schema": SCHEMA_VERSION,
        "status": outcome.status,
        "reason": outcome.reason,
        "iterations": outcome.iterations,
        "learned_predicates": outcome.learned_predicates,
        "trace": [
            {
                "iteration": rec.index,
                "machine": rec.machine_kind,
                "machine_states": rec.machine_states,
                "fired_case": rec.fired_case,
                "assumptions": rec.assumptions,
                "new_predicates": rec.new_predicates,
                "seconds": round(rec.seconds, 3),
            }
            for rec in outcome.trace
        ],
    }
    if outcome.mealy is not None:
        doc["machine"] = {
            "kind": "mealy",
            "states": outcome.mealy.boolean.n_states,
            "initial_valuation": {k: str(v)
                                  for k, v in sorted(outcome.mealy.r0.items())},
        }
    if outcome.moore is not None:
        doc["machine"] = {
            "kind": "moore",
            "states": outcome.moore.boolean.n_states,
            "initial_valuation": {k: str(v)
                                  for k, v in sorted(outcome.moore.r0.items())},
        }
    return json.dumps(doc, indent=2)
