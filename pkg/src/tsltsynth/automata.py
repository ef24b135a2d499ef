"""LTL to nondeterministic Büchi automata via the on-the-fly tableau.

Transitions are labeled with cubes (partial assignments of variable ids),
never with explicit letters, so the alphabet can stay implicit.  The same
automaton doubles as a universal co-Büchi automaton when built from the
negated formula; the synthesis engine treats `accepting` as the rejecting
set in that reading.

Construction: Gerth-Peled-Vardi-Wolper node expansion, degeneralization by
counting, removal of states that cannot contribute to an accepted word, and
a cheap bisimulation-quotient pass.  A configurable state budget guards the
worst-case blowup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .ltl import Ltl, LTRUE, LFALSE, land, lnext, lor, luntil, lrelease, to_nnf

LCube = frozenset[tuple[int, bool]]  # partial assignment: (var, polarity)


class AutomatonBudget(Exception):
    """State-count budget exceeded during construction."""


@dataclass(frozen=True)
class Nba:
    n_states: int
    initial: int
    transitions: tuple[tuple[int, LCube, int], ...]
    accepting: frozenset[int]

    def out_edges(self, state: int) -> list[tuple[LCube, int]]:
        return self._index().get(state, [])

    def _index(self):
        if not hasattr(self, "_idx"):
            idx: dict[int, list[tuple[LCube, int]]] = {}
            for s, c, t in self.transitions:
                idx.setdefault(s, []).append((c, t))
            object.__setattr__(self, "_idx", idx)
        return self._idx

    def variables(self) -> frozenset[int]:
        out: set[int] = set()
        for _, c, _ in self.transitions:
            out.update(v for v, _ in c)
        return frozenset(out)


def cube_matches(cube: LCube, letter: Mapping[int, bool]) -> bool:
    return all(bool(letter.get(v, False)) == pol for v, pol in cube)


def _cube_add(cube: dict[int, bool], var: int, pol: bool) -> bool:
    if var in cube and cube[var] != pol:
        return False
    cube[var] = pol
    return True


@dataclass
class _Node:
    incoming: set[int] = field(default_factory=set)
    new: list[Ltl] = field(default_factory=list)
    old: set[Ltl] = field(default_factory=set)
    nxt: set[Ltl] = field(default_factory=set)


_INIT = -1


def _expand(start: _Node, nodes: dict[int, _Node],
            merged: dict[tuple[frozenset, frozenset], int],
            order: list[int], counter: list[int], budget: int) -> None:
    """GPVW expansion; iterative, deterministic (worklist order only)."""
    work = [start]
    while work:
        node = work.pop()
        dead = False
        while node.new:
            f = node.new.pop()
            if f in node.old:
                continue
            k = f.kind
            if k == "true":
                continue
            if k == "false":
                dead = True
                break
            if k == "var" or (k == "not" and f.args[0].kind == "var"):
                pol = k == "var"
                var = f.var if pol else f.args[0].var
                neg = Ltl("not", args=(Ltl("var", var=var),)) if pol \
                    else Ltl("var", var=var)
                if neg in node.old:
                    dead = True
                    break
                node.old.add(f)
                continue
            if k == "and":
                node.old.add(f)
                node.new.extend(a for a in reversed(f.args) if a not in node.old)
                continue
            if k == "next":
                node.old.add(f)
                node.nxt.add(f.args[0])
                continue
            if k in ("or", "until", "release"):
                if k == "or":
                    rest = f.args[1] if len(f.args) == 2 else lor(*f.args[1:])
                    branch1, nxt1 = [f.args[0]], []
                    branch2, nxt2 = [rest], []
                elif k == "until":  # a U b = b or (a and X(a U b))
                    a, b = f.args
                    branch1, nxt1 = [b], []
                    branch2, nxt2 = [a], [f]
                else:  # a R b = (a and b) or (b and X(a R b))
                    a, b = f.args
                    branch1, nxt1 = [a, b], []
                    branch2, nxt2 = [b], [f]
                sibling = _Node(incoming=set(node.incoming),
                                new=list(node.new) + [g for g in branch2
                                                      if g not in node.old],
                                old=set(node.old) | {f},
                                nxt=set(node.nxt) | set(nxt2))
                node.old.add(f)
                node.new.extend(g for g in branch1 if g not in node.old)
                node.nxt.update(nxt1)
                work.append(sibling)
                continue
            raise ValueError(f"unexpected NNF node {k}")
        if dead:
            continue
        key = (frozenset(node.old), frozenset(node.nxt))
        if key in merged:
            nodes[merged[key]].incoming.update(node.incoming)
            continue
        nid = counter[0]
        counter[0] += 1
        if nid > budget:
            raise AutomatonBudget(f"tableau exceeded {budget} states")
        merged[key] = nid
        nodes[nid] = node
        order.append(nid)
        work.append(_Node(incoming={nid},
                          new=sorted(node.nxt, key=repr)))


def to_nba(formula: Ltl, budget: int = 3000) -> Nba:
    """Tableau construction; `formula` may be any LTL (NNF applied here)."""
    nnf = to_nnf(formula)
    nodes: dict[int, _Node] = {}
    counter = [0]
    _expand(_Node(incoming={_INIT}, new=[nnf]), nodes, {}, [], counter, budget)

    # until subformulas present in the tableau drive generalized acceptance
    untils: list[Ltl] = []
    seen: set[Ltl] = set()

    def collect(f: Ltl) -> None:
        if f in seen:
            return
        seen.add(f)
        if f.kind == "until":
            untils.append(f)
        for a in f.args:
            collect(a)

    collect(nnf)

    def label_of(node: _Node) -> Optional[LCube]:
        cube: dict[int, bool] = {}
        for f in node.old:
            if f.kind == "var":
                if not _cube_add(cube, f.var, True):
                    return None
            elif f.kind == "not":
                if not _cube_add(cube, f.args[0].var, False):
                    return None
        return frozenset(cube.items())

    # generalized Buchi: set F_i = nodes where (a_i U b_i) not pending
    fsets: list[set[int]] = []
    for u in untils:
        fsets.append({nid for nid, nd in nodes.items()
                      if u not in nd.old or u.args[1] in nd.old})
    k = len(fsets)

    # degeneralize with a counter; advance when the source hits F_i
    state_ids: dict[tuple[int, int], int] = {}
    transitions: list[tuple[int, LCube, int]] = []
    accepting: set[int] = set()

    def sid(node_id: int, i: int) -> int:
        key = (node_id, i)
        if key not in state_ids:
            state_ids[key] = len(state_ids)
        return state_ids[key]

    labels = {nid: label_of(nd) for nid, nd in nodes.items()}
    init_id = len(nodes)  # virtual initial, no incoming edges

    if k == 0:
        for nid, nd in nodes.items():
            state_ids[(nid, 0)] = len(state_ids)
        for nid, nd in nodes.items():
            lab = labels[nid]
            if lab is None:
                continue
            for src in sorted(nd.incoming):
                s = init_id if src == _INIT else state_ids[(src, 0)]
                transitions.append((s, lab, state_ids[(nid, 0)]))
        accepting = set(state_ids.values())
        n = len(state_ids)
        init = n
        trans = tuple((init if s == init_id else s, c, t) for s, c, t in transitions)
        nba = Nba(n + 1, init, trans, frozenset(accepting))
        return _tidy(nba)

    for nid in nodes:
        for i in range(k):
            sid(nid, i)

    def advance(i: int, src_nid: int) -> int:
        return (i + 1) % k if src_nid in fsets[i] else i

    for nid, nd in nodes.items():
        lab = labels[nid]
        if lab is None:
            continue
        for src in sorted(nd.incoming):
            if src == _INIT:
                transitions.append((init_id + 10**9, lab, sid(nid, 0)))
            else:
                for i in range(k):
                    transitions.append((sid(src, i), lab, sid(nid, advance(i, src))))
    for nid in nodes:
        if nid in fsets[0]:
            accepting.add(sid(nid, 0))

    n = len(state_ids)
    init = n
    trans = tuple((init if s == init_id + 10**9 else s, c, t)
                  for s, c, t in transitions)
    nba = Nba(n + 1, init, trans, frozenset(accepting))
    return _tidy(nba)


def _tidy(nba: Nba) -> Nba:
    nba = _prune_dead(nba)
    nba = _quotient_bisim(nba)
    return nba


def _prune_dead(nba: Nba) -> Nba:
    """Keep only states on a path from initial to an accepting cycle."""
    fwd: dict[int, set[int]] = {}
    for s, _, t in nba.transitions:
        fwd.setdefault(s, set()).add(t)
    reach = {nba.initial}
    stack = [nba.initial]
    while stack:
        s = stack.pop()
        for t in fwd.get(s, ()):
            if t not in reach:
                reach.add(t)
                stack.append(t)

    # accepting states on a reachable cycle
    live_core: set[int] = set()
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    stack2: list[int] = []
    onstack: set[int] = set()
    counter = [0]
    sccs: list[list[int]] = []

    def strongconnect(v: int) -> None:
        work = [(v, iter(sorted(fwd.get(v, ()))))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack2.append(v)
        onstack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in reach:
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack2.append(w)
                    onstack.add(w)
                    work.append((w, iter(sorted(fwd.get(w, ())))))
                    advanced = True
                    break
                if w in onstack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack2.pop()
                    onstack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)

    for s in sorted(reach):
        if s not in index:
            strongconnect(s)
    selfloops = {s for s, _, t in nba.transitions if s == t}
    for comp in sccs:
        cycle = len(comp) > 1 or comp[0] in selfloops
        if cycle and any(c in nba.accepting for c in comp):
            live_core.update(comp)

    # states that can reach the live core
    bwd: dict[int, set[int]] = {}
    for s, _, t in nba.transitions:
        bwd.setdefault(t, set()).add(s)
    live = set(live_core)
    stack = list(live_core)
    while stack:
        s = stack.pop()
        for p in bwd.get(s, ()):
            if p in reach and p not in live:
                live.add(p)
                stack.append(p)
    live.add(nba.initial)

    keep = sorted(live)
    remap = {s: i for i, s in enumerate(keep)}
    trans = tuple((remap[s], c, remap[t]) for s, c, t in nba.transitions
                  if s in live and t in live)
    acc = frozenset(remap[s] for s in nba.accepting if s in live_core and s in live)
    return Nba(len(keep), remap[nba.initial], trans, acc)


def _quotient_bisim(nba: Nba) -> Nba:
    """Merge forward-bisimilar states (same acceptance, same signatures)."""
    part = {s: (1 if s in nba.accepting else 0) for s in range(nba.n_states)}
    for _ in range(nba.n_states + 1):
        sig: dict[int, tuple] = {}
        out: dict[int, set] = {s: set() for s in range(nba.n_states)}
        for s, c, t in nba.transitions:
            out[s].add((c, part[t]))
        for s in range(nba.n_states):
            sig[s] = (part[s], frozenset(out[s]))
        classes: dict[tuple, int] = {}
        new_part: dict[int, int] = {}
        for s in range(nba.n_states):
            if sig[s] not in classes:
                classes[sig[s]] = len(classes)
            new_part[s] = classes[sig[s]]
        if new_part == part:
            break
        part = new_part
    n = len(set(part.values()))
    trans = tuple(sorted({(part[s], c, part[t]) for s, c, t in nba.transitions},
                         key=lambda x: (x[0], x[2], sorted(x[1]))))
    acc = frozenset(part[s] for s in nba.accepting)
    return Nba(n, part[nba.initial], trans, acc)


def accepts_lasso(nba: Nba, prefix: list[Mapping[int, bool]],
                  cycle: list[Mapping[int, bool]]) -> bool:
    """Does the automaton accept prefix . cycle^w?  (Explicit search.)"""
    cur = {nba.initial}
    for letter in prefix:
        nxt: set[int] = set()
        for s in cur:
            for c, t in nba.out_edges(s):
                if cube_matches(c, letter):
                    nxt.add(t)
        cur = nxt
        if not cur:
            return False
    # search for an accepting cycle in the (state, cycle position) graph
    m = len(cycle)
    nodes = {(s, 0) for s in cur}
    edges: dict[tuple[int, int], set[tuple[int, int]]] = {}
    stack = list(nodes)
    seen = set(nodes)
    while stack:
        s, i = stack.pop()
        for c, t in nba.out_edges(s):
            if cube_matches(c, cycle[i]):
                dst = (t, (i + 1) % m)
                edges.setdefault((s, i), set()).add(dst)
                if dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
    # accepting node on a cycle, reachable from `nodes`
    for target in seen:
        if target[0] not in nba.accepting:
            continue
        # is target on a cycle? search from target back to target
        stack = [target]
        visited = set()
        while stack:
            cu = stack.pop()
            for dst in edges.get(cu, ()):
                if dst == target:
                    return True
                if dst not in visited:
                    visited.add(dst)
                    stack.append(dst)
    return False


def union_nba(parts: Iterable[Nba]) -> Nba:
    """Language union: disjoint copies sharing a fresh initial state."""
    parts = list(parts)
    offset = 0
    transitions: list[tuple[int, LCube, int]] = []
    accepting: set[int] = set()
    inits: list[int] = []
    for p in parts:
        for s, c, t in p.transitions:
            transitions.append((s + offset, c, t + offset))
        accepting.update(s + offset for s in p.accepting)
        inits.append(p.initial + offset)
        offset += p.n_states
    init = offset
    for p, i0 in zip(parts, inits):
        for c, t in p.out_edges(p.initial):
            transitions.append((init, c, t + (i0 - p.initial)))
    return Nba(offset + 1, init, tuple(transitions), frozenset(accepting))
