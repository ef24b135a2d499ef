"""Embedded CDCL SAT solver and CNF building helpers.

Deterministic by construction: decision order is activity with variable-index
tie-breaking, phases are saved, restarts follow the Luby sequence.  No
randomness, so identical instances yield identical models and identical
refinement traces across runs.

Literal encoding: variable v >= 1, literal 2*v for v and 2*v+1 for not v.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional


def lit(var: int, positive: bool = True) -> int:
    return 2 * var + (0 if positive else 1)


def neg(l: int) -> int:
    return l ^ 1


def lit_var(l: int) -> int:
    return l >> 1


def _luby(x: int) -> int:
    # Luby sequence 1,1,2,1,1,2,4,... for x = 0,1,2,...
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


class Solver:
    """CDCL with two-watched literals, 1UIP learning and Luby restarts."""

    def __init__(self, n_vars: int = 0):
        self.n_vars = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[], []]
        self.assign: list[int] = [-1]      # per var: -1 / 0 / 1
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.saved: list[int] = [0]
        self.activity: list[float] = [0.0]
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.heap: list[tuple[float, int]] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.ok = True
        self.n_learned_start: Optional[int] = None
        self.conflicts = 0
        if n_vars:
            self.ensure(n_vars)

    def new_var(self) -> int:
        self.n_vars += 1
        self.assign.append(-1)
        self.level.append(0)
        self.reason.append(-1)
        self.saved.append(0)
        self.activity.append(0.0)
        self.watches.append([])
        self.watches.append([])
        heapq.heappush(self.heap, (0.0, self.n_vars))
        return self.n_vars

    def ensure(self, v: int) -> None:
        while self.n_vars < v:
            self.new_var()

    def value(self, l: int) -> int:
        va = self.assign[l >> 1]
        return va if va < 0 else va ^ (l & 1)

    def add_clause(self, lits: Iterable[int]) -> None:
        c = sorted(set(lits))
        for l in c:
            self.ensure(l >> 1)
        if any((l ^ 1) in c for l in c):
            return  # tautology
        c = [l for l in c if self.value(l) != 0 or self.level[l >> 1] != 0]
        if any(self.value(l) == 1 and self.level[l >> 1] == 0 for l in c):
            return
        if not c:
            self.ok = False
            return
        if len(c) == 1:
            if self.value(c[0]) == 0:
                self.ok = False
            elif self.value(c[0]) < 0:
                self._enqueue(c[0], -1)
            return
        self._attach(c)

    def _attach(self, c: list[int]) -> int:
        # watch lists are indexed by the watched literal; a clause is visited
        # when that literal becomes false
        idx = len(self.clauses)
        self.clauses.append(c)
        self.watches[c[0]].append(idx)
        self.watches[c[1]].append(idx)
        return idx

    def _enqueue(self, l: int, reason: int) -> None:
        v = l >> 1
        self.assign[v] = 1 - (l & 1)
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.trail.append(l)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        clauses = self.clauses
        watches = self.watches
        assign = self.assign
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            falsified = p ^ 1
            wl = watches[falsified]
            i = j = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                c = clauses[ci]
                # ensure falsified is at position 1
                if c[0] == falsified:
                    c[0], c[1] = c[1], c[0]
                w0 = c[0]
                va = assign[w0 >> 1]
                if va >= 0 and va ^ (w0 & 1) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    vk = assign[lk >> 1]
                    if vk < 0 or vk ^ (lk & 1) == 1:
                        c[1], c[k] = c[k], c[1]
                        watches[lk].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if va >= 0:  # w0 false too: conflict
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return ci
                self._enqueue(w0, ci)
            del wl[j:]
        return -1

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(1, self.n_vars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n_vars + 1)
                         if self.assign[u] < 0]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        """First-UIP learned clause and the backjump level."""
        learnt = [0]
        seen = [False] * (self.n_vars + 1)
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur_level = len(self.lim)
        reason_cl = self.clauses[confl]
        while True:
            for q in reason_cl:
                if p >= 0 and (q >> 1) == (p >> 1):
                    continue
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx] ^ 1
            v = p >> 1
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                break
            reason_cl = self.clauses[self.reason[v]]
        learnt[0] = p
        # clause minimization: drop literals implied by the rest
        marks = set(l >> 1 for l in learnt)
        out = [learnt[0]]
        for l in learnt[1:]:
            r = self.reason[l >> 1]
            if r < 0:
                out.append(l)
                continue
            if any((q >> 1) not in marks and self.level[q >> 1] > 0
                   for q in self.clauses[r] if (q >> 1) != (l >> 1)):
                out.append(l)
        learnt = out
        if len(learnt) == 1:
            return learnt, 0
        bl = max(self.level[l >> 1] for l in learnt[1:])
        return learnt, bl

    def _backjump(self, target: int) -> None:
        while self.trail and self.level[self.trail[-1] >> 1] > target:
            l = self.trail.pop()
            v = l >> 1
            self.saved[v] = 1 - (l & 1)
            self.assign[v] = -1
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.lim[target:]
        self.qhead = len(self.trail)

    def _decide(self) -> int:
        while self.heap:
            act, v = self.heap[0]
            if self.assign[v] >= 0 or -act != self.activity[v]:
                heapq.heappop(self.heap)
                continue
            return 2 * v + (0 if self.saved[v] else 1)
        return -1

    def solve(self) -> Optional[list[bool]]:
        """Model indexed by var (entry 0 unused) or None when unsatisfiable."""
        if not self.ok:
            return None
        if self._propagate() >= 0:
            self.ok = False
            return None
        if self.n_learned_start is None:
            self.n_learned_start = len(self.clauses)
        restart_no = 0
        conflicts_left = 100 * _luby(restart_no)
        next_reduce = self.n_learned_start + 4000
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                if not self.lim:
                    self.ok = False
                    return None
                learnt, bl = self._analyze(confl)
                self._backjump(bl)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    idx = self._attach_learnt(learnt)
                    self._enqueue(learnt[0], idx)
                self.var_inc *= 1.05
                conflicts_left -= 1
                if len(self.clauses) > next_reduce:
                    self._reduce_db()
                    next_reduce = len(self.clauses) + 4000
                if conflicts_left <= 0:
                    restart_no += 1
                    conflicts_left = 100 * _luby(restart_no)
                    self._backjump(0)
                continue
            l = self._decide()
            if l < 0:
                return [self.assign[v] == 1 for v in range(self.n_vars + 1)]
            self.lim.append(len(self.trail))
            self._enqueue(l, -1)

    def _reduce_db(self) -> None:
        """Drop the older half of long learned clauses; keep active reasons."""
        first = self.n_learned_start
        keep_reasons = {self.reason[l >> 1] for l in self.trail}
        learned = list(range(first, len(self.clauses)))
        candidates = [i for i in learned
                      if i not in keep_reasons and len(self.clauses[i]) > 3]
        drop = set(candidates[: len(candidates) // 2])
        if not drop:
            return
        remap: dict[int, int] = {}
        new_clauses = self.clauses[:first]
        for i in learned:
            if i in drop:
                continue
            remap[i] = len(new_clauses)
            new_clauses.append(self.clauses[i])
        for i in range(first):
            remap[i] = i
        self.clauses = new_clauses
        for lt in range(2, 2 * self.n_vars + 2):
            self.watches[lt] = [remap[ci] for ci in self.watches[lt]
                                if ci not in drop]
        for v in range(1, self.n_vars + 1):
            r = self.reason[v]
            if r >= 0:
                self.reason[v] = remap[r]

    def _attach_learnt(self, learnt: list[int]) -> int:
        # watch the asserting literal and one from the backjump level
        bl = max(self.level[l >> 1] for l in learnt[1:])
        for k in range(1, len(learnt)):
            if self.level[learnt[k] >> 1] == bl:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return self._attach(learnt)


class Cnf:
    """Incremental CNF builder with gadget helpers."""

    def __init__(self):
        self.solver = Solver()

    def new_var(self) -> int:
        return self.solver.new_var()

    def add(self, *lits: int) -> None:
        self.solver.add_clause(lits)

    def add_clause(self, lits: Iterable[int]) -> None:
        self.solver.add_clause(lits)

    def exactly_one(self, lits: list[int]) -> None:
        self.solver.add_clause(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self.solver.add_clause([neg(lits[i]), neg(lits[j])])

    def implies(self, premises: list[int], conclusion: int) -> None:
        self.solver.add_clause([neg(p) for p in premises] + [conclusion])

    def solve(self) -> Optional[list[bool]]:
        return self.solver.solve()
