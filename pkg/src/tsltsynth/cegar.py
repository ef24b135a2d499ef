"""The abstraction-refinement loop: encode, synthesize, analyze, refine.

Outcomes are three-valued: a concretized theory Mealy machine, a
theory-consistent Moore counterstrategy witnessing unrealizability, or
Unknown (iteration cap, synthesis budget, or a stuck analysis).  The loop
is strictly sequential; each iteration's trace entry records the fired
case, the assumptions added and the predicates learned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .encoder import (AtomTable, assumption_text, encode_body)
from .frontend import TslSpec, format_atom
from .machines import (TheoryMealy, TheoryMoore, concretize, concretize_moore)
from .refiner import Assumption, analyze
from .synth import (Point, SynthConfig, SynthesisProblem, Window,
                    minimize_mealy, synthesize)


@dataclass
class LoopConfig:
    max_iterations: int = 50
    synth: SynthConfig = field(default_factory=SynthConfig)
    minimize: bool = False
    initial: Optional[Mapping[str, Fraction]] = None
    time_budget: Optional[float] = None  # seconds for the whole run


@dataclass
class IterationRecord:
    index: int
    machine_kind: str          # "mealy" | "moore" | "-"
    machine_states: int
    fired_case: Optional[int]
    assumptions: list[str]
    new_predicates: list[str]
    seconds: float


@dataclass
class LoopOutcome:
    status: str                # "realizable" | "unrealizable" | "unknown"
    reason: str = ""
    mealy: Optional[TheoryMealy] = None
    moore: Optional[TheoryMoore] = None
    trace: list[IterationRecord] = field(default_factory=list)
    table: Optional[AtomTable] = None
    problem: Optional[SynthesisProblem] = None
    iterations: int = 0

    @property
    def learned_predicates(self) -> list[str]:
        out = []
        for rec in self.trace:
            out.extend(rec.new_predicates)
        return out


def _as_window_or_point(a: Assumption):
    if a.kind == "state":
        return Point(a.cons)
    return Window(a.ant_preds, a.ant_updates, a.cons)


def run(spec: TslSpec, cfg: Optional[LoopConfig] = None) -> LoopOutcome:
    cfg = cfg or LoopConfig()
    t_start = time.monotonic()
    table = AtomTable.for_spec(spec)
    core = encode_body(spec, table)
    problem = SynthesisProblem(table, core, [], [], cfg.synth)
    trace: list[IterationRecord] = []
    seen_keys: set = set()

    for it in range(cfg.max_iterations):
        if cfg.time_budget is not None and \
                time.monotonic() - t_start > cfg.time_budget:
            return LoopOutcome("unknown", "time budget exhausted",
                               trace=trace, table=table, problem=problem,
                               iterations=it)
        t0 = time.monotonic()
        res = synthesize(problem)
        if res.status == "realizable":
            m = res.mealy
            if cfg.minimize:
                m = minimize_mealy(problem, m)
            trace.append(IterationRecord(it, "mealy", m.n_states, None, [], [],
                                         time.monotonic() - t0))
            theory_m = concretize(m, spec, table, r0=cfg.initial)
            return LoopOutcome("realizable", mealy=theory_m, trace=trace,
                               table=table, problem=problem, iterations=it + 1)
        if res.status == "unknown":
            trace.append(IterationRecord(it, "-", 0, None, [], [],
                                         time.monotonic() - t0))
            return LoopOutcome("unknown", "synthesis: " + res.reason,
                               trace=trace, table=table, problem=problem,
                               iterations=it + 1)

        verdict = analyze(table, res.moore)
        if verdict.consistent:
            trace.append(IterationRecord(it, "moore", res.moore.n_states, None,
                                         [], [], time.monotonic() - t0))
            witness = concretize_moore(res.moore, spec, table)
            return LoopOutcome("unrealizable", moore=witness, trace=trace,
                               table=table, problem=problem, iterations=it + 1)

        fresh = [a for a in verdict.assumptions if a.key() not in seen_keys]
        if not fresh:
            trace.append(IterationRecord(it, "moore", res.moore.n_states,
                                         verdict.fired_case, [], [],
                                         time.monotonic() - t0))
            return LoopOutcome("unknown",
                               "no progress: analysis repeated an assumption",
                               trace=trace, table=table, problem=problem,
                               iterations=it + 1)
        texts = []
        preds = []
        for a in fresh:
            seen_keys.add(a.key())
            texts.append(assumption_text(a, table))
            preds.extend(format_atom(p) for p in a.new_predicates
                         if format_atom(p) not in preds)
            piece = _as_window_or_point(a)
            if isinstance(piece, Point):
                problem.points.append(piece)
            else:
                problem.windows.append(piece)
        trace.append(IterationRecord(it, "moore", res.moore.n_states,
                                     verdict.fired_case, texts, preds,
                                     time.monotonic() - t0))

    return LoopOutcome("unknown", "iteration cap reached", trace=trace,
                       table=table, problem=problem,
                       iterations=cfg.max_iterations)
