"""Command-line entry point: run one spec file or a benchmark corpus.

Exit codes: 0 realizable, 1 unrealizable, 2 unknown, 3 usage/parse error.
Point the tool at a spec file to synthesize it, or at a directory to run
every corpus entry and print a summary table.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import corpus
from .cegar import LoopConfig, run
from .emit import (extract_program, mealy_to_dot, moore_to_dot,
                   outcome_to_json)
from .frontend import SpecError, parse_spec
from .synth import SynthConfig
from .theory import LIA, LRA

EXIT_REALIZABLE = 0
EXIT_UNREALIZABLE = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3


def _parse_initial(text: str) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad initial assignment {part!r}")
        name, val = part.split("=", 1)
        out[name.strip()] = Fraction(val.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tslt-synth",
        description="Reactive synthesis for temporal stream logic modulo "
                    "linear integer/real arithmetic.")
    p.add_argument("path", help="spec file (.tslt) or a corpus directory")
    p.add_argument("--theory", choices=["lia", "lra"],
                   help="override the theory implied by the header")
    p.add_argument("--max-iterations", type=int, default=50, metavar="N")
    p.add_argument("--max-bound", type=int, default=8, metavar="K",
                   help="largest machine size tried on either side")
    p.add_argument("--minimize", action="store_true",
                   help="re-run the search for the smallest realizing machine")
    p.add_argument("--emit", default="dot,json,code",
                   help="comma list of artifacts: dot,json,code")
    p.add_argument("--initial", metavar="ASSIGN",
                   help='initial valuation, e.g. "x=3,y=0"')
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in reports; the engine itself is "
                        "deterministic")
    p.add_argument("--out", metavar="DIR", default=None,
                   help="artifact directory (default: alongside the spec)")
    p.add_argument("--time-budget", type=float, default=None, metavar="SEC")
    p.add_argument("--all", action="store_true",
                   help="benchmark mode: include entries marked slow")
    p.add_argument("--write-corpus", action="store_true",
                   help="(directory mode) write the built-in corpus first")
    return p


def _loop_config(args) -> LoopConfig:
    synth = SynthConfig(max_bound=args.max_bound)
    initial = _parse_initial(args.initial) if args.initial else None
    return LoopConfig(max_iterations=args.max_iterations, synth=synth,
                      minimize=args.minimize, initial=initial,
                      time_budget=args.time_budget)


def _load_spec(path: Path, theory_override):
    text = path.read_text()
    if theory_override:
        want = "int" if theory_override == "lia" else "real"
        other = "real" if want == "int" else "int"
        text = text.replace(f":{other};", f":{want};")
    return parse_spec(text)


def run_file(path: Path, args) -> int:
    try:
        spec = _load_spec(path, args.theory)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    outcome = run(spec, _loop_config(args))
    outdir = Path(args.out) if args.out else path.parent
    outdir.mkdir(parents=True, exist_ok=True)
    stem = path.stem
    wants = {w.strip() for w in args.emit.split(",") if w.strip()}

    if "json" in wants:
        doc = json.loads(outcome_to_json(outcome))
        doc["seed"] = args.seed
        doc["spec"] = path.name
        (outdir / f"{stem}_report.json").write_text(
            json.dumps(doc, indent=2) + "\n")
    if "dot" in wants and outcome.mealy is not None:
        (outdir / f"{stem}_machine.dot").write_text(
            mealy_to_dot(outcome.mealy.boolean, outcome.table))
    if "dot" in wants and outcome.moore is not None:
        (outdir / f"{stem}_counterstrategy.dot").write_text(
            moore_to_dot(outcome.moore.boolean, outcome.table))
    if "code" in wants and outcome.mealy is not None:
        (outdir / f"{stem}_program.txt").write_text(
            extract_program(outcome.mealy).render())

    label = {"realizable": "REALIZABLE", "unrealizable": "UNREALIZABLE",
             "unknown": "UNKNOWN"}[outcome.status]
    extra = ""
    if outcome.mealy is not None:
        extra = f" ({outcome.mealy.boolean.n_states} states, " \
                f"{outcome.iterations} iterations)"
    elif outcome.moore is not None:
        extra = f" (counterstrategy {outcome.moore.boolean.n_states} states," \
                f" {outcome.iterations} iterations)"
    elif outcome.reason:
        extra = f" ({outcome.reason})"
    print(f"{path.name}: {label}{extra}")
    return {"realizable": EXIT_REALIZABLE, "unrealizable": EXIT_UNREALIZABLE,
            "unknown": EXIT_UNKNOWN}[outcome.status]


def bench(directory: Path, args) -> int:
    if args.write_corpus or not any(directory.glob("*.tslt")):
        corpus.write_all(directory)
    manifest_path = directory / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
    else:
        manifest = [{"name": p.stem, "file": p.name, "slow": False,
                     "max_iterations": args.max_iterations,
                     "expected": None, "reference_states": None}
                    for p in sorted(directory.glob("*.tslt"))]
    rows = []
    for inst in manifest:
        if inst.get("slow") and not args.all:
            rows.append((inst["name"], "skipped (slow)", "-", "-", "-", "-"))
            continue
        path = directory / inst["file"]
        try:
            spec = _load_spec(path, args.theory)
            cfg = _loop_config(args)
            cfg.max_iterations = inst.get("max_iterations",
                                          args.max_iterations)
            cfg.minimize = True
            t0 = time.monotonic()
            outcome = run(spec, cfg)
            dt = time.monotonic() - t0
            states = "-"
            if outcome.mealy is not None:
                states = str(outcome.mealy.boolean.n_states)
            elif outcome.moore is not None:
                states = str(outcome.moore.boolean.n_states)
            rows.append((inst["name"], outcome.status,
                         str(outcome.iterations), states,
                         str(len(outcome.learned_predicates)), f"{dt:.1f}s"))
        except Exception as e:  # keep the run going; report the failure
            rows.append((inst["name"], f"error: {e}", "-", "-", "-", "-"))
    header = ("instance", "outcome", "refinements", "states",
              "learned preds", "time")
    widths = [max(len(str(r[i])) for r in rows + [header])
              for i in range(len(header))]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    print(fmt.format(*header))
    for r in rows:
        print(fmt.format(*r))
    return EXIT_REALIZABLE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    path = Path(args.path)
    if path.is_dir():
        return bench(path, args)
    if not path.exists():
        print(f"error: no such file {path}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return run_file(path, args)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
