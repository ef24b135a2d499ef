"""Benchmark corpus generators: the experiment families as spec files.

Families: the illustrative counter example, its unrealizable and diverging
variants, the commitment-extended counter (parameter c plus interval sizes),
naive and signal elevators (parameterized floors), sorting networks for n
variables, and the water-tank systems (LRA).  `write_all` materializes the
corpus with a manifest carrying per-instance expectations and slow markers.
"""

from __future__ import annotations

import json
from pathlib import Path


def illustrative() -> str:
    return """state x:int;
input i:int;
spec (0 <= x && x < 10 && G (0 <= i && i < 5)) ->
  G (0 <= x && x < 10 && ([x <- x-1] || [x <- x+i]));
"""


def unrealizable_counter() -> str:
    return """state x:int;
spec x = 0 -> G ([x <- x+1] && x < 3);
"""


def diverging_counter() -> str:
    return """state x:int;
spec 0 <= x -> (F (x < 0) && G ([x <- x+1] || [x <- x-1]));
"""


def stuck_unrealizable() -> str:
    # eventually-zero under forced increment: the analysis learns an
    # unbounded ladder and cannot conclude
    return """state x:int;
spec x = 1 -> (F (x = 0) && G [x <- x+1]);
"""


def illustrative_extended(c: int, x_max: int, i_max: int) -> str:
    return f"""state x:int;
input i:int;
spec (0 <= x && x <= {x_max} && G (i >= 0 && i <= {i_max})) -> G (
  0 <= x && x <= {x_max} && ([x <- x-i] || [x <- x+i]) &&
  (([x <- x-i] && X [x <- x+i]) -> G[1,{c}] [x <- x+i]) &&
  (([x <- x+i] && X [x <- x-i]) -> G[1,{c}] [x <- x-i]));
"""


def elevator_naive(floors: int) -> str:
    liveness = " && ".join(f"(F floor = {k})" for k in range(1, floors + 1))
    return f"""state floor:int;
spec (floor >= 1 && floor <= {floors}) -> G (
  ([floor <- floor] || [floor <- floor - 1] || [floor <- floor + 1]) &&
  floor >= 1 && floor <= {floors} && {liveness});
"""


def elevator_signal(floors: int) -> str:
    liveness = " && ".join(f"(target = {k} -> F floor = {k})"
                           for k in range(1, floors + 1))
    return f"""state floor:int;
state target:int;
input signal:int;
spec (floor >= 1 && floor <= {floors} && target = 0 &&
  G (signal >= 0 && signal <= {floors} && (target != 0 -> signal = 0))) -> G (
  ([floor <- floor] || [floor <- floor - 1] || [floor <- floor + 1]) &&
  ((signal != 0 && floor != target) -> [target <- signal]) &&
  ((signal = 0 && floor != target) -> [target <- target]) &&
  (floor = target -> [target <- 0]) &&
  floor >= 1 && floor <= {floors} && {liveness});
"""


def sorting(n: int) -> str:
    names = [chr(ord("a") + i) for i in range(n)]
    decls = " ".join(f"state {v}:int;" for v in names)
    sorted_cond = " && ".join(f"{names[i]} >= {names[i+1]}"
                              for i in range(n - 1))
    choices = []
    for i in range(n - 1):
        parts = []
        for j, v in enumerate(names):
            if j == i:
                parts.append(f"[{v} <- {names[i+1]}]")
            elif j == i + 1:
                parts.append(f"[{v} <- {names[i]}]")
            else:
                parts.append(f"[{v} <- {v}]")
        choices.append("(" + " && ".join(parts) + ")")
    choices.append("(" + " && ".join(f"[{v} <- {v}]" for v in names) + ")")
    return (f"{decls}\n"
            f"spec F G ({sorted_cond}) && G (\n  "
            + " ||\n  ".join(choices) + ");\n")


def watertank_safety() -> str:
    return """state x1:real;
state x2:real;
spec (0.2 <= x1 && x1 < 0.7 && 0.1 <= x2 && x2 < 0.7) -> G (
  0.1 <= x1 && x1 < 0.7 && 0.1 <= x2 && x2 < 0.7 &&
  ((x1 < 0.2 && x2 < 0.2) ->
    (([x1 <- x1 + 0.0*324.6753] || [x1 <- x1 + 0.0003*324.6753]) &&
     [x2 <- 0.9635*x2])) &&
  ((x1 >= 0.2 || x2 >= 0.2) ->
    (([x1 <- 0.8281*x1 + 0.1719*x2 + 0.0*324.6753] ||
      [x1 <- 0.8281*x1 + 0.1719*x2 + 0.0003*324.6753]) &&
     [x2 <- 0.7916*x2 + 0.1719*x1])));
"""


def watertank_single_liveness() -> str:
    return """state x:real;
spec (0.0 <= x && x < 0.7) -> G (
  ([x <- 0.9635*x] || [x <- 0.9635*x + 0.1]) &&
  (x < 0.1 -> F (x > 0.4)));
"""


def watertank_two_liveness() -> str:
    return """state x1:real;
state x2:real;
spec (0.2 <= x1 && x1 < 0.7 && 0.1 <= x2 && x2 < 0.7) -> G (
  0.1 <= x1 && x1 < 0.7 && 0.1 <= x2 && x2 < 0.7 &&
  (([x1 <- 0.8281*x1 + 0.1719*x2 + 0.0*324.6753] ||
    [x1 <- 0.8281*x1 + 0.1719*x2 + 0.0003*324.6753]) &&
   [x2 <- 0.7916*x2 + 0.1719*x1]) &&
  (x1 < 0.2 -> F (x1 > 0.4)));
"""


def instances() -> list[dict]:
    """The corpus manifest: name, text, expectation, iteration/speed hints."""
    out: list[dict] = []

    def add(name, text, expected, slow=False, max_iterations=50, states=None,
            note=""):
        out.append({"name": name, "file": name + ".tslt", "text": text,
                    "expected": expected, "slow": slow,
                    "max_iterations": max_iterations,
                    "reference_states": states, "note": note})

    add("illustrative", illustrative(), "realizable", states=1,
        note="kept-in-range counter")
    add("unreal_x3", unrealizable_counter(), "unrealizable",
        note="forced increment under a cap")
    add("diverging", diverging_counter(), "unknown", max_iterations=10,
        note="threshold ladder never converges")
    add("stuck_unreal", stuck_unrealizable(), "unknown", max_iterations=8,
        note="unrealizable but the analysis diverges")

    for c, xm, im in [(1, 100, 5), (2, 100, 5), (2, 1000, 5), (2, 100000, 50),
                      (3, 100, 5), (3, 1000, 5), (3, 100000, 50),
                      (3, 1000000, 5000)]:
        add(f"illustrative_extended_c{c}_x{xm}_i{im}",
            illustrative_extended(c, xm, im), "realizable",
            states=1 if c == 1 else 2,
            note=f"commitment window c={c}")

    for f in (3, 4, 5, 8, 10):
        add(f"elevator_naive_{f}", elevator_naive(f), "realizable",
            slow=f >= 8, states={3: 2, 4: 3, 5: 4, 8: 4, 10: 4}[f],
            max_iterations=80)
    for f in (3, 4, 5):
        add(f"elevator_signal_{f}", elevator_signal(f), "realizable",
            slow=True, states=1, max_iterations=80,
            note="large predicate alphabet; expect long runtimes")
    for n in (3, 4, 5):
        add(f"sorting_{n}", sorting(n), "realizable",
            slow=n >= 4, states={3: 2, 4: 3, 5: None}[n],
            max_iterations=80,
            note="adjacent swaps" + ("; expected timeout" if n == 5 else ""))
    add("watertank_safety", watertank_safety(), "realizable", states=1,
        max_iterations=80)
    add("watertank_single_liveness", watertank_single_liveness(),
        "realizable", states=2, max_iterations=80)
    add("watertank_two_liveness", watertank_two_liveness(), "realizable",
        slow=True, states=None, max_iterations=80,
        note="expected timeout; out of reach for the method at desk scale")
    return out


def write_all(directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = []
    for inst in instances():
        p = d / inst["file"]
        p.write_text(inst["text"])
        written.append(p)
        manifest.append({k: v for k, v in inst.items() if k != "text"})
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    written.append(d / "manifest.json")
    return written
