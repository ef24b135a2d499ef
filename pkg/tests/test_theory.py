"""Theory engine: canonical forms, evaluation, sat, cores, wp and QE.

The randomized suites mirror the acceptance criteria at reduced sample
counts; test_acceptance runs them at full size.
"""

import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest

from tsltsynth.theory import (DIV, EQ, LE, LIA, LRA, LT, Atom, QF, Term,
                              TheoryError, canon_literal, canonicalize,
                              cube_vars, eval_cube, forall_is_sat, is_sat_cube,
                              make_cube, qe_exists, simplify_cube, to_smtlib,
                              unsat_core, wp)

T = Term.make


def atom(coeffs, const, rel=LE):
    return Atom(Term.make(coeffs, const), rel)


def lit(coeffs, const, rel=LE, pos=True):
    return (atom(coeffs, const, rel), pos)


# --- terms and evaluation ---------------------------------------------------

def test_term_free_vars():
    assert T({"x": 1, "i": 1}).free_vars() == {"x", "i"}
    assert Term.constant(5).free_vars() == set()
    assert atom({"x": 2, "y": 3}, -1).free_vars() == {"x", "y"}


def test_eval_examples():
    a = atom({"x": -1}, 0)  # -x <= 0, i.e. 0 <= x
    assert a.evaluate({"x": F(0)})
    b = atom({"x": 1}, -10, LT)  # x < 10
    assert not b.evaluate({"x": F(10)})
    t = T({"x1": F(8281, 10000), "x2": F(1719, 10000)})
    assert t.evaluate({"x1": F(1, 2), "x2": F(1, 2)}) == F(1, 2)


def test_eval_missing_binding():
    with pytest.raises(TheoryError):
        atom({"x": 1}, 0).evaluate({})


# --- canonicalization -------------------------------------------------------

def test_canonicalize_direction_preserved():
    # x+1 >= 0 is -x-1 <= 0
    a = canonicalize(Atom(T({"x": -1}, -1), LE), LIA)
    assert a == Atom(T({"x": -1}, -1), LE)


def test_canonicalize_gcd():
    assert canonicalize(Atom(T({"x": 2}, -4), LE), LIA) == Atom(T({"x": 1}, -2), LE)


def test_canonicalize_strictness_folded():
    assert canonicalize(Atom(T({"x": 1}, -10), LT), LIA) == \
        canonicalize(Atom(T({"x": 1}, -9), LE), LIA)


def test_canonicalize_lra_keeps_strict():
    a = canonicalize(Atom(T({"x": 2}, -1), LT), LRA)
    assert a.rel == LT and a.term == T({"x": 1}, F(-1, 2))


def test_canonicalize_idempotent_random():
    random.seed(5)
    for _ in range(300):
        th = random.choice([LIA, LRA])
        a = Atom(T({"x": random.randint(-6, 6), "y": random.randint(-6, 6)},
                   random.randint(-9, 9)),
                 random.choice([LE, LT, EQ]))
        c1 = canonicalize(a, th)
        assert canonicalize(c1, th) == c1
        # satisfaction preserved on sampled points
        for _ in range(20):
            v = {"x": F(random.randint(-15, 15)), "y": F(random.randint(-15, 15))}
            if a.term.is_constant and c1.term.is_constant:
                continue
            assert a.evaluate(v) == c1.evaluate(v)


def test_canon_literal_merges_complements():
    # x < 1 is the negation of x >= 1 over the integers
    l1 = canon_literal(Atom(T({"x": 1}, -1), LT), True, LIA)
    l2 = canon_literal(Atom(T({"x": -1}, 1), LE), True, LIA)  # 1-x <= 0
    assert l1[0] == l2[0] and l1[1] != l2[1]


def test_divisibility_canonical():
    a = canonicalize(Atom(T({"x": 2}, 0), DIV, 4), LIA)
    assert a.rel == DIV and a.modulus == 2
    assert canonicalize(Atom(T({}, 3), DIV, 3), LIA).rel == LE  # folds to true


# --- substitution and wp ----------------------------------------------------

def test_substitute_standard():
    # (x >= 0)[x := x+1]  ->  x >= -1
    a = Atom(T({"x": -1}, 0), LE)
    s = canonicalize(a.substitute({"x": T({"x": 1}, 1)}), LIA)
    assert s == canonicalize(Atom(T({"x": -1}, -1), LE), LIA)


def test_substitute_swap():
    a = Atom(T({"a": -1, "b": 1}, 0), LE)  # a >= b
    s = a.substitute({"a": Term.var("b"), "b": Term.var("a")})
    assert canonicalize(s, LIA) == canonicalize(Atom(T({"b": -1, "a": 1}, 0), LE), LIA)


def test_wp_examples():
    # u = {x -> x+1}, post {x' >= 5}  ->  {x >= 4}
    post = make_cube([lit({"x'": -1}, 5)], LIA)
    w = wp({"x": T({"x": 1}, 1)}, post, LIA)
    assert w == make_cube([lit({"x": -1}, 4)], LIA)
    # identity
    post2 = make_cube([lit({"x'": 1}, -10, LT)], LIA)
    assert wp({"x": Term.var("x")}, post2, LIA) == \
        make_cube([lit({"x": 1}, -10, LT)], LIA)
    # u = {x -> x+i}, post {0 <= x'}  ->  {0 <= x+i}
    post3 = make_cube([lit({"x'": -1}, 0)], LIA)
    assert wp({"x": T({"x": 1, "i": 1})}, post3, LIA) == \
        make_cube([lit({"x": -1, "i": -1}, 0)], LIA)


def test_wp_rejects_unprimed():
    with pytest.raises(TheoryError):
        wp({"x": Term.var("x")}, make_cube([lit({"x": 1}, 0)], LIA), LIA)


def test_wp_pointwise_random():
    random.seed(9)
    for _ in range(800):
        u = {"x": T({"x": random.choice([0, 1, -1]),
                     "i": random.choice([0, 1, -1])}, random.randint(-3, 3)),
             "y": T({"y": 1}, random.randint(-2, 2))}
        lits = []
        for _ in range(random.randint(1, 2)):
            tm = T({"x'": random.randint(-2, 2), "y'": random.randint(-2, 2),
                    "i'": random.randint(-1, 1)}, random.randint(-5, 5))
            lits.append((Atom(tm, random.choice([LE, EQ])),
                         random.random() < 0.8))
        post = make_cube(lits, LIA)
        if post is False:
            continue
        w = wp(u, post, LIA)
        rv = {"x": F(random.randint(-8, 8)), "y": F(random.randint(-8, 8)),
              "i": F(random.randint(-8, 8)), "i'": F(random.randint(-8, 8))}
        primed = {"x'": u["x"].evaluate(rv), "y'": u["y"].evaluate(rv),
                  "i'": rv["i'"]}
        lhs = (w is True) or (w is not False and eval_cube(w, rv))
        assert lhs == eval_cube(post, primed)


# --- satisfiability ---------------------------------------------------------

def test_sat_examples():
    c = make_cube([lit({"x": -1}, 0), lit({"x": 1}, -10, LT)], LIA)
    assert is_sat_cube(c, LIA) == {"x": F(0)}
    n = make_cube([lit({"x": -1}, 0, LE, False), lit({"x": 1}, -10, LT, False)], LIA)
    assert is_sat_cube(n, LIA) is None
    assert is_sat_cube((), LIA) == {}


def test_sat_water_tank_boundary_model():
    c = make_cube([lit({"x1": -1}, F(2, 10)), lit({"x1": 1}, F(-7, 10), LT),
                   lit({"x2": -1}, F(1, 10)), lit({"x2": 1}, F(-7, 10), LT)], LRA)
    assert is_sat_cube(c, LRA) == {"x1": F(1, 5), "x2": F(1, 10)}


def _rand_cube(rng, nvars, nlits, names=("x", "y", "z")):
    lits = []
    for _ in range(nlits):
        tm = T({v: rng.randint(-5, 5) for v in names[:nvars]},
               rng.randint(-10, 10))
        lits.append((Atom(tm, rng.choice([LE, LT, EQ])), rng.random() < 0.8))
    return make_cube(lits, LIA)


def _brute_box(cube, bound):
    """Vectorized integer-box search (the independent oracle)."""
    vs = sorted(cube_vars(cube))
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * len(vs)), indexing="ij")
    ok = np.ones(grids[0].shape, dtype=bool)
    for a, pos in cube:
        s = np.full(grids[0].shape, int(a.term.const), dtype=np.int64)
        for v, g in zip(vs, grids):
            s = s + int(a.term.coeff(v)) * g
        r = s <= 0 if a.rel == LE else (s < 0 if a.rel == LT else s == 0)
        ok &= (r == pos)
    if not ok.any():
        return None
    idx = np.unravel_index(np.argmax(ok), ok.shape)
    return {v: F(int(axis[i])) for v, i in zip(vs, idx)}


def test_sat_brute_force_oracle():
    rng = random.Random(12)
    n = 0
    for _ in range(250):
        c = _rand_cube(rng, rng.randint(1, 3), rng.randint(1, 4))
        if c is False:
            continue
        n += 1
        m = is_sat_cube(c, LIA)
        bound = min(1 + sum(abs(int(a.term.const)) for a, _ in c),
                    40 if len(cube_vars(c)) >= 3 else 70)
        brute = _brute_box(c, bound)
        if m is None:
            assert brute is None, (c, brute)
        else:
            assert eval_cube(c, m), (c, m)
    assert n > 150


def test_sat_model_is_lex_minimal_magnitude():
    # x in [3, 9]: model must be 3; x in [-9,-3]: model must be -3
    c = make_cube([lit({"x": -1}, 3), lit({"x": 1}, -9)], LIA)
    assert is_sat_cube(c, LIA) == {"x": F(3)}
    c2 = make_cube([lit({"x": 1}, 3), lit({"x": -1}, -9)], LIA)
    assert is_sat_cube(c2, LIA) == {"x": F(-3)}
    # ties prefer the positive value
    c3 = make_cube([(Atom(T({"x": 1}, 0), EQ), False),
                    lit({"x": -1}, -2), lit({"x": 1}, -2)], LIA)
    assert is_sat_cube(c3, LIA) == {"x": F(1)}


def test_sat_scale_independent_bounds():
    c = make_cube([lit({"x": -1}, 100000), lit({"x": 1}, -200000)], LIA)
    assert is_sat_cube(c, LIA) == {"x": F(100000)}


# --- unsat cores ------------------------------------------------------------

def test_core_examples():
    c = make_cube([lit({"x": -1}, 5), lit({"x": 1}, 0, LT),
                   (atom({"y": 1}, -3, EQ), True)], LIA)
    core = unsat_core(c, LIA)
    assert set(core) == set(make_cube([lit({"x": -1}, 5),
                                       lit({"x": 1}, 0, LT)], LIA))
    single = make_cube([lit({}, 1)], LIA)
    # trivial false literal collapses at cube construction
    assert single is False
    c2 = make_cube([lit({"x": 1}, 0, LT), lit({"x": -1}, 10),
                    lit({"x": -1}, 5)], LIA)
    core2 = unsat_core(c2, LIA)
    assert len(core2) == 2 and core2[0] == c2[0]


def test_core_on_sat_cube_raises():
    with pytest.raises(TheoryError):
        unsat_core(make_cube([lit({"x": 1}, 0)], LIA), LIA)


def test_core_properties_random():
    rng = random.Random(21)
    n = 0
    while n < 120:
        c = _rand_cube(rng, 2, rng.randint(2, 5))
        if c is False or is_sat_cube(c, LIA) is not None:
            continue
        n += 1
        core = unsat_core(c, LIA)
        assert is_sat_cube(core, LIA) is None
        assert set(core) <= set(c)
        for i in range(len(core)):
            assert is_sat_cube(core[:i] + core[i + 1:], LIA) is not None


# --- quantifier elimination -------------------------------------------------

def test_qe_examples():
    c = make_cube([lit({"i": -1}, 0), lit({"i": 1}, -5, LT),
                   lit({"x": -1, "i": -1}, 10)], LIA)
    r = qe_exists(["i"], c, LIA)
    # equivalent to x >= 6
    for xv in range(-30, 31):
        assert r.evaluate({"x": F(xv)}) == (xv >= 6)
    assert qe_exists(["i"], (), LIA).kind == "true"
    clash = make_cube([lit({"i": -1}, 0), lit({"i": 1}, 0, LT)], LIA)
    assert clash is False
    assert qe_exists(["i"], clash, LIA).kind == "false"


def test_qe_cooper_divisibility():
    # exists y. x = 2y  <=>  x even
    c = make_cube([(atom({"x": 1, "y": -2}, 0, EQ), True)], LIA)
    r = qe_exists(["y"], c, LIA)
    for xv in range(-8, 9):
        assert r.evaluate({"x": F(xv)}) == (xv % 2 == 0)


def test_qe_lra_fourier_motzkin():
    c = make_cube([lit({"i": -1}, 0), lit({"i": 1}, -5, LT),
                   lit({"x": -1, "i": -1}, 10)], LRA)
    r = qe_exists(["i"], c, LRA)
    for num in range(-40, 81):
        xv = F(num, 4)
        assert r.evaluate({"x": xv}) == (xv > 5)


def test_qe_random_oracle():
    rng = random.Random(31)
    n = 0
    for _ in range(150):
        c = _rand_cube(rng, 2, rng.randint(1, 3), names=("x", "y"))
        if c is False or "y" not in cube_vars(c):
            continue
        n += 1
        r = qe_exists(["y"], c, LIA)
        xs = np.arange(-25, 26, dtype=np.int64)[:, None]
        ys = np.arange(-90, 91, dtype=np.int64)[None, :]
        ok = np.ones((xs.size, ys.size), dtype=bool)
        for a, pos in c:
            s = int(a.term.const) + int(a.term.coeff("x")) * xs \
                + int(a.term.coeff("y")) * ys
            rr = s <= 0 if a.rel == LE else (s < 0 if a.rel == LT else s == 0)
            ok &= (rr == pos)
        expect = ok.any(axis=1)
        for j, xv in enumerate(range(-25, 26)):
            assert r.evaluate({"x": F(xv)}) == bool(expect[j]), (c, xv)
    assert n > 80


def test_forall_examples():
    f1 = make_cube([(atom({"i'": 1}, 0, EQ), True)], LIA)
    assert not forall_is_sat(["i'"], f1, LIA)
    f2 = make_cube([lit({"x": 1}, 0, LT)], LIA)
    assert forall_is_sat(["i'"], f2, LIA)
    assert forall_is_sat(["i'"], (), LIA)


def test_simplify_cube_ladder():
    c = make_cube([lit({"x": -1}, 1), lit({"x": -1}, 2), lit({"x": -1}, 5)], LIA)
    s = simplify_cube(c, LIA)
    assert s == make_cube([lit({"x": -1}, 5)], LIA)


def test_smtlib_printer():
    c = make_cube([lit({"x": -1}, 0), lit({"x": 1}, -9)], LIA)
    text = to_smtlib(c, LIA)
    assert "declare-const x Int" in text and "assert" in text
