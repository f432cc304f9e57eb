"""Acceptance suite: ten end-to-end criteria, one pass/fail line each.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
lines.  Every criterion recomputes its inputs from scratch; nothing is
shared with the unit tests.
"""

import itertools
import random
import time

import pytest

from bimodal import formula as fm
from bimodal import atm as am
from bimodal.formula import Atom, Not, And, K, Box, L, Diamond
from bimodal.semantics import (BimodalModel, validate, save_model, load_model,
                               CROSS_AXIOM, S4S5_COMMUTATOR, K4S5_COMMUTATOR,
                               S4S5_PRODUCT)
from bimodal.red_ssl import (ReductionParams, ExtractionError,
                             gen_counter_ssl, build_counter_ssl_model,
                             extract_counter_trace, gen_f_ssl,
                             build_f_ssl_model, extract_accepting_tree_ssl)
from bimodal.red_s4s5 import (gen_counter_s4s5, build_counter_s4s5_model,
                              extract_counter_trace_s4s5, gen_f_s4s5,
                              build_f_s4s5_model, extract_accepting_tree_s4s5)
from bimodal.translations import (t_ssl_to_s4s5, lift_model_ssl_to_s4s5,
                                  restrict_model_s4s5_to_ssl, t_s4s5_to_k4s5,
                                  k4_to_s4_model)
from bimodal.satbound import bounded_sat
from tests.conftest import M1_PATH


def conclude(number, label, ok, budget, elapsed):
    status = "pass" if (ok and elapsed <= budget) else "fail"
    print(f"criterion {number} ({label}): {status} [{elapsed:.1f}s]")
    assert ok, f"criterion {number} ({label}) failed"
    assert elapsed <= budget, (
        f"criterion {number} ({label}) exceeded {budget}s: {elapsed:.1f}s")


def load_m1():
    return am.parse_atm(M1_PATH.read_text())


def random_formula(rng, max_atoms=2, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return Atom(rng.randrange(max_atoms))
    op = rng.choice(["not", "and", "K", "box"])
    if op == "and":
        return And(random_formula(rng, max_atoms, depth - 1),
                   random_formula(rng, max_atoms, depth - 1))
    child = random_formula(rng, max_atoms, depth - 1)
    return {"not": Not, "K": K, "box": Box}[op](child)


def test_criterion_01_counter_ssl():
    start = time.monotonic()
    ok = True
    for n in (1, 2, 3, 4):
        f, cat = gen_counter_ssl(n)
        model, p0 = build_counter_ssl_model(n)
        ok = ok and validate(model, CROSS_AXIOM).ok
        ok = ok and model.eval(p0, f)
        p_points, _ = extract_counter_trace(model, p0, n)
        ok = ok and len(p_points) == 2 ** n
        values = [sum(1 << k for k in range(n)
                      if model.eval(p, fm.shared_var_ssl(k, cat)))
                  for p in p_points]
        ok = ok and values == list(range(2 ** n))
    conclude(1, "counter ssl", ok, 10.0, time.monotonic() - start)


def test_criterion_02_counter_s4s5():
    start = time.monotonic()
    ok = True
    for n in (1, 2, 3, 4):
        f, cat = gen_counter_s4s5(n)
        model, p0 = build_counter_s4s5_model(n)
        ok = ok and len(model.worlds) == 4 ** n
        ok = ok and validate(model, S4S5_PRODUCT).ok
        ok = ok and model.eval(p0, f)
        p_points, _ = extract_counter_trace_s4s5(model, p0, n)
        values = [sum(1 << k for k in range(n)
                      if model.eval(p, fm.shared_var_s4s5(k, cat)))
                  for p in p_points]
        ok = ok and values == list(range(2 ** n))
    conclude(2, "counter s4s5", ok, 30.0, time.monotonic() - start)


def test_criterion_03_f_ssl_end_to_end():
    start = time.monotonic()
    machine = load_m1()
    ok = True
    for w in ("a", "ab"):
        params = ReductionParams(machine, [2, 1], w)
        f, _ = gen_f_ssl(params)
        tree = am.find_accepting_tree(machine, w, 2 ** params.N - 1)
        ok = ok and tree is not None
        model, p0 = build_f_ssl_model(params, tree)
        ok = ok and validate(model, CROSS_AXIOM).ok
        ok = ok and model.eval(p0, f)
        extracted, _ = extract_accepting_tree_ssl(model, p0, params)
        ok = ok and am.validate_tree(machine, w, extracted).ok
        ok = ok and am.trees_label_equal(extracted, tree)
    conclude(3, "f ssl end-to-end", ok, 240.0, time.monotonic() - start)


def test_criterion_04_f_s4s5_end_to_end():
    start = time.monotonic()
    machine = load_m1()
    ok = True
    for w in ("a", "ab"):
        params = ReductionParams(machine, [2, 1], w)
        f, _ = gen_f_s4s5(params)
        tree = am.find_accepting_tree(machine, w, 2 ** params.N - 1)
        model, p0 = build_f_s4s5_model(params, tree)
        ok = ok and validate(model, S4S5_PRODUCT).ok
        ok = ok and model.eval(p0, f)
        extracted, _ = extract_accepting_tree_s4s5(model, p0, params)
        ok = ok and am.validate_tree(machine, w, extracted).ok
        # must agree with the subset-space extraction on the same input
        ssl_model, sp = build_f_ssl_model(params, tree)
        ssl_tree, _ = extract_accepting_tree_ssl(ssl_model, sp, params)
        ok = ok and am.trees_label_equal(extracted, ssl_tree)
    conclude(4, "f s4s5 end-to-end", ok, 240.0, time.monotonic() - start)


def test_criterion_05_translation_ssl_to_s4s5():
    start = time.monotonic()
    ok = True

    def round_trip(f, model, point):
        good = True
        result = t_ssl_to_s4s5(f)
        lifted, lp = lift_model_ssl_to_s4s5(model, point, result.main_atom)
        good = good and validate(lifted, S4S5_COMMUTATOR).ok
        good = good and lifted.eval(lp, result.formula)
        back, bp = restrict_model_s4s5_to_ssl(lifted, lp, f)
        good = good and validate(back, CROSS_AXIOM).ok
        good = good and back.eval(bp, f)
        return good

    f, _ = gen_counter_ssl(2)
    model, p0 = build_counter_ssl_model(2)
    ok = ok and round_trip(f, model, p0)

    rng = random.Random(20260823)
    found = 0
    while found < 20:
        f = random_formula(rng)
        verdict = bounded_sat(f, CROSS_AXIOM, max_points=4)
        if not verdict.satisfiable:
            continue
        found += 1
        ok = ok and round_trip(f, verdict.model, verdict.point)
    conclude(5, "translation ssl to s4s5", ok, 60.0, time.monotonic() - start)


def test_criterion_06_translation_s4s5_to_k4s5():
    start = time.monotonic()
    ok = True
    rng = random.Random(20260824)
    restored = 0
    attempts = 0
    while restored < 20 and attempts < 2000:
        attempts += 1
        f = random_formula(rng)
        result = t_s4s5_to_k4s5(f)
        s4_verdict = bounded_sat(f, S4S5_COMMUTATOR, max_points=4)
        if s4_verdict.satisfiable:
            # reflexivity instances are tautologies on these witnesses
            ok = ok and s4_verdict.model.eval(s4_verdict.point,
                                              result.formula)
        k4_verdict = bounded_sat(result.formula, K4S5_COMMUTATOR,
                                 max_points=4)
        if not k4_verdict.satisfiable:
            continue
        restored += 1
        out, p = k4_to_s4_model(k4_verdict.model, k4_verdict.point, f)
        ok = ok and validate(out, S4S5_COMMUTATOR).ok
        ok = ok and out.eval(p, f)
    ok = ok and restored == 20
    conclude(6, "translation s4s5 to k4s5", ok, 60.0,
             time.monotonic() - start)


def test_criterion_07_macro_truth_tables():
    start = time.monotonic()
    ok = True

    def peval(f, assign):
        if f.kind == fm.ATOM:
            return assign[f.value]
        if f.kind == fm.NOT:
            return not peval(f.left, assign)
        return peval(f.left, assign) and peval(f.right, assign)

    for l in (1, 2, 3, 4):
        F = fm.FormulaVector.of_atoms(range(l - 1, -1, -1))
        G = fm.FormulaVector.of_atoms(range(2 * l - 1, l - 1, -1))
        for bits in itertools.product([0, 1], repeat=2 * l):
            assign = dict(enumerate(bits))
            x = sum(1 << k for k in range(l) if bits[k])
            y = sum(1 << k for k in range(l) if bits[l + k])
            for k in range(-1, l):
                ok = ok and peval(fm.eq_vector(F, G, k), assign) == \
                    ((x >> (k + 1)) == (y >> (k + 1)))
            ok = ok and peval(fm.neq(F, G), assign) == (x != y)
            ok = ok and peval(fm.lt(F, G), assign) == (x < y)
            ok = ok and peval(fm.leq(F, G), assign) == (x <= y)
            ok = ok and peval(fm.plus1(F, G), assign) == (x == y + 1)
            ok = ok and peval(fm.neq_plus1(F, G), assign) == (x != y + 1)
            ok = ok and peval(fm.unique(F), assign) == \
                (sum(bits[:l]) == 1)
            for k in range(l):
                low_zero = min((h for h in range(l) if not bits[h]),
                               default=None)
                low_one = min((h for h in range(l) if bits[h]), default=None)
                ok = ok and peval(fm.rightmost_zero(F, k), assign) == \
                    (low_zero == k)
                ok = ok and peval(fm.rightmost_one(F, k), assign) == \
                    (low_one == k)
            for i in range(2 ** l):
                ok = ok and peval(fm.eq_binary(F, i), assign) == (x == i)
                ok = ok and peval(fm.lt_binary(F, i), assign) == (x < i)
                ok = ok and peval(fm.leq_binary(F, i), assign) == (x <= i)
                ok = ok and peval(fm.gt_binary(F, i), assign) == (x > i)
    # the persistence gadget is modal; check its fixed expansion instead
    F1 = fm.FormulaVector.of_atoms([0])
    ok = ok and fm.persistent_macro(F1) is K(fm.Or(Box(Atom(0)),
                                                   Box(Not(Atom(0)))))
    conclude(7, "macro truth tables", ok, 10.0, time.monotonic() - start)


CORPUS = [
    # (formula, frame class, expected satisfiable within default bounds)
    ("x0", CROSS_AXIOM, True),
    ("x0", S4S5_COMMUTATOR, True),
    ("x0", K4S5_COMMUTATOR, True),
    ("x0", S4S5_PRODUCT, True),
    ("(x0 & !x0)", CROSS_AXIOM, False),
    ("(x0 & !x0)", K4S5_COMMUTATOR, False),
    # a diamond needs a successor that the box then forbids: false everywhere
    ("(<>x0 & []!x0)", CROSS_AXIOM, False),
    ("(<>x0 & []!x0)", S4S5_COMMUTATOR, False),
    ("(<>x0 & []!x0)", K4S5_COMMUTATOR, False),
    ("(<>x0 & []!x0)", S4S5_PRODUCT, False),
    # box against the current point: only a K4 dead end escapes
    ("(x0 & []!x0)", CROSS_AXIOM, False),
    ("(x0 & []!x0)", S4S5_COMMUTATOR, False),
    ("(x0 & []!x0)", S4S5_PRODUCT, False),
    ("(x0 & []!x0)", K4S5_COMMUTATOR, True),
    ("[](x0 & !x0)", S4S5_COMMUTATOR, False),
    ("[](x0 & !x0)", K4S5_COMMUTATOR, True),
    # the epistemic relation is reflexive in every class
    ("(Kx0 & !x0)", CROSS_AXIOM, False),
    ("(Kx0 & !x0)", S4S5_PRODUCT, False),
    ("(Lx0 & K!x0)", CROSS_AXIOM, False),
    ("(Lx0 & K!x0)", K4S5_COMMUTATOR, False),
    ("(x0 & L!x0)", CROSS_AXIOM, True),
    ("(x0 & L!x0)", S4S5_PRODUCT, True),
    # atom loss along a proper step: blocked only by cross-axiom persistence
    ("(x0 & <>!x0)", CROSS_AXIOM, False),
    ("(x0 & <>!x0)", S4S5_COMMUTATOR, True),
    ("(x0 & <>!x0)", S4S5_PRODUCT, True),
    # commuting-diamond principle: needs right commutativity
    ("(<>Lx0 & K[]!x0)", S4S5_COMMUTATOR, False),
    ("(<>Lx0 & K[]!x0)", S4S5_PRODUCT, False),
    ("K(x0 | !x0)", K4S5_COMMUTATOR, True),
    ("!(x0 -> x0)", S4S5_PRODUCT, False),
    ("(!Kx0 & x0)", S4S5_PRODUCT, True),
]


def test_criterion_08_oracle_corpus():
    start = time.monotonic()
    assert len(CORPUS) == 30
    ok = True
    for text, frame_class, expected in CORPUS:
        verdict = bounded_sat(fm.parse(text), frame_class)
        agrees = verdict.satisfiable == expected
        if verdict.satisfiable:
            agrees = agrees and validate(verdict.model, frame_class).ok
            agrees = agrees and verdict.model.eval(verdict.point,
                                                   fm.parse(text))
        if not agrees:
            print(f"  corpus mismatch: {text} on {frame_class}: "
                  f"got {verdict.satisfiable}, expected {expected}")
        ok = ok and agrees
    conclude(8, "oracle corpus", ok, 300.0, time.monotonic() - start)


def test_criterion_09_output_size_growth():
    start = time.monotonic()
    machine = load_m1()
    ok = True
    for gen in (gen_f_ssl, gen_f_s4s5):
        sizes = {}
        for N in (3, 4, 5, 6):
            params = ReductionParams(machine, [N - 1, 1], "a")
            f, _ = gen(params)
            sizes[N] = fm.rendered_size(f)
        C = sizes[3] / 9
        for N in (4, 5, 6):
            if sizes[N] > C * N * N:
                print(f"  {gen.__name__}: size({N}) = {sizes[N]} exceeds "
                      f"C*N^2 = {C * N * N:.0f} (C = size(3)/9)")
                ok = False
    conclude(9, "output size growth", ok, 60.0, time.monotonic() - start)


def test_criterion_10_mutation_suite():
    start = time.monotonic()
    ok = True
    caught = []

    def mutation(name, expected_kind, actual_kinds):
        hit = expected_kind in actual_kinds
        caught.append(hit)
        status = "pass" if hit else "fail"
        print(f"  mutation {name}: {status} (expected {expected_kind}, "
              f"got {sorted(actual_kinds)})")

    def failed_checks(model, frame_class):
        return {c.name for c in validate(model, frame_class).checks
                if not c.passed}

    counter_f, counter_cat = gen_counter_ssl(2)
    base, p0 = build_counter_ssl_model(2)

    def rebuild(rel_d=None, rel_l=None, valuation=None):
        return BimodalModel(
            base.worlds,
            base.rel_d if rel_d is None else rel_d,
            base.rel_l if rel_l is None else rel_l,
            base.valuation if valuation is None else valuation,
            frame_class=base.frame_class, designated=p0)

    # 1: drop one direction of an L-edge between distinct points
    a, b = next((x, y) for x, y in base.rel_l if x != y)
    mutation("l-edge one-way removal", "l-symmetric",
             failed_checks(rebuild(rel_l=set(base.rel_l) - {(a, b)}),
                           CROSS_AXIOM))

    # 2: drop a reflexive d-loop
    mutation("d-loop removal", "d-reflexive",
             failed_checks(rebuild(rel_d=set(base.rel_d) - {(p0, p0)}),
                           CROSS_AXIOM))

    # 3: drop the composite edge of a d-chain
    chain = next((x, z) for x, y in base.rel_d if x != y
                 for y2, z in base.rel_d
                 if y2 == y and z != y and z != x and (x, z) in base.rel_d)
    mutation("d-chain shortcut removal", "d-transitive",
             failed_checks(rebuild(rel_d=set(base.rel_d) - {chain}),
                           CROSS_AXIOM))

    # 4: flip an atom off at the far end of a proper d-step
    atom, target = next(
        (at, y) for at, members in sorted(base.valuation.items())
        for x, y in sorted(base.rel_d)
        if x != y and x in members and y in members)
    valuation = {k: set(s) for k, s in base.valuation.items()}
    valuation[atom] = valuation[atom] - {target}
    mutation("persistent-atom bit flip", "atom-persistence",
             failed_checks(rebuild(valuation=valuation), CROSS_AXIOM))

    # 5: remove a commuting edge from a product model
    prod, pp0 = build_counter_s4s5_model(2)
    pd = next((x, y) for x, y in prod.rel_d if x != y)
    broken_prod = BimodalModel(prod.worlds, set(prod.rel_d) - {pd},
                               prod.rel_l, prod.valuation,
                               frame_class=S4S5_COMMUTATOR, designated=pp0)
    mutation("product d-edge removal", "right-commutativity",
             failed_checks(broken_prod, S4S5_COMMUTATOR))

    # 6: counter model with a flipped counter bit at the start point
    cval = {k: set(s) for k, s in base.valuation.items()}
    cval.setdefault(counter_cat.atom("A", 0), set()).add(p0)
    broken_counter = rebuild(valuation=cval)
    try:
        extract_counter_trace(broken_counter, p0, 2)
        kinds = set()
    except ExtractionError as err:
        kinds = {err.kind}
    mutation("counter bit flip", "extraction-failure", kinds)

    # 7: machine-run witness with the root marker removed
    machine = load_m1()
    params = ReductionParams(machine, [2, 1], "a")
    tree = am.find_accepting_tree(machine, "a", 2 ** params.N - 1)
    wmodel, wp = build_f_ssl_model(params, tree)
    wval = {k: set(s) for k, s in wmodel.valuation.items()}
    from bimodal.red_ssl import f_ssl_catalog
    wcat = f_ssl_catalog(params)
    wval[wcat.atom("B")] = wval[wcat.atom("B")] - {wp}
    broken_witness = BimodalModel(wmodel.worlds, wmodel.rel_d, wmodel.rel_l,
                                  wval, frame_class=wmodel.frame_class,
                                  designated=wp)
    try:
        extract_accepting_tree_ssl(broken_witness, wp, params)
        kinds = set()
    except ExtractionError as err:
        kinds = {err.kind}
    mutation("witness root-marker removal", "witness-not-found", kinds)

    # 8: machine-run witness with the root's L-edges removed
    rel_l = [(x, y) for x, y in wmodel.rel_l
             if not (x == wp) ^ (y == wp)]
    cut_witness = BimodalModel(wmodel.worlds, wmodel.rel_d, rel_l,
                               wmodel.valuation,
                               frame_class=wmodel.frame_class, designated=wp)
    try:
        extract_accepting_tree_ssl(cut_witness, wp, params)
        kinds = set()
    except ExtractionError as err:
        kinds = {err.kind}
    mutation("witness root isolation", "witness-not-found", kinds)

    # 9: accepting tree with a relabeled leaf
    bad_tree = am.find_accepting_tree(machine, "a", 7)
    leaf = bad_tree.leaves()[0]
    old = bad_tree.configs[leaf]
    bad_tree.configs[leaf] = am.Configuration("q1", old.head, old.tape)
    mutation("tree leaf relabel", "leaves-accept",
             {c.name for c in am.validate_tree(machine, "a", bad_tree).checks
              if not c.passed})

    # 10: accepting tree missing a universal branch
    bad_tree2 = am.find_accepting_tree(machine, "a", 7)
    universal = [v for v in bad_tree2.nodes()
                 if bad_tree2.configs[v].state == "q1"][0]
    dropped = bad_tree2.children[universal].pop()
    bad_tree2.configs.pop(dropped)
    bad_tree2.parent.pop(dropped)
    mutation("tree universal branch removal", "universal-nodes-complete",
             {c.name for c in am.validate_tree(machine, "a", bad_tree2).checks
              if not c.passed})

    ok = len(caught) == 10 and all(caught)
    conclude(10, "mutation suite", ok, 60.0, time.monotonic() - start)
