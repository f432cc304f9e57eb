"""Product-logic reduction: counter formulas on product frames, machine-run
formulas with the active-branch bookkeeping, and tree extraction."""

import pytest

from bimodal import formula as fm
from bimodal import atm as am
from bimodal.semantics import validate, S4S5_PRODUCT, BimodalModel
from bimodal.red_ssl import ReductionParams, ExtractionError
from bimodal.red_s4s5 import (counter_catalog_s4s5, gen_counter_s4s5,
                              build_counter_s4s5_model,
                              extract_counter_trace_s4s5, f_s4s5_catalog,
                              gen_f_s4s5, build_f_s4s5_model,
                              extract_accepting_tree_s4s5,
                              check_morphism_s4s5)
from tests.conftest import M1_PATH


def decode_counter(model, point, cat, n):
    return sum(1 << k for k in range(n)
               if model.eval(point, fm.shared_var_s4s5(k, cat)))


@pytest.fixture(scope="module")
def m1_module():
    return am.parse_atm(M1_PATH.read_text())


@pytest.fixture(scope="module")
def params_ab(m1_module):
    return ReductionParams(m1_module, [2, 1], "ab")


@pytest.fixture(scope="module")
def s4s5_setup(params_ab):
    f, cat = gen_f_s4s5(params_ab)
    tree = am.find_accepting_tree(params_ab.atm, "ab", 2 ** params_ab.N - 1)
    model, p0 = build_f_s4s5_model(params_ab, tree)
    return params_ab, f, cat, tree, model, p0


# --- counter -----------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_counter_product_model(n):
    f, cat = gen_counter_s4s5(n)
    model, p0 = build_counter_s4s5_model(n)
    assert model.is_product
    assert len(model.worlds) == 4 ** n
    assert validate(model, S4S5_PRODUCT).ok
    assert model.eval(p0, f)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_counter_trace_decodes_to_all_values(n):
    _, cat = gen_counter_s4s5(n)
    model, p0 = build_counter_s4s5_model(n)
    p_points, p_prime = extract_counter_trace_s4s5(model, p0, n)
    assert len(p_points) == 2 ** n
    values = [decode_counter(model, p, cat, n) for p in p_points]
    assert values == list(range(2 ** n))


def test_counter_catalog_layout():
    cat = counter_catalog_s4s5(2)
    assert cat.atom("A", 0) == 0 and cat.atom("A", 1) == 1
    assert cat.atom("X", 0) == 2 and cat.atom("X", 1) == 3


def test_counter_generation_is_deterministic():
    f1, _ = gen_counter_s4s5(3)
    f2, _ = gen_counter_s4s5(3)
    assert fm.render(f1) == fm.render(f2)


# --- machine-run formula -----------------------------------------------------

def test_f_s4s5_catalog_families(params_ab):
    cat = f_s4s5_catalog(params_ab)
    N = params_ab.N
    for family, length in (("A_time", N), ("X_prevtime", N), ("X_tapv", N),
                           ("A_pos", N + 1), ("X_pos", N + 1),
                           ("A_prevpos", N + 1), ("X_prevpos", N + 1)):
        assert len(cat.vector(family, length)) == length
    for q in params_ab.atm.states:
        cat.atom("A_state", q)
    for s in params_ab.atm.symbols:
        cat.atom("A_read", s)
        cat.atom("A_written", s)
        cat.atom("X_read", s)
    cat.atom("B_active")


def test_f_s4s5_is_deterministic(params_ab):
    f1, _ = gen_f_s4s5(params_ab)
    f2, _ = gen_f_s4s5(params_ab)
    assert fm.render(f1) == fm.render(f2)


def test_f_s4s5_witness_model(s4s5_setup):
    params, f, cat, tree, model, p0 = s4s5_setup
    assert model.is_product
    assert validate(model, S4S5_PRODUCT).ok
    assert model.eval(p0, f)


def test_f_s4s5_extraction_round_trip(s4s5_setup):
    params, f, cat, tree, model, p0 = s4s5_setup
    extracted, pi = extract_accepting_tree_s4s5(model, p0, params)
    assert am.validate_tree(params.atm, params.w, extracted).ok
    assert am.trees_label_equal(extracted, tree)
    assert check_morphism_s4s5(model, p0, params, extracted, pi).ok


def test_f_s4s5_extraction_flags_wrong_start(s4s5_setup):
    params, f, cat, tree, model, p0 = s4s5_setup
    atom = cat.atom("A_state", params.atm.init)
    valuation = {a: set(s) for a, s in model.valuation.items()}
    valuation[atom] = {w for w in valuation[atom]
                       if not w.startswith(p0.split("|")[0] + "|")}
    broken = BimodalModel(model.worlds, model.rel_d, model.rel_l, valuation,
                          frame_class=model.frame_class, designated=p0,
                          is_product=True)
    with pytest.raises(ExtractionError) as err:
        extract_accepting_tree_s4s5(broken, p0, params)
    assert err.value.kind == "witness-not-found"


def test_extractions_agree_across_logics(m1_module):
    from bimodal.red_ssl import gen_f_ssl, build_f_ssl_model, \
        extract_accepting_tree_ssl
    params = ReductionParams(m1_module, [2, 1], "a")
    tree = am.find_accepting_tree(params.atm, "a", 2 ** params.N - 1)
    ssl_model, sp = build_f_ssl_model(params, tree)
    t1, _ = extract_accepting_tree_ssl(ssl_model, sp, params)
    prod_model, pp = build_f_s4s5_model(params, tree)
    t2, _ = extract_accepting_tree_s4s5(prod_model, pp, params)
    assert am.trees_label_equal(t1, t2)
