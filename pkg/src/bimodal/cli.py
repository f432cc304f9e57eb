"""Command-line surface: generation, model building, checking, extraction,
translation, bounded satisfiability, and an end-to-end verification
pipeline.  Every subcommand is a thin composition of library calls and
prints a plain `key: value` report.

Exit codes: 0 when all checks pass, 1 when a check fails, 2 on usage
errors.
"""

import argparse
import sys

from . import formula as fm
from .catalog import VariableCatalog
from .semantics import (FRAME_CLASSES, CROSS_AXIOM, S4S5_PRODUCT,
                        load_model, save_model, validate)
from . import atm as atm_mod
from . import red_ssl, red_s4s5
from .red_ssl import ReductionParams, ExtractionError
from . import translations
from . import satbound


class CheckFailure(Exception):
    """A semantic check failed; the report already explains it."""


def _read(path):
    with open(path, "r", encoding="utf-8") as h:
        return h.read()


def _write(path, text):
    with open(path, "w", encoding="utf-8") as h:
        h.write(text)


def _parse_poly(text):
    try:
        coeffs = [int(c) for c in text.split(",")]
    except ValueError:
        raise CheckFailure(f"bad polynomial {text!r}: expected c0,c1,...")
    return coeffs


def _load_params(args):
    machine = atm_mod.parse_atm(_read(args.atm))
    return ReductionParams(machine, _parse_poly(args.poly), args.w)


def _emit(lines):
    for line in lines:
        print(line)


def _gen(args):
    if args.kind in ("counter-ssl", "counter-s4s5"):
        if args.n is None:
            raise CheckFailure("gen counter-* requires --n")
        if args.kind == "counter-ssl":
            f, cat = red_ssl.gen_counter_ssl(args.n)
        else:
            f, cat = red_s4s5.gen_counter_s4s5(args.n)
    else:
        if not (args.atm and args.w is not None and args.poly):
            raise CheckFailure("gen f-* requires --atm, --w and --poly")
        params = _load_params(args)
        if args.kind == "f-ssl":
            f, cat = red_ssl.gen_f_ssl(params)
        else:
            f, cat = red_s4s5.gen_f_s4s5(params)
    text = fm.render(f) + "\n"
    report = [f"command: gen {args.kind}", f"size: {fm.rendered_size(f)}",
              f"atoms: {len(cat)}"]
    if args.out:
        _write(args.out, text)
        report.append(f"formula-file: {args.out}")
    else:
        report.append(f"formula: {fm.render(f)}")
    if args.catalog:
        _write(args.catalog, cat.dump())
        report.append(f"catalog-file: {args.catalog}")
    report.append("result: pass")
    _emit(report)


def _build(args):
    params = _load_params(args)
    time_bound = 2 ** params.N - 1
    tree = atm_mod.find_accepting_tree(params.atm, params.w, time_bound)
    if tree is None:
        raise CheckFailure(
            f"the machine does not accept {args.w!r} within {time_bound} steps")
    if args.logic == "ssl":
        model, point = red_ssl.build_f_ssl_model(params, tree)
        f, _ = red_ssl.gen_f_ssl(params)
    else:
        model, point = red_s4s5.build_f_s4s5_model(params, tree)
        f, _ = red_s4s5.gen_f_s4s5(params)
    holds = model.eval(point, f)
    report = [f"command: build model {args.logic}",
              f"worlds: {len(model.worlds)}",
              f"designated: {point}",
              f"formula-holds: {'pass' if holds else 'fail'}"]
    if args.out:
        _write(args.out, save_model(model))
        report.append(f"model-file: {args.out}")
    if args.tree_out:
        _write(args.tree_out, atm_mod.save_tree(tree))
        report.append(f"tree-file: {args.tree_out}")
    report.append(f"result: {'pass' if holds else 'fail'}")
    _emit(report)
    if not holds:
        raise CheckFailure("generated formula is false on its witness model")


def _check(args):
    model = load_model(_read(args.model))
    f = fm.parse(_read(args.formula))
    point = args.point if args.point is not None else model.designated
    if point is None:
        raise CheckFailure("no --point given and the model has no designated world")
    report = [f"command: check"]
    if args.frame_class:
        vr = validate(model, args.frame_class)
        report.extend(vr.lines()[:-1])
        if not vr.ok:
            report.append("result: fail")
            _emit(report)
            raise CheckFailure("frame validation failed")
    holds = model.eval(point, f)
    report.append(f"point: {point}")
    report.append(f"holds: {'pass' if holds else 'fail'}")
    report.append(f"result: {'pass' if holds else 'fail'}")
    _emit(report)
    if not holds:
        raise CheckFailure("formula is false at the given point")


def _extract(args):
    model = load_model(_read(args.model))
    point = args.point if args.point is not None else model.designated
    if args.kind == "trace":
        if args.n is None:
            raise CheckFailure("extract trace requires --n")
        extractor = (red_ssl.extract_counter_trace if args.logic == "ssl"
                     else red_s4s5.extract_counter_trace_s4s5)
        p_points, p_prime = extractor(model, point, args.n)
        report = [f"command: extract trace {args.logic}",
                  f"steps: {len(p_points)}"]
        for i, p in enumerate(p_points):
            report.append(f"p{i}: {p}")
        for i, p in enumerate(p_prime):
            report.append(f"p'{i}: {p}")
        report.append("result: pass")
        _emit(report)
    else:
        params = _load_params(args)
        extractor = (red_ssl.extract_accepting_tree_ssl if args.logic == "ssl"
                     else red_s4s5.extract_accepting_tree_s4s5)
        tree, _pi = extractor(model, point, params)
        report = [f"command: extract tree {args.logic}",
                  f"nodes: {len(tree.configs)}",
                  f"height: {tree.height()}"]
        if args.out:
            _write(args.out, atm_mod.save_tree(tree))
            report.append(f"tree-file: {args.out}")
        report.append("result: pass")
        _emit(report)


def _translate(args):
    f = fm.parse(_read(args.formula))
    if args.kind == "ssl-s4s5":
        result = translations.t_ssl_to_s4s5(f)
        extra = [f"main-atom: {result.main_atom}"]
    else:
        result = translations.t_s4s5_to_k4s5(f)
        extra = [f"box-subformulas: {len(result.box_subformulas)}"]
    text = fm.render(result.formula) + "\n"
    report = [f"command: translate {args.kind}",
              f"size: {fm.rendered_size(result.formula)}"] + extra
    if args.out:
        _write(args.out, text)
        report.append(f"formula-file: {args.out}")
    else:
        report.append(f"formula: {fm.render(result.formula)}")
    report.append("result: pass")
    _emit(report)


def _lift(args):
    model = load_model(_read(args.model))
    point = args.point if args.point is not None else model.designated
    f = fm.parse(_read(args.formula))
    result = translations.t_ssl_to_s4s5(f)
    lifted, point = translations.lift_model_ssl_to_s4s5(model, point,
                                                        result.main_atom)
    holds = lifted.eval(point, result.formula)
    report = [f"command: lift", f"worlds: {len(lifted.worlds)}",
              f"translated-holds: {'pass' if holds else 'fail'}"]
    if args.out:
        _write(args.out, save_model(lifted))
        report.append(f"model-file: {args.out}")
    report.append(f"result: {'pass' if holds else 'fail'}")
    _emit(report)
    if not holds:
        raise CheckFailure("translated formula is false on the lifted model")


def _restrict(args):
    model = load_model(_read(args.model))
    point = args.point if args.point is not None else model.designated
    f = fm.parse(_read(args.formula))
    restricted, point = translations.restrict_model_s4s5_to_ssl(model, point, f)
    holds = restricted.eval(point, f)
    report = [f"command: restrict", f"worlds: {len(restricted.worlds)}",
              f"formula-holds: {'pass' if holds else 'fail'}"]
    if args.out:
        _write(args.out, save_model(restricted))
        report.append(f"model-file: {args.out}")
    report.append(f"result: {'pass' if holds else 'fail'}")
    _emit(report)
    if not holds:
        raise CheckFailure("formula is false on the restricted model")


def _sat(args):
    f = fm.parse(_read(args.formula))
    verdict = satbound.bounded_sat(f, args.frame_class,
                                   max_points=args.bound,
                                   max_atoms=args.max_atoms)
    report = [f"command: sat", f"class: {args.frame_class}"]
    if verdict.satisfiable:
        report.append("verdict: sat")
        report.append(f"worlds: {len(verdict.model.worlds)}")
        report.append(f"point: {verdict.point}")
        if args.out:
            _write(args.out, save_model(verdict.model))
            report.append(f"model-file: {args.out}")
    else:
        report.append("verdict: unsat-within-bound")
        report.append(f"max-points: {verdict.max_points}")
    report.append("result: pass")
    _emit(report)


def _atm_run(args):
    machine = atm_mod.parse_atm(_read(args.atm))
    tree = atm_mod.find_accepting_tree(machine, args.w, args.fuel)
    report = [f"command: atm run", f"input: {args.w}", f"fuel: {args.fuel}"]
    if tree is None:
        report.append("accepts: fail")
        report.append("result: fail")
        _emit(report)
        raise CheckFailure("the machine does not accept within the fuel bound")
    report.append("accepts: pass")
    report.append(f"tree-nodes: {len(tree.configs)}")
    report.append(f"tree-height: {tree.height()}")
    if args.out:
        _write(args.out, atm_mod.save_tree(tree))
        report.append(f"tree-file: {args.out}")
    report.append("result: pass")
    _emit(report)


def _verify(args):
    params = _load_params(args)
    report = [f"command: verify pipeline", f"input: {args.w}",
              f"window-bits: {params.N}"]
    checks = []

    def check(name, ok):
        checks.append(ok)
        report.append(f"{name}: {'pass' if ok else 'fail'}")

    time_bound = 2 ** params.N - 1
    tree = atm_mod.find_accepting_tree(params.atm, params.w, time_bound)
    check("accepting-tree-found", tree is not None)
    if tree is None:
        report.append("result: fail")
        _emit(report)
        raise CheckFailure("no accepting tree")

    trees = {}
    for logic, red in (("ssl", red_ssl), ("s4s5", red_s4s5)):
        if logic == "ssl":
            f, _ = red.gen_f_ssl(params)
            model, point = red.build_f_ssl_model(params, tree)
            extractor = red.extract_accepting_tree_ssl
            frame_class = CROSS_AXIOM
        else:
            f, _ = red.gen_f_s4s5(params)
            model, point = red.build_f_s4s5_model(params, tree)
            extractor = red.extract_accepting_tree_s4s5
            frame_class = S4S5_PRODUCT
        check(f"{logic}-frame-valid", validate(model, frame_class).ok)
        check(f"{logic}-formula-holds", model.eval(point, f))
        try:
            extracted, _pi = extractor(model, point, params)
        except ExtractionError as err:
            report.append(f"{logic}-extraction-error: {err}")
            check(f"{logic}-extraction", False)
            continue
        check(f"{logic}-extraction", True)
        check(f"{logic}-tree-matches",
              atm_mod.trees_label_equal(extracted, tree))
        trees[logic] = extracted

    if len(trees) == 2:
        check("extractions-agree",
              atm_mod.trees_label_equal(trees["ssl"], trees["s4s5"]))

    ok = all(checks)
    report.append(f"result: {'pass' if ok else 'fail'}")
    _emit(report)
    if not ok:
        raise CheckFailure("pipeline verification failed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bimodal",
        description="Bimodal-logic toolkit: formula generators, model "
                    "builders, checkers, extractors, translations, and a "
                    "bounded satisfiability oracle.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a formula")
    p.add_argument("kind", choices=["counter-ssl", "counter-s4s5",
                                    "f-ssl", "f-s4s5"])
    p.add_argument("--n", type=int)
    p.add_argument("--atm")
    p.add_argument("--w")
    p.add_argument("--poly")
    p.add_argument("--out")
    p.add_argument("--catalog")
    p.set_defaults(func=_gen)

    p = sub.add_parser("build", help="build a witness model")
    p.add_argument("what", choices=["model"])
    p.add_argument("--logic", choices=["ssl", "s4s5"], required=True)
    p.add_argument("--atm", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--out")
    p.add_argument("--tree-out")
    p.set_defaults(func=_build)

    p = sub.add_parser("check", help="evaluate a formula on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--point")
    p.add_argument("--class", dest="frame_class", choices=FRAME_CLASSES)
    p.set_defaults(func=_check)

    p = sub.add_parser("extract", help="extract a counter trace or tree")
    p.add_argument("kind", choices=["trace", "tree"])
    p.add_argument("--logic", choices=["ssl", "s4s5"], required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--point")
    p.add_argument("--n", type=int)
    p.add_argument("--atm")
    p.add_argument("--w")
    p.add_argument("--poly")
    p.add_argument("--out")
    p.set_defaults(func=_extract)

    p = sub.add_parser("translate", help="translate a formula")
    p.add_argument("kind", choices=["ssl-s4s5", "s4s5-k4s5"])
    p.add_argument("--formula", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_translate)

    p = sub.add_parser("lift", help="lift a cross-axiom model to a commutator model")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--point")
    p.add_argument("--out")
    p.set_defaults(func=_lift)

    p = sub.add_parser("restrict", help="restrict a commutator model back")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--point")
    p.add_argument("--out")
    p.set_defaults(func=_restrict)

    p = sub.add_parser("sat", help="bounded satisfiability search")
    p.add_argument("--formula", required=True)
    p.add_argument("--class", dest="frame_class", choices=FRAME_CLASSES,
                   required=True)
    p.add_argument("--bound", type=int)
    p.add_argument("--max-atoms", type=int)
    p.add_argument("--out")
    p.set_defaults(func=_sat)

    p = sub.add_parser("atm", help="run a machine")
    p.add_argument("what", choices=["run"])
    p.add_argument("--atm", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--fuel", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_atm_run)

    p = sub.add_parser("verify", help="end-to-end verification")
    p.add_argument("what", choices=["pipeline"])
    p.add_argument("--atm", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--poly", required=True)
    p.set_defaults(func=_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CheckFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ExtractionError, fm.ParseError, atm_mod.AtmError,
            satbound.ResourceCapError, ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
