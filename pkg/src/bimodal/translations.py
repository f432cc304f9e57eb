"""Satisfiability-preserving translations between the three frame classes,
with the four model transforms that witness them constructively.

The subset-space to product-logic direction relativizes both modalities to
a fresh "main" atom, forces persistence of the original atoms on the main
part, and traps the non-main points; the model transforms add one new
point per cloud (lifting) or cut back to the reachable main part
(restriction).  The product-to-K4 direction adds the reflexivity axiom
instances for every box subformula; its model transform adds the missing
reflexive loops on the reachable part.
"""

from .formula import (Atom, Not, And, K, Box, Implies, Or, atoms, subformulas,
                      conj, render, BOXMOD, ATOM, NOT, AND, KMOD)
from .semantics import (BimodalModel, CROSS_AXIOM, S4S5_COMMUTATOR,
                        K4S5_COMMUTATOR, validate, clouds,
                        induced_cloud_relation)


class TranslationResult:
    """Translated formula plus the bookkeeping the transforms need."""

    def __init__(self, formula, main_atom=None, box_subformulas=None):
        self.formula = formula
        self.main_atom = main_atom
        self.box_subformulas = tuple(box_subformulas or ())


def main_var(f):
    """Smallest atom index not occurring in f."""
    used = atoms(f)
    i = 0
    while i in used:
        i += 1
    return i


def _relativize(f, main):
    """T: relativize both modal operators to the main-true points.
    Iterative over the formula DAG; results cached per subformula."""
    done = {}
    stack = [f]
    while stack:
        t = stack[-1]
        if t in done:
            stack.pop()
            continue
        kind = t.kind
        if kind == ATOM:
            done[t] = t
            stack.pop()
            continue
        left = t.left
        if left not in done:
            stack.append(left)
            continue
        if kind == AND:
            right = t.right
            if right not in done:
                stack.append(right)
                continue
            done[t] = And(done[left], done[right])
        elif kind == NOT:
            done[t] = Not(done[left])
        elif kind == KMOD:
            done[t] = K(Not(And(main, Not(done[left]))))
        else:
            done[t] = Box(Not(And(main, Not(done[left]))))
        stack.pop()
    return done[f]


def t_ssl_to_s4s5(f):
    """Relativizing translation: T-hat(f) = main & K[](!main -> []!main)
    & persistent_main & T(f), with persistent_main ranging over the atoms
    of f in ascending index order."""
    main_atom = main_var(f)
    main = Atom(main_atom)
    trap = K(Box(Implies(Not(main), Box(Not(main)))))
    persistent_main = conj(
        [K(Or(Box(Implies(main, Atom(a))), Box(Implies(main, Not(Atom(a))))))
         for a in sorted(atoms(f))])
    out = conj([main, trap, persistent_main, _relativize(f, main)])
    return TranslationResult(out, main_atom=main_atom)


def lift_model_ssl_to_s4s5(model, w, main_atom):
    """Add one fresh point per cloud, reachable from every point of every
    cloud related to it, and mark the original points with the main atom.
    The result satisfies right commutativity on top of the input's
    properties."""
    report = validate(model, CROSS_AXIOM)
    if not report.ok:
        raise ValueError(f"input is not a valid cross-axiom model: {report.lines()}")
    cloud_list = clouds(model)
    induced = induced_cloud_relation(model, cloud_list)

    if all(isinstance(w, int) for w in model.worlds):
        # keep the world type uniform so ordering stays well defined
        base = max(model.worlds) + 1
        new_points = [base + i for i in range(len(cloud_list))]
    else:
        def new_name(i):
            name = f"newpoint_{i}"
            while name in model.index:
                name = "_" + name
            return name

        new_points = [new_name(i) for i in range(len(cloud_list))]
    worlds = list(model.worlds) + new_points

    rel_l = set(model.rel_l)
    for i, members in enumerate(cloud_list):
        extended = list(members) + [new_points[i]]
        for a in extended:
            rel_l.add((a, new_points[i]))
            rel_l.add((new_points[i], a))

    rel_d = set(model.rel_d)
    succ_clouds = {}
    for i, j in induced:
        succ_clouds.setdefault(i, set()).add(j)
    for i in range(len(cloud_list)):
        # the induced relation is reflexive on inhabited clouds; keep the
        # new point inside its own cloud's successor set explicitly
        succ_clouds.setdefault(i, set()).add(i)
    for i, members in enumerate(cloud_list):
        extended = list(members) + [new_points[i]]
        for j in succ_clouds[i]:
            for p in extended:
                rel_d.add((p, new_points[j]))

    valuation = {a: set(members) for a, members in model.valuation.items()}
    if main_atom in valuation and valuation[main_atom] != set(model.worlds):
        raise ValueError(f"atom {main_atom} is already in use and cannot mark the base")
    valuation[main_atom] = set(model.worlds)

    lifted = BimodalModel(worlds, rel_d, rel_l, valuation,
                          frame_class=S4S5_COMMUTATOR, designated=w)
    return lifted, w


def restrict_model_s4s5_to_ssl(model, w, f):
    """Cut a commutator model of the translated formula back to the
    main-true points reachable as w L-> w' []-> v; atoms outside f and the
    main atom are dropped to everywhere-false."""
    result = t_ssl_to_s4s5(f)
    if not model.eval(w, result.formula):
        raise ValueError("the translated formula does not hold at the given point")
    main_atom = result.main_atom
    main_set = model.valuation.get(main_atom, frozenset())
    keep = set()
    for w2 in model.l_successors(w):
        for v in model.d_successors(w2):
            if v in main_set:
                keep.add(v)
    worlds = sorted(keep)
    rel_d = [(a, b) for a, b in model.rel_d if a in keep and b in keep]
    rel_l = [(a, b) for a, b in model.rel_l if a in keep and b in keep]
    wanted = atoms(f) | {main_atom}
    valuation = {a: model.valuation[a] & keep
                 for a in sorted(wanted) if a in model.valuation}
    restricted = BimodalModel(worlds, rel_d, rel_l, valuation,
                              frame_class=CROSS_AXIOM, designated=w)
    return restricted, w


def t_s4s5_to_k4s5(f):
    """Reflexivity-axiom translation: T-hat(f) = f & AND K(([]psi -> psi)
    & []([]psi -> psi)) over the distinct box subformulas of f, in
    render-sorted order.  Box-free inputs come back unchanged."""
    boxes = sorted({t for t in subformulas(f) if t.kind == BOXMOD},
                   key=render)
    parts = [f]
    for b in boxes:
        inst = Implies(b, b.left)
        parts.append(K(And(inst, Box(inst))))
    return TranslationResult(conj(parts), box_subformulas=boxes)


def k4_to_s4_model(model, w, f):
    """Restrict a K4xS5 model of the translated formula to the points
    reachable as w L-> v or w L-> w' []-> v and add the reflexive loops."""
    result = t_s4s5_to_k4s5(f)
    if not model.eval(w, result.formula):
        raise ValueError("the translated formula does not hold at the given point")
    report = validate(model, K4S5_COMMUTATOR)
    if not report.ok:
        raise ValueError(f"input is not a valid K4xS5 commutator model: {report.lines()}")
    keep = set(model.l_successors(w))
    for w2 in model.l_successors(w):
        keep.update(model.d_successors(w2))
    worlds = sorted(keep)
    rel_d = {(a, b) for a, b in model.rel_d if a in keep and b in keep}
    rel_d.update((v, v) for v in keep)
    rel_l = [(a, b) for a, b in model.rel_l if a in keep and b in keep]
    valuation = {a: members & keep for a, members in model.valuation.items()}
    out = BimodalModel(worlds, rel_d, rel_l, valuation,
                       frame_class=S4S5_COMMUTATOR, designated=w)
    return out, w
