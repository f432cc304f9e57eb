"""Bounded-model satisfiability oracle by exhaustive enumeration.

Enumerates every model with up to a fixed number of points over the atoms
of the query formula, in a fixed canonical order: world count ascending,
then the L-relation as a set partition (restricted-growth strings in
lexicographic order), then the []-relation from the cached list of
transitive relations, then the valuation.  The first satisfying model is
returned; a negative answer is only "unsatisfiable within the bound".

Candidate evaluation works directly on relation bitmasks, so no model
object is built until a hit is found; the hit is then rebuilt as a
validated model.
"""

import itertools
import os

from .formula import ATOM, NOT, AND, KMOD, atoms as formula_atoms
from .semantics import (BimodalModel, CROSS_AXIOM, S4S5_COMMUTATOR,
                        K4S5_COMMUTATOR, S4S5_PRODUCT, FRAME_CLASSES,
                        validate, product_model)

DEFAULT_MAX_POINTS = 4
DEFAULT_MAX_ATOMS = 3
DEFAULT_MAX_CANDIDATES = 50_000_000

ENV_MAX_POINTS = "SATBOUND_MAX_POINTS"
ENV_MAX_ATOMS = "SATBOUND_MAX_ATOMS"
ENV_MAX_CANDIDATES = "SATBOUND_MAX_CANDIDATES"


class ResourceCapError(RuntimeError):
    """The enumeration ceiling was hit before the search space was
    exhausted; unlike UnsatWithinBound this verdict means nothing."""


class SatVerdict:
    """Either Sat(model, point) or UnsatWithinBound(max_points, max_atoms)."""

    def __init__(self, satisfiable, model=None, point=None,
                 max_points=None, max_atoms=None):
        self.satisfiable = satisfiable
        self.model = model
        self.point = point
        self.max_points = max_points
        self.max_atoms = max_atoms

    def __repr__(self):
        if self.satisfiable:
            return f"Sat(point={self.point}, worlds={len(self.model.worlds)})"
        return f"UnsatWithinBound(max_points={self.max_points}, max_atoms={self.max_atoms})"


def _env_int(name, fallback):
    raw = os.environ.get(name)
    return fallback if raw is None else int(raw)


# ---------------------------------------------------------------------------
# Frame enumeration, cached per world count.

def _set_partitions(m):
    """Partitions of {0..m-1} as tuples of block indices per element,
    in restricted-growth-string lexicographic order."""
    out = []

    def grow(prefix, maxblock):
        if len(prefix) == m:
            out.append(tuple(prefix))
            return
        for b in range(maxblock + 2):
            prefix.append(b)
            grow(prefix, max(maxblock, b))
            prefix.pop()

    grow([0], 0) if m else out.append(())
    return out


def _partition_succ(blocks, m):
    """L-relation bitmasks of a partition given as block indices."""
    masks = {}
    for i, b in enumerate(blocks):
        masks[b] = masks.get(b, 0) | (1 << i)
    return [masks[blocks[i]] for i in range(m)]


def _is_transitive(succ, m):
    for i in range(m):
        reach = 0
        row = succ[i]
        j = 0
        while row:
            if row & 1:
                reach |= succ[j]
            row >>= 1
            j += 1
        if reach & ~succ[i]:
            return False
    return True


_transitive_cache = {}
_preorder_cache = {}


def _transitive_relations(m):
    """All transitive relations on m points, ascending in the integer
    encoding that packs row i into bits [i*m, (i+1)*m)."""
    if m not in _transitive_cache:
        rels = []
        row_mask = (1 << m) - 1
        for code in range(1 << (m * m)):
            succ = [(code >> (i * m)) & row_mask for i in range(m)]
            if _is_transitive(succ, m):
                rels.append(succ)
        _transitive_cache[m] = rels
        _preorder_cache[m] = [succ for succ in rels
                              if all((succ[i] >> i) & 1 for i in range(m))]
    return _transitive_cache[m]


def _preorders(m):
    _transitive_relations(m)
    return _preorder_cache[m]


def _commutativity_ok(succ_l, succ_d, m, need_right):
    """Left (and optionally right) commutativity of a candidate frame,
    with succ_l coming from a partition (so it is an equivalence)."""
    cloud_reach = {}
    for i in range(m):
        c = succ_l[i]
        if c not in cloud_reach:
            acc = 0
            row = c
            j = 0
            while row:
                if row & 1:
                    acc |= succ_d[j]
                row >>= 1
                j += 1
            cloud_reach[c] = acc
    for p in range(m):
        row = succ_d[p]
        reach = cloud_reach[succ_l[p]]
        j = 0
        while row:
            if row & 1 and succ_l[j] & ~reach:
                return False
            row >>= 1
            j += 1
    if need_right:
        # every member of a cloud must reach the same set of clouds
        cloud_targets = [0] * m
        for p in range(m):
            row = succ_d[p]
            acc = 0
            j = 0
            while row:
                if row & 1:
                    acc |= succ_l[j]
                row >>= 1
                j += 1
            cloud_targets[p] = acc
        for p in range(m):
            for q in range(m):
                if (succ_l[p] >> q) & 1 and cloud_targets[p] != cloud_targets[q]:
                    return False
    return True


_frame_cache = {}


def _frames(frame_class, m):
    """Valid (succ_l, succ_d) frame pairs for the class, canonical order."""
    key = (frame_class, m)
    if key in _frame_cache:
        return _frame_cache[key]
    need_reflexive = frame_class in (CROSS_AXIOM, S4S5_COMMUTATOR)
    need_right = frame_class in (S4S5_COMMUTATOR, K4S5_COMMUTATOR)
    rel_ds = _preorders(m) if need_reflexive else _transitive_relations(m)
    out = []
    for blocks in _set_partitions(m):
        succ_l = _partition_succ(blocks, m)
        for succ_d in rel_ds:
            if _commutativity_ok(succ_l, succ_d, m, need_right):
                out.append((succ_l, succ_d))
    _frame_cache[key] = out
    return out


# ---------------------------------------------------------------------------
# Mask evaluation of a formula over a raw candidate.

def _eval_masks(f, succ_d, succ_l, atom_masks, m):
    """Bitmask of points satisfying f, same algorithm as the model checker
    but over plain mask lists."""
    full = (1 << m) - 1
    cache = {}
    stack = [f]
    while stack:
        t = stack[-1]
        if t in cache:
            stack.pop()
            continue
        kind = t.kind
        if kind == ATOM:
            cache[t] = atom_masks.get(t.value, 0)
            stack.pop()
            continue
        left = t.left
        if left not in cache:
            stack.append(left)
            continue
        if kind == AND:
            right = t.right
            if right not in cache:
                stack.append(right)
                continue
            cache[t] = cache[left] & cache[right]
        elif kind == NOT:
            cache[t] = full & ~cache[left]
        else:
            succ = succ_l if kind == KMOD else succ_d
            miss = full & ~cache[left]
            v = 0
            for i in range(m):
                if not (succ[i] & miss):
                    v |= 1 << i
            cache[t] = v
        stack.pop()
    return cache[f]


def _closed_masks(succ_d, m):
    """Valuation masks closed under the []-relation (atom persistence)."""
    out = []
    for mask in range(1 << m):
        ok = True
        row = mask
        i = 0
        while row:
            if row & 1 and succ_d[i] & ~mask:
                ok = False
                break
            row >>= 1
            i += 1
        if ok:
            out.append(mask)
    return out


def _build_hit(frame_class, m, succ_l, succ_d, atom_masks, point_index):
    worlds = list(range(m))
    rel_d = [(i, j) for i in range(m) for j in range(m) if (succ_d[i] >> j) & 1]
    rel_l = [(i, j) for i in range(m) for j in range(m) if (succ_l[i] >> j) & 1]
    valuation = {a: {i for i in range(m) if (mask >> i) & 1}
                 for a, mask in atom_masks.items()}
    model = BimodalModel(worlds, rel_d, rel_l, valuation,
                         frame_class=frame_class, designated=point_index)
    return model


def bounded_sat(f, frame_class, max_points=None, max_atoms=None,
                max_candidates=None):
    """Search for a model of f in the given frame class with at most
    max_points worlds.  A Sat verdict carries a validated model; an
    UnsatWithinBound verdict is one-sided."""
    if frame_class not in FRAME_CLASSES:
        raise ValueError(f"unknown frame class {frame_class!r}")
    if max_points is None:
        max_points = _env_int(ENV_MAX_POINTS, DEFAULT_MAX_POINTS)
    if max_atoms is None:
        max_atoms = _env_int(ENV_MAX_ATOMS, DEFAULT_MAX_ATOMS)
    if max_candidates is None:
        max_candidates = _env_int(ENV_MAX_CANDIDATES, DEFAULT_MAX_CANDIDATES)
    if max_points < 1:
        raise ValueError("max_points must be at least 1")
    atom_ids = sorted(formula_atoms(f))
    if len(atom_ids) > max_atoms:
        raise ResourceCapError(
            f"formula has {len(atom_ids)} atoms, ceiling is {max_atoms}")

    if frame_class == S4S5_PRODUCT:
        return _bounded_sat_product(f, atom_ids, max_points, max_atoms,
                                    max_candidates)

    budget = max_candidates
    for m in range(1, max_points + 1):
        all_masks = list(range(1 << m))
        for succ_l, succ_d in _frames(frame_class, m):
            if frame_class == CROSS_AXIOM:
                allowed = _closed_masks(succ_d, m)
            else:
                allowed = all_masks
            for combo in itertools.product(allowed, repeat=len(atom_ids)):
                budget -= 1
                if budget < 0:
                    raise ResourceCapError(
                        f"exceeded the enumeration ceiling of {max_candidates} candidates")
                atom_masks = dict(zip(atom_ids, combo))
                hit = _eval_masks(f, succ_d, succ_l, atom_masks, m)
                if hit:
                    point = (hit & -hit).bit_length() - 1
                    model = _build_hit(frame_class, m, succ_l, succ_d,
                                       atom_masks, point)
                    report = validate(model, frame_class)
                    if not report.ok:
                        raise AssertionError(
                            f"enumerated frame failed validation: {report.lines()}")
                    return SatVerdict(True, model=model, point=point)
    return SatVerdict(False, max_points=max_points, max_atoms=max_atoms)


def _bounded_sat_product(f, atom_ids, max_points, max_atoms, max_candidates):
    """Product-class search over factor pairs: preorders on the first
    factor, partitions on the second, ordered by total size."""
    shapes = sorted((m1 * m2, m1, m2)
                    for m1 in range(1, max_points + 1)
                    for m2 in range(1, max_points + 1)
                    if m1 * m2 <= max_points)
    budget = max_candidates
    for m, m1, m2 in shapes:
        for succ1 in _preorders(m1):
            for blocks in _set_partitions(m2):
                succ2 = _partition_succ(blocks, m2)
                # product point (v, x) -> index v * m2 + x
                succ_d = [0] * m
                succ_l = [0] * m
                for v in range(m1):
                    for x in range(m2):
                        i = v * m2 + x
                        row1 = succ1[v]
                        j = 0
                        while row1:
                            if row1 & 1:
                                succ_d[i] |= 1 << (j * m2 + x)
                            row1 >>= 1
                            j += 1
                        row2 = succ2[x]
                        j = 0
                        while row2:
                            if row2 & 1:
                                succ_l[i] |= 1 << (v * m2 + j)
                            row2 >>= 1
                            j += 1
                for combo in itertools.product(range(1 << m),
                                               repeat=len(atom_ids)):
                    budget -= 1
                    if budget < 0:
                        raise ResourceCapError(
                            f"exceeded the enumeration ceiling of {max_candidates} candidates")
                    atom_masks = dict(zip(atom_ids, combo))
                    hit = _eval_masks(f, succ_d, succ_l, atom_masks, m)
                    if hit:
                        point = (hit & -hit).bit_length() - 1
                        v, x = divmod(point, m2)
                        frame1 = (list(range(m1)),
                                  [(a, b) for a in range(m1) for b in range(m1)
                                   if (succ1[a] >> b) & 1])
                        frame2 = (list(range(m2)),
                                  [(a, b) for a in range(m2) for b in range(m2)
                                   if (succ2[a] >> b) & 1])
                        valuation = {
                            a: {divmod(i, m2) for i in range(m)
                                if (mask >> i) & 1}
                            for a, mask in atom_masks.items()}
                        model = product_model(frame1, frame2, valuation,
                                              designated=(v, x))
                        report = validate(model, S4S5_PRODUCT)
                        if not report.ok:
                            raise AssertionError(
                                f"enumerated product failed validation: {report.lines()}")
                        return SatVerdict(True, model=model,
                                          point=model.designated)
    return SatVerdict(False, max_points=max_points, max_atoms=max_atoms)
