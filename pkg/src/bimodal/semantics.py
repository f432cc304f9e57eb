"""Finite bimodal Kripke models, frame-class validation, and model checking.

A model carries a finite world set, two binary relations (rel_d for the
[]-modality, rel_l for the K-modality), and a valuation.  Relations are
stored as explicit pair sets; reflexive pairs are stored explicitly, with
no implicit closure, so validators observe exactly the raw data.

Evaluation computes, per distinct subformula, the set of worlds where it
holds as a bitmask over the sorted world list.  The per-model cache is
keyed by subformula identity, so repeated checks are cheap even for very
large generated formulas.
"""

from .formula import ATOM, NOT, AND, KMOD, BOXMOD, Formula

CROSS_AXIOM = "cross-axiom"
S4S5_COMMUTATOR = "s4s5-commutator"
K4S5_COMMUTATOR = "k4s5-commutator"
S4S5_PRODUCT = "s4s5-product"

FRAME_CLASSES = (CROSS_AXIOM, S4S5_COMMUTATOR, K4S5_COMMUTATOR, S4S5_PRODUCT)

# Which classes require []-reflexivity, right commutativity, atom persistence.
_D_REFLEXIVE = {CROSS_AXIOM, S4S5_COMMUTATOR, S4S5_PRODUCT}
_RIGHT_COMMUTATIVE = {S4S5_COMMUTATOR, K4S5_COMMUTATOR, S4S5_PRODUCT}
_PERSISTENT_ATOMS = {CROSS_AXIOM}


class BimodalModel:
    """Immutable finite bimodal model."""

    def __init__(self, worlds, rel_d, rel_l, valuation,
                 frame_class=None, designated=None, is_product=False):
        self.worlds = tuple(sorted(worlds))
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world ids")
        self.index = {w: i for i, w in enumerate(self.worlds)}
        for a, b in list(rel_d) + list(rel_l):
            if a not in self.index or b not in self.index:
                raise ValueError(f"relation pair ({a!r}, {b!r}) mentions unknown world")
        self.rel_d = frozenset(rel_d)
        self.rel_l = frozenset(rel_l)
        self.valuation = {}
        for atom_id, members in valuation.items():
            members = frozenset(members)
            for w in members:
                if w not in self.index:
                    raise ValueError(f"valuation of atom {atom_id} mentions unknown world {w!r}")
            self.valuation[atom_id] = members
        if designated is not None and designated not in self.index:
            raise ValueError(f"designated world {designated!r} unknown")
        self.frame_class = frame_class
        self.designated = designated
        self.is_product = is_product

        n = len(self.worlds)
        self._full = (1 << n) - 1
        self._succ_d = [0] * n
        self._succ_l = [0] * n
        for a, b in self.rel_d:
            self._succ_d[self.index[a]] |= 1 << self.index[b]
        for a, b in self.rel_l:
            self._succ_l[self.index[a]] |= 1 << self.index[b]
        self._atom_masks = {}
        for atom_id, members in self.valuation.items():
            m = 0
            for w in members:
                m |= 1 << self.index[w]
            self._atom_masks[atom_id] = m
        self._mask_cache = {}

    # -- evaluation --------------------------------------------------------

    def _mask(self, f):
        """Bitmask of worlds satisfying f (bit i = sorted world i)."""
        cache = self._mask_cache
        if f in cache:
            return cache[f]
        stack = [f]
        succ_d = self._succ_d
        succ_l = self._succ_l
        full = self._full
        n = len(self.worlds)
        while stack:
            t = stack[-1]
            if t in cache:
                stack.pop()
                continue
            kind = t.kind
            if kind == ATOM:
                cache[t] = self._atom_masks.get(t.value, 0)
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
            elif kind == KMOD:
                child = cache[left]
                miss = full & ~child
                m = 0
                for i in range(n):
                    if not (succ_l[i] & miss):
                        m |= 1 << i
                cache[t] = m
            else:  # box
                child = cache[left]
                miss = full & ~child
                m = 0
                for i in range(n):
                    if not (succ_d[i] & miss):
                        m |= 1 << i
                cache[t] = m
            stack.pop()
        return cache[f]

    def eval(self, point, f):
        """Truth value of f at the given world."""
        if point not in self.index:
            raise KeyError(f"unknown world {point!r}")
        if not isinstance(f, Formula):
            raise TypeError("eval expects a Formula")
        return bool(self._mask(f) >> self.index[point] & 1)

    def sat_set(self, f):
        """Sorted list of worlds satisfying f."""
        m = self._mask(f)
        return [w for i, w in enumerate(self.worlds) if (m >> i) & 1]

    # -- relation views ----------------------------------------------------

    def d_successors(self, w):
        m = self._succ_d[self.index[w]]
        return [v for i, v in enumerate(self.worlds) if (m >> i) & 1]

    def l_successors(self, w):
        m = self._succ_l[self.index[w]]
        return [v for i, v in enumerate(self.worlds) if (m >> i) & 1]

    def with_class(self, frame_class, designated=None, is_product=None):
        """Copy with different metadata."""
        return BimodalModel(
            self.worlds, self.rel_d, self.rel_l, self.valuation,
            frame_class=frame_class,
            designated=self.designated if designated is None else designated,
            is_product=self.is_product if is_product is None else is_product)


# ---------------------------------------------------------------------------
# Frame-class validation.

class PropertyCheck:
    def __init__(self, name, passed, counterexample=None):
        self.name = name
        self.passed = passed
        self.counterexample = counterexample

    def __repr__(self):
        tail = "" if self.passed else f" counterexample={self.counterexample}"
        return f"PropertyCheck({self.name}: {'pass' if self.passed else 'FAIL'}{tail})"


class ValidationReport:
    def __init__(self, frame_class, checks):
        self.frame_class = frame_class
        self.checks = checks

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def lines(self):
        out = [f"class: {self.frame_class}"]
        for c in self.checks:
            status = "pass" if c.passed else "fail"
            line = f"{c.name}: {status}"
            if not c.passed and c.counterexample is not None:
                line += f" {' '.join(str(x) for x in c.counterexample)}"
            out.append(line)
        out.append(f"result: {'pass' if self.ok else 'fail'}")
        return out


def _check_reflexive(model, succ):
    for i, w in enumerate(model.worlds):
        if not (succ[i] >> i) & 1:
            return (w,)
    return None


def _check_symmetric(model, succ):
    for i, a in enumerate(model.worlds):
        m = succ[i]
        j = 0
        while m:
            if m & 1 and not (succ[j] >> i) & 1:
                return (a, model.worlds[j])
            m >>= 1
            j += 1
    return None


def _check_transitive(model, succ):
    for i, a in enumerate(model.worlds):
        m = succ[i]
        reach = 0
        j = 0
        mm = m
        while mm:
            if mm & 1:
                reach |= succ[j]
            mm >>= 1
            j += 1
        extra = reach & ~m
        if extra:
            # locate a witness triple (a, b, c) with a->b->c but not a->c
            c_idx = (extra & -extra).bit_length() - 1
            for j in range(len(model.worlds)):
                if (m >> j) & 1 and (succ[j] >> c_idx) & 1:
                    return (a, model.worlds[j], model.worlds[c_idx])
    return None


def _check_left_commutativity(model):
    """From p -d-> q -l-> r there must be s with p -l-> s -d-> r."""
    n = len(model.worlds)
    succ_d, succ_l = model._succ_d, model._succ_l
    reach = [0] * n  # union of d-successors over l-successors of p
    for p in range(n):
        m = succ_l[p]
        j = 0
        acc = 0
        while m:
            if m & 1:
                acc |= succ_d[j]
            m >>= 1
            j += 1
        reach[p] = acc
    for p in range(n):
        m = succ_d[p]
        j = 0
        while m:
            if m & 1:
                missing = succ_l[j] & ~reach[p]
                if missing:
                    r = (missing & -missing).bit_length() - 1
                    return (model.worlds[p], model.worlds[j], model.worlds[r])
            m >>= 1
            j += 1
    return None


def _check_right_commutativity(model):
    """From p -l-> q -d-> r there must be s with p -d-> s -l-> r."""
    n = len(model.worlds)
    succ_d, succ_l = model._succ_d, model._succ_l
    reach = [0] * n  # union of l-successors over d-successors of p
    for p in range(n):
        m = succ_d[p]
        j = 0
        acc = 0
        while m:
            if m & 1:
                acc |= succ_l[j]
            m >>= 1
            j += 1
        reach[p] = acc
    for p in range(n):
        m = succ_l[p]
        j = 0
        while m:
            if m & 1:
                missing = succ_d[j] & ~reach[p]
                if missing:
                    r = (missing & -missing).bit_length() - 1
                    return (model.worlds[p], model.worlds[j], model.worlds[r])
            m >>= 1
            j += 1
    return None


def _check_persistence(model):
    """Atom truth must be preserved along rel_d, for atoms in the valuation."""
    for atom_id in sorted(model._atom_masks):
        mask = model._atom_masks[atom_id]
        m = mask
        i = 0
        while m:
            if m & 1:
                lost = model._succ_d[i] & ~mask
                if lost:
                    j = (lost & -lost).bit_length() - 1
                    return (atom_id, model.worlds[i], model.worlds[j])
            m >>= 1
            i += 1
    return None


def validate(model, frame_class):
    """Check the frame properties required by the given class.

    Failures are data, not errors: the report lists each property with a
    pass flag and the first counterexample in sorted world order.
    """
    if frame_class not in FRAME_CLASSES:
        raise ValueError(f"unknown frame class {frame_class!r}")
    checks = []

    def add(name, counterexample):
        checks.append(PropertyCheck(name, counterexample is None, counterexample))

    add("l-reflexive", _check_reflexive(model, model._succ_l))
    add("l-symmetric", _check_symmetric(model, model._succ_l))
    add("l-transitive", _check_transitive(model, model._succ_l))
    add("d-transitive", _check_transitive(model, model._succ_d))
    if frame_class in _D_REFLEXIVE:
        add("d-reflexive", _check_reflexive(model, model._succ_d))
    add("left-commutativity", _check_left_commutativity(model))
    if frame_class in _RIGHT_COMMUTATIVE:
        add("right-commutativity", _check_right_commutativity(model))
    if frame_class in _PERSISTENT_ATOMS:
        add("atom-persistence", _check_persistence(model))
    if frame_class == S4S5_PRODUCT:
        add("product-provenance", None if model.is_product else ("not built as a product",))
    return ValidationReport(frame_class, checks)


# ---------------------------------------------------------------------------
# Clouds (L-equivalence classes) and the induced relation between them.

def clouds(model):
    """Partition of the worlds into L-equivalence classes.

    Classes are sorted tuples, listed in order of their smallest member.
    Raises ValueError when rel_l is not an equivalence relation.
    """
    for name, checker in (("reflexive", _check_reflexive),
                          ("symmetric", _check_symmetric),
                          ("transitive", _check_transitive)):
        bad = checker(model, model._succ_l)
        if bad is not None:
            raise ValueError(f"rel_l is not an equivalence relation (not {name}: {bad})")
    seen = set()
    out = []
    for w in model.worlds:
        if w in seen:
            continue
        cls = tuple(model.l_successors(w))
        seen.update(cls)
        out.append(cls)
    return out


def cloud_of(model, point, cloud_list=None):
    if cloud_list is None:
        cloud_list = clouds(model)
    for c in cloud_list:
        if point in c:
            return c
    raise KeyError(f"unknown world {point!r}")


def induced_cloud_relation(model, cloud_list=None):
    """Pairs (i, j) of cloud indices such that some member of cloud i has a
    rel_d successor in cloud j."""
    if cloud_list is None:
        cloud_list = clouds(model)
    owner = {}
    for ci, members in enumerate(cloud_list):
        for w in members:
            owner[w] = ci
    pairs = set()
    for a, b in model.rel_d:
        pairs.add((owner[a], owner[b]))
    return sorted(pairs)


# ---------------------------------------------------------------------------
# Product models.

def product_point(v, x):
    return f"{v}|{x}"


def product_model(frame1, frame2, valuation, designated=None):
    """Product of a preordered frame with an equivalence frame.

    frame1 and frame2 are (worlds, relation_pairs) with relation given
    explicitly.  Worlds of the product are "v|x" strings.  The valuation
    maps atom ids to sets of (v, x) pairs.
    """
    worlds1, rel1 = frame1
    worlds2, rel2 = frame2
    worlds1 = sorted(worlds1)
    worlds2 = sorted(worlds2)
    rel1 = set(rel1)
    rel2 = set(rel2)
    idx1 = {w: i for i, w in enumerate(worlds1)}
    succ1 = [0] * len(worlds1)
    for a, b in rel1:
        succ1[idx1[a]] |= 1 << idx1[b]
    for w in worlds1:
        if (w, w) not in rel1:
            raise ValueError(f"first frame is not reflexive at {w!r}")
    for a, b in rel1:
        for i, c in enumerate(worlds1):
            if (succ1[idx1[b]] >> i) & 1 and (a, c) not in rel1:
                raise ValueError(f"first frame is not transitive at ({a!r}, {b!r}, {c!r})")
    for w in worlds2:
        if (w, w) not in rel2:
            raise ValueError(f"second frame is not reflexive at {w!r}")
    for a, b in rel2:
        if (b, a) not in rel2:
            raise ValueError(f"second frame is not symmetric at ({a!r}, {b!r})")
        for c in worlds2:
            if (b, c) in rel2 and (a, c) not in rel2:
                raise ValueError(f"second frame is not transitive at ({a!r}, {b!r}, {c!r})")

    worlds = [product_point(v, x) for v in worlds1 for x in worlds2]
    rel_d = [(product_point(a, x), product_point(b, x))
             for a, b in rel1 for x in worlds2]
    rel_l = [(product_point(v, a), product_point(v, b))
             for v in worlds1 for a, b in rel2]
    val = {atom_id: {product_point(v, x) for v, x in members}
           for atom_id, members in valuation.items()}
    des = product_point(*designated) if designated is not None else None
    return BimodalModel(worlds, rel_d, rel_l, val,
                        frame_class=S4S5_PRODUCT, designated=des, is_product=True)


# ---------------------------------------------------------------------------
# Line-based model dump with bit-exact round trip.

def save_model(model):
    lines = []
    if model.frame_class is not None:
        lines.append(f"class {model.frame_class}")
    if model.designated is not None:
        lines.append(f"designated {model.designated}")
    for w in model.worlds:
        lines.append(f"world {w}")
    for a, b in sorted(model.rel_d):
        lines.append(f"d {a} {b}")
    for a, b in sorted(model.rel_l):
        lines.append(f"l {a} {b}")
    for atom_id in sorted(model.valuation):
        members = " ".join(sorted(model.valuation[atom_id]))
        lines.append(f"val {atom_id} {members}".rstrip())
    return "\n".join(lines) + "\n"


def load_model(text):
    worlds = []
    rel_d = []
    rel_l = []
    valuation = {}
    frame_class = None
    designated = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        head = parts[0]
        if head == "class" and len(parts) == 2:
            frame_class = parts[1]
        elif head == "designated" and len(parts) == 2:
            designated = parts[1]
        elif head == "world" and len(parts) == 2:
            worlds.append(parts[1])
        elif head == "d" and len(parts) == 3:
            rel_d.append((parts[1], parts[2]))
        elif head == "l" and len(parts) == 3:
            rel_l.append((parts[1], parts[2]))
        elif head == "val" and len(parts) >= 2:
            valuation[int(parts[1])] = set(parts[2:])
        else:
            raise ValueError(f"bad model line {lineno}: {raw!r}")
    return BimodalModel(worlds, rel_d, rel_l, valuation,
                        frame_class=frame_class, designated=designated,
                        is_product=(frame_class == S4S5_PRODUCT))
