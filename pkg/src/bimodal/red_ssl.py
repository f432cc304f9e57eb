"""Subset-space constructions: binary-counter formulas, machine-encoding
formulas, their witness models, and the extraction of counter traces and
accepting trees back out of arbitrary satisfying models.

The machine encoding views a computation through a tape window
[0, 2^(N+1)-2] with the head starting at cell 2^N-1, where N = p(n) for
the size parameter polynomial p and input length n.  Machine-level
configurations keep the head-at-0 convention; `window_pos` converts.
"""

from .formula import (Atom, Not, And, K, Box, L, Diamond, Implies,
                      FormulaVector, conj, disj, eq_vector, eq_binary,
                      rightmost_zero, rightmost_one, unique, neq, lt, leq,
                      plus1, neq_plus1, lt_binary, leq_binary, gt_binary,
                      shared_ssl, ones)
from .catalog import VariableCatalog
from .semantics import BimodalModel, CROSS_AXIOM, clouds, induced_cloud_relation
from . import atm as atm_mod
from .atm import (BLANK, LEFT, RIGHT, ComputationTree, initial_config,
                  apply_entry, node_data, validate_tree)


class ExtractionError(RuntimeError):
    """Raised when a model does not actually support the extraction it was
    claimed to support.

    kind is one of "extraction-failure" (counter traces),
    "witness-not-found", or "bound-exceeded"; detail names the failing
    subformula or step.
    """

    def __init__(self, kind, detail):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class ReductionParams:
    """Machine, size-parameter polynomial, and input word."""

    def __init__(self, atm, poly, w):
        self.atm = atm
        self.poly = tuple(poly)
        if not self.poly or any(c < 0 for c in self.poly):
            raise ValueError("polynomial coefficients must be natural numbers")
        self.w = str(w)
        for a in self.w:
            if a not in atm.input_symbols:
                raise ValueError(f"input symbol {a!r} is not in the input alphabet")
        self.n = len(self.w)
        self.N = self.poly_eval(self.n)
        if self.N < self.n or self.N < 1:
            raise ValueError(f"need p(n) >= max(n, 1), got p({self.n}) = {self.N}")

    def poly_eval(self, x):
        return sum(c * x ** i for i, c in enumerate(self.poly))


def window_offset(N):
    """Shift from machine head coordinates (start at 0) to window
    coordinates (start at 2^N - 1)."""
    return 2 ** N - 1


def window_pos(N, machine_pos):
    return machine_pos + window_offset(N)


def check_window(params, tree):
    """Every node of the tree must stay inside the time and tape bounds."""
    N = params.N
    for v in tree.nodes():
        data = node_data(tree, v)
        if data.time > 2 ** N - 1:
            raise ValueError(f"node {v} exceeds the time bound 2^{N}-1")
        wpos = window_pos(N, data.pos)
        if not 0 <= wpos <= 2 ** (N + 1) - 2:
            raise ValueError(f"node {v} leaves the tape window at cell {wpos}")


# ---------------------------------------------------------------------------
# Binary counter: formula, witness model, trace extraction.

def counter_catalog(n):
    cat = VariableCatalog()
    cat.assign("B", None, 0)
    for k in range(n):
        cat.assign("A", k, 1 + k)
    for k in range(n):
        cat.assign("X", k, 1 + n + k)
    return cat


def _counter_vectors(n, cat):
    b = cat.formula("B")
    alpha = FormulaVector([shared_ssl(cat.formula("A", k), b)
                           for k in range(n - 1, -1, -1)])
    x = cat.vector("X", n)
    return b, alpha, x


def gen_counter_ssl(n):
    """Formula satisfiable exactly by models that count from 0 to 2^n - 1
    along a staircase of L- and []-steps."""
    if n < 1:
        raise ValueError("counter width must be at least 1")
    cat = counter_catalog(n)
    b, alpha, x = _counter_vectors(n, cat)
    steps = []
    for k in range(n):
        body = conj([b, eq_vector(x, alpha, k), rightmost_one(x, k),
                     Diamond(eq_vector(x, alpha, -1))])
        steps.append(Implies(And(b, rightmost_zero(alpha, k)), L(body)))
    f = conj([b, eq_binary(alpha, 0), K(Box(conj(steps)))])
    return f, cat


def _p(i, j):
    return f"p_{i}_{j}"


def _u(i, k):
    return f"u_{i}_{k}"


def _s(i, k):
    return f"s_{i}_{k}"


def build_counter_ssl_model(n):
    """Witness model of the counter formula: one cloud per counter value
    plus a final cloud with no class-marker points."""
    if n < 1:
        raise ValueError("counter width must be at least 1")
    top = 2 ** n
    p_points = [(i, j) for i in range(top) for j in range(i, top)]
    u_points = [(i, k) for i in range(top + 1) for k in range(n)]
    s_points = [(i, k) for i in range(top) for k in ones(i)]

    worlds = ([_p(i, j) for i, j in p_points] + [_u(i, k) for i, k in u_points]
              + [_s(i, k) for i, k in s_points])

    cloud_members = {i: [] for i in range(top + 1)}
    for i, j in p_points:
        cloud_members[i].append(_p(i, j))
    for i, k in u_points:
        cloud_members[i].append(_u(i, k))
    for i, k in s_points:
        cloud_members[i].append(_s(i, k))

    rel_l = [(a, b) for members in cloud_members.values()
             for a in members for b in members]

    rel_d = []
    for i, j in p_points:
        for i2 in range(i, j + 1):
            rel_d.append((_p(i, j), _p(i2, j)))
    for i, k in u_points:
        for i2 in range(i, top + 1):
            rel_d.append((_u(i, k), _u(i2, k)))
        for i2 in range(i, top):
            if k in ones(i2):
                rel_d.append((_u(i, k), _s(i2, k)))
    for i, k in s_points:
        rel_d.append((_s(i, k), _s(i, k)))

    cat = counter_catalog(n)
    valuation = {cat.atom("B"): {_p(i, j) for i, j in p_points}}
    for k in range(n):
        valuation[cat.atom("A", k)] = ({_u(i, k2) for i, k2 in u_points if k2 == k}
                                       | {_s(i, k2) for i, k2 in s_points if k2 == k})
        valuation[cat.atom("X", k)] = {_p(i, j) for i, j in p_points if k in ones(j)}

    model = BimodalModel(worlds, rel_d, rel_l, valuation,
                         frame_class=CROSS_AXIOM, designated=_p(0, 0))
    return model, _p(0, 0)


def _staircase(model, p0, n, alpha, x, marker=None):
    """Shared staircase extraction for counter traces.

    From a point satisfying value 0, repeatedly find an L-neighbour whose
    x-vector shows the incremented value and a []-successor where the
    shared vector has caught up.  marker, when given, is a formula every
    staircase point must satisfy (the subset-space class marker B).
    """
    def holds(point, f):
        return model.eval(point, f)

    def require(point, f, what, step):
        if not holds(point, f):
            raise ExtractionError("extraction-failure",
                                  f"step {step}: {what} fails at {point}")

    require(p0, eq_binary(alpha, 0), "initial counter value 0", 0)
    if marker is not None:
        require(p0, marker, "class marker at the start", 0)

    p_points = [p0]
    p_prime_points = []
    current = p0
    for m in range(2 ** n - 1):
        k = min(set(range(n)) - ones(m))
        move = conj(([marker] if marker is not None else [])
                    + [eq_vector(x, alpha, k), rightmost_one(x, k),
                       Diamond(eq_vector(x, alpha, -1))])
        landing = conj(([marker] if marker is not None else [])
                       + [eq_vector(x, alpha, -1), eq_binary(alpha, m + 1)])
        found = None
        for cand in sorted(model.l_successors(current)):
            if not holds(cand, move):
                continue
            for nxt in sorted(model.d_successors(cand)):
                if holds(nxt, landing):
                    found = (cand, nxt)
                    break
            if found:
                break
        if found is None:
            raise ExtractionError(
                "extraction-failure",
                f"step {m}: no staircase witness for value {m + 1} from {current}")
        p_prime_points.append(found[0])
        p_points.append(found[1])
        current = found[1]
    return p_points, p_prime_points


def extract_counter_trace(model, p0, n):
    """Staircase trace for the subset-space counter: points p_0..p_{2^n-1}
    with counter values 0..2^n-1, linked by L-steps to the p'_i points and
    []-steps onward."""
    cat = counter_catalog(n)
    b, alpha, x = _counter_vectors(n, cat)
    return _staircase(model, p0, n, alpha, x, marker=b)


# ---------------------------------------------------------------------------
# Machine-encoding formula.

_A_FAMILIES = ("A_time", "A_pos", "A_state", "A_written", "A_read")
_X_FAMILIES = ("X_time", "X_tapv", "X_pos", "X_read")


def f_ssl_catalog(params):
    """Atom layout: the class marker B first, then the shared-variable
    carrier families, then the persistent X families; bit families are
    numbered most significant bit first."""
    atm = params.atm
    N = params.N
    cat = VariableCatalog()
    cat.assign_next("B", None)
    lengths = {"A_time": N, "A_pos": N + 1, "X_time": N, "X_tapv": N,
               "X_pos": N + 1}
    for fam in _A_FAMILIES:
        _assign_family(cat, fam, lengths, atm)
    for fam in _X_FAMILIES:
        _assign_family(cat, fam, lengths, atm)
    return cat


def _assign_family(cat, fam, lengths, atm):
    if fam.endswith("_state"):
        for q in atm.states:
            cat.assign_next(fam, q)
    elif fam.endswith("_written") or fam.endswith("_read"):
        for a in atm.symbols:
            cat.assign_next(fam, a)
    else:
        for k in range(lengths[fam] - 1, -1, -1):
            cat.assign_next(fam, k)


class _SslVocab:
    """Shared-variable and persistent-variable vectors for one parameter set."""

    def __init__(self, params, cat):
        self.params = params
        self.cat = cat
        atm = params.atm
        N = params.N
        self.b = cat.formula("B")

        def shared(fam, key):
            return shared_ssl(cat.formula(fam, key), self.b)

        self.alpha_time = FormulaVector([shared("A_time", k)
                                         for k in range(N - 1, -1, -1)])
        self.alpha_pos = FormulaVector([shared("A_pos", k)
                                        for k in range(N, -1, -1)])
        self.alpha_state = {q: shared("A_state", q) for q in atm.states}
        self.alpha_written = {a: shared("A_written", a) for a in atm.symbols}
        self.alpha_read = {a: shared("A_read", a) for a in atm.symbols}
        self.alpha_state_vec = FormulaVector([self.alpha_state[q] for q in atm.states])
        self.alpha_written_vec = FormulaVector([self.alpha_written[a] for a in atm.symbols])
        self.alpha_read_vec = FormulaVector([self.alpha_read[a] for a in atm.symbols])

        self.x_time = cat.vector("X_time", N)
        self.x_tapv = cat.vector("X_tapv", N)
        self.x_pos = cat.vector("X_pos", N + 1)
        self.x_read = {a: cat.formula("X_read", a) for a in atm.symbols}
        self.x_read_vec = FormulaVector([self.x_read[a] for a in atm.symbols])


def _uniqueness_ssl(v):
    return Implies(v.b, conj([unique(v.alpha_state_vec),
                              unique(v.alpha_written_vec),
                              unique(v.alpha_read_vec)]))


def _start_ssl(v):
    N = v.params.N
    return conj([v.b, eq_binary(v.alpha_time, 0),
                 eq_binary(v.alpha_pos, 2 ** N - 1),
                 v.alpha_state[v.params.atm.init], v.alpha_read[BLANK]])


def _time_after_previous_visit(v):
    body = conj([
        leq(v.x_tapv, v.x_time),
        Implies(And(lt(v.alpha_time, v.x_time), neq(v.alpha_pos, v.x_pos)),
                neq_plus1(v.x_tapv, v.alpha_time)),
        Implies(And(lt(v.alpha_time, v.x_time), eq_vector(v.alpha_pos, v.x_pos, -1)),
                lt(v.alpha_time, v.x_tapv)),
    ])
    return Implies(v.b, body)


def _get_the_right_symbol(v):
    params = v.params
    N = params.N
    base = 2 ** N - 1
    fresh_parts = []
    for i, a in enumerate(params.w, start=1):
        fresh_parts.append(Implies(eq_binary(v.x_pos, base + i), v.x_read[a]))
    outside = disj([leq_binary(v.x_pos, base), gt_binary(v.x_pos, base + params.n)])
    fresh_parts.append(Implies(outside, v.x_read[BLANK]))
    fresh = Implies(And(v.b, eq_binary(v.x_tapv, 0)), conj(fresh_parts))
    revisit = Implies(conj([v.b, gt_binary(v.x_tapv, 0),
                            eq_vector(v.alpha_time, v.x_tapv, -1)]),
                      eq_vector(v.x_read_vec, v.alpha_written_vec, -1))
    return And(fresh, revisit)


def _compstep_ssl(v, r, theta, direction):
    N = v.params.N
    after = conj([eq_vector(v.alpha_time, v.x_time, -1),
                  eq_vector(v.alpha_pos, v.x_pos, -1),
                  v.alpha_state[r], v.alpha_written[theta],
                  eq_vector(v.alpha_read_vec, v.x_read_vec, -1)])
    parts = []
    for k in range(N):
        for l in range(N + 1):
            if direction == RIGHT:
                pos_guard = rightmost_zero(v.alpha_pos, l)
                pos_move = rightmost_one(v.x_pos, l)
            else:
                pos_guard = rightmost_one(v.alpha_pos, l)
                pos_move = rightmost_zero(v.x_pos, l)
            guard = conj([v.b, rightmost_zero(v.alpha_time, k), pos_guard])
            body = conj([v.b, eq_vector(v.x_time, v.alpha_time, k),
                         rightmost_one(v.x_time, k),
                         eq_vector(v.x_pos, v.alpha_pos, l), pos_move,
                         Diamond(after)])
            parts.append(Implies(guard, L(body)))
    return conj(parts)


def entries_left_then_right(atm, q, a):
    """Transition right-hand sides for (q, a): the left-moving entries
    first, then the right-moving ones, declaration order within each."""
    all_entries = atm.delta_for(q, a)
    return ([e for e in all_entries if e[2] == LEFT]
            + [e for e in all_entries if e[2] == RIGHT])


def _computation_ssl(v):
    atm = v.params.atm
    parts = []
    for q in atm.forall:
        for a in atm.symbols:
            steps = [_compstep_ssl(v, r, b, d)
                     for r, b, d in entries_left_then_right(atm, q, a)]
            parts.append(Implies(And(v.alpha_state[q], v.alpha_read[a]), conj(steps)))
    for q in atm.exists:
        for a in atm.symbols:
            steps = [_compstep_ssl(v, r, b, d)
                     for r, b, d in entries_left_then_right(atm, q, a)]
            parts.append(Implies(And(v.alpha_state[q], v.alpha_read[a]), disj(steps)))
    return conj(parts)


def _no_reject_ssl(v):
    return Not(v.alpha_state[v.params.atm.reject])


def gen_f_ssl(params):
    """Formula satisfiable exactly when the machine accepts the input:
    six conjuncts fixing uniqueness, the start configuration, tape-cell
    bookkeeping, symbol lookups, the step relation, and rejection-freeness."""
    cat = f_ssl_catalog(params)
    v = _SslVocab(params, cat)
    f = conj([K(Box(_uniqueness_ssl(v))), _start_ssl(v),
              K(Box(_time_after_previous_visit(v))),
              K(Box(_get_the_right_symbol(v))),
              K(Box(_computation_ssl(v))),
              K(Box(_no_reject_ssl(v)))])
    return f, cat


# ---------------------------------------------------------------------------
# Witness model for the machine-encoding formula.

def _index_set(params):
    """Per-cloud carrier point index: one entry per shared-variable bit."""
    atm = params.atm
    N = params.N
    out = []
    out += [("A_time", k) for k in range(N)]
    out += [("A_pos", k) for k in range(N + 1)]
    out += [("A_state", q) for q in atm.states]
    out += [("A_written", a) for a in atm.symbols]
    out += [("A_read", a) for a in atm.symbols]
    return out


def _node_window_data(params, tree):
    """Window-coordinate node attributes keyed by node id."""
    N = params.N
    data = {}
    for nid in tree.nodes():
        d = node_data(tree, nid)
        data[nid] = {
            "time": d.time,
            "pos": window_pos(N, d.pos),
            "state": d.state,
            "read": d.read,
            "written": d.written if d.pred is not None else BLANK,
            "pred": d.pred,
        }
    return data


def _tapv_value(tree, data, x):
    """Time after the previous visit to the cell of node x: zero when the
    cell is fresh, otherwise one past the time of the last earlier visit."""
    path = tree.path_from_root(x)
    target = data[x]["pos"]
    last = None
    for v in path[:-1]:
        if data[v]["pos"] == target:
            last = v
    return 0 if last is None else data[last]["time"] + 1


def _pw(v, x):
    return f"p_{v}_{x}"


def _uw(v, idx):
    fam, key = idx
    return f"u_{v}_{fam}_{key}"


def _sw(v, idx):
    fam, key = idx
    return f"s_{v}_{fam}_{key}"


def build_f_ssl_model(params, tree):
    """Witness model built from an accepting tree: one cloud per tree node
    (descendant points, carrier points, stopper points) plus a final cloud
    holding only carrier points."""
    report = validate_tree(params.atm, params.w, tree, mode="accepting")
    if not report.ok:
        raise ValueError(f"tree is not accepting: {report.lines()}")
    check_window(params, tree)

    atm = params.atm
    data = _node_window_data(params, tree)
    idx_set = _index_set(params)
    nodes = tree.nodes()
    TOPV = "T"  # sentinel cloud label

    ancestors = {}  # node -> list of (ancestor-or-self)
    for x in nodes:
        ancestors[x] = tree.path_from_root(x)

    def s_indices(v):
        out = [("A_time", k) for k in ones(data[v]["time"])]
        out += [("A_pos", k) for k in ones(data[v]["pos"])]
        out.append(("A_state", data[v]["state"]))
        out.append(("A_written", data[v]["written"]))
        out.append(("A_read", data[v]["read"]))
        return out

    p_points = [(v, x) for x in nodes for v in ancestors[x]]
    u_points = [(v, i) for v in nodes + [TOPV] for i in idx_set]
    s_points = [(v, i) for v in nodes for i in s_indices(v)]

    worlds = ([_pw(v, x) for v, x in p_points] + [_uw(v, i) for v, i in u_points]
              + [_sw(v, i) for v, i in s_points])

    cloud = {v: [] for v in nodes + [TOPV]}
    for v, x in p_points:
        cloud[v].append(_pw(v, x))
    for v, i in u_points:
        cloud[v].append(_uw(v, i))
    for v, i in s_points:
        cloud[v].append(_sw(v, i))
    rel_l = [(a, b) for members in cloud.values() for a in members for b in members]

    desc = {v: [y for y in nodes if v in ancestors[y]] for v in nodes}
    s_present = set(s_points)
    rel_d = []
    for v, x in p_points:
        for v2 in ancestors[x]:
            if v in ancestors[v2]:
                rel_d.append((_pw(v, x), _pw(v2, x)))
    for v, i in u_points:
        if v == TOPV:
            rel_d.append((_uw(v, i), _uw(v, i)))
            continue
        for v2 in desc[v]:
            rel_d.append((_uw(v, i), _uw(v2, i)))
            if (v2, i) in s_present:
                rel_d.append((_uw(v, i), _sw(v2, i)))
        rel_d.append((_uw(v, i), _uw(TOPV, i)))
    for v, i in s_points:
        rel_d.append((_sw(v, i), _sw(v, i)))

    cat = f_ssl_catalog(params)
    valuation = {cat.atom("B"): {_pw(v, x) for v, x in p_points}}
    for fam, key in idx_set:
        valuation[cat.atom(fam, key)] = (
            {_uw(v, i) for v, i in u_points if i == (fam, key)}
            | {_sw(v, i) for v, i in s_points if i == (fam, key)})
    N = params.N
    for k in range(N):
        valuation[cat.atom("X_time", k)] = {
            _pw(v, x) for v, x in p_points if k in ones(data[x]["time"])}
        valuation[cat.atom("X_tapv", k)] = {
            _pw(v, x) for v, x in p_points if k in ones(_tapv_value(tree, data, x))}
    for k in range(N + 1):
        valuation[cat.atom("X_pos", k)] = {
            _pw(v, x) for v, x in p_points if k in ones(data[x]["pos"])}
    for a in atm.symbols:
        valuation[cat.atom("X_read", a)] = {
            _pw(v, x) for v, x in p_points if data[x]["read"] == a}

    root = tree.root
    designated = _pw(root, root)
    model = BimodalModel(worlds, rel_d, rel_l, valuation,
                         frame_class=CROSS_AXIOM, designated=designated)
    return model, designated


# ---------------------------------------------------------------------------
# Accepting-tree extraction.

def _reachable_restriction(model, r0):
    """Submodel on the points reachable from r0 by breadth-first search
    over both relations; on validated models this is exactly the part the
    formula constrains."""
    seen = {r0}
    queue = [r0]
    while queue:
        w = queue.pop(0)
        for nxt in sorted(model.l_successors(w)) + sorted(model.d_successors(w)):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    worlds = sorted(seen)
    keep = set(worlds)
    rel_d = [(a, b) for a, b in model.rel_d if a in keep and b in keep]
    rel_l = [(a, b) for a, b in model.rel_l if a in keep and b in keep]
    val = {atom_id: members & keep for atom_id, members in model.valuation.items()}
    return BimodalModel(worlds, rel_d, rel_l, val,
                        frame_class=model.frame_class, designated=r0,
                        is_product=model.is_product)


def tree_size_bound(atm, N):
    """Largest possible partial tree: branching D, height below 2^N."""
    D = atm.max_branching()
    depth = 2 ** N
    if D == 1:
        return depth
    return (D ** depth - 1) // (D - 1)


def _check_global_conjuncts(model, r0, named):
    for name, f in named:
        if not model.eval(r0, f):
            raise ExtractionError("witness-not-found", name)


def extract_accepting_tree_ssl(model, r0, params):
    """Rebuild an accepting tree from any model of the machine-encoding
    formula, growing a partial tree leaf by leaf and keeping a morphism
    from tree nodes to model points."""
    model = _reachable_restriction(model, r0)
    atm = params.atm
    N = params.N
    cat = f_ssl_catalog(params)
    v = _SslVocab(params, cat)

    _check_global_conjuncts(model, r0, [
        ("uniqueness", K(Box(_uniqueness_ssl(v)))),
        ("start", _start_ssl(v)),
        ("time_after_previous_visit", K(Box(_time_after_previous_visit(v)))),
        ("get_the_right_symbol", K(Box(_get_the_right_symbol(v)))),
        ("no_reject", K(Box(_no_reject_ssl(v)))),
    ])

    tree = ComputationTree()
    tree.add_root(initial_config(atm, params.w))
    pi = {tree.root: r0}
    bound = tree_size_bound(atm, N)

    def grow_at(leaf):
        config = tree.configs[leaf]
        point = pi[leaf]
        i = tree.depth(leaf)
        j = window_pos(N, config.head)
        free = set(range(N)) - ones(i)
        if not free:
            raise ExtractionError("witness-not-found",
                                  f"computation: node at the time bound ({leaf})")
        k = min(free)
        entries = entries_left_then_right(atm, config.state, config.read())
        universal = config.state in atm.forall

        def find_witness(entry):
            r, theta, direction = entry
            if direction == RIGHT:
                l_set = set(range(N + 1)) - ones(j)
                pos_move = rightmost_one
            else:
                l_set = ones(j)
                pos_move = rightmost_zero
            if not l_set:
                return None
            l = min(l_set)
            after = conj([eq_vector(v.alpha_time, v.x_time, -1),
                          eq_vector(v.alpha_pos, v.x_pos, -1),
                          v.alpha_state[r], v.alpha_written[theta],
                          eq_vector(v.alpha_read_vec, v.x_read_vec, -1)])
            mid = conj([v.b, eq_vector(v.x_time, v.alpha_time, k),
                        rightmost_one(v.x_time, k),
                        eq_vector(v.x_pos, v.alpha_pos, l), pos_move(v.x_pos, l)])
            for x in sorted(model.l_successors(point)):
                if not model.eval(x, mid):
                    continue
                for y in sorted(model.d_successors(x)):
                    if model.eval(y, after):
                        return y
            return None

        added = []
        seen_configs = set()
        for entry in entries:
            y = find_witness(entry)
            if y is None:
                if universal:
                    raise ExtractionError(
                        "witness-not-found",
                        f"computation: compstep for {entry} at node {leaf}")
                continue
            nxt = apply_entry(config, entry)
            if nxt.key() in seen_configs:
                continue
            seen_configs.add(nxt.key())
            child = tree.add_child(leaf, nxt)
            pi[child] = y
            added.append(child)
            if not universal:
                break
        if not added:
            raise ExtractionError(
                "witness-not-found",
                f"computation: no applicable step at node {leaf}")
        return added

    pending = [tree.root]
    while pending:
        leaf = pending.pop(0)
        state = tree.configs[leaf].state
        if state == atm.accept:
            continue
        if state == atm.reject:
            raise ExtractionError("witness-not-found",
                                  f"no_reject: node {leaf} rejects")
        if len(tree.configs) > bound:
            raise ExtractionError("bound-exceeded",
                                  f"partial tree grew past {bound} nodes")
        pending.extend(grow_at(leaf))
        if len(tree.configs) > bound:
            raise ExtractionError("bound-exceeded",
                                  f"partial tree grew past {bound} nodes")

    report = validate_tree(atm, params.w, tree, mode="accepting")
    if not report.ok:
        raise ExtractionError("witness-not-found",
                              f"extracted tree fails validation: {report.lines()}")
    morphism_report = check_morphism_ssl(model, r0, params, tree, pi)
    if not morphism_report.ok:
        raise ExtractionError("witness-not-found",
                              f"morphism check failed: {morphism_report.lines()}")
    return tree, pi


class MorphismReport:
    def __init__(self, checks):
        self.checks = checks

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.checks)

    def lines(self):
        out = []
        for name, passed, detail in self.checks:
            line = f"{name}: {'pass' if passed else 'fail'}"
            if not passed and detail is not None:
                line += f" {detail}"
            out.append(line)
        out.append(f"result: {'pass' if self.ok else 'fail'}")
        return out


def check_morphism_ssl(model, r0, params, tree, pi):
    """The four anchoring conditions tying tree nodes to model points:
    root anchoring, cloud-relation preservation, the written-symbol shared
    variable, and the configuration shared variables."""
    cat = f_ssl_catalog(params)
    v = _SslVocab(params, cat)
    N = params.N
    checks = []

    checks.append(("root-anchored", pi[tree.root] == r0, pi.get(tree.root)))

    cloud_list = clouds(model)
    owner = {}
    for ci, members in enumerate(cloud_list):
        for w in members:
            owner[w] = ci
    induced = set(induced_cloud_relation(model, cloud_list))
    bad_edge = None
    for child in tree.nodes():
        parent = tree.parent[child]
        if parent is None:
            continue
        if (owner[pi[parent]], owner[pi[child]]) not in induced:
            bad_edge = (parent, child)
            break
    checks.append(("edges-preserved", bad_edge is None, bad_edge))

    data = _node_window_data(params, tree)
    bad_written = None
    for nid in tree.nodes():
        if tree.parent[nid] is None:
            continue
        if not model.eval(pi[nid], v.alpha_written[data[nid]["written"]]):
            bad_written = nid
            break
    checks.append(("written-symbols", bad_written is None, bad_written))

    bad_config = None
    for nid in tree.nodes():
        want = conj([v.b, eq_binary(v.alpha_time, data[nid]["time"]),
                     eq_binary(v.alpha_pos, data[nid]["pos"]),
                     v.alpha_state[data[nid]["state"]],
                     v.alpha_read[data[nid]["read"]]])
        if not model.eval(pi[nid], want):
            bad_config = nid
            break
    checks.append(("configurations", bad_config is None, bad_config))
    return MorphismReport(checks)
