"""Product-logic constructions: binary-counter formulas, machine-encoding
formulas, product witness models, and extraction of counter traces and
accepting trees from arbitrary commutator models.

The same tape-window conventions as the subset-space constructions apply:
window [0, 2^(N+1)-2], head starting at cell 2^N-1, with machine-level
configurations kept in head-at-0 coordinates.
"""

from .formula import (Atom, Not, And, K, Box, L, Diamond, Implies,
                      FormulaVector, conj, disj, eq_vector, eq_binary,
                      rightmost_zero, rightmost_one, unique, lt, leq,
                      leq_binary, gt_binary, persistent_macro, shared_s4s5,
                      ones)
from .catalog import VariableCatalog
from .semantics import product_model, clouds, induced_cloud_relation
from .atm import (BLANK, LEFT, RIGHT, ComputationTree, initial_config,
                  apply_entry, node_data, validate_tree)
from .red_ssl import (ExtractionError, ReductionParams, window_pos,
                      check_window, entries_left_then_right, _staircase,
                      _reachable_restriction, _check_global_conjuncts,
                      tree_size_bound, MorphismReport, _node_window_data)


# ---------------------------------------------------------------------------
# Binary counter: formula, witness model, trace extraction.

def counter_catalog_s4s5(n):
    cat = VariableCatalog()
    for k in range(n):
        cat.assign("A", k, k)
    for k in range(n):
        cat.assign("X", k, n + k)
    return cat


def _counter_vectors(n, cat):
    alpha = FormulaVector([shared_s4s5(cat.formula("A", k))
                           for k in range(n - 1, -1, -1)])
    x = cat.vector("X", n)
    return alpha, x


def gen_counter_s4s5(n):
    """Formula satisfiable exactly by models that count from 0 to 2^n - 1
    along a staircase, with the persistent vector X carrying the
    incremented value across each []-step."""
    if n < 1:
        raise ValueError("counter width must be at least 1")
    cat = counter_catalog_s4s5(n)
    alpha, x = _counter_vectors(n, cat)
    steps = []
    for k in range(n):
        body = conj([eq_vector(x, alpha, k), rightmost_one(x, k),
                     Diamond(eq_vector(x, alpha, -1))])
        steps.append(Implies(rightmost_zero(alpha, k), L(body)))
    f = conj([persistent_macro(x), eq_binary(alpha, 0), K(Box(conj(steps)))])
    return f, cat


def build_counter_s4s5_model(n):
    """Product witness model on {0..2^n-1} x {0..2^n-1}: the first factor
    carries the counter value (<=-ordered), the second the persistent X."""
    if n < 1:
        raise ValueError("counter width must be at least 1")
    top = 2 ** n
    values = list(range(top))
    frame1 = (values, [(i, j) for i in values for j in values if i <= j])
    frame2 = (values, [(i, j) for i in values for j in values])
    cat = counter_catalog_s4s5(n)
    valuation = {}
    for k in range(n):
        valuation[cat.atom("A", k)] = {(i, j) for i in values for j in values
                                       if k in ones(i)}
        valuation[cat.atom("X", k)] = {(i, j) for i in values for j in values
                                       if k in ones(j)}
    model = product_model(frame1, frame2, valuation, designated=(0, 0))
    return model, model.designated


def extract_counter_trace_s4s5(model, p0, n):
    """Staircase trace for the product-logic counter: points p_0..p_{2^n-1}
    with counter values 0..2^n-1, the incremented value carried along each
    []-step by the persistent vector X."""
    cat = counter_catalog_s4s5(n)
    alpha, x = _counter_vectors(n, cat)
    return _staircase(model, p0, n, alpha, x, marker=None)


# ---------------------------------------------------------------------------
# Machine-encoding formula.

def f_s4s5_catalog(params):
    """Atom layout: bit families most-significant-bit first, families in a
    fixed order ending with the scalar activity flag."""
    atm = params.atm
    N = params.N
    cat = VariableCatalog()

    def bits(fam, length):
        for k in range(length - 1, -1, -1):
            cat.assign_next(fam, k)

    bits("A_time", N)
    bits("X_prevtime", N)
    bits("X_tapv", N)
    bits("A_pos", N + 1)
    bits("X_pos", N + 1)
    bits("A_prevpos", N + 1)
    bits("X_prevpos", N + 1)
    for q in atm.states:
        cat.assign_next("A_state", q)
    for a in atm.symbols:
        cat.assign_next("A_read", a)
    for a in atm.symbols:
        cat.assign_next("A_written", a)
    for a in atm.symbols:
        cat.assign_next("X_read", a)
    cat.assign_next("B_active", None)
    return cat


class _S4Vocab:
    """Shared-variable and persistent-variable vectors for one parameter set."""

    def __init__(self, params, cat):
        self.params = params
        self.cat = cat
        atm = params.atm
        N = params.N

        def shared_vec(fam, length):
            return FormulaVector([shared_s4s5(cat.formula(fam, k))
                                  for k in range(length - 1, -1, -1)])

        self.alpha_time = shared_vec("A_time", N)
        self.alpha_pos = shared_vec("A_pos", N + 1)
        self.alpha_prevpos = shared_vec("A_prevpos", N + 1)
        self.alpha_state = {q: shared_s4s5(cat.formula("A_state", q))
                            for q in atm.states}
        self.alpha_written = {a: shared_s4s5(cat.formula("A_written", a))
                              for a in atm.symbols}
        self.alpha_read = {a: shared_s4s5(cat.formula("A_read", a))
                           for a in atm.symbols}
        self.alpha_state_vec = FormulaVector([self.alpha_state[q] for q in atm.states])
        self.alpha_written_vec = FormulaVector([self.alpha_written[a] for a in atm.symbols])
        self.alpha_read_vec = FormulaVector([self.alpha_read[a] for a in atm.symbols])

        self.x_prevtime = cat.vector("X_prevtime", N)
        self.x_tapv = cat.vector("X_tapv", N)
        self.x_pos = cat.vector("X_pos", N + 1)
        self.x_prevpos = cat.vector("X_prevpos", N + 1)
        self.x_read = {a: cat.formula("X_read", a) for a in atm.symbols}
        self.x_read_vec = FormulaVector([self.x_read[a] for a in atm.symbols])
        self.b_active = cat.formula("B_active")


def _persistence(v):
    return conj([persistent_macro(v.x_prevtime), persistent_macro(v.x_prevpos),
                 persistent_macro(v.x_pos), persistent_macro(v.x_tapv),
                 persistent_macro(v.x_read_vec)])


def _uniqueness_s4s5(v):
    return conj([unique(v.alpha_state_vec), unique(v.alpha_written_vec),
                 unique(v.x_read_vec)])


def _start_s4s5(v):
    N = v.params.N
    return conj([eq_binary(v.alpha_time, 0), eq_binary(v.alpha_pos, 2 ** N - 1),
                 v.alpha_state[v.params.atm.init]])


def _initial_symbols(v):
    params = v.params
    N = params.N
    base = 2 ** N - 1
    parts = []
    for i, a in enumerate(params.w, start=1):
        parts.append(Implies(eq_binary(v.x_pos, base + i), v.x_read[a]))
    outside = disj([leq_binary(v.x_pos, base), gt_binary(v.x_pos, base + params.n)])
    parts.append(Implies(outside, v.x_read[BLANK]))
    return Implies(eq_binary(v.x_tapv, 0), conj(parts))


def _written_symbols(v):
    guard = conj([gt_binary(v.x_tapv, 0),
                  eq_vector(v.x_tapv, v.alpha_time, -1), v.b_active])
    return Implies(guard, eq_vector(v.x_read_vec, v.alpha_written_vec, -1))


def _read_a_symbol(v):
    existence = L(conj([eq_vector(v.x_pos, v.alpha_pos, -1),
                        leq(v.x_tapv, v.alpha_time), v.b_active]))
    previous_visit = Implies(
        conj([gt_binary(v.x_tapv, 0),
              eq_vector(v.x_tapv, v.alpha_time, -1), v.b_active]),
        eq_vector(v.x_pos, v.alpha_prevpos, -1))
    becoming_inactive = Implies(
        And(eq_vector(v.x_pos, v.alpha_prevpos, -1),
            lt(v.x_tapv, v.alpha_time)),
        Not(v.b_active))
    staying_inactive = Implies(Not(v.b_active), Box(Not(v.b_active)))
    storing = Implies(
        conj([eq_vector(v.x_pos, v.alpha_pos, -1),
              leq(v.x_tapv, v.alpha_time), v.b_active]),
        eq_vector(v.alpha_read_vec, v.x_read_vec, -1))
    return conj([existence, previous_visit, becoming_inactive,
                 staying_inactive, storing])


def _compstep_body_s4s5(v, r, theta, direction, k, l):
    """Innermost <>-body of one computation-step disjunct: the shared
    vectors of the successor cloud pick up the incremented time and the
    moved position from the persistent carry vectors."""
    pos_move = rightmost_one if direction == RIGHT else rightmost_zero
    return conj([eq_vector(v.alpha_time, v.x_prevtime, k),
                 rightmost_one(v.alpha_time, k),
                 eq_vector(v.alpha_pos, v.x_prevpos, l),
                 pos_move(v.alpha_pos, l),
                 eq_vector(v.alpha_prevpos, v.x_prevpos, -1),
                 v.alpha_state[r], v.alpha_written[theta]])


def _compstep_mid_s4s5(v):
    return And(eq_vector(v.x_prevtime, v.alpha_time, -1),
               eq_vector(v.x_prevpos, v.alpha_pos, -1))


def _compstep_s4s5(v, r, theta, direction):
    N = v.params.N
    parts = []
    for k in range(N):
        for l in range(N + 1):
            pos_guard = (rightmost_zero if direction == RIGHT else rightmost_one)
            guard = And(rightmost_zero(v.alpha_time, k), pos_guard(v.alpha_pos, l))
            body = And(_compstep_mid_s4s5(v),
                       Diamond(_compstep_body_s4s5(v, r, theta, direction, k, l)))
            parts.append(Implies(guard, L(body)))
    return conj(parts)


def _computation_s4s5(v):
    atm = v.params.atm
    parts = []
    for q in atm.forall:
        for a in atm.symbols:
            steps = [_compstep_s4s5(v, r, b, d)
                     for r, b, d in entries_left_then_right(atm, q, a)]
            parts.append(Implies(And(v.alpha_state[q], v.alpha_read[a]), conj(steps)))
    for q in atm.exists:
        for a in atm.symbols:
            steps = [_compstep_s4s5(v, r, b, d)
                     for r, b, d in entries_left_then_right(atm, q, a)]
            parts.append(Implies(And(v.alpha_state[q], v.alpha_read[a]), disj(steps)))
    return conj(parts)


def _no_reject_s4s5(v):
    return Not(v.alpha_state[v.params.atm.reject])


def gen_f_s4s5(params):
    """Formula satisfiable exactly when the machine accepts the input:
    eight conjuncts fixing persistence, uniqueness, the start
    configuration, symbol lookups (fresh and rewritten cells), the
    read-symbol transport, the step relation, and rejection-freeness."""
    cat = f_s4s5_catalog(params)
    v = _S4Vocab(params, cat)
    f = conj([_persistence(v), K(Box(_uniqueness_s4s5(v))), _start_s4s5(v),
              K(Box(_initial_symbols(v))), K(Box(_written_symbols(v))),
              K(Box(_read_a_symbol(v))), K(Box(_computation_s4s5(v))),
              K(Box(_no_reject_s4s5(v)))])
    return f, cat


# ---------------------------------------------------------------------------
# Product witness model built from an accepting tree.

def _tapv_s4s5(tree, data, x):
    """Time after the previous visit to the cell of node x: the time of the
    last node on the root path whose step wrote into that cell, else 0."""
    if tree.parent[x] is None:
        return 0
    target = data[x]["pos"]
    path = tree.path_from_root(x)
    value = 0
    for y in path[1:]:
        if data[tree.parent[y]]["pos"] == target:
            value = data[y]["time"]
    return value


def build_f_s4s5_model(params, tree):
    """Product witness model over the accepting tree: the first factor is
    the tree under ancestry, the second indexes the persistent carriers."""
    report = validate_tree(params.atm, params.w, tree, mode="accepting")
    if not report.ok:
        raise ValueError(f"tree is not accepting: {report.lines()}")
    check_window(params, tree)

    atm = params.atm
    N = params.N
    data = _node_window_data(params, tree)
    nodes = tree.nodes()
    root = tree.root

    ancestry = []
    for x in nodes:
        for v in tree.path_from_root(x):
            ancestry.append((v, x))
    ancestry_set = set(ancestry)

    frame1 = (nodes, ancestry)
    frame2 = (nodes, [(a, b) for a in nodes for b in nodes])

    pairs = [(v, x) for v in nodes for x in nodes]
    cat = f_s4s5_catalog(params)
    valuation = {}
    for k in range(N):
        valuation[cat.atom("A_time", k)] = {
            (v, x) for v, x in pairs if k in ones(data[v]["time"])}
        valuation[cat.atom("X_prevtime", k)] = {
            (v, x) for v, x in pairs
            if x != root and k in ones(data[x]["time"] - 1)}
        valuation[cat.atom("X_tapv", k)] = {
            (v, x) for v, x in pairs
            if k in ones(_tapv_s4s5(tree, data, x))}
    for k in range(N + 1):
        valuation[cat.atom("A_pos", k)] = {
            (v, x) for v, x in pairs if k in ones(data[v]["pos"])}
        valuation[cat.atom("X_pos", k)] = {
            (v, x) for v, x in pairs if k in ones(data[x]["pos"])}
        valuation[cat.atom("A_prevpos", k)] = {
            (v, x) for v, x in pairs
            if v != root and k in ones(data[tree.parent[v]]["pos"])}
        valuation[cat.atom("X_prevpos", k)] = {
            (v, x) for v, x in pairs
            if x != root and k in ones(data[tree.parent[x]]["pos"])}
    for q in atm.states:
        valuation[cat.atom("A_state", q)] = {
            (v, x) for v, x in pairs if data[v]["state"] == q}
    for a in atm.symbols:
        valuation[cat.atom("A_read", a)] = {
            (v, x) for v, x in pairs if data[v]["read"] == a}
        valuation[cat.atom("A_written", a)] = {
            (v, x) for v, x in pairs if data[v]["written"] == a}
        valuation[cat.atom("X_read", a)] = {
            (v, x) for v, x in pairs if data[x]["read"] == a}
    valuation[cat.atom("B_active")] = {
        (v, x) for v, x in pairs if (v, x) in ancestry_set}

    model = product_model(frame1, frame2, valuation, designated=(root, root))
    return model, model.designated


# ---------------------------------------------------------------------------
# Accepting-tree extraction.

def extract_accepting_tree_s4s5(model, r0, params):
    """Rebuild an accepting tree from any commutator model of the
    machine-encoding formula, growing a partial tree leaf by leaf and
    keeping a morphism from tree nodes to model points (one per cloud)."""
    model = _reachable_restriction(model, r0)
    atm = params.atm
    N = params.N
    cat = f_s4s5_catalog(params)
    v = _S4Vocab(params, cat)

    _check_global_conjuncts(model, r0, [
        ("persistence", _persistence(v)),
        ("uniqueness", K(Box(_uniqueness_s4s5(v)))),
        ("start", _start_s4s5(v)),
        ("initial_symbols", K(Box(_initial_symbols(v)))),
        ("written_symbols", K(Box(_written_symbols(v)))),
        ("read_a_symbol", K(Box(_read_a_symbol(v)))),
        ("no_reject", K(Box(_no_reject_s4s5(v)))),
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
        mid = _compstep_mid_s4s5(v)

        def find_witness(entry):
            r, theta, direction = entry
            if direction == RIGHT:
                l_set = set(range(N + 1)) - ones(j)
            else:
                l_set = ones(j)
            if not l_set:
                return None
            l = min(l_set)
            body = _compstep_body_s4s5(v, r, theta, direction, k, l)
            for s in sorted(model.l_successors(point)):
                if not model.eval(s, mid):
                    continue
                for t in sorted(model.d_successors(s)):
                    if model.eval(t, body):
                        return t
            return None

        added = []
        seen_configs = set()
        for entry in entries:
            t = find_witness(entry)
            if t is None:
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
            pi[child] = t
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
    morphism_report = check_morphism_s4s5(model, r0, params, tree, pi)
    if not morphism_report.ok:
        raise ExtractionError("witness-not-found",
                              f"morphism check failed: {morphism_report.lines()}")
    return tree, pi


def check_morphism_s4s5(model, r0, params, tree, pi):
    """The four anchoring conditions tying tree nodes to model clouds:
    root anchoring, cloud-relation preservation, the previous-position and
    written-symbol shared variables, and the configuration shared
    variables."""
    cat = f_s4s5_catalog(params)
    v = _S4Vocab(params, cat)
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
        parent = tree.parent[nid]
        if parent is None:
            continue
        want = And(eq_binary(v.alpha_prevpos, data[parent]["pos"]),
                   v.alpha_written[data[nid]["written"]])
        if not model.eval(pi[nid], want):
            bad_written = nid
            break
    checks.append(("prevpos-and-written", bad_written is None, bad_written))

    bad_config = None
    for nid in tree.nodes():
        want = conj([eq_binary(v.alpha_time, data[nid]["time"]),
                     eq_binary(v.alpha_pos, data[nid]["pos"]),
                     v.alpha_state[data[nid]["state"]],
                     v.alpha_read[data[nid]["read"]]])
        if not model.eval(pi[nid], want):
            bad_config = nid
            break
    checks.append(("configurations", bad_config is None, bad_config))
    return MorphismReport(checks)
