"""Alternating Turing machines: configurations, accepting-tree search and
tree validation.

States are partitioned into existential, universal, accepting and rejecting
states; a machine accepts when an accepting tree exists (existential nodes
keep one successor, universal nodes keep all of them, every leaf accepts).
The transition list order is semantic: it breaks ties for existential
choices and fixes the output order of successors.
"""

BLANK = "#"
LEFT = "L"
RIGHT = "R"


class AtmError(ValueError):
    pass


class AtmSpec:
    """Machine description.

    symbols: tape alphabet (the blank "#" must be included);
    input_symbols: subset usable in inputs; delta: ordered list of
    ((state, symbol), (state, symbol, direction)) entries.
    """

    def __init__(self, symbols, input_symbols, states, exists, forall,
                 accept, reject, init, delta):
        self.symbols = list(symbols)
        self.input_symbols = list(input_symbols)
        self.states = list(states)
        self.exists = list(exists)
        self.forall = list(forall)
        self.accept = accept
        self.reject = reject
        self.init = init
        self.delta = [((q, a), (r, b, d)) for (q, a), (r, b, d) in delta]
        self._validate()
        self.state_index = {q: i for i, q in enumerate(self.states)}
        self.symbol_index = {a: i for i, a in enumerate(self.symbols)}
        self._delta_map = {}
        for (q, a), rhs in self.delta:
            self._delta_map.setdefault((q, a), []).append(rhs)

    def _validate(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise AtmError("duplicate tape symbols")
        if BLANK not in self.symbols:
            raise AtmError("tape alphabet must contain the blank '#'")
        for a in self.input_symbols:
            if a not in self.symbols or a == BLANK:
                raise AtmError(f"input symbol {a!r} must be a non-blank tape symbol")
        if len(set(self.states)) != len(self.states):
            raise AtmError("duplicate states")
        groups = [set(self.exists), set(self.forall), {self.accept}, {self.reject}]
        union = set()
        total = 0
        for g in groups:
            union |= g
            total += len(g)
        if total != len(union) or union != set(self.states):
            raise AtmError("existential/universal/accept/reject must partition the states")
        if self.init not in self.states:
            raise AtmError(f"unknown initial state {self.init!r}")
        seen = set()
        for (q, a), (r, b, d) in self.delta:
            if q not in self.states or r not in self.states:
                raise AtmError(f"transition uses unknown state: {q!r} or {r!r}")
            if a not in self.symbols or b not in self.symbols:
                raise AtmError(f"transition uses unknown symbol: {a!r} or {b!r}")
            if d not in (LEFT, RIGHT):
                raise AtmError(f"direction must be L or R, got {d!r}")
            if q in (self.accept, self.reject):
                raise AtmError(f"accepting/rejecting state {q!r} must have no transitions")
            seen.add((q, a))
        for q in list(self.exists) + list(self.forall):
            for a in self.symbols:
                if (q, a) not in seen:
                    raise AtmError(f"state {q!r} has no transition on symbol {a!r}")

    def delta_for(self, q, a):
        """Right-hand sides for (q, a), in declaration order."""
        return list(self._delta_map.get((q, a), []))

    def max_branching(self):
        return max((len(v) for v in self._delta_map.values()), default=1)


class Configuration:
    """Instantaneous description: state, head cell, and a default-blank tape
    mapping over the integers with finite support."""

    __slots__ = ("state", "head", "tape", "_key")

    def __init__(self, state, head, tape):
        self.state = state
        self.head = head
        self.tape = {z: s for z, s in tape.items() if s != BLANK}
        self._key = (state, head, frozenset(self.tape.items()))

    def read(self):
        return self.tape.get(self.head, BLANK)

    def symbol_at(self, z):
        return self.tape.get(z, BLANK)

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Configuration) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        cells = " ".join(f"{z}:{s}" for z, s in sorted(self.tape.items()))
        return f"Configuration({self.state}, head={self.head}, {cells})"


def initial_config(atm, w):
    """Head on cell 0, input written on cells 1..len(w), all else blank."""
    tape = {}
    for i, a in enumerate(w, start=1):
        if a not in atm.input_symbols:
            raise AtmError(f"input symbol {a!r} is not in the input alphabet")
        tape[i] = a
    return Configuration(atm.init, 0, tape)


def apply_entry(config, entry):
    """Apply one transition right-hand side: write, then move."""
    r, b, d = entry
    tape = dict(config.tape)
    if b == BLANK:
        tape.pop(config.head, None)
    else:
        tape[config.head] = b
    head = config.head + (1 if d == RIGHT else -1)
    return Configuration(r, head, tape)


def successors(atm, config):
    """Successor configurations in transition order, structurally deduplicated."""
    out = []
    seen = set()
    for entry in atm.delta_for(config.state, config.read()):
        nxt = apply_entry(config, entry)
        if nxt.key() not in seen:
            seen.add(nxt.key())
            out.append(nxt)
    return out


# ---------------------------------------------------------------------------
# Computation trees.

class ComputationTree:
    """Rooted tree of configurations.  Node ids are assigned in creation
    order; the root is node 0."""

    def __init__(self):
        self.configs = {}
        self.parent = {}
        self.children = {}
        self._next = 0

    def add_root(self, config):
        if self._next != 0:
            raise ValueError("root already present")
        self.configs[0] = config
        self.parent[0] = None
        self.children[0] = []
        self._next = 1
        return 0

    def add_child(self, parent, config):
        if parent not in self.configs:
            raise KeyError(f"unknown node {parent}")
        v = self._next
        self._next += 1
        self.configs[v] = config
        self.parent[v] = parent
        self.children[v] = []
        self.children[parent].append(v)
        return v

    @property
    def root(self):
        return 0

    def nodes(self):
        return sorted(self.configs)

    def leaves(self):
        return [v for v in self.nodes() if not self.children[v]]

    def depth(self, v):
        d = 0
        while self.parent[v] is not None:
            v = self.parent[v]
            d += 1
        return d

    def path_from_root(self, v):
        path = []
        while v is not None:
            path.append(v)
            v = self.parent[v]
        return list(reversed(path))

    def height(self):
        return max(self.depth(v) for v in self.nodes())

    def canonical_labels(self, v=None):
        """Order-insensitive label structure, for tree label comparison."""
        if v is None:
            v = self.root
        kids = tuple(sorted(self.canonical_labels(c) for c in self.children[v]))
        return (self.configs[v].key(), kids)


def trees_label_equal(t1, t2):
    """True when the two trees carry the same configurations in the same
    shape (children compared as sets; sibling labels are distinct)."""
    return t1.canonical_labels() == t2.canonical_labels()


class NodeData:
    """Derived node attributes: time, pos, state, read, written, pred."""

    def __init__(self, time, pos, state, read, written, pred):
        self.time = time
        self.pos = pos
        self.state = state
        self.read = read
        self.written = written
        self.pred = pred


def node_data(tree, v):
    if v not in tree.configs:
        raise KeyError(f"unknown node {v}")
    config = tree.configs[v]
    pred = tree.parent[v]
    written = None
    if pred is not None:
        written = config.symbol_at(tree.configs[pred].head)
    return NodeData(time=tree.depth(v), pos=config.head, state=config.state,
                    read=config.read(), written=written, pred=pred)


# ---------------------------------------------------------------------------
# Accepting-tree search.

def _accepts(atm, config, fuel, memo):
    key = (config.key(), fuel)
    if key in memo:
        return memo[key]
    state = config.state
    if state == atm.accept:
        result = True
    elif state == atm.reject or fuel == 0:
        result = False
    else:
        succs = successors(atm, config)
        if state in atm.exists:
            result = any(_accepts(atm, s, fuel - 1, memo) for s in succs)
        else:
            result = all(_accepts(atm, s, fuel - 1, memo) for s in succs)
    memo[key] = result
    return result


def find_accepting_tree(atm, w, time_bound):
    """An accepting tree of height at most time_bound, or None.

    Existential nodes keep the first accepting successor in transition
    order; universal nodes keep all (distinct) successors.
    """
    if time_bound < 0:
        raise ValueError("time bound must be a natural number")
    memo = {}
    start = initial_config(atm, w)
    if not _accepts(atm, start, time_bound, memo):
        return None
    tree = ComputationTree()
    tree.add_root(start)
    pending = [(0, start, time_bound)]
    while pending:
        v, config, fuel = pending.pop()
        state = config.state
        if state == atm.accept:
            continue
        succs = successors(atm, config)
        if state in atm.exists:
            chosen = next(s for s in succs if _accepts(atm, s, fuel - 1, memo))
            child = tree.add_child(v, chosen)
            pending.append((child, chosen, fuel - 1))
        else:
            for s in succs:
                child = tree.add_child(v, s)
                pending.append((child, s, fuel - 1))
    return tree


def accepts(atm, w, time_bound):
    """Recursive acceptance predicate, independent of the tree builder."""
    return _accepts(atm, initial_config(atm, w), time_bound, {})


# ---------------------------------------------------------------------------
# Tree validation.

class TreeReport:
    def __init__(self, checks):
        self.checks = checks

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        out = []
        for c in self.checks:
            line = f"{c.name}: {'pass' if c.passed else 'fail'}"
            if not c.passed and c.counterexample is not None:
                line += f" {c.counterexample}"
            out.append(line)
        out.append(f"result: {'pass' if self.ok else 'fail'}")
        return out


class _Check:
    def __init__(self, name, passed, counterexample=None):
        self.name = name
        self.passed = passed
        self.counterexample = counterexample


def validate_tree(atm, w, tree, mode="accepting"):
    """Check the defining conditions of an accepting ("accepting") or
    partial ("partial") tree of the machine on input w."""
    if mode not in ("accepting", "partial"):
        raise ValueError("mode must be 'accepting' or 'partial'")
    checks = []

    root_ok = tree.configs[tree.root] == initial_config(atm, w)
    checks.append(_Check("root-is-initial", root_ok,
                         None if root_ok else tree.root))

    bad_edge = None
    for v in tree.nodes():
        p = tree.parent[v]
        if p is None:
            continue
        if tree.configs[v] not in successors(atm, tree.configs[p]):
            bad_edge = (p, v)
            break
    checks.append(_Check("edges-are-steps", bad_edge is None, bad_edge))

    dup = None
    for v in tree.nodes():
        seen = set()
        for c in tree.children[v]:
            key = tree.configs[c].key()
            if key in seen:
                dup = (v, c)
                break
            seen.add(key)
        if dup:
            break
    checks.append(_Check("siblings-distinct", dup is None, dup))

    missing = None
    for v in tree.nodes():
        if not tree.children[v]:
            continue
        config = tree.configs[v]
        if config.state in atm.forall:
            have = {tree.configs[c].key() for c in tree.children[v]}
            for s in successors(atm, config):
                if s.key() not in have:
                    missing = (v, s.state)
                    break
        if missing:
            break
    checks.append(_Check("universal-nodes-complete", missing is None, missing))

    bad_leaf = None
    for v in tree.leaves():
        state = tree.configs[v].state
        if mode == "accepting":
            if state != atm.accept:
                bad_leaf = (v, state)
                break
        else:
            if state == atm.reject:
                bad_leaf = (v, state)
                break
    name = "leaves-accept" if mode == "accepting" else "no-rejecting-leaf"
    checks.append(_Check(name, bad_leaf is None, bad_leaf))

    return TreeReport(checks)


# ---------------------------------------------------------------------------
# Machine spec file: line-based, transition order significant.

def parse_atm(text):
    fields = {"symbols": None, "input": None, "states": None, "exists": [],
              "forall": [], "accept": None, "reject": None, "init": None}
    delta = []
    # '#' is the blank tape symbol, so machine files have no comment syntax.
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if ":" not in line:
            raise AtmError(f"bad machine line {lineno}: {raw!r}")
        key, rest = line.split(":", 1)
        key = key.strip()
        rest = rest.strip()
        if key == "delta":
            if "->" not in rest:
                raise AtmError(f"bad transition on line {lineno}: {raw!r}")
            lhs, rhs = rest.split("->", 1)
            lp = lhs.split()
            rp = rhs.split()
            if len(lp) != 2 or len(rp) != 3:
                raise AtmError(f"bad transition on line {lineno}: {raw!r}")
            delta.append(((lp[0], lp[1]), (rp[0], rp[1], rp[2])))
        elif key in ("symbols", "input", "states", "exists", "forall"):
            fields[key] = rest.split()
        elif key in ("accept", "reject", "init"):
            fields[key] = rest
        else:
            raise AtmError(f"unknown field {key!r} on line {lineno}")
    for req in ("symbols", "input", "states", "accept", "reject", "init"):
        if fields[req] is None:
            raise AtmError(f"machine file is missing the {req!r} field")
    return AtmSpec(symbols=fields["symbols"], input_symbols=fields["input"],
                   states=fields["states"], exists=fields["exists"],
                   forall=fields["forall"], accept=fields["accept"],
                   reject=fields["reject"], init=fields["init"], delta=delta)


def render_atm(atm):
    lines = [
        "symbols: " + " ".join(atm.symbols),
        "input: " + " ".join(atm.input_symbols),
        "states: " + " ".join(atm.states),
        "exists: " + " ".join(atm.exists),
        "forall: " + " ".join(atm.forall),
        "accept: " + atm.accept,
        "reject: " + atm.reject,
        "init: " + atm.init,
    ]
    for (q, a), (r, b, d) in atm.delta:
        lines.append(f"delta: {q} {a} -> {r} {b} {d}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Tree dump (used by the command-line tools).

def save_tree(tree):
    lines = []
    for v in tree.nodes():
        c = tree.configs[v]
        p = tree.parent[v]
        cells = " ".join(f"{z}={s}" for z, s in sorted(c.tape.items()))
        head = f"node {v} {p if p is not None else '-'} {c.state} {c.head}"
        lines.append((head + " " + cells).rstrip())
    return "\n".join(lines) + "\n"


def load_tree(text):
    tree = ComputationTree()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "node" or len(parts) < 5:
            raise ValueError(f"bad tree line {lineno}: {raw!r}")
        v = int(parts[1])
        parent = None if parts[2] == "-" else int(parts[2])
        state = parts[3]
        head = int(parts[4])
        tape = {}
        for cell in parts[5:]:
            z, s = cell.split("=", 1)
            tape[int(z)] = s
        config = Configuration(state, head, tape)
        if parent is None:
            got = tree.add_root(config)
        else:
            got = tree.add_child(parent, config)
        if got != v:
            raise ValueError(f"tree nodes must be listed in id order (line {lineno})")
    return tree
