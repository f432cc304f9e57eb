"""Bimodal formula ASTs, canonical text syntax, and bit-vector macro expanders.

Formulas are built from five core constructors: atoms, negation, binary
conjunction, and the two box-type modalities K and [].  Everything else
(disjunction, implication, equivalence, L, <>) is expanded into core
constructors at build time, so the model checker only ever sees the five
core shapes.

Nodes are interned: structurally equal formulas are the same object, which
makes equality and hashing O(1) even for very large generated formulas.
"""

ATOM = "atom"
NOT = "not"
AND = "and"
KMOD = "K"
BOXMOD = "box"

_table = {}


class Formula:
    """Immutable, interned formula node.

    kind is one of "atom", "not", "and", "K", "box".  Atoms carry their
    index in `value`; unary nodes use `left`; "and" uses `left` and `right`.
    """

    __slots__ = ("kind", "value", "left", "right")

    def __repr__(self):
        text = render(self)
        if len(text) > 120:
            text = text[:117] + "..."
        return f"Formula({text})"


def _node(kind, value, left, right):
    key = (kind, value, left, right)
    got = _table.get(key)
    if got is None:
        got = object.__new__(Formula)
        got.kind = kind
        got.value = value
        got.left = left
        got.right = right
        _table[key] = got
    return got


def Atom(i):
    if not isinstance(i, int) or isinstance(i, bool) or i < 0:
        raise ValueError(f"atom index must be a natural number, got {i!r}")
    return _node(ATOM, i, None, None)


def Not(f):
    _check(f)
    return _node(NOT, None, f, None)


def And(a, b):
    _check(a)
    _check(b)
    return _node(AND, None, a, b)


def K(f):
    _check(f)
    return _node(KMOD, None, f, None)


def Box(f):
    _check(f)
    return _node(BOXMOD, None, f, None)


def _check(f):
    if not isinstance(f, Formula):
        raise TypeError(f"expected Formula, got {type(f).__name__}")


# Derived connectives: builder functions only, never stored in the AST.

def Or(a, b):
    return Not(And(Not(a), Not(b)))


def Implies(a, b):
    return Not(And(a, Not(b)))


def Iff(a, b):
    return And(Implies(a, b), Implies(b, a))


def L(f):
    return Not(K(Not(f)))


def Diamond(f):
    return Not(Box(Not(f)))


def true_formula():
    """Canonical always-true formula: !(x0 & !x0)."""
    return Not(And(Atom(0), Not(Atom(0))))


def false_formula():
    """Canonical always-false formula: (x0 & !x0)."""
    return And(Atom(0), Not(Atom(0)))


# ---------------------------------------------------------------------------
# Traversal helpers (iterative: generated formulas nest too deeply for
# Python recursion).

def subformulas(f):
    """All distinct subformulas of f, including f itself."""
    _check(f)
    seen = set()
    stack = [f]
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        if t.left is not None:
            stack.append(t.left)
        if t.right is not None:
            stack.append(t.right)
    return seen


def atoms(f):
    """Set of atom indices occurring in f."""
    return {t.value for t in subformulas(f) if t.kind == ATOM}


def node_count(f):
    """Number of nodes of f counted as a tree (shared subtrees recounted)."""
    _check(f)
    counts = {}
    stack = [f]
    while stack:
        t = stack[-1]
        if t in counts:
            stack.pop()
            continue
        kids = [c for c in (t.left, t.right) if c is not None]
        missing = [c for c in kids if c not in counts]
        if missing:
            stack.extend(missing)
            continue
        counts[t] = 1 + sum(counts[c] for c in kids)
        stack.pop()
    return counts[f]


# ---------------------------------------------------------------------------
# Canonical text syntax.

def render(f):
    """Canonical text for f.  parse(render(f)) == f."""
    _check(f)
    out = []
    stack = [f]
    while stack:
        t = stack.pop()
        if isinstance(t, str):
            out.append(t)
            continue
        if t.kind == ATOM:
            out.append("x" + format(t.value, "b"))
        elif t.kind == NOT:
            out.append("!")
            stack.append(t.left)
        elif t.kind == KMOD:
            out.append("K")
            stack.append(t.left)
        elif t.kind == BOXMOD:
            out.append("[]")
            stack.append(t.left)
        else:
            out.append("(")
            stack.extend([")", t.right, " & ", t.left])
    return "".join(out)


def rendered_size(f):
    """Symbol count of the canonical text of f."""
    return len(render(f))


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_SINGLE = {"(", ")", "&", "|", "!", "K", "L", "T", "F"}


def _tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("<->", i):
            toks.append(("<->", None, i))
            i += 3
        elif text.startswith("->", i):
            toks.append(("->", None, i))
            i += 2
        elif text.startswith("[]", i):
            toks.append(("[]", None, i))
            i += 2
        elif text.startswith("<>", i):
            toks.append(("<>", None, i))
            i += 2
        elif c == "x":
            j = i + 1
            while j < n and text[j] in "01":
                j += 1
            if j == i + 1:
                raise ParseError("atom symbol x must be followed by a binary numeral", i)
            toks.append(("atom", int(text[i + 1:j], 2), i))
            i = j
        elif c in _SINGLE:
            toks.append((c, None, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    return toks


_PREFIX_BUILDERS = {"!": Not, "K": K, "[]": Box, "L": L, "<>": Diamond}
_BINOP_BUILDERS = {"&": And, "|": Or, "->": Implies, "<->": Iff}


def parse(text):
    """Parse canonical text (plus sugar L, <>, |, ->, <->, T, F) into a Formula."""
    toks = _tokenize(text)
    end = len(text)
    # Frame: [left, op, right, pending_prefixes, open_offset]
    frames = [[None, None, None, [], 0]]

    def settle(value, off):
        fr = frames[-1]
        for p in reversed(fr[3]):
            value = _PREFIX_BUILDERS[p](value)
        fr[3] = []
        if fr[0] is None:
            fr[0] = value
        elif fr[1] is None:
            raise ParseError("expected an operator or closing parenthesis", off)
        elif fr[2] is None:
            fr[2] = value
        else:
            raise ParseError("expected a closing parenthesis", off)

    for kind, value, off in toks:
        fr = frames[-1]
        if kind == "atom":
            settle(Atom(value), off)
        elif kind == "T":
            settle(true_formula(), off)
        elif kind == "F":
            settle(false_formula(), off)
        elif kind in _PREFIX_BUILDERS:
            if fr[0] is not None and fr[1] is None:
                raise ParseError("expected an operator or closing parenthesis", off)
            fr[3].append(kind)
        elif kind == "(":
            if fr[0] is not None and fr[1] is None:
                raise ParseError("expected an operator or closing parenthesis", off)
            frames.append([None, None, None, [], off])
        elif kind in _BINOP_BUILDERS:
            if fr[0] is None or fr[3]:
                raise ParseError("operator with no left operand", off)
            if fr[1] is not None and fr[2] is None:
                raise ParseError("operand expected before second operator", off)
            if fr[1] is not None:
                raise ParseError("chained operators require parentheses", off)
            if len(frames) == 1:
                raise ParseError("binary operators require parentheses", off)
            fr[1] = kind
        elif kind == ")":
            if len(frames) == 1:
                raise ParseError("unmatched closing parenthesis", off)
            if fr[0] is None or fr[3]:
                raise ParseError("empty or incomplete parenthesized formula", off)
            if fr[1] is not None and fr[2] is None:
                raise ParseError("operator missing its right operand", off)
            if fr[1] is not None:
                combined = _BINOP_BUILDERS[fr[1]](fr[0], fr[2])
            else:
                combined = fr[0]
            frames.pop()
            settle(combined, off)
        else:  # pragma: no cover - tokenizer emits no other kinds
            raise ParseError(f"unexpected token {kind}", off)

    if len(frames) != 1:
        raise ParseError("unclosed parenthesis", frames[-1][4])
    fr = frames[0]
    if fr[0] is None or fr[3]:
        raise ParseError("incomplete formula", end)
    if fr[1] is not None:
        raise ParseError("top-level binary operator requires parentheses", end)
    return fr[0]


# ---------------------------------------------------------------------------
# Bit helpers.

def ones(i):
    """Set of bit positions at which the binary expansion of i has a one."""
    if i < 0:
        raise ValueError("ones() requires a natural number")
    return {k for k in range(i.bit_length()) if (i >> k) & 1}


def bit(k, i):
    """Bit k (0 = least significant) of i, as 0 or 1."""
    return (i >> k) & 1


def bin_str(length, i):
    """Binary string of i, zero-padded to `length` digits."""
    if not 0 <= i < 2 ** length:
        raise ValueError(f"{i} is not representable in {length} bits")
    return format(i, f"0{length}b")


class FormulaVector:
    """A vector F of formulas standing for a binary number.

    Entries are given most-significant-first (F_{l-1}, ..., F_0);
    bit(k) returns the formula at bit position k, so bit(0) is the least
    significant entry.
    """

    __slots__ = ("entries",)

    def __init__(self, entries_msb_first):
        entries = tuple(entries_msb_first)
        if len(entries) < 1:
            raise ValueError("formula vector must have at least one entry")
        for e in entries:
            _check(e)
        self.entries = entries

    def __len__(self):
        return len(self.entries)

    def bit(self, k):
        if not 0 <= k < len(self.entries):
            raise ValueError(f"bit index {k} out of range for length {len(self.entries)}")
        return self.entries[len(self.entries) - 1 - k]

    @classmethod
    def of_atoms(cls, ids_msb_first):
        return cls([Atom(i) for i in ids_msb_first])


# ---------------------------------------------------------------------------
# Deterministic conjunction/disjunction folding.  The canonical TRUE/FALSE
# units are dropped when other parts are present, so emitted formulas carry
# no vacuous conjuncts.

def conj(parts):
    unit = true_formula()
    parts = [p for p in parts if p is not unit]
    if not parts:
        return unit
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    unit = false_formula()
    parts = [p for p in parts if p is not unit]
    if not parts:
        return unit
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# Bit-vector macros: equality, comparison, successor, rightmost-bit,
# uniqueness, and persistence gadgets over formula vectors.

def _same_length(F, G):
    if len(F) != len(G):
        raise ValueError(f"vector length mismatch: {len(F)} vs {len(G)}")
    return len(F)


def eq_vector(F, G, k=-1):
    """Bits above position k agree: AND_{h=k+1..l-1} (F_h <-> G_h)."""
    l = _same_length(F, G)
    if not -1 <= k <= l - 1:
        raise ValueError(f"threshold {k} out of range for length {l}")
    return conj([Iff(F.bit(h), G.bit(h)) for h in range(l - 1, k, -1)])


def eq_binary(F, i):
    """F encodes exactly the number i."""
    l = len(F)
    if not 0 <= i < 2 ** l:
        raise ValueError(f"{i} is not representable in {l} bits")
    return conj([F.bit(h) if (i >> h) & 1 else Not(F.bit(h))
                 for h in range(l - 1, -1, -1)])


def rightmost(F, k, which):
    """Position k holds the lowest zero ("zero") or lowest one ("one") of F."""
    l = len(F)
    if not 0 <= k < l:
        raise ValueError(f"bit index {k} out of range for length {l}")
    if which == "zero":
        parts = [Not(F.bit(k))] + [F.bit(h) for h in range(k - 1, -1, -1)]
    elif which == "one":
        parts = [F.bit(k)] + [Not(F.bit(h)) for h in range(k - 1, -1, -1)]
    else:
        raise ValueError(f"which must be 'zero' or 'one', got {which!r}")
    return conj(parts)


def rightmost_zero(F, k):
    return rightmost(F, k, "zero")


def rightmost_one(F, k):
    return rightmost(F, k, "one")


def unique(F):
    """Exactly one entry of F is true."""
    l = len(F)
    some = disj([F.bit(k) for k in range(l)])
    pairs = [Not(And(F.bit(k), F.bit(m))) for k in range(l) for m in range(k + 1, l)]
    return conj([some] + pairs)


def neq(F, G):
    return Not(eq_vector(F, G, -1))


def lt(F, G):
    """The number encoded by F is strictly below the one encoded by G."""
    l = _same_length(F, G)
    return disj([conj([eq_vector(F, G, k), Not(F.bit(k)), G.bit(k)])
                 for k in range(l)])


def leq(F, G):
    return disj([lt(F, G), eq_vector(F, G, -1)])


def plus1(F, G):
    """F encodes the successor of the number encoded by G."""
    l = _same_length(F, G)
    return disj([conj([eq_vector(F, G, k), rightmost_one(F, k), rightmost_zero(G, k)])
                 for k in range(l)])


def neq_plus1(F, G):
    return Not(plus1(F, G))


def compare(F, G, op):
    """Table of vector comparison macros, selected by name."""
    table = {"unique": lambda: unique(F), "neq": lambda: neq(F, G),
             "lt": lambda: lt(F, G), "leq": lambda: leq(F, G),
             "plus1": lambda: plus1(F, G), "neq_plus1": lambda: neq_plus1(F, G)}
    if op not in table:
        raise ValueError(f"unknown comparison {op!r}")
    return table[op]()


def lt_binary(F, i):
    """The number encoded by F is strictly below the constant i."""
    l = len(F)
    if not 0 <= i < 2 ** l:
        raise ValueError(f"{i} is not representable in {l} bits")
    one_set = ones(i)
    parts = []
    for k in sorted(one_set):
        sub = [Not(F.bit(k))] + [Not(F.bit(h)) for h in range(k + 1, l)
                                 if h not in one_set]
        parts.append(conj(sub))
    return disj(parts)


def leq_binary(F, i):
    return disj([lt_binary(F, i), eq_binary(F, i)])


def gt_binary(F, i):
    return Not(leq_binary(F, i))


def compare_binary(F, i, op):
    table = {"lt": lt_binary, "leq": leq_binary, "gt": gt_binary}
    if op not in table:
        raise ValueError(f"unknown comparison {op!r}")
    return table[op](F, i)


def persistent_macro(F, k=-1):
    """Every entry above position k keeps its truth value along every
    []-transition: AND_{h=k+1..l-1} K([]F_h | []!F_h)."""
    l = len(F)
    if not -1 <= k <= l - 1:
        raise ValueError(f"threshold {k} out of range for length {l}")
    return conj([K(Or(Box(F.bit(h)), Box(Not(F.bit(h)))))
                 for h in range(l - 1, k, -1)])


# ---------------------------------------------------------------------------
# Shared variables: L-prefixed formulas whose truth is constant on each
# L-equivalence class but may change from class to class.

def shared_ssl(a, b):
    """Subset-space shared variable over carrier atom a and class marker b:
    L(a & []Lb)."""
    return L(And(a, Box(L(b))))


def shared_s4s5(a):
    """Product-logic shared variable over carrier atom a: La."""
    return L(a)


def shared_var_ssl(i, catalog):
    """Shared variable number i of a subset-space variable catalog."""
    return shared_ssl(Atom(catalog.atom("A", i)), Atom(catalog.atom("B")))


def shared_var_s4s5(i, catalog):
    """Shared variable number i of a product-logic variable catalog."""
    return shared_s4s5(Atom(catalog.atom("A", i)))
