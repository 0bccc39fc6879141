"""
Planar trees with numbered vertices and numbered leaves.

S(n1..nk;n) is the set of planar rooted trees whose vertex i has n_i ordered
input slots, with k vertices and n = sum(n_i) - (k-1) leaves. Vertex numbers and
leaf numbers make every tree rigid, so the stored form is already canonical.
These sets form the N-colored operad whose algebras are operads; adding a color
"a" gives the pairs operad whose algebras are (operad, algebra) pairs.
"""

import itertools
import logging
import re
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from src.basecat import EMPTY, Atom, FinSet, Perm, inverse_perm, orbit_quotient, permute_right, symmetric_group
from src.collection import Signature, is_identity, signatures_over
from src.operads import ONE, ColoredOperad, check_operad, restrict
from src.algebras import OperadAlgebra, check_algebra
from src.reports import Checker, ValidationReport, log_report
from src.utils import InputError

logger = logging.getLogger(__name__)

A = "a"

Entry = Tuple[str, int]


class PlanarTree(NamedTuple):
    """
    `root` is the root vertex number (0 for the bare edge); slots[v-1] lists the
    inputs of vertex v, each ("v", child) or ("l", leaf).
    """

    root: int
    slots: Tuple[Tuple[Entry, ...], ...]

    @property
    def arities(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.slots)

    @property
    def leaves(self) -> int:
        if not self.slots:
            return 1
        return sum(1 for s in self.slots for e in s if e[0] == "l")

    def profile(self) -> Signature:
        return Signature(self.arities, self.leaves)


BARE = PlanarTree(0, ())


def corolla(n: int, leaves: Optional[Sequence[int]] = None) -> PlanarTree:
    """One vertex with n slots holding the given leaves (in order by default)."""
    leaves = list(range(1, n + 1)) if leaves is None else list(leaves)
    return PlanarTree(1, (tuple(("l", m) for m in leaves),))


def _reaches_root(parent: Dict[int, int], root: int) -> bool:
    for v in parent:
        seen = 0
        while v != root:
            v = parent[v]
            seen += 1
            if seen > len(parent):
                return False
    return True


def enumerate_trees(arities: Sequence[int], n: int) -> FinSet:
    """All of S(n1..nk;n); empty unless n = sum(n_i) - (k-1)."""
    arities = tuple(arities)
    k = len(arities)
    if n != sum(arities) - (k - 1):
        return EMPTY
    if k == 0:
        return FinSet([BARE])
    slots = [(v, j) for v in range(1, k + 1) for j in range(arities[v - 1])]
    found = []
    for root in range(1, k + 1):
        others = [v for v in range(1, k + 1) if v != root]
        for placement in itertools.permutations(range(len(slots)), len(others)):
            parent = {v: slots[p][0] for v, p in zip(others, placement)}
            if not _reaches_root(parent, root):
                continue
            entries: Dict[int, Entry] = {p: ("v", v) for v, p in zip(others, placement)}
            free = [p for p in range(len(slots)) if p not in entries]
            for leaves in itertools.permutations(range(1, n + 1)):
                filled = dict(entries)
                filled.update({p: ("l", m) for p, m in zip(free, leaves)})
                rows = [[] for _ in range(k)]
                for p, (v, _) in enumerate(slots):
                    rows[v - 1].append(filled[p])
                found.append(PlanarTree(root, tuple(tuple(r) for r in rows)))
    return FinSet(found)


def canonical(t: PlanarTree) -> PlanarTree:
    """The rigid labelling leaves nothing to normalize beyond plain tuples."""
    return PlanarTree(int(t.root), tuple(tuple((str(kind), int(x)) for kind, x in row) for row in t.slots))


# -------------------------
# Grafting and the symmetric group action
# -------------------------
def graft_at(t: PlanarTree, i: int, u: PlanarTree) -> PlanarTree:
    """
    t o_i u: vertex i (0-based) of t is replaced by u, leaf j of u plugging into
    slot j-1 of that vertex. Vertices are renumbered outer-first with u's block in
    place of vertex i; the leaves of t keep their numbers.
    """
    k, l = len(t.slots), len(u.slots)
    if not 0 <= i < k:
        raise InputError(f"Vertex {i} out of range for a tree with {k} vertices")
    if u.leaves != len(t.slots[i]):
        raise InputError(f"Cannot graft a tree with {u.leaves} leaves into a vertex of arity {len(t.slots[i])}")
    vi = i + 1

    def outer(e: Entry) -> Entry:
        kind, v = e
        if kind == "l":
            return e
        return ("v", v if v < vi else v + l - 1)

    plugs = [outer(e) for e in t.slots[i]]

    def inner(e: Entry) -> Entry:
        kind, w = e
        return ("v", w + i) if kind == "v" else plugs[w - 1]

    replacement = plugs[0] if l == 0 else ("v", u.root + i)
    rows = []
    for v in range(1, k + 1):
        if v == vi:
            rows.extend(tuple(inner(e) for e in row) for row in u.slots)
            continue
        rows.append(tuple(replacement if e == ("v", vi) else outer(e) for e in t.slots[v - 1]))
    if t.root == vi:
        if replacement[0] == "l":
            return BARE
        root = replacement[1]
    else:
        root = outer(("v", t.root))[1]
    return PlanarTree(root, tuple(rows))


def graft(outer: PlanarTree, inners: Sequence[PlanarTree]) -> PlanarTree:
    """Substitutes inners[i] for vertex i, last vertex first so earlier numbers stay put."""
    if len(inners) != len(outer.slots):
        raise InputError(f"A tree with {len(outer.slots)} vertices needs as many inner trees, got {len(inners)}")
    result = outer
    for i in reversed(range(len(inners))):
        result = graft_at(result, i, inners[i])
    return canonical(result)


def sigma_action(alpha: Perm, t: PlanarTree) -> PlanarTree:
    """t . alpha: new vertex i is old vertex alpha(i)."""
    if len(alpha) != len(t.slots):
        raise InputError(f"Permutation of degree {len(alpha)} on a tree with {len(t.slots)} vertices")
    if not t.slots:
        return t
    inv = inverse_perm(alpha)

    def renumber(e: Entry) -> Entry:
        return ("v", inv[e[1] - 1] + 1) if e[0] == "v" else e

    rows = tuple(tuple(renumber(e) for e in t.slots[alpha[i]]) for i in range(len(alpha)))
    return PlanarTree(inv[t.root - 1] + 1, rows)


class Freeness(NamedTuple):
    report: ValidationReport
    trees: int
    stabilizer: int
    orbits: int


def stabilizer_freeness(arities: Sequence[int], n: int) -> Freeness:
    """The permutations fixing the arity tuple act freely on S(arities;n)."""
    arities = tuple(arities)
    trees = enumerate_trees(arities, n)
    stabilizer = [a for a in symmetric_group(len(arities)) if permute_right(arities, a) == arities]
    checker = Checker(f"freeness on S{Signature(arities, n)}")
    for t in trees:
        for alpha in stabilizer:
            if is_identity(alpha):
                continue
            checker.expect(sigma_action(alpha, t) != t, "free", tree=format_tree(t), alpha=alpha)
    orbits = orbit_quotient(trees, stabilizer, sigma_action)
    checker.expect(len(orbits.obj) * len(stabilizer) == len(trees), "orbit_count", orbits=len(orbits.obj))
    log_report(checker.report)
    return Freeness(checker.report, len(trees), len(stabilizer), len(orbits.obj))


# -------------------------
# Text encoding
# -------------------------
def format_tree(t: PlanarTree) -> str:
    """v1(v2(1,2),3): vertices as v<number>(slots), leaves as numbers, the bare edge as |."""
    if not t.slots:
        return "|"

    def render(v: int) -> str:
        parts = [render(x) if kind == "v" else str(x) for kind, x in t.slots[v - 1]]
        return f"v{v}(" + ",".join(parts) + ")"

    return render(t.root)


_TOKEN = re.compile(r"\s*(v\d+\(|\d+|\)|,|\|)")


def parse_tree(text: str) -> PlanarTree:
    text = text.strip()
    if text == "|":
        return BARE
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise InputError(f"Unexpected character in tree {text!r} at position {pos}")
        tokens.append(match.group(1))
        pos = match.end()
    rows: Dict[int, Tuple[Entry, ...]] = {}
    cursor = 0

    def vertex() -> int:
        nonlocal cursor
        head = tokens[cursor]
        if not head.startswith("v"):
            raise InputError(f"Expected a vertex in {text!r}, got {head!r}")
        v = int(head[1:-1])
        if v in rows:
            raise InputError(f"Vertex {v} appears twice in {text!r}")
        rows[v] = ()
        cursor += 1
        entries = []
        while tokens[cursor] != ")":
            token = tokens[cursor]
            if token.startswith("v"):
                entries.append(("v", vertex()))
            elif token.isdigit():
                entries.append(("l", int(token)))
                cursor += 1
            else:
                raise InputError(f"Unexpected {token!r} in {text!r}")
            if tokens[cursor] == ",":
                cursor += 1
        cursor += 1
        rows[v] = tuple(entries)
        return v

    try:
        root = vertex()
    except IndexError:
        raise InputError(f"Unbalanced tree text {text!r}")
    if cursor != len(tokens):
        raise InputError(f"Trailing input in tree text {text!r}")
    if sorted(rows) != list(range(1, len(rows) + 1)):
        raise InputError(f"Vertices of {text!r} must be numbered 1..k")
    t = PlanarTree(root, tuple(rows[v] for v in range(1, len(rows) + 1)))
    leaves = sorted(x for row in t.slots for kind, x in row if kind == "l")
    if leaves != list(range(1, len(leaves) + 1)):
        raise InputError(f"Leaves of {text!r} must be numbered 1..n")
    return t


def parse_profile(text: str) -> Signature:
    """'n1,...,nk->n'; colors are naturals or the letter a."""
    if "->" not in text:
        raise InputError(f"Profile {text!r} must look like 'n1,...,nk->n'")
    left, right = text.split("->", 1)

    def color(token: str):
        token = token.strip()
        if token == A:
            return A
        if not token.isdigit():
            raise InputError(f"Bad color {token!r} in profile {text!r}")
        return int(token)

    inputs = tuple(color(c) for c in left.split(",")) if left.strip() else ()
    return Signature(inputs, color(right))


# -------------------------
# The tree operad and the pairs operad
# -------------------------
def tree_operad(max_color: int = 2, arity_bound: int = 3) -> ColoredOperad:
    """S truncated to colors 0..max_color and at most arity_bound vertices."""
    colors = list(range(max_color + 1))
    levels = {}
    for s in signatures_over(colors, arity_bound):
        level = enumerate_trees(s.inputs, s.output)
        if len(level):
            levels[s] = level
    return ColoredOperad(
        colors,
        levels,
        {c: corolla(c) for c in colors},
        lambda s, i, t, mu, nu: graft_at(mu, i, nu),
        action=lambda alpha, s, t: sigma_action(alpha, t),
        arity_bound=arity_bound,
        name="trees",
        provenance={"name": "trees", "params": {"max_color": max_color, "arity_bound": arity_bound}},
    )


def pairs_level(s: Signature) -> FinSet:
    """
    P(c;n) = S(c;n) for all-natural inputs, empty for mixed inputs with natural
    output, and P(c;a) = S(c';0) with every a replaced by 0.
    """
    if s.output == A:
        return enumerate_trees(tuple(0 if c == A else c for c in s.inputs), 0)
    if any(c == A for c in s.inputs):
        return EMPTY
    return enumerate_trees(s.inputs, s.output)


def pairs_operad(max_color: int = 2, arity_bound: int = 3) -> ColoredOperad:
    """The pairs operad as a suboperad of the restriction of the tree operad along a |-> 0."""
    trees = tree_operad(max_color, arity_bound)
    alpha = {c: c for c in trees.colors}
    alpha[A] = 0
    pulled = restrict(alpha, trees)
    levels = {s: pairs_level(s) for s in pulled.signatures() if len(pairs_level(s))}
    op = pulled.replace(levels=levels, name="pairs")
    op.provenance = {"name": "pairs", "params": {"max_color": max_color, "arity_bound": arity_bound}}
    return op


# -------------------------
# Pairs algebras: (operad, algebra) <-> algebra over the pairs operad
# -------------------------
def _sig(n: int) -> Signature:
    return Signature((ONE,) * n, ONE)


def _leaf_order(t: PlanarTree, v: int) -> List[int]:
    out = []
    for kind, x in t.slots[v - 1]:
        if kind == "l":
            out.append(x)
        else:
            out.extend(_leaf_order(t, x))
    return out


def evaluate_tree(o: ColoredOperad, t: PlanarTree, elements: Sequence[Atom]) -> Atom:
    """
    Composes elements[v-1] in O(n_v) along t; input j of the result is leaf j+1.
    The bare edge evaluates to the unit.
    """
    if len(elements) != len(t.slots):
        raise InputError(f"A tree with {len(t.slots)} vertices needs as many elements")
    if not t.slots:
        return o.unit(ONE)
    unit = o.unit(ONE)

    def value(v: int) -> Tuple[Signature, Atom]:
        inners = []
        for kind, x in t.slots[v - 1]:
            inners.append(value(x) if kind == "v" else (_sig(1), unit))
        return o.compose(_sig(len(t.slots[v - 1])), elements[v - 1], inners)

    s, composite = value(t.root)
    order = [m - 1 for m in _leaf_order(t, t.root)]
    return o.act(inverse_perm(tuple(order)), s, composite)


def _evaluate_in_algebra(o: ColoredOperad, a: OperadAlgebra, t: PlanarTree, colors: Sequence, elements: Sequence[Atom]) -> Atom:
    """A tree with no leaves: a-colored vertices are algebra elements, the rest act on their children."""

    def value(v: int) -> Atom:
        if colors[v - 1] == A:
            return elements[v - 1]
        children = tuple(value(x) for _, x in t.slots[v - 1])
        return a.act(_sig(len(children)), elements[v - 1], children)

    return value(t.root)


def pairs_algebra_assemble(o: ColoredOperad, a: OperadAlgebra, max_color: int = 2, arity_bound: int = 3) -> OperadAlgebra:
    """The pairs algebra X(n) = O(n), X(a) = A of a one-colored operad and an algebra over it."""
    if max_color > o.arity_bound:
        raise InputError(f"{o.name} is stored up to arity {o.arity_bound}, below color {max_color}")
    p = pairs_operad(max_color, arity_bound)
    carriers = {n: o.level(_sig(n)) for n in range(max_color + 1)}
    carriers[A] = a.carriers[ONE]

    def structure(s, t, xs):
        if s.output == A:
            return _evaluate_in_algebra(o, a, t, s.inputs, xs)
        return evaluate_tree(o, t, xs)

    return OperadAlgebra(p, carriers, structure, name=f"({o.name}, {a.name})")


def operad_on_constants(o: ColoredOperad) -> OperadAlgebra:
    """O acting on O(0) by composition."""
    nullary = _sig(0)
    return OperadAlgebra(
        o,
        {ONE: o.level(nullary)},
        lambda s, mu, xs: o.compose(s, mu, [(nullary, x) for x in xs])[1],
        name=f"{o.name}(0)",
    )


def embed_operad(o: ColoredOperad, max_color: int = 2, arity_bound: int = 3) -> OperadAlgebra:
    """The pair (O, O(0))."""
    return pairs_algebra_assemble(o, operad_on_constants(o), max_color, arity_bound)


class PairsDecomposition(NamedTuple):
    operad: ColoredOperad
    algebra: OperadAlgebra
    report: ValidationReport


def _graft_pair(n: int, m: int, i: int) -> PlanarTree:
    """Corolla n with corolla m grafted into slot i, leaves numbered left to right."""
    row_outer, row_inner = [], [("l", j + 1 + i) for j in range(m)]
    for j in range(n):
        if j < i:
            row_outer.append(("l", j + 1))
        elif j == i:
            row_outer.append(("v", 2))
        else:
            row_outer.append(("l", j + m))
    return PlanarTree(1, (tuple(row_outer), tuple(row_inner)))


def _algebra_tree(n: int) -> PlanarTree:
    """A root of arity n whose slots hold n nullary vertices."""
    return PlanarTree(1, (tuple(("v", j + 2) for j in range(n)),) + ((),) * n)


def pairs_algebra_decompose(x: OperadAlgebra, max_color: int) -> PairsDecomposition:
    """
    The operad {X(n)} with o_i given by the two-vertex trees, units by the bare
    edge and actions by corollas with permuted leaves, and the algebra on X(a)
    given by the trees with nullary a-vertices. Both are validated.
    """
    levels = {_sig(n): x.carriers[n] for n in range(max_color + 1)}
    unit = x.act(Signature((), 1), BARE, ())

    def partial(s, i, t, mu, nu):
        n, m = s.arity, t.arity
        return x.act(Signature((n, m), n + m - 1), _graft_pair(n, m, i), (mu, nu))

    def action(alpha, s, mu):
        n = s.arity
        inv = inverse_perm(alpha)
        return x.act(Signature((n,), n), corolla(n, [inv[p] + 1 for p in range(n)]), (mu,))

    o = ColoredOperad(
        [ONE], levels, {ONE: unit}, partial, action=action, arity_bound=max_color, name="extracted operad"
    )
    a = OperadAlgebra(
        o,
        {ONE: x.carriers[A]},
        lambda s, mu, ys: x.act(Signature((s.arity,) + (A,) * s.arity, A), _algebra_tree(s.arity), (mu,) + tuple(ys)),
        name="extracted algebra",
    )
    report = ValidationReport(name=f"decomposition of {x.name}")
    report.merge(check_operad(o))
    report.merge(check_algebra(a))
    log_report(report)
    return PairsDecomposition(o, a, report)
