"""
Finite-set engine for everything else in the package.

Atoms are ints, strings, or tuples of atoms. Every FinSet keeps its atoms in
the canonical order given by `atom_key`, so equal sets compare equal and every
quotient has a deterministic least representative.

Permutations are 0-based tuples: `p[i]` is the image of `i`, and the product
`compose_perm(a, b)` is `a` after `b`. Collections carry right actions,
(s . a)_i = s_{a(i)}; tuples carry the left place action,
(a . x)_j = x_{a^-1(j)}.
"""

import itertools
import logging
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError

logger = logging.getLogger(__name__)

Atom = Any
Perm = Tuple[int, ...]


def atom_key(atom: Atom):
    """Total order on atoms: ints, then strings, then tuples (lexicographic)."""
    if isinstance(atom, int):
        return (0, int(atom))
    if isinstance(atom, str):
        return (1, atom)
    if isinstance(atom, tuple):
        return (2, tuple(atom_key(a) for a in atom))
    raise InputError(f"Unsupported atom {atom!r}")


def least(atoms: Iterable[Atom]) -> Atom:
    return min(atoms, key=atom_key)


class FinSet:
    """A finite set of atoms in canonical order."""

    __slots__ = ("elements", "_members")

    def __init__(self, elements: Iterable[Atom] = ()):
        members = set(elements)
        self.elements = tuple(sorted(members, key=atom_key))
        self._members = frozenset(members)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, atom):
        return atom in self._members

    def __eq__(self, other):
        return isinstance(other, FinSet) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"FinSet({list(self.elements)!r})"

    def index(self, atom) -> int:
        return self.elements.index(atom)

    def issubset(self, other: "FinSet") -> bool:
        return all(a in other for a in self.elements)


EMPTY = FinSet()
UNIT = FinSet([()])


class FinMap:
    """
    A total map between finite sets. Partial structure maps are FinMaps out of
    a sub-FinSet of the level they act on.
    """

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source: FinSet, target: FinSet, assignment: Dict[Atom, Atom], check: bool = True):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        if check:
            for x in source:
                if x not in self.assignment:
                    raise InputError(f"Map is not total: no image for {x!r}")
                if self.assignment[x] not in target:
                    raise InputError(f"Image {self.assignment[x]!r} of {x!r} is not in the target")

    @classmethod
    def from_function(cls, source: FinSet, target: FinSet, fn: Callable[[Atom], Atom]) -> "FinMap":
        return cls(source, target, {x: fn(x) for x in source})

    @classmethod
    def identity(cls, carrier: FinSet) -> "FinMap":
        return cls(carrier, carrier, {x: x for x in carrier}, check=False)

    def __call__(self, x):
        try:
            return self.assignment[x]
        except KeyError:
            raise InputError(f"{x!r} is outside the domain of this map") from None

    def __eq__(self, other):
        return (
            isinstance(other, FinMap)
            and self.source == other.source
            and self.target == other.target
            and all(self.assignment[x] == other.assignment[x] for x in self.source)
        )

    def __hash__(self):
        return hash((self.source, self.target))

    def defined_at(self, x) -> bool:
        return x in self.assignment

    def then(self, other: "FinMap") -> "FinMap":
        """`other` after `self`, defined where the intermediate value lies in other's domain."""
        domain = [x for x in self.source if self.assignment[x] in other.source]
        return FinMap(
            FinSet(domain),
            other.target,
            {x: other.assignment[self.assignment[x]] for x in domain},
            check=False,
        )

    def restrict(self, subset: FinSet) -> "FinMap":
        if not subset.issubset(self.source):
            raise InputError("Restriction to a set that is not a subset of the source")
        return FinMap(subset, self.target, {x: self.assignment[x] for x in subset}, check=False)

    def image(self) -> FinSet:
        return FinSet(self.assignment[x] for x in self.source)

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.source)

    def is_bijection(self) -> bool:
        return self.is_injective() and len(self.source) == len(self.target)

    def fibers(self) -> Dict[Atom, FinSet]:
        groups: Dict[Atom, List[Atom]] = {y: [] for y in self.target}
        for x in self.source:
            groups[self.assignment[x]].append(x)
        return {y: FinSet(xs) for y, xs in groups.items()}


class Product(NamedTuple):
    obj: FinSet
    projections: List[FinMap]


class Coproduct(NamedTuple):
    obj: FinSet
    injections: List[FinMap]


class Pullback(NamedTuple):
    obj: FinSet
    left: FinMap
    right: FinMap


class Quotient(NamedTuple):
    obj: FinSet
    projection: FinMap

    def classes(self) -> Dict[Atom, FinSet]:
        return self.projection.fibers()


def product(xs: Sequence[FinSet]) -> Product:
    """Cartesian product; atoms are tuples in lexicographic order."""
    obj = FinSet(itertools.product(*[x.elements for x in xs]))
    projections = [
        FinMap(obj, x, {t: t[k] for t in obj}, check=False) for k, x in enumerate(xs)
    ]
    return Product(obj, projections)


def coproduct(xs: Sequence[FinSet]) -> Coproduct:
    """Tagged disjoint union with atoms (index, atom)."""
    obj = FinSet((k, a) for k, x in enumerate(xs) for a in x)
    injections = [FinMap(x, obj, {a: (k, a) for a in x}, check=False) for k, x in enumerate(xs)]
    return Coproduct(obj, injections)


def pullback(f: FinMap, g: FinMap) -> Pullback:
    if f.target != g.target:
        raise InputError("Ill-formed cospan: the two maps have different targets")
    by_image: Dict[Atom, List[Atom]] = {}
    for y in g.source:
        by_image.setdefault(g(y), []).append(y)
    obj = FinSet((x, y) for x in f.source for y in by_image.get(f(x), ()))
    left = FinMap(obj, f.source, {p: p[0] for p in obj}, check=False)
    right = FinMap(obj, g.source, {p: p[1] for p in obj}, check=False)
    return Pullback(obj, left, right)


# -------------------------
# Union-find and quotients
# -------------------------
class UnionFind:
    def __init__(self, X):
        self.parent = {x: x for x in X}
        self.rank = {x: 0 for x in X}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        del self.rank[y]

    def classes(self) -> List[List[Atom]]:
        groups: Dict[Atom, List[Atom]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return list(groups.values())

    def quotient(self, carrier: FinSet) -> Quotient:
        """Canonical quotient: every class is named by its least atom."""
        names = {}
        for members in self.classes():
            rep = least(members)
            for x in members:
                names[x] = rep
        obj = FinSet(names.values())
        return Quotient(obj, FinMap(carrier, obj, {x: names[x] for x in carrier}, check=False))


def coequalizer(f: FinMap, g: FinMap) -> Quotient:
    if f.source != g.source or f.target != g.target:
        raise InputError("Coequalizer needs parallel maps with shared endpoints")
    uf = UnionFind(f.target)
    for x in f.source:
        uf.union(f(x), g(x))
    return uf.quotient(f.target)


def orbit_quotient(carrier: FinSet, group: Iterable[Any], act: Callable[[Any, Atom], Atom]) -> Quotient:
    """
    Orbits of a group acting on `carrier`, each named by its least atom.
    `group` must list every element, so the least image is the orbit minimum.
    """
    group = list(group)
    names = {x: least(act(g, x) for g in group) for x in carrier}
    obj = FinSet(names.values())
    return Quotient(obj, FinMap(carrier, obj, names, check=False))


# -------------------------
# Permutations
# -------------------------
def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def symmetric_group(n: int) -> List[Perm]:
    return list(itertools.permutations(range(n)))


def compose_perm(a: Perm, b: Perm) -> Perm:
    """The product ab = a after b."""
    return tuple(a[i] for i in b)


def inverse_perm(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, image in enumerate(a):
        inv[image] = i
    return tuple(inv)


def is_perm(a: Sequence[int]) -> bool:
    return sorted(a) == list(range(len(a)))


def place_permute(sigma: Perm, xs: Sequence[Atom]) -> tuple:
    """Left place action: (sigma . x)_j = x_{sigma^-1(j)}."""
    out = [None] * len(xs)
    for i, x in enumerate(xs):
        out[sigma[i]] = x
    return tuple(out)


def permute_right(xs: Sequence[Atom], alpha: Perm) -> tuple:
    """Right action on color tuples: (s . alpha)_i = s_{alpha(i)}."""
    return tuple(xs[a] for a in alpha)


def transposition(n: int, j: int) -> Perm:
    p = list(range(n))
    p[j], p[j + 1] = p[j + 1], p[j]
    return tuple(p)


def transposition_word(alpha: Perm) -> List[int]:
    """
    Reduced word [j1, ..., jm] with alpha = s_j1 s_j2 ... s_jm, where s_j swaps j and j+1.
    """
    current = list(alpha)
    swaps = []
    changed = True
    while changed:
        changed = False
        for j in range(len(current) - 1):
            if current[j] > current[j + 1]:
                current[j], current[j + 1] = current[j + 1], current[j]
                swaps.append(j)
                changed = True
    return list(reversed(swaps))


def block_permutation(sigma: Perm, blocks: Sequence[int]) -> Perm:
    """
    Permutes consecutive blocks of the given sizes as sigma permutes places,
    matching the place action: block k moves to place sigma(k).
    """
    n = len(sigma)
    inv = inverse_perm(sigma)
    # sizes of the blocks in their new order
    new_sizes = [blocks[inv[p]] for p in range(n)]
    new_offsets = [sum(new_sizes[:p]) for p in range(n)]
    old_offsets = [sum(blocks[:k]) for k in range(n)]
    image = [0] * sum(blocks)
    for k in range(n):
        for m in range(blocks[k]):
            image[old_offsets[k] + m] = new_offsets[sigma[k]] + m
    return tuple(image)


# -------------------------
# Group actions
# -------------------------
class SymAction:
    """
    A right action of the symmetric group on `carrier`: act(alpha, x) is x . alpha.
    """

    def __init__(self, degree: int, carrier: FinSet, act: Callable[[Perm, Atom], Atom]):
        self.degree = degree
        self.carrier = carrier
        self._act = act

    def act(self, alpha: Perm, x: Atom) -> Atom:
        return self._act(alpha, x)

    @classmethod
    def trivial(cls, degree: int, carrier: FinSet) -> "SymAction":
        return cls(degree, carrier, lambda alpha, x: x)

    @classmethod
    def regular(cls, degree: int) -> "SymAction":
        return cls(degree, FinSet(symmetric_group(degree)), lambda alpha, x: compose_perm(x, alpha))

    def check(self, fail_fast: bool = False) -> ValidationReport:
        checker = Checker(f"action of degree {self.degree}", fail_fast)
        group = symmetric_group(self.degree)
        try:
            for x in self.carrier:
                checker.expect(self.act(identity_perm(self.degree), x) == x, "identity", atom=x)
                for a in group:
                    checker.expect(self.act(a, x) in self.carrier, "closure", atom=x, alpha=a)
                    for b in group:
                        lhs = self.act(compose_perm(a, b), x)
                        rhs = self.act(b, self.act(a, x))
                        checker.expect(lhs == rhs, "composition", atom=x, alpha=a, beta=b)
        except StopCheck:
            pass
        return checker.report


def tensor_over_group(m: SymAction, x: FinSet, degree: Optional[int] = None) -> Quotient:
    """
    m (x)_{Sigma_n} X for a set `x` of n-tuples closed under place permutation.
    Pairs (mu, t) are identified with (mu . sigma, sigma^-1 . t).
    """
    n = m.degree if degree is None else degree
    if n != m.degree or any(len(t) != n for t in x):
        raise InputError(f"Degree mismatch: action has degree {m.degree}, tuples need {n}")
    pairs = product([m.carrier, x]).obj
    group = [(s, inverse_perm(s)) for s in symmetric_group(n)]

    def act(g, pair):
        sigma, sigma_inv = g
        mu, t = pair
        return (m.act(sigma, mu), place_permute(sigma_inv, t))

    return orbit_quotient(pairs, group, act)


# -------------------------
# Monoids
# -------------------------
class Monoid:
    """A finite monoid given by its multiplication table and unit atom."""

    def __init__(self, carrier: FinSet, table: Dict[Tuple[Atom, Atom], Atom], unit: Atom, name: str = "monoid"):
        self.carrier = carrier
        self.table = dict(table)
        self.unit = unit
        self.name = name
        for a in carrier:
            for b in carrier:
                if (a, b) not in self.table:
                    raise InputError(f"Multiplication table of {name} misses ({a!r}, {b!r})")
                if self.table[(a, b)] not in carrier:
                    raise InputError(f"Product {a!r}*{b!r} of {name} leaves the carrier")
        if unit not in carrier:
            raise InputError(f"Unit {unit!r} of {name} is not in the carrier")

    def mul(self, a, b):
        return self.table[(a, b)]

    def power(self, a, n: int):
        out = self.unit
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Monoid)
            and self.carrier == other.carrier
            and self.unit == other.unit
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.carrier, self.unit))

    @classmethod
    def trivial(cls) -> "Monoid":
        return cls(FinSet(["e"]), {("e", "e"): "e"}, "e", name="trivial")

    @classmethod
    def cyclic(cls, n: int) -> "Monoid":
        """Z/n written additively on 0..n-1."""
        carrier = FinSet(range(n))
        return cls(carrier, {(a, b): (a + b) % n for a in carrier for b in carrier}, 0, name=f"Z/{n}")


def check_monoid(m: Monoid, fail_fast: bool = False) -> ValidationReport:
    checker = Checker(f"monoid {m.name}", fail_fast)
    try:
        for a in m.carrier:
            checker.expect(m.mul(m.unit, a) == a, "unit", side="left", atom=a)
            checker.expect(m.mul(a, m.unit) == a, "unit", side="right", atom=a)
        for a, b, c in itertools.product(m.carrier, repeat=3):
            lhs = m.mul(m.mul(a, b), c)
            rhs = m.mul(a, m.mul(b, c))
            checker.expect(lhs == rhs, "associativity", a=a, b=b, c=c, left=lhs, right=rhs)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def enumerate_monoids(carrier: FinSet) -> List[Monoid]:
    """Every monoid structure on `carrier` (exhaustive; carriers of size <= 3)."""
    found = []
    pairs = [(a, b) for a in carrier for b in carrier]
    for unit in carrier:
        free = [p for p in pairs if unit not in p]
        for values in itertools.product(carrier.elements, repeat=len(free)):
            table = {p: v for p, v in zip(free, values)}
            for a in carrier:
                table[(unit, a)] = a
                table[(a, unit)] = a
            m = Monoid(carrier, table, unit)
            if check_monoid(m, fail_fast=True).ok:
                found.append(m)
    return found
