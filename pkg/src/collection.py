"""
Colored collections and pointed collections, with the free-forgetful
adjunction between them.
"""

import itertools
import logging
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

from src.basecat import (
    EMPTY,
    Atom,
    FinMap,
    FinSet,
    Perm,
    atom_key,
    compose_perm,
    identity_perm,
    permute_right,
    symmetric_group,
    transposition,
    transposition_word,
)
from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError

logger = logging.getLogger(__name__)

Color = Any
Action = Callable[[Perm, "Signature", Atom], Atom]


class ColorSet(FinSet):
    def __init__(self, colors: Iterable[Color]):
        colors = list(colors)
        if not colors:
            raise InputError("A color set must be nonempty")
        if len(set(colors)) != len(colors):
            raise InputError(f"Duplicate colors in {colors!r}")
        super().__init__(colors)


class Signature(NamedTuple):
    inputs: Tuple[Color, ...]
    output: Color

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def permute(self, alpha: Perm) -> "Signature":
        return Signature(permute_right(self.inputs, alpha), self.output)

    def substitute(self, i: int, inner: "Signature") -> "Signature":
        return Signature(self.inputs[:i] + tuple(inner.inputs) + self.inputs[i + 1:], self.output)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.inputs) + ";" + str(self.output) + ")"


def sig(inputs: Iterable[Color], output: Color) -> Signature:
    return Signature(tuple(inputs), output)


def signatures_over(colors: Iterable[Color], max_arity: int) -> List[Signature]:
    colors = list(colors)
    out = []
    for n in range(max_arity + 1):
        for inputs in itertools.product(colors, repeat=n):
            for c in colors:
                out.append(Signature(inputs, c))
    return out


def is_identity(alpha: Perm) -> bool:
    return all(i == a for i, a in enumerate(alpha))


class ColoredCollection:
    """
    Finitely supported family of levels K(c1..cn;c) with right Sigma_n-actions.

    The action is either a function act(alpha, sig, x) or a table per adjacent
    transposition, (sig, j) -> {atom: atom}, extended along a reduced word.
    """

    def __init__(
        self,
        colors: Iterable[Color],
        levels: Dict[Signature, FinSet],
        action: Optional[Action] = None,
        generator_tables: Optional[Dict[Tuple[Signature, int], Dict[Atom, Atom]]] = None,
        name: str = "collection",
    ):
        self.colors = colors if isinstance(colors, ColorSet) else ColorSet(colors)
        self.name = name
        self.levels: Dict[Signature, FinSet] = {}
        for s, level in levels.items():
            s = Signature(tuple(s[0]), s[1])
            for c in s.inputs + (s.output,):
                if c not in self.colors:
                    raise InputError(f"Signature {s} uses unknown color {c!r}")
            if len(level):
                self.levels[s] = level
        self._action = action
        self.generator_tables = dict(generator_tables or {})

    def level(self, s: Signature) -> FinSet:
        return self.levels.get(s, EMPTY)

    def signatures(self, max_arity: Optional[int] = None) -> List[Signature]:
        sigs = [s for s in self.levels if max_arity is None or s.arity <= max_arity]
        return sorted(sigs, key=atom_key)

    def max_arity(self) -> int:
        return max((s.arity for s in self.levels), default=0)

    def act(self, alpha: Perm, s: Signature, x: Atom) -> Atom:
        """x . alpha, an atom of the level at s . alpha."""
        if is_identity(alpha):
            return x
        if self._action is not None:
            return self._action(alpha, s, x)
        current = s
        for j in transposition_word(alpha):
            table = self.generator_tables.get((current, j))
            if table is None or x not in table:
                raise InputError(f"No action of s_{j} on {x!r} at {current}")
            x = table[x]
            current = current.permute(transposition(s.arity, j))
        return x

    def generator_table_dump(self) -> Dict[Tuple[Signature, int], Dict[Atom, Atom]]:
        """Explicit tables on adjacent transpositions, whatever the stored form."""
        tables = {}
        for s in self.signatures():
            for j in range(s.arity - 1):
                t = transposition(s.arity, j)
                tables[(s, j)] = {x: self.act(t, s, x) for x in self.level(s)}
        return tables

    def size_table(self) -> List[Dict[str, Any]]:
        return [{"signature": str(s), "size": len(self.level(s))} for s in self.signatures()]


class PointedCollection:
    def __init__(self, base: ColoredCollection, units: Dict[Color, Atom]):
        self.base = base
        self.units = dict(units)
        for c, u in self.units.items():
            if u not in base.level(Signature((c,), c)):
                raise InputError(f"Unit {u!r} is not an element of the level ({c};{c})")

    @property
    def colors(self) -> ColorSet:
        return self.base.colors

    def level(self, s: Signature) -> FinSet:
        return self.base.level(s)


def check_collection(k: ColoredCollection, max_arity: int = 4, fail_fast: bool = False) -> ValidationReport:
    """Identity, closure, (ab)* = b*a* and bijectivity of every alpha* up to `max_arity`."""
    checker = Checker(f"collection {k.name}", fail_fast)
    try:
        for s in k.signatures(max_arity):
            n = s.arity
            if n < 2:
                checker.tick(len(k.level(s)))
                continue
            group = symmetric_group(n)
            for alpha in group:
                target = k.level(s.permute(alpha))
                images = set()
                for x in k.level(s):
                    try:
                        y = k.act(alpha, s, x)
                    except InputError as e:
                        checker.fail("action_table", signature=s, alpha=alpha, atom=x, error=str(e))
                        continue
                    images.add(y)
                    checker.expect(y in target, "closure", signature=s, alpha=alpha, atom=x, image=y)
                    for beta in group:
                        try:
                            lhs = k.act(compose_perm(alpha, beta), s, x)
                            rhs = k.act(beta, s.permute(alpha), y)
                        except InputError as e:
                            checker.fail("action_table", signature=s, alpha=alpha, beta=beta, error=str(e))
                            continue
                        checker.expect(
                            lhs == rhs, "composition", signature=s, alpha=alpha, beta=beta, atom=x, left=lhs, right=rhs
                        )
                # one finding per (signature, alpha), whichever way it fails
                if len(target) != len(k.level(s)) or len(images) != len(k.level(s)):
                    checker.fail(
                        "bijection", signature=s, alpha=alpha, size=len(k.level(s)), images=len(images), target=len(target)
                    )
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


# -------------------------
# Free-forgetful adjunction
# -------------------------
def _fresh(level: FinSet, color: Color) -> Atom:
    candidate = ("unit", color)
    while candidate in level:
        candidate = ("unit", candidate)
    return candidate


def free_pointed(k: ColoredCollection) -> PointedCollection:
    """F(K): every diagonal unary level gains one fresh unit atom, F(K)(c;c) = K(c;c) + I."""
    levels = dict(k.levels)
    units = {}
    for c in k.colors:
        s = Signature((c,), c)
        units[c] = _fresh(k.level(s), c)
        levels[s] = FinSet(k.level(s).elements + (units[c],))
    base = ColoredCollection(
        k.colors, levels, action=k._action, generator_tables=k.generator_tables, name=f"F({k.name})"
    )
    return PointedCollection(base, units)


def forget_pointed(p: PointedCollection) -> ColoredCollection:
    return p.base


class CollectionMap:
    """Per-signature maps between two collections over the same colors."""

    def __init__(self, source: ColoredCollection, target: ColoredCollection, components: Dict[Signature, Dict[Atom, Atom]]):
        self.source = source
        self.target = target
        self.components = {s: dict(c) for s, c in components.items()}

    def __call__(self, s: Signature, x: Atom) -> Atom:
        return self.components[s][x]

    def __eq__(self, other):
        return isinstance(other, CollectionMap) and self.components == other.components

    def __hash__(self):
        return hash(tuple(sorted(self.components, key=atom_key)))

    def key(self):
        return tuple(
            (s, tuple(self.components[s][x] for x in self.source.level(s)))
            for s in sorted(self.components, key=atom_key)
        )


def is_equivariant(f: CollectionMap) -> bool:
    for s, component in f.components.items():
        for alpha in symmetric_group(s.arity):
            moved = s.permute(alpha)
            for x, y in component.items():
                if f.components[moved][f.source.act(alpha, s, x)] != f.target.act(alpha, s, y):
                    return False
    return True


def collection_maps(k: ColoredCollection, l: ColoredCollection, units: Optional[Tuple[Dict, Dict]] = None) -> List[CollectionMap]:
    """
    Every equivariant map K -> L, by exhaustion. With `units=(source_units,
    target_units)` only the unit-preserving ones are kept.
    """
    sigs = k.signatures()
    choices = []
    for s in sigs:
        source, target = k.level(s), l.level(s)
        choices.append(list(itertools.product(target.elements, repeat=len(source))))
    found = []
    for picks in itertools.product(*choices):
        components = {s: dict(zip(k.level(s).elements, values)) for s, values in zip(sigs, picks)}
        f = CollectionMap(k, l, components)
        if units is not None:
            source_units, target_units = units
            if any(f(Signature((c,), c), u) != target_units[c] for c, u in source_units.items()):
                continue
        if is_equivariant(f):
            found.append(f)
    return found


def pointed_maps(p: PointedCollection, q: PointedCollection) -> List[CollectionMap]:
    return collection_maps(p.base, q.base, units=(p.units, q.units))


def unit_injection(k: ColoredCollection, fk: PointedCollection) -> CollectionMap:
    """K -> UF(K), the unit of the adjunction."""
    return CollectionMap(k, fk.base, {s: {x: x for x in k.level(s)} for s in k.signatures()})


def transpose_to_pointed(phi: CollectionMap, fk: PointedCollection, p: PointedCollection) -> CollectionMap:
    """phi: K -> U(P) becomes the pointed map F(K) -> P sending fresh units to units."""
    components = {s: dict(c) for s, c in phi.components.items()}
    for c, u in fk.units.items():
        components.setdefault(Signature((c,), c), {})[u] = p.units[c]
    return CollectionMap(fk.base, p.base, components)


def transpose_to_collection(psi: CollectionMap, k: ColoredCollection) -> CollectionMap:
    """psi: F(K) -> P restricted along the unit injection."""
    return CollectionMap(
        k, psi.target, {s: {x: psi(s, x) for x in k.level(s)} for s in k.signatures()}
    )
