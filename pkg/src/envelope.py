"""
Enveloping monoids of free algebras and the module dictionary for monoids.

For a one-colored operad O and a generating set X, the envelope of F(X) has degree n
piece O(n+1) (x)_{Sigma_n} X^n, where Sigma_n permutes inputs 1..n and input 0 is
the hole. Multiplication fills the hole of the left factor with the right one.
"""

import logging
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

from src.basecat import Atom, FinSet, Monoid, inverse_perm, least, place_permute, symmetric_group
from src.collection import Signature
from src.operads import ONE, ColoredOperad, operad_of_monoid
from src.algebras import (
    FreeAlgebra,
    OperadAlgebra,
    check_algebra,
    check_module,
    enumerate_algebras,
    enumerate_modules,
)
from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError, InvalidStructure, TruncationError

logger = logging.getLogger(__name__)

HOLE = "_"


def _sig(n: int) -> Signature:
    return Signature((ONE,) * n, ONE)


class GradedMonoid:
    """
    Pieces by degree up to max_degree; `mul` raises TruncationError when the
    product would leave the cap.
    """

    def __init__(
        self,
        pieces: Dict[int, FinSet],
        unit: Atom,
        mul: Callable[[Atom, Atom], Atom],
        degree: Callable[[Atom], int],
        max_degree: int,
        name: str = "graded monoid",
        overrides: Optional[Dict[Tuple[Atom, Atom], Atom]] = None,
    ):
        self.pieces = pieces
        self.unit = unit
        self._mul = mul
        self.degree = degree
        self.max_degree = max_degree
        self.name = name
        self.overrides = dict(overrides or {})

    def elements(self) -> List[Atom]:
        return [x for n in sorted(self.pieces) for x in self.pieces[n]]

    def mul(self, x: Atom, y: Atom) -> Atom:
        if (x, y) in self.overrides:
            return self.overrides[(x, y)]
        if self.degree(x) + self.degree(y) > self.max_degree:
            raise TruncationError(f"Product of degree {self.degree(x) + self.degree(y)} above {self.max_degree}")
        return self._mul(x, y)

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.pieces[n]) for n in range(self.max_degree + 1))

    def with_entry(self, x: Atom, y: Atom, value: Atom) -> "GradedMonoid":
        overrides = dict(self.overrides)
        overrides[(x, y)] = value
        return GradedMonoid(self.pieces, self.unit, self._mul, self.degree, self.max_degree, f"{self.name}*", overrides)

    def table(self) -> List[Dict[str, str]]:
        rows = []
        for x in self.elements():
            for y in self.elements():
                try:
                    rows.append({"left": repr(x), "right": repr(y), "product": repr(self.mul(x, y))})
                except TruncationError:
                    continue
        return rows


def check_graded_monoid(m: GradedMonoid, fail_fast: bool = False) -> ValidationReport:
    """Unit laws, degree additivity and associativity on every in-bound triple."""
    checker = Checker(f"graded monoid {m.name}", fail_fast)
    elements = m.elements()
    try:
        checker.expect(m.degree(m.unit) == 0 and m.unit in m.pieces[0], "unit", unit=m.unit)
        for x in elements:
            checker.expect(m.mul(m.unit, x) == x, "unit", side="left", atom=x)
            checker.expect(m.mul(x, m.unit) == x, "unit", side="right", atom=x)
        for x in elements:
            for y in elements:
                if m.degree(x) + m.degree(y) > m.max_degree:
                    checker.skip()
                    continue
                xy = m.mul(x, y)
                if not checker.expect(
                    xy in m.pieces.get(m.degree(x) + m.degree(y), ()), "degree", left=x, right=y, product=xy
                ):
                    continue
                for z in elements:
                    if m.degree(xy) + m.degree(z) > m.max_degree:
                        checker.skip()
                        continue
                    lhs = m.mul(xy, z)
                    rhs = m.mul(x, m.mul(y, z))
                    checker.expect(lhs == rhs, "associativity", a=x, b=y, c=z, left=lhs, right=rhs)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


# -------------------------
# The envelope of a free algebra
# -------------------------
def _hole_fixing(sigma) -> tuple:
    return (0,) + tuple(s + 1 for s in sigma)


def _env_canonical(o: ColoredOperad, mu: Atom, t: tuple) -> tuple:
    n = len(t)
    s = _sig(n + 1)
    return least(
        (o.act(_hole_fixing(sigma), s, mu), place_permute(inverse_perm(sigma), t)) for sigma in symmetric_group(n)
    )


def env_of_free(o: ColoredOperad, x: Iterable[Atom], max_degree: int) -> GradedMonoid:
    """Elements are least pairs (mu, t) with mu in O(n+1) and t in X^n."""
    if len(o.colors) != 1:
        raise InputError(f"The envelope formula needs a one-colored operad, {o.name} has {len(o.colors)} colors")
    if o.arity_bound < max_degree + 1:
        raise InputError(f"{o.name} is stored up to arity {o.arity_bound}; degree {max_degree} needs {max_degree + 1}")
    x = FinSet(x)
    pieces = {}
    for n in range(max_degree + 1):
        found = set()
        for mu in o.level(_sig(n + 1)):
            for t in _tuples(x, n):
                found.add(_env_canonical(o, mu, t))
        pieces[n] = FinSet(found)

    def mul(a, b):
        mu, t = a
        nu, u = b
        _, composite = o.circ(_sig(len(t) + 1), 0, _sig(len(u) + 1), mu, nu)
        return _env_canonical(o, composite, u + t)

    return GradedMonoid(
        pieces, (o.unit(ONE), ()), mul, lambda e: len(e[1]), max_degree, name=f"Env_{o.name}(F{list(x)})"
    )


def _tuples(x: FinSet, n: int):
    if n == 0:
        yield ()
        return
    for head in x:
        for tail in _tuples(x, n - 1):
            yield (head,) + tail


def one_hole_words(x: Iterable[Atom], max_degree: int) -> GradedMonoid:
    """Pairs (prefix, suffix) standing for prefix _ suffix; the hole of the left factor takes the right one."""
    x = FinSet(x)
    pieces = {}
    for n in range(max_degree + 1):
        pieces[n] = FinSet((word[:k], word[k:]) for word in _tuples(x, n) for k in range(n + 1))

    def mul(a, b):
        return (a[0] + b[0], b[1] + a[1])

    return GradedMonoid(pieces, ((), ()), mul, lambda w: len(w[0]) + len(w[1]), max_degree, name="one-hole words")


class GradedIsomorphism(NamedTuple):
    mapping: Dict[Atom, Atom]
    report: ValidationReport


def env_to_words(e: tuple) -> tuple:
    """An element of Env_ass read as a word: variable j sits at position mu(j), variable 0 is the hole."""
    mu, t = e
    word = place_permute(mu, (HOLE,) + tuple(t))
    hole = mu[0]
    return (word[:hole], word[hole + 1:])


def graded_isomorphism(env: GradedMonoid, words: GradedMonoid, fn: Callable[[Atom], Atom] = env_to_words) -> GradedIsomorphism:
    """Checks that fn is a degreewise bijection preserving the unit and every in-bound product."""
    checker = Checker(f"{env.name} ~ {words.name}")
    mapping = {e: fn(e) for e in env.elements()}
    for n in range(env.max_degree + 1):
        image = {mapping[e] for e in env.pieces[n]}
        checker.expect(
            len(image) == len(env.pieces[n]) and FinSet(image) == words.pieces.get(n), "bijection", degree=n
        )
    checker.expect(mapping[env.unit] == words.unit, "unit")
    for a in env.elements():
        for b in env.elements():
            try:
                product = env.mul(a, b)
            except TruncationError:
                checker.skip()
                continue
            checker.expect(
                mapping[product] == words.mul(mapping[a], mapping[b]), "multiplication", left=a, right=b
            )
    log_report(checker.report)
    return GradedIsomorphism(mapping, checker.report)


# -------------------------
# The free algebra as a left module over its envelope
# -------------------------
def act_on_free(env_operad: ColoredOperad, free: FreeAlgebra, e: tuple, f: tuple) -> tuple:
    """Substitutes f into the hole of e."""
    mu, t = e
    inputs, nu, u = f
    degree = len(t) + len(inputs)
    if degree > free.max_degree:
        raise TruncationError(f"Module action lands in degree {degree} above {free.max_degree}")
    _, composite = env_operad.circ(_sig(len(t) + 1), 0, _sig(len(inputs)), mu, nu)
    return free.canonical((ONE,) * degree, ONE, composite, tuple(u) + tuple(t))


def check_env_module(env: GradedMonoid, free: FreeAlgebra, fail_fast: bool = False) -> ValidationReport:
    """1.f = f and (e e').f = e.(e'.f) for every in-bound degree."""
    o = free.operad
    checker = Checker(f"{env.name} acting on {free.name}", fail_fast)
    elements = list(free.carriers[ONE])
    try:
        for f in elements:
            checker.expect(act_on_free(o, free, env.unit, f) == f, "unit", atom=f)
        for a in env.elements():
            for b in env.elements():
                for f in elements:
                    if env.degree(a) + env.degree(b) + free.degree(f) > free.max_degree:
                        checker.skip()
                        continue
                    lhs = act_on_free(o, free, env.mul(a, b), f)
                    rhs = act_on_free(o, free, a, act_on_free(o, free, b, f))
                    checker.expect(lhs in free.carriers[ONE], "closure", left=a, atom=f)
                    checker.expect(lhs == rhs, "associativity", a=a, b=b, atom=f, left=lhs, right=rhs)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


# -------------------------
# Modules over a monoid as algebras over O_A
# -------------------------
def module_to_algebra(monoid: Monoid, carrier: FinSet, action: Dict[Tuple[Atom, Atom], Atom]) -> OperadAlgebra:
    report = check_module(monoid, carrier, action)
    if not report.ok:
        raise InvalidStructure(f"Not a module over {monoid.name}", report)
    o = operad_of_monoid(monoid)
    return OperadAlgebra(o, {ONE: carrier}, lambda s, a, xs: action[(a, xs[0])], name=f"module over {monoid.name}")


def algebra_to_module(a: OperadAlgebra) -> Dict[Tuple[Atom, Atom], Atom]:
    report = check_algebra(a)
    if not report.ok:
        raise InvalidStructure(f"{a.name} is not an algebra over {a.operad.name}", report)
    unary = _sig(1)
    return {(r, m): a.act(unary, r, (m,)) for r in a.operad.level(unary) for m in a.carriers[ONE]}


class ModulesDictionary(NamedTuple):
    modules: List[Dict[Tuple[Atom, Atom], Atom]]
    algebras: List[OperadAlgebra]
    report: ValidationReport


def enumerate_module_structures(monoid: Monoid, carrier: Iterable[Atom]) -> List[Dict[Tuple[Atom, Atom], Atom]]:
    return enumerate_modules(monoid, FinSet(carrier))


def modules_dictionary(monoid: Monoid, carrier: Iterable[Atom]) -> ModulesDictionary:
    """Modules and O_A-algebras on one carrier, enumerated separately and matched through both translations."""
    carrier = FinSet(carrier)
    modules = enumerate_modules(monoid, carrier)
    algebras = enumerate_algebras(operad_of_monoid(monoid), {ONE: carrier}, generating_arity=1)
    checker = Checker(f"modules over {monoid.name} on {len(carrier)} points")
    checker.expect(len(modules) == len(algebras), "count", modules=len(modules), algebras=len(algebras))
    translated = [algebra_to_module(a) for a in algebras]
    for action in modules:
        checker.expect(action in translated, "round_trip", side="module", action=sorted(action.items()))
        back = algebra_to_module(module_to_algebra(monoid, carrier, action))
        checker.expect(back == action, "round_trip", side="identity", action=sorted(action.items()))
    for table in translated:
        checker.expect(table in modules, "round_trip", side="algebra", action=sorted(table.items()))
    log_report(checker.report)
    return ModulesDictionary(modules, algebras, checker.report)
