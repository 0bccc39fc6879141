"""
Algebras over colored operads.

An algebra is a carrier family X(c) with structure maps
theta(mu; x1..xn) for mu in O(c1..cn;c). Free algebras are graded by arity
(word length) and hold every degree up to a cap N; their structure maps raise
TruncationError above it.
"""

import itertools
import logging
from typing import Any, Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from tqdm import tqdm

from src.basecat import (
    Atom,
    FinMap,
    FinSet,
    Monoid,
    atom_key,
    inverse_perm,
    least,
    place_permute,
    symmetric_group,
)
from src.collection import Color, Signature, is_identity
from src.operads import (
    ONE,
    ColoredOperad,
    OperadMap,
    end_of_map,
    endomorphism_operad,
    mod_operad,
    restrict,
)
from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError, InvalidStructure, SizeCapExceeded, TruncationError, ensure_within_cap

logger = logging.getLogger(__name__)

Structure = Callable[[Signature, Atom, tuple], Atom]

# End(f) cross-checks only run when every End level stays this small
END_CHECK_CAP = 5000
END_CHECK_ARITY = 3


class OperadAlgebra:
    def __init__(
        self,
        operad: ColoredOperad,
        carriers: Dict[Color, FinSet],
        structure: Structure,
        name: str = "algebra",
        degree: Optional[Callable[[Atom], int]] = None,
        max_degree: Optional[int] = None,
        overrides: Optional[Dict[tuple, Atom]] = None,
        provenance: Optional[dict] = None,
    ):
        for c in operad.colors:
            if c not in carriers:
                raise InputError(f"Algebra {name} has no carrier for color {c!r}")
        self.operad = operad
        self.carriers = dict(carriers)
        self._structure = structure
        self.name = name
        self.degree = degree
        self.max_degree = max_degree
        self.overrides = dict(overrides or {})
        self.provenance = provenance

    @property
    def graded(self) -> bool:
        return self.degree is not None

    def carrier(self, c: Color) -> FinSet:
        return self.carriers[c]

    def act(self, s: Signature, mu: Atom, xs: Sequence[Atom]) -> Atom:
        xs = tuple(xs)
        key = (s, mu, xs)
        if key in self.overrides:
            return self.overrides[key]
        return self._structure(s, mu, xs)

    def inputs(self, colors: Sequence[Color]) -> Iterator[tuple]:
        """Input tuples; for graded algebras only those of total degree within the cap."""
        if not self.graded:
            return itertools.product(*[self.carriers[c].elements for c in colors])
        return self._graded_inputs(tuple(colors), self.max_degree)

    def _graded_inputs(self, colors: tuple, budget: int) -> Iterator[tuple]:
        if not colors:
            yield ()
            return
        head, rest = colors[0], colors[1:]
        for x in self.carriers[head]:
            d = self.degree(x)
            if d <= budget:
                for tail in self._graded_inputs(rest, budget - d):
                    yield (x,) + tail

    def replace(self, **changes) -> "OperadAlgebra":
        fields = dict(
            operad=self.operad,
            carriers=self.carriers,
            structure=self._structure,
            name=self.name,
            degree=self.degree,
            max_degree=self.max_degree,
            overrides=self.overrides,
            provenance=self.provenance,
        )
        fields.update(changes)
        return OperadAlgebra(**fields)

    def size_table(self) -> List[Dict[str, Any]]:
        rows = []
        for c in self.operad.colors:
            if self.graded:
                for d in range(self.max_degree + 1):
                    count = sum(1 for x in self.carriers[c] if self.degree(x) == d)
                    rows.append({"color": str(c), "degree": d, "size": count})
            else:
                rows.append({"color": str(c), "size": len(self.carriers[c])})
        return rows


def with_structure_entry(a: OperadAlgebra, s: Signature, mu: Atom, xs: Sequence[Atom], value: Atom) -> OperadAlgebra:
    overrides = dict(a.overrides)
    overrides[(s, mu, tuple(xs))] = value
    return a.replace(overrides=overrides, name=f"{a.name}*")


def _shapes_by_arity(o: ColoredOperad, bound: int) -> List[Signature]:
    return sorted(o.signatures(bound), key=lambda s: (s.arity, atom_key(s)))


class _Eval:
    def __init__(self, a: OperadAlgebra, checker: Checker):
        self.a = a
        self.checker = checker

    def theta(self, s, mu, xs):
        try:
            value = self.a.act(s, mu, xs)
        except TruncationError:
            self.checker.skip()
            return None
        except InputError as e:
            self.checker.fail("structure_table", signature=s, atom=mu, inputs=xs, error=str(e))
            return None
        if value not in self.a.carriers[s.output]:
            self.checker.fail("closure", signature=s, atom=mu, inputs=xs, value=value)
            return None
        return value


def check_algebra(
    a: OperadAlgebra, arity_bound: Optional[int] = None, fail_fast: bool = False, progress: bool = False
) -> ValidationReport:
    """Unit, equivariance and composition compatibility on every in-bound shape."""
    o = a.operad
    bound = o.arity_bound if arity_bound is None else min(arity_bound, o.arity_bound)
    checker = Checker(f"algebra {a.name}", fail_fast)
    ev = _Eval(a, checker)
    sigs = _shapes_by_arity(o, bound)
    try:
        for c in o.colors:
            if not o.has_unit(c):
                continue
            unit_sig = Signature((c,), c)
            for x in a.carriers[c]:
                value = ev.theta(unit_sig, o.unit(c), (x,))
                if value is not None:
                    checker.expect(value == x, "unit", color=c, atom=x, value=value)
        shapes = []
        for s in sigs:
            for i in range(s.arity):
                for t in sigs:
                    if t.output == s.inputs[i] and s.arity + t.arity - 1 <= bound:
                        shapes.append((s.arity + t.arity - 1, s, i, t))
        shapes.sort(key=lambda shape: (shape[0], atom_key(shape[1]), shape[2], atom_key(shape[3])))
        for _, s, i, t in tqdm(shapes, desc="composition", disable=not progress):
            b = t.arity
            for mu in o.level(s):
                for nu in o.level(t):
                    rs, composite = o.circ(s, i, t, mu, nu)
                    for w in a.inputs(rs.inputs):
                        lhs = ev.theta(rs, composite, w)
                        inner = ev.theta(t, nu, w[i:i + b])
                        if lhs is None or inner is None:
                            continue
                        rhs = ev.theta(s, mu, w[:i] + (inner,) + w[i + b:])
                        if rhs is None:
                            continue
                        checker.expect(
                            lhs == rhs, "composition", outer=s, slot=i, inner=t, left=mu, right=nu, inputs=w,
                            composite=lhs, iterated=rhs,
                        )
        for s in tqdm(sigs, desc="equivariance", disable=not progress):
            if s.arity < 2:
                continue
            for mu in o.level(s):
                for sigma in symmetric_group(s.arity):
                    if is_identity(sigma):
                        continue
                    moved_sig = s.permute(sigma)
                    moved = o.act(sigma, s, mu)
                    for y in a.inputs(moved_sig.inputs):
                        lhs = ev.theta(moved_sig, moved, y)
                        rhs = ev.theta(s, mu, place_permute(sigma, y))
                        if lhs is None or rhs is None:
                            continue
                        checker.expect(
                            lhs == rhs, "equivariance", signature=s, atom=mu, sigma=sigma, inputs=y, left=lhs, right=rhs
                        )
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def algebras_equal(a: OperadAlgebra, b: OperadAlgebra, arity_bound: Optional[int] = None) -> ValidationReport:
    """Same carriers and the same structure values on every in-bound shape of a's operad."""
    bound = a.operad.arity_bound if arity_bound is None else arity_bound
    checker = Checker(f"{a.name} == {b.name}")
    for c in a.operad.colors:
        checker.expect(a.carriers[c] == b.carriers.get(c), "carrier", color=c)
    if not checker.report.ok:
        return checker.report
    for s in a.operad.signatures(bound):
        for mu in a.operad.level(s):
            for xs in a.inputs(s.inputs):
                try:
                    left = a.act(s, mu, xs)
                except TruncationError:
                    checker.skip()
                    continue
                try:
                    right = b.act(s, mu, xs)
                except TruncationError:
                    right = None
                checker.expect(left == right, "structure", signature=s, atom=mu, inputs=xs, left=left, right=right)
    return checker.report


# -------------------------
# Monoids as algebras
# -------------------------
def _kind(o: ColoredOperad) -> str:
    return (o.provenance or {}).get("name", o.name)


def algebra_from_monoid(o: ColoredOperad, monoid: Monoid) -> OperadAlgebra:
    """
    The ass- or com-algebra of a multiplication table: theta(mu; y) multiplies
    the letters of the word mu places, the empty word being the unit.
    """
    kind = _kind(o)
    if kind not in ("ass", "com"):
        raise InputError(f"Monoids are algebras over ass or com, not {o.name}")

    def structure(s, mu, ys):
        word = place_permute(mu, ys) if kind == "ass" else ys
        if not word:
            return monoid.unit
        value = word[0]
        for y in word[1:]:
            value = monoid.mul(value, y)
        return value

    return OperadAlgebra(
        o,
        {ONE: monoid.carrier},
        structure,
        name=f"{monoid.name} over {o.name}",
        provenance={"name": "monoid_algebra", "params": {"operad": o.provenance}},
    )


def monoid_of_algebra(a: OperadAlgebra) -> Monoid:
    kind = _kind(a.operad)
    binary = (0, 1) if kind == "ass" else ()
    carrier = a.carriers[ONE]
    table = {(x, y): a.act(Signature((ONE, ONE), ONE), binary, (x, y)) for x in carrier for y in carrier}
    unit = a.act(Signature((), ONE), (), ())
    return Monoid(carrier, table, unit, name=f"monoid({a.name})")


# -------------------------
# Structure maps and algebra maps
# -------------------------
def structure_map(a: OperadAlgebra, size_cap: Optional[int] = None) -> OperadMap:
    """O -> End(X), mu |-> theta(mu; -) as an output tuple."""
    if a.graded:
        raise InputError("Structure maps into End(X) need a finite, ungraded algebra")
    end = endomorphism_operad(a.carriers, a.operad.arity_bound, size_cap)
    hom = end.hom

    def fn(s, mu):
        return tuple(a.act(s, mu, ys) for ys in hom.domain(s.inputs))

    return OperadMap(a.operad, end, fn, name=f"structure of {a.name}")


class AlgebraMap:
    def __init__(self, source: OperadAlgebra, target: OperadAlgebra, components: Dict[Color, Dict[Atom, Atom]], name: str = "map"):
        self.source = source
        self.target = target
        self.components = {c: dict(m) for c, m in components.items()}
        self.name = name

    def __call__(self, c: Color, x: Atom) -> Atom:
        return self.components[c][x]

    def defined_at(self, c: Color, x: Atom) -> bool:
        return x in self.components.get(c, {})

    def fin_maps(self) -> Dict[Color, FinMap]:
        return {
            c: FinMap(FinSet(self.components[c]), self.target.carriers[c], self.components[c], check=False)
            for c in self.source.operad.colors
        }

    def __eq__(self, other):
        return isinstance(other, AlgebraMap) and self.components == other.components

    def __hash__(self):
        return hash(tuple(sorted(self.components, key=atom_key)))


def check_algebra_map(
    f: AlgebraMap, arity_bound: Optional[int] = None, via_end: bool = True, fail_fast: bool = False
) -> ValidationReport:
    """
    Every structure square, and independently the factorization of both
    structure maps through End(f) when the End levels are small enough.
    Partial maps are checked where every value involved is defined.
    """
    source, target = f.source, f.target
    o = source.operad
    bound = o.arity_bound if arity_bound is None else min(arity_bound, o.arity_bound)
    checker = Checker(f"algebra map {f.name}", fail_fast)
    ev = _Eval(target, checker)
    squares_ok = True
    try:
        for s in o.signatures(bound):
            for mu in o.level(s):
                for ys in source.inputs(s.inputs):
                    if not all(f.defined_at(c, y) for c, y in zip(s.inputs, ys)):
                        checker.skip()
                        continue
                    try:
                        out = source.act(s, mu, ys)
                    except TruncationError:
                        checker.skip()
                        continue
                    if not f.defined_at(s.output, out):
                        checker.skip()
                        continue
                    rhs = ev.theta(s, mu, tuple(f(c, y) for c, y in zip(s.inputs, ys)))
                    if rhs is None:
                        continue
                    lhs = f(s.output, out)
                    if lhs != rhs and s.arity <= END_CHECK_ARITY:
                        squares_ok = False
                    checker.expect(lhs == rhs, "square", signature=s, atom=mu, inputs=ys, left=lhs, right=rhs)
    except StopCheck:
        log_report(checker.report, quiet=True)
        return checker.report
    if via_end and not source.graded and not target.graded:
        end_ok = _factors_through_end_of_map(f, bound, checker)
        if end_ok is not None and end_ok != squares_ok:
            checker.report.add("verdict_mismatch", squares=squares_ok, end_of_map=end_ok)
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def _factors_through_end_of_map(f: AlgebraMap, bound: int, checker: Checker) -> Optional[bool]:
    bound = min(bound, END_CHECK_ARITY)
    try:
        e = end_of_map(f.fin_maps(), bound, size_cap=END_CHECK_CAP)
    except (SizeCapExceeded, InputError):
        return None
    end_x, end_y = e.to_source.target, e.to_target.target
    ok = True
    for s in f.source.operad.signatures(bound):
        for mu in f.source.operad.level(s):
            g = tuple(f.source.act(s, mu, ys) for ys in end_x.hom.domain(s.inputs))
            h = tuple(f.target.act(s, mu, ys) for ys in end_y.hom.domain(s.inputs))
            inside = (g, h) in e.operad.level(s)
            checker.tick()
            if not inside:
                ok = False
                checker.report.add("end_factorization", signature=s, atom=mu)
    return ok


def _square_instances(a: OperadAlgebra, bound: int) -> List[tuple]:
    """Every (signature, mu, inputs, output) with output = theta(mu; inputs) in bound."""
    out = []
    for s in a.operad.signatures(bound):
        for mu in a.operad.level(s):
            for ys in a.inputs(s.inputs):
                try:
                    out.append((s, mu, ys, a.act(s, mu, ys)))
                except TruncationError:
                    continue
    return out


def algebra_maps(
    a: OperadAlgebra,
    b: OperadAlgebra,
    arity_bound: Optional[int] = None,
    fixed: Optional[Dict[Tuple[Color, Atom], Atom]] = None,
) -> List[AlgebraMap]:
    """
    Every algebra map a -> b by exhaustion, optionally with some values fixed.
    Elements are assigned one at a time (graded sources by degree) and each
    square is checked as soon as its last element is assigned.
    """
    o = a.operad
    bound = o.arity_bound if arity_bound is None else min(arity_bound, o.arity_bound)
    fixed = dict(fixed or {})

    def stage(x):
        return a.degree(x) if a.graded else 0

    order = sorted(
        ((c, x) for c in o.colors for x in a.carriers[c]),
        key=lambda e: (stage(e[1]), atom_key(e[0]), atom_key(e[1])),
    )
    position = {e: k for k, e in enumerate(order)}
    for (c, x), y in fixed.items():
        if (c, x) not in position or y not in b.carriers[c]:
            raise InputError(f"Cannot fix {x!r} |-> {y!r} in color {c!r}")
    squares_at: List[List[tuple]] = [[] for _ in order]
    for s, mu, ys, out in _square_instances(a, bound):
        keys = [(c, y) for c, y in zip(s.inputs, ys)] + [(s.output, out)]
        if any(key not in position for key in keys):
            continue
        squares_at[max(position[key] for key in keys)].append((s, mu, ys, out))

    assignment: Dict[Tuple[Color, Atom], Atom] = {}

    def holds(square) -> bool:
        s, mu, ys, out = square
        try:
            image = b.act(s, mu, tuple(assignment[(c, y)] for c, y in zip(s.inputs, ys)))
        except TruncationError:
            return True
        return assignment[(s.output, out)] == image

    candidates = [[fixed[e]] if e in fixed else list(b.carriers[e[0]].elements) for e in order]
    found = []
    tried = [0] * len(order)
    k = 0
    while k >= 0:
        if k == len(order):
            components: Dict[Color, Dict[Atom, Atom]] = {c: {} for c in o.colors}
            for (c, x), y in assignment.items():
                components[c][x] = y
            found.append(AlgebraMap(a, b, components))
            k -= 1
            continue
        advanced = False
        while tried[k] < len(candidates[k]):
            assignment[order[k]] = candidates[k][tried[k]]
            tried[k] += 1
            if all(holds(sq) for sq in squares_at[k]):
                advanced = True
                break
        if advanced:
            k += 1
            if k < len(order):
                tried[k] = 0
        else:
            assignment.pop(order[k], None)
            k -= 1
    return found


def restrict_algebra(alpha: Dict[Color, Color], a: OperadAlgebra) -> OperadAlgebra:
    """alpha^* on algebras: X(alpha(c)) over alpha^* O."""
    o = restrict(alpha, a.operad)

    def image(s):
        return Signature(tuple(alpha[c] for c in s.inputs), alpha[s.output])

    return OperadAlgebra(
        o,
        {c: a.carriers[alpha[c]] for c in alpha},
        lambda s, mu, xs: a.act(image(s), mu, xs),
        name=f"restrict({a.name})",
        degree=a.degree,
        max_degree=a.max_degree,
    )


# -------------------------
# Free algebras
# -------------------------
class FreeAlgebra(OperadAlgebra):
    """
    F_O(X)(c) = coproduct over n and c1..cn of O(c1..cn;c) x_{Sigma_n} X(c1)..X(cn),
    degree n <= N. Elements are the least triples (inputs, mu, tuple) of their orbit
    under (s, mu, t) ~ (s . sigma, mu . sigma, sigma^-1 . t).
    """

    def __init__(self, o: ColoredOperad, x: Dict[Color, FinSet], max_degree: int, size_cap: Optional[int] = None, name: Optional[str] = None):
        if max_degree > o.arity_bound:
            raise InputError(f"Degree cap {max_degree} exceeds the arity bound {o.arity_bound} of {o.name}")
        for c in o.colors:
            if c not in x:
                raise InputError(f"No generators given for color {c!r}")
        self.generators = {c: FinSet(x[c]) for c in o.colors}
        self.pieces: Dict[Color, Dict[int, FinSet]] = {}
        found: Dict[Color, Dict[int, set]] = {c: {n: set() for n in range(max_degree + 1)} for c in o.colors}
        for s in o.signatures(max_degree):
            raw = len(o.level(s))
            for c in s.inputs:
                raw *= len(self.generators[c])
            ensure_within_cap(raw, f"free algebra piece {s}", size_cap)
            for mu in o.level(s):
                for t in itertools.product(*[self.generators[c].elements for c in s.inputs]):
                    found[s.output][s.arity].add(self._canonical(o, s, mu, t))
        for c in o.colors:
            self.pieces[c] = {n: FinSet(found[c][n]) for n in range(max_degree + 1)}
        carriers = {c: FinSet(e for n in self.pieces[c] for e in self.pieces[c][n]) for c in o.colors}
        super().__init__(
            o,
            carriers,
            self._structure_map,
            name=name or f"F_{o.name}",
            degree=lambda e: len(e[0]),
            max_degree=max_degree,
        )

    @staticmethod
    def _canonical(o: ColoredOperad, s: Signature, mu: Atom, t: tuple) -> tuple:
        candidates = []
        for sigma in symmetric_group(s.arity):
            candidates.append(
                (s.permute(sigma).inputs, o.act(sigma, s, mu), place_permute(inverse_perm(sigma), t))
            )
        return least(candidates)

    def canonical(self, inputs: tuple, output: Color, mu: Atom, t: tuple) -> tuple:
        return self._canonical(self.operad, Signature(tuple(inputs), output), mu, tuple(t))

    def _structure_map(self, s: Signature, nu: Atom, elements: tuple) -> tuple:
        total = sum(len(e[0]) for e in elements)
        if total > self.max_degree:
            raise TruncationError(f"Composite degree {total} exceeds the cap {self.max_degree}")
        inners = [(Signature(e[0], c), e[1]) for e, c in zip(elements, s.inputs)]
        composite_sig, composite = self.operad.compose(s, nu, inners)
        t = tuple(x for e in elements for x in e[2])
        return self._canonical(self.operad, composite_sig, composite, t)

    def generator(self, c: Color, x: Atom) -> tuple:
        """The inclusion X -> U F(X): x |-> [1_c; x]."""
        return ((c,), self.operad.unit(c), (x,))

    def apply_map(self, c: Color, e: tuple, g: Callable[[Color, Atom], Optional[Atom]]) -> Optional[tuple]:
        """F(g) on one element; None where g is undefined on some letter."""
        inputs, mu, t = e
        images = []
        for ci, x in zip(inputs, t):
            y = g(ci, x)
            if y is None:
                return None
            images.append(y)
        return self.canonical(inputs, c, mu, tuple(images))


def free_algebra(o: ColoredOperad, x: Dict[Color, Iterable[Atom]], max_degree: int, size_cap: Optional[int] = None) -> FreeAlgebra:
    return FreeAlgebra(o, {c: FinSet(xs) for c, xs in x.items()}, max_degree, size_cap)


class ExtensionResult(NamedTuple):
    map: AlgebraMap
    report: ValidationReport
    candidates: int


def universal_property_check(
    o: ColoredOperad, x: Dict[Color, Iterable[Atom]], a: OperadAlgebra, g: Dict[Color, Dict[Atom, Atom]], max_degree: int
) -> ExtensionResult:
    """
    The extension F(x) -> A of g, [mu; t] |-> theta_A(mu; g(t)), checked to be an
    algebra map and, by enumerating every algebra map F(x) -> A, the only one
    restricting to g.
    """
    free = free_algebra(o, x, max_degree)
    components: Dict[Color, Dict[Atom, Atom]] = {c: {} for c in o.colors}
    for c in o.colors:
        for e in free.carriers[c]:
            inputs, mu, t = e
            try:
                components[c][e] = a.act(Signature(inputs, c), mu, tuple(g[ci][xi] for ci, xi in zip(inputs, t)))
            except TruncationError as err:
                raise TruncationError(f"Extension blocked by truncation at degree {len(inputs)}: {err}") from err
    extension = AlgebraMap(free, a, components, name=f"extension to {a.name}")
    report = check_algebra_map(extension, via_end=False)
    on_generators = {(c, free.generator(c, xi)): g[c][xi] for c in o.colors for xi in free.generators[c]}
    candidates = algebra_maps(free, a, fixed=on_generators)
    report.checked += len(candidates)
    if len(candidates) != 1 or candidates[0] != extension:
        report.add("uniqueness", extensions=len(candidates))
    log_report(report)
    return ExtensionResult(extension, report, len(candidates))


# -------------------------
# Enumerating algebra structures
# -------------------------
def _orbit_representatives(o: ColoredOperad, bound: int):
    """For each (s, mu) of arity <= bound: its orbit representative and sigma with mu = rep . sigma."""
    located = {}
    reps = []
    for s in o.signatures(bound):
        for mu in o.level(s):
            if (s, mu) in located:
                continue
            orbit = {}
            for sigma in symmetric_group(s.arity):
                orbit.setdefault((s.permute(sigma), o.act(sigma, s, mu)), sigma)
            rep = least(orbit)
            rep_sigma = orbit[rep]
            # rep = (s, mu) . rep_sigma, so (s, mu) . sigma = rep . (rep_sigma^-1 sigma)
            back = inverse_perm(rep_sigma)
            for element, sigma in orbit.items():
                located[element] = (rep, tuple(back[i] for i in sigma))
            reps.append(rep)
    return reps, located


def _decompositions(o: ColoredOperad, generating_arity: int):
    """Each element above the generating arity written as nu o_i xi with both arities lower."""
    found = {}
    sigs = o.signatures()
    for n in range(generating_arity + 1, o.arity_bound + 1):
        for s in sigs:
            for i in range(s.arity):
                for t in sigs:
                    if t.output != s.inputs[i] or s.arity + t.arity - 1 != n:
                        continue
                    if s.arity >= n or t.arity >= n:
                        continue
                    for nu in o.level(s):
                        for xi in o.level(t):
                            rs, value = o.circ(s, i, t, nu, xi)
                            found.setdefault((rs, value), (s, i, t, nu, xi))
    return found


def enumerate_algebras(
    o: ColoredOperad,
    carriers: Dict[Color, Iterable[Atom]],
    generating_arity: int = 2,
    size_cap: Optional[int] = None,
    progress: bool = False,
) -> List[OperadAlgebra]:
    """
    Every algebra structure on the carriers, for operads generated in arity
    <= generating_arity: free values on orbit representatives, units forced,
    higher arities through decompositions; each candidate is validated.
    """
    carriers = {c: FinSet(xs) for c, xs in carriers.items()}
    reps, located = _orbit_representatives(o, generating_arity)
    decompositions = _decompositions(o, generating_arity)
    for s in o.signatures():
        if s.arity > generating_arity:
            for mu in o.level(s):
                if (s, mu) not in decompositions:
                    raise InputError(f"{o.name} is not generated in arity <= {generating_arity}: {mu!r} at {s}")
    free_reps = [(s, mu) for s, mu in reps if not (s.arity == 1 and o.has_unit(s.output) and mu == o.unit(s.output))]
    domains = [list(itertools.product(*[carriers[c].elements for c in s.inputs])) for s, _ in free_reps]
    total = 1
    for (s, _), dom in zip(free_reps, domains):
        total *= len(carriers[s.output]) ** len(dom)
    ensure_within_cap(total, f"algebra candidates for {o.name}", size_cap)

    choices = [
        itertools.product(carriers[s.output].elements, repeat=len(dom)) for (s, _), dom in zip(free_reps, domains)
    ]
    found = []
    for values in tqdm(itertools.product(*choices), total=total, desc="candidates", disable=not progress):
        tables = {rep: dict(zip(dom, vals)) for rep, dom, vals in zip(free_reps, domains, values)}
        algebra = _algebra_from_tables(o, carriers, tables, located, decompositions, generating_arity)
        if check_algebra(algebra, fail_fast=True).ok:
            found.append(algebra)
    logger.info(f"{len(found)} algebra structures over {o.name} out of {total} candidates")
    return found


def _algebra_from_tables(o, carriers, tables, located, decompositions, generating_arity):
    def structure(s, mu, xs):
        if s.arity <= generating_arity:
            if s.arity == 1 and o.has_unit(s.output) and mu == o.unit(s.output):
                return xs[0]
            rep, sigma = located[(s, mu)]
            return tables[rep][place_permute(sigma, xs)]
        outer, i, t, nu, xi = decompositions[(s, mu)]
        b = t.arity
        inner = structure(t, xi, xs[i:i + b])
        return structure(outer, nu, xs[:i] + (inner,) + xs[i + b:])

    algebra = OperadAlgebra(o, carriers, structure, name=f"{o.name}-algebra")
    algebra.tables = tables
    return algebra


# -------------------------
# Mod_O algebras as pairs (R, M)
# -------------------------
def check_module(monoid: Monoid, carrier: FinSet, action: Dict[Tuple[Atom, Atom], Atom], fail_fast: bool = False) -> ValidationReport:
    """Left module laws: e.m = m and (ab).m = a.(b.m)."""
    checker = Checker(f"module over {monoid.name}", fail_fast)
    try:
        for m in carrier:
            checker.expect(action.get((monoid.unit, m)) == m, "unit", atom=m)
        for a, b, m in itertools.product(monoid.carrier, monoid.carrier, carrier):
            lhs = action.get((monoid.mul(a, b), m))
            rhs = action.get((a, action.get((b, m))))
            checker.expect(lhs is not None and lhs == rhs, "associativity", a=a, b=b, m=m, left=lhs, right=rhs)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def check_bimodule(
    monoid: Monoid, carrier: FinSet, left: Dict[Tuple[Atom, Atom], Atom], right: Dict[Tuple[Atom, Atom], Atom],
    fail_fast: bool = False,
) -> ValidationReport:
    checker = Checker(f"bimodule over {monoid.name}", fail_fast)
    try:
        for m in carrier:
            checker.expect(left.get((monoid.unit, m)) == m, "unit", side="left", atom=m)
            checker.expect(right.get((m, monoid.unit)) == m, "unit", side="right", atom=m)
        for a, b, m in itertools.product(monoid.carrier, monoid.carrier, carrier):
            ab = monoid.mul(a, b)
            checker.expect(left.get((ab, m)) == left.get((a, left.get((b, m)))), "associativity", side="left", a=a, b=b, m=m)
            checker.expect(right.get((m, ab)) == right.get((right.get((m, a)), b)), "associativity", side="right", a=a, b=b, m=m)
            checker.expect(
                right.get((left.get((a, m)), b)) == left.get((a, right.get((m, b)))), "compatibility", a=a, b=b, m=m
            )
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


class ModPair(NamedTuple):
    ring: OperadAlgebra
    module: FinSet
    action: Structure


def _base_of(x: OperadAlgebra) -> ColoredOperad:
    base = getattr(x.operad, "base", None)
    if base is None:
        raise InputError(f"{x.operad.name} is not a Mod operad")
    return base


def _ring_sig(n: int) -> Signature:
    return Signature(("r",) * n, "r")


def pair_of_mod_algebra(x: OperadAlgebra, check: bool = True) -> ModPair:
    """A Mod_O-algebra as (R, M): R = X(r) with the all-r operations, M = X(m) with the rest."""
    base = _base_of(x)
    if check:
        report = check_algebra(x)
        if not report.ok:
            raise InvalidStructure(f"{x.name} is not a Mod-algebra", report)
    ring = OperadAlgebra(
        base,
        {ONE: x.carriers["r"]},
        lambda s, mu, xs: x.act(_ring_sig(s.arity), mu, xs),
        name=f"R({x.name})",
    )
    return ModPair(ring, x.carriers["m"], lambda s, mu, xs: x.act(s, mu, xs))


def mod_algebra_of_pair(o: ColoredOperad, pair: ModPair, mod: Optional[ColoredOperad] = None) -> OperadAlgebra:
    mod = mod or mod_operad(o)

    def structure(s, mu, xs):
        if s.output == "r":
            return pair.ring.act(Signature((ONE,) * s.arity, ONE), mu, xs)
        return pair.action(s, mu, xs)

    return OperadAlgebra(mod, {"r": pair.ring.carriers[ONE], "m": pair.module}, structure, name=f"({pair.ring.name}, M)")


class Bimodule(NamedTuple):
    monoid: Monoid
    carrier: FinSet
    left: Dict[Tuple[Atom, Atom], Atom]
    right: Dict[Tuple[Atom, Atom], Atom]


def bimodule_of_pair(pair: ModPair) -> Bimodule:
    """Over ass: r.m = theta(id; r, m) at (r,m;m) and m.r = theta(id; m, r) at (m,r;m)."""
    monoid = monoid_of_algebra(pair.ring)
    left = {(r, m): pair.action(Signature(("r", "m"), "m"), (0, 1), (r, m)) for r in monoid.carrier for m in pair.module}
    right = {(m, r): pair.action(Signature(("m", "r"), "m"), (0, 1), (m, r)) for r in monoid.carrier for m in pair.module}
    return Bimodule(monoid, pair.module, left, right)


def module_of_pair(pair: ModPair) -> Dict[Tuple[Atom, Atom], Atom]:
    """Over com: r.m = theta(*; r, m) at (r,m;m)."""
    return {
        (r, m): pair.action(Signature(("r", "m"), "m"), (), (r, m))
        for r in pair.ring.carriers[ONE] for m in pair.module
    }


def _split_word(s: Signature, word: tuple, positions: tuple):
    k = s.inputs.index("m")
    hole = positions[k]
    return word[:hole], word[hole], word[hole + 1:]


def mod_algebra_from_bimodule(o: ColoredOperad, bimodule: Bimodule) -> OperadAlgebra:
    """The Mod_ass-algebra of a bimodule: a word r..r m r..r evaluates to (prefix . m) . suffix."""
    report = check_bimodule(bimodule.monoid, bimodule.carrier, bimodule.left, bimodule.right)
    if not report.ok:
        raise InvalidStructure("Not a bimodule", report)
    ring = algebra_from_monoid(o, bimodule.monoid)
    monoid = bimodule.monoid

    def product(letters):
        value = monoid.unit
        for r in letters:
            value = monoid.mul(value, r)
        return value

    def action(s, mu, xs):
        word = place_permute(mu, xs)
        prefix, m, suffix = _split_word(s, word, mu)
        return bimodule.right[(bimodule.left[(product(prefix), m)], product(suffix))]

    return mod_algebra_of_pair(o, ModPair(ring, bimodule.carrier, action))


def mod_algebra_from_module(o: ColoredOperad, monoid: Monoid, carrier: FinSet, module: Dict[Tuple[Atom, Atom], Atom]) -> OperadAlgebra:
    """The Mod_com-algebra of a module over a commutative monoid."""
    report = check_module(monoid, carrier, module)
    if not report.ok:
        raise InvalidStructure("Not a module", report)
    ring = algebra_from_monoid(o, monoid)

    def action(s, mu, xs):
        k = s.inputs.index("m")
        value = monoid.unit
        for j, r in enumerate(xs):
            if j != k:
                value = monoid.mul(value, r)
        return module[(value, xs[k])]

    return mod_algebra_of_pair(o, ModPair(ring, carrier, action))


def enumerate_bimodules(monoid: Monoid, carrier: FinSet) -> List[Bimodule]:
    pairs_left = [(r, m) for r in monoid.carrier for m in carrier]
    pairs_right = [(m, r) for m in carrier for r in monoid.carrier]
    lefts = []
    for values in itertools.product(carrier.elements, repeat=len(pairs_left)):
        left = dict(zip(pairs_left, values))
        if check_module(monoid, carrier, left, fail_fast=True).ok:
            lefts.append(left)
    found = []
    for left in lefts:
        for values in itertools.product(carrier.elements, repeat=len(pairs_right)):
            right = dict(zip(pairs_right, values))
            if check_bimodule(monoid, carrier, left, right, fail_fast=True).ok:
                found.append(Bimodule(monoid, carrier, left, right))
    return found


def enumerate_modules(monoid: Monoid, carrier: FinSet) -> List[Dict[Tuple[Atom, Atom], Atom]]:
    keys = [(r, m) for r in monoid.carrier for m in carrier]
    found = []
    for values in itertools.product(carrier.elements, repeat=len(keys)):
        action = dict(zip(keys, values))
        if check_module(monoid, carrier, action, fail_fast=True).ok:
            found.append(action)
    return found


# -------------------------
# Bar resolution
# -------------------------
class BarObject:
    """
    A_n = (FU)^{n+1} A for n = 0..depth, each layer a free algebra with degree
    cap N. Faces and degeneracies are per-color maps; d_0 is partial because
    evaluating in A_{n-1} can leave its degree cap.
    """

    def __init__(self, algebra: OperadAlgebra, levels: List[FreeAlgebra]):
        self.algebra = algebra
        self.levels = levels
        self.depth = len(levels) - 1
        self.faces: Dict[Tuple[int, int], Dict[Color, Dict[Atom, Atom]]] = {}
        self.degeneracies: Dict[Tuple[int, int], Dict[Color, Dict[Atom, Atom]]] = {}
        self.augmentation: Dict[Color, Dict[Atom, Atom]] = {}
        self.extra: Dict[int, Dict[Color, Dict[Atom, Atom]]] = {}

    def level(self, n: int) -> OperadAlgebra:
        return self.algebra if n < 0 else self.levels[n]

    def face_map(self, n: int, i: int) -> AlgebraMap:
        target = self.augmentation if n == 0 else None
        components = target if target is not None else self.faces[(n, i)]
        return AlgebraMap(self.levels[n], self.level(n - 1), components, name=f"d_{i} on A_{n}")

    def degeneracy_map(self, n: int, j: int) -> AlgebraMap:
        return AlgebraMap(self.levels[n], self.levels[n + 1], self.degeneracies[(n, j)], name=f"s_{j} on A_{n}")

    def forget(self):
        """U of the augmented object, with the extra degeneracy h = eta."""
        from src.simplicial import AugmentedSimplicialSet, SimplicialObject

        colors = list(self.algebra.operad.colors)
        tagged = len(colors) > 1

        def flat_set(a: OperadAlgebra) -> FinSet:
            return FinSet((c, x) if tagged else x for c in colors for x in a.carriers[c])

        def flat_map(components, source: FinSet, target: FinSet) -> FinMap:
            assignment = {}
            for c in colors:
                for x, y in components.get(c, {}).items():
                    assignment[(c, x) if tagged else x] = (c, y) if tagged else y
            domain = FinSet(k for k in assignment)
            return FinMap(domain, target, assignment, check=False)

        levels = {n: flat_set(self.levels[n]) for n in range(self.depth + 1)}
        base = flat_set(self.algebra)
        faces = {
            (n, i): flat_map(self.faces[(n, i)], levels[n], levels[n - 1])
            for n in range(1, self.depth + 1) for i in range(n + 1)
        }
        degeneracies = {
            (n, j): flat_map(self.degeneracies[(n, j)], levels[n], levels[n + 1])
            for n in range(self.depth) for j in range(n + 1)
        }
        obj = SimplicialObject(levels, faces, degeneracies, name=f"U bar({self.algebra.name})")
        augmentation = flat_map(self.augmentation, levels[0], base)
        extra = {
            n: flat_map(self.extra[n], base if n == 0 else levels[n - 1], levels[n])
            for n in range(self.depth + 1)
        }
        return AugmentedSimplicialSet(obj, base, augmentation, extra)


def bar_resolution(a: OperadAlgebra, depth: int, max_degree: int, size_cap: Optional[int] = None, check: bool = True) -> BarObject:
    """
    A_n = F U A_{n-1} with A_{-1} = A. d_0 evaluates in A_{n-1}, d_i = F(d_{i-1}),
    s_0 = F(eta), s_j = F(s_{j-1}); the extra degeneracy is eta itself.
    """
    if a.graded:
        raise InputError("The bar resolution starts from a finite ungraded algebra")
    if check:
        report = check_algebra(a)
        if not report.ok:
            raise InvalidStructure(f"{a.name} is not a valid algebra", report)
    o = a.operad
    colors = list(o.colors)
    levels: List[FreeAlgebra] = []
    previous: OperadAlgebra = a
    for n in range(depth + 1):
        layer = FreeAlgebra(o, dict(previous.carriers), max_degree, size_cap, name=f"A_{n}")
        ensure_within_cap(sum(len(layer.carriers[c]) for c in colors), f"bar level {n}", size_cap)
        levels.append(layer)
        previous = layer
    bar = BarObject(a, levels)

    bar.augmentation = _evaluation(levels[0], a)
    for n in range(1, depth + 1):
        bar.faces[(n, 0)] = _evaluation(levels[n], levels[n - 1])
        for i in range(1, n + 1):
            inner = bar.augmentation if n == 1 else bar.faces[(n - 1, i - 1)]
            bar.faces[(n, i)] = _lift(levels[n], inner)
    for n in range(depth + 1):
        bar.extra[n] = {c: {x: levels[n].generator(c, x) for x in bar.level(n - 1).carriers[c]} for c in colors}
    for n in range(depth):
        bar.degeneracies[(n, 0)] = _lift(levels[n], bar.extra[n])
        for j in range(1, n + 1):
            bar.degeneracies[(n, j)] = _lift(levels[n], bar.degeneracies[(n - 1, j - 1)])
    logger.info(f"Bar resolution of {a.name}: sizes {[sum(len(l.carriers[c]) for c in colors) for l in levels]}")
    return bar


def _evaluation(layer: FreeAlgebra, target: OperadAlgebra) -> Dict[Color, Dict[Atom, Atom]]:
    """[mu; t] |-> theta(mu; t), partial where the composite leaves the degree cap."""
    out: Dict[Color, Dict[Atom, Atom]] = {}
    for c in layer.operad.colors:
        out[c] = {}
        for e in layer.carriers[c]:
            inputs, mu, t = e
            try:
                out[c][e] = target.act(Signature(inputs, c), mu, t)
            except TruncationError:
                continue
    return out


def _lift(layer: FreeAlgebra, inner: Dict[Color, Dict[Atom, Atom]]) -> Dict[Color, Dict[Atom, Atom]]:
    """F(g) on the elements of `layer` whose letters are all in the domain of g."""
    out: Dict[Color, Dict[Atom, Atom]] = {}
    for c in layer.operad.colors:
        out[c] = {}
        for e in layer.carriers[c]:
            image = layer.apply_map(c, e, lambda ci, x: inner[ci].get(x))
            if image is not None:
                out[c][e] = image
    return out


def check_bar(bar: BarObject, fail_fast: bool = False) -> ValidationReport:
    """Simplicial identities of U(bar), the splitting, and every face and degeneracy as an algebra map."""
    from src.simplicial import check_simplicial, split_colimit_check

    report = ValidationReport(name=f"bar resolution of {bar.algebra.name}")
    augmented = bar.forget()
    report.merge(check_simplicial(augmented.obj, fail_fast=fail_fast))
    report.merge(split_colimit_check(augmented))
    for n in range(bar.depth + 1):
        faces = [bar.face_map(n, 0)] if n == 0 else [bar.face_map(n, i) for i in range(n + 1)]
        for f in faces:
            report.merge(check_algebra_map(f, via_end=False, fail_fast=fail_fast))
        if n < bar.depth:
            for j in range(n + 1):
                report.merge(check_algebra_map(bar.degeneracy_map(n, j), via_end=False, fail_fast=fail_fast))
    log_report(report)
    return report
