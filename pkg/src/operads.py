"""
Colored operads: storage, axiom checking, maps, the endomorphism family and the
bundled constructors (ass, com, operads of monoids, Mod).

Composition is stored on partial composites mu o_i nu, 0-based: the inputs of
nu replace input i of mu and the result has inputs
s[:i] + t + s[i+1:]. Full multi-composition is derived from these.
"""

import itertools
import logging
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from tqdm import tqdm

from src.basecat import (
    Atom,
    FinMap,
    FinSet,
    Monoid,
    Perm,
    check_monoid,
    compose_perm,
    identity_perm,
    place_permute,
    pullback,
    symmetric_group,
)
from src.collection import (
    Color,
    ColoredCollection,
    ColorSet,
    PointedCollection,
    Signature,
    check_collection,
    is_identity,
    signatures_over,
)
from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError, InvalidStructure, TruncationError, ensure_within_cap

logger = logging.getLogger(__name__)

Partial = Callable[[Signature, int, Signature, Atom, Atom], Atom]
ONE = "*"


class ColoredOperad:
    def __init__(
        self,
        colors: Iterable[Color],
        levels: Dict[Signature, FinSet],
        units: Dict[Color, Atom],
        partial: Partial,
        action=None,
        generator_tables=None,
        arity_bound: int = 4,
        name: str = "operad",
        overrides: Optional[Dict[tuple, Atom]] = None,
        provenance: Optional[dict] = None,
    ):
        self.collection = ColoredCollection(colors, levels, action=action, generator_tables=generator_tables, name=name)
        self.units = dict(units)
        self._partial = partial
        self.arity_bound = arity_bound
        self.name = name
        self.overrides = dict(overrides or {})
        self.provenance = provenance

    @property
    def colors(self) -> ColorSet:
        return self.collection.colors

    @property
    def underlying(self) -> PointedCollection:
        return PointedCollection(self.collection, {c: u for c, u in self.units.items() if self.has_unit(c)})

    def level(self, s: Signature) -> FinSet:
        return self.collection.level(s)

    def signatures(self, max_arity: Optional[int] = None) -> List[Signature]:
        bound = self.arity_bound if max_arity is None else min(max_arity, self.arity_bound)
        return self.collection.signatures(bound)

    def has_unit(self, c: Color) -> bool:
        return c in self.units and self.units[c] in self.level(Signature((c,), c))

    def unit(self, c: Color) -> Atom:
        if c not in self.units:
            raise InputError(f"Operad {self.name} has no unit for color {c!r}")
        return self.units[c]

    def act(self, alpha: Perm, s: Signature, mu: Atom) -> Atom:
        return self.collection.act(alpha, s, mu)

    def circ(self, s: Signature, i: int, t: Signature, mu: Atom, nu: Atom) -> Tuple[Signature, Atom]:
        """mu o_i nu with its signature; TruncationError above the arity bound."""
        if not 0 <= i < s.arity:
            raise InputError(f"Slot {i} out of range for {s}")
        if t.output != s.inputs[i]:
            raise InputError(f"Cannot plug output color {t.output!r} into slot {i} of {s}")
        result = s.substitute(i, t)
        if result.arity > self.arity_bound:
            raise TruncationError(f"{s} o_{i} {t} has arity {result.arity} > {self.arity_bound}")
        key = (s, i, t, mu, nu)
        if key in self.overrides:
            return result, self.overrides[key]
        return result, self._partial(s, i, t, mu, nu)

    def compose(self, s: Signature, mu: Atom, inners: Sequence[Tuple[Signature, Atom]]) -> Tuple[Signature, Atom]:
        """
        gamma(mu; nu_1..nu_n). Nullary slots are filled first, then the others from
        the last slot down, so no intermediate arity exceeds the final one.
        """
        if len(inners) != s.arity:
            raise InputError(f"{s} needs {s.arity} inner operations, got {len(inners)}")
        positions = list(range(s.arity))
        order = [k for k in reversed(range(s.arity)) if inners[k][0].arity == 0]
        order += [k for k in reversed(range(s.arity)) if inners[k][0].arity > 0]
        current_sig, current = s, mu
        for k in order:
            t, nu = inners[k]
            p = positions[k]
            current_sig, current = self.circ(current_sig, p, t, current, nu)
            shift = t.arity - 1
            for other in range(s.arity):
                if positions[other] > p:
                    positions[other] += shift
        return current_sig, current

    def replace(self, **changes) -> "ColoredOperad":
        fields = dict(
            colors=self.colors,
            levels=self.collection.levels,
            units=self.units,
            partial=self._partial,
            action=self.collection._action,
            generator_tables=self.collection.generator_tables,
            arity_bound=self.arity_bound,
            name=self.name,
            overrides=self.overrides,
            provenance=self.provenance,
        )
        fields.update(changes)
        op = ColoredOperad(**fields)
        for attr in ("hom", "base"):
            if hasattr(self, attr):
                setattr(op, attr, getattr(self, attr))
        return op

    def size_table(self, max_arity: Optional[int] = None) -> List[Dict[str, Any]]:
        return [{"signature": str(s), "size": len(self.level(s))} for s in self.signatures(max_arity)]


def with_composition_entry(o: ColoredOperad, s: Signature, i: int, t: Signature, mu: Atom, nu: Atom, value: Atom) -> ColoredOperad:
    """A copy of `o` whose table entry mu o_i nu is replaced by `value`."""
    overrides = dict(o.overrides)
    overrides[(s, i, t, mu, nu)] = value
    return o.replace(overrides=overrides, name=f"{o.name}*")


# -------------------------
# Operad maps
# -------------------------
class OperadMap:
    def __init__(self, source: ColoredOperad, target: ColoredOperad, fn: Callable[[Signature, Atom], Atom], name: str = "map"):
        self.source = source
        self.target = target
        self._fn = fn
        self.name = name

    def __call__(self, s: Signature, mu: Atom) -> Atom:
        return self._fn(s, mu)

    def component(self, s: Signature) -> FinMap:
        return FinMap(self.source.level(s), self.target.level(s), {mu: self(s, mu) for mu in self.source.level(s)})


def check_operad_map(f: OperadMap, arity_bound: Optional[int] = None, fail_fast: bool = False) -> ValidationReport:
    checker = Checker(f"operad map {f.name}", fail_fast)
    source, target = f.source, f.target
    bound = min(source.arity_bound, target.arity_bound, arity_bound or source.arity_bound)
    try:
        if source.colors != target.colors:
            checker.fail("colors", source=list(source.colors), target=list(target.colors))
        for c in source.colors:
            if source.has_unit(c):
                checker.expect(
                    f(Signature((c,), c), source.unit(c)) == target.units.get(c), "unit", color=c
                )
        sigs = source.signatures(bound)
        for s in sigs:
            for mu in source.level(s):
                image = f(s, mu)
                if not checker.expect(image in target.level(s), "component", signature=s, atom=mu, image=image):
                    continue
                for alpha in symmetric_group(s.arity):
                    if is_identity(alpha):
                        continue
                    lhs = f(s.permute(alpha), source.act(alpha, s, mu))
                    rhs = target.act(alpha, s, image)
                    checker.expect(lhs == rhs, "equivariance", signature=s, atom=mu, alpha=alpha)
        for s in sigs:
            for i in range(s.arity):
                for t in [t for t in sigs if t.output == s.inputs[i]]:
                    if s.arity + t.arity - 1 > bound:
                        checker.skip()
                        continue
                    for mu in source.level(s):
                        for nu in source.level(t):
                            rs, composite = source.circ(s, i, t, mu, nu)
                            _, image = target.circ(s, i, t, f(s, mu), f(t, nu))
                            checker.expect(
                                f(rs, composite) == image, "composition", outer=s, slot=i, inner=t, left=mu, right=nu
                            )
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


# -------------------------
# Axiom checking
# -------------------------
def equivariance_perm(sigma: Perm, i: int, b: int) -> Perm:
    """
    tau with (mu . sigma) o_i nu = (mu o_{sigma(i)} nu) . tau for nu of arity b.
    """
    n = len(sigma)
    p = sigma[i]
    tau = [0] * (n + b - 1)
    for k in range(n):
        if k == i:
            for m in range(b):
                tau[i + m] = p + m
            continue
        left = k if k < i else k + b - 1
        q = sigma[k]
        tau[left] = q if q < p else q + b - 1
    return tuple(tau)


def inner_perm(n: int, i: int, tau: Perm) -> Perm:
    """rho with mu o_i (nu . tau) = (mu o_i nu) . rho for mu of arity n."""
    b = len(tau)
    rho = list(range(n + b - 1))
    for m in range(b):
        rho[i + m] = i + tau[m]
    return tuple(rho)


class _Law:
    """Wraps table lookups so that truncation is skipped and broken tables are reported."""

    def __init__(self, o: ColoredOperad, checker: Checker):
        self.o = o
        self.checker = checker

    def circ(self, s, i, t, mu, nu):
        try:
            rs, value = self.o.circ(s, i, t, mu, nu)
        except TruncationError as e:
            # only a result above the stored bound may be skipped
            if s.substitute(i, t).arity > self.o.arity_bound:
                self.checker.skip()
            else:
                self.checker.fail("composition_table", outer=s, slot=i, inner=t, left=mu, right=nu, error=str(e))
            return None
        except InputError as e:
            self.checker.fail("composition_table", outer=s, slot=i, inner=t, left=mu, right=nu, error=str(e))
            return None
        if value not in self.o.level(rs):
            self.checker.fail("closure", outer=s, slot=i, inner=t, left=mu, right=nu, value=value)
            return None
        return rs, value

    def act(self, alpha, s, mu):
        try:
            return s.permute(alpha), self.o.act(alpha, s, mu)
        except InputError as e:
            self.checker.fail("action_table", signature=s, alpha=alpha, atom=mu, error=str(e))
            return None


def check_operad(
    o: ColoredOperad, arity_bound: Optional[int] = None, fail_fast: bool = False, progress: bool = False
) -> ValidationReport:
    """Unit, equivariance and associativity laws on every in-bound shape."""
    bound = o.arity_bound if arity_bound is None else min(arity_bound, o.arity_bound)
    checker = Checker(f"operad {o.name}", fail_fast)
    law = _Law(o, checker)
    sigs = o.signatures(bound)
    by_output: Dict[Color, List[Signature]] = {c: [] for c in o.colors}
    for s in sigs:
        by_output[s.output].append(s)
    try:
        checker.report.merge(check_collection(o.collection, max_arity=bound, fail_fast=fail_fast))
        if fail_fast and not checker.report.ok:
            raise StopCheck()
        _check_units(o, law, sigs)
        for s in tqdm(sigs, desc="equivariance", disable=not progress):
            _check_equivariance(o, law, s, by_output, bound)
        for s in tqdm(sigs, desc="associativity", disable=not progress):
            _check_associativity(o, law, s, by_output, bound)
        for s in sigs:
            if s.arity == 2:
                _check_multicomposition(o, law, s, by_output, bound)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def _check_units(o, law, sigs):
    checker = law.checker
    for c in o.colors:
        unit_sig = Signature((c,), c)
        if not o.has_unit(c):
            checker.fail("unit", signature=unit_sig, missing=o.units.get(c, "none"))
    for s in sigs:
        for mu in o.level(s):
            if o.has_unit(s.output):
                unit_sig = Signature((s.output,), s.output)
                got = law.circ(unit_sig, 0, s, o.unit(s.output), mu)
                if got is not None:
                    checker.expect(got == (s, mu), "unit", side="left", signature=s, atom=mu, value=got[1])
            for i, c in enumerate(s.inputs):
                if not o.has_unit(c):
                    continue
                got = law.circ(s, i, Signature((c,), c), mu, o.unit(c))
                if got is not None:
                    checker.expect(got == (s, mu), "unit", side="right", signature=s, slot=i, atom=mu, value=got[1])


def _check_equivariance(o, law, s, by_output, bound):
    checker = law.checker
    n = s.arity
    if n < 1:
        return
    for mu in o.level(s):
        for sigma in symmetric_group(n):
            if is_identity(sigma):
                continue
            moved = law.act(sigma, s, mu)
            if moved is None:
                continue
            s_sigma, mu_sigma = moved
            for i in range(n):
                p = sigma[i]
                for t in by_output.get(s_sigma.inputs[i], []):
                    b = t.arity
                    if n + b - 1 > bound:
                        checker.skip()
                        continue
                    tau = equivariance_perm(sigma, i, b)
                    for nu in o.level(t):
                        lhs = law.circ(s_sigma, i, t, mu_sigma, nu)
                        rhs = law.circ(s, p, t, mu, nu)
                        if lhs is None or rhs is None:
                            continue
                        rhs = law.act(tau, *rhs)
                        if rhs is None:
                            continue
                        checker.expect(
                            lhs == rhs, "equivariance", outer=s, atom=mu, sigma=sigma, slot=i, inner=t, nu=nu,
                            left=lhs[1], right=rhs[1],
                        )
        for i in range(n):
            for t in by_output.get(s.inputs[i], []):
                b = t.arity
                if b < 2:
                    continue
                if n + b - 1 > bound:
                    checker.skip()
                    continue
                for tau in symmetric_group(b):
                    if is_identity(tau):
                        continue
                    rho = inner_perm(n, i, tau)
                    for nu in o.level(t):
                        moved = law.act(tau, t, nu)
                        if moved is None:
                            continue
                        lhs = law.circ(s, i, moved[0], mu, moved[1])
                        rhs = law.circ(s, i, t, mu, nu)
                        if lhs is None or rhs is None:
                            continue
                        rhs = law.act(rho, *rhs)
                        if rhs is None:
                            continue
                        checker.expect(
                            lhs == rhs, "equivariance", outer=s, atom=mu, slot=i, inner=t, nu=nu, tau=tau,
                            left=lhs[1], right=rhs[1],
                        )


def _check_associativity(o, law, s, by_output, bound):
    checker = law.checker
    a = s.arity
    for lam in o.level(s):
        for i in range(a):
            for t in by_output.get(s.inputs[i], []):
                b = t.arity
                if a + b - 1 > bound:
                    checker.skip()
                    continue
                for mu in o.level(t):
                    first = law.circ(s, i, t, lam, mu)
                    if first is None:
                        continue
                    # sequential: (lam o_i mu) o_{i+j} nu = lam o_i (mu o_j nu)
                    for j in range(b):
                        for u in by_output.get(t.inputs[j], []):
                            if a + b + u.arity - 2 > bound:
                                checker.skip()
                                continue
                            for nu in o.level(u):
                                left = law.circ(first[0], i + j, u, first[1], nu)
                                inner = law.circ(t, j, u, mu, nu)
                                if left is None or inner is None:
                                    continue
                                right = law.circ(s, i, inner[0], lam, inner[1])
                                if right is None:
                                    continue
                                checker.expect(
                                    left == right, "associativity", kind="sequential", outer=s, atom=lam, slot=i,
                                    middle=mu, inner_slot=j, inner=nu, left=left[1], right=right[1],
                                )
                    # parallel: (lam o_i mu) o_{k+b-1} nu = (lam o_k nu) o_i mu for i < k
                    for k in range(i + 1, a):
                        for u in by_output.get(s.inputs[k], []):
                            if a + b + u.arity - 2 > bound:
                                checker.skip()
                                continue
                            for nu in o.level(u):
                                left = law.circ(first[0], k + b - 1, u, first[1], nu)
                                other = law.circ(s, k, u, lam, nu)
                                if left is None or other is None:
                                    continue
                                right = law.circ(other[0], i, t, other[1], mu)
                                if right is None:
                                    continue
                                checker.expect(
                                    left == right, "associativity", kind="parallel", outer=s, atom=lam, slot=i,
                                    middle=mu, other_slot=k, inner=nu, left=left[1], right=right[1],
                                )


def _check_multicomposition(o, law, s, by_output, bound):
    """Derived gamma against left-to-right substitution on binary outer operations."""
    checker = law.checker
    for t0 in by_output.get(s.inputs[0], []):
        for t1 in by_output.get(s.inputs[1], []):
            if t0.arity + t1.arity > bound:
                checker.skip()
                continue
            if t0.arity + 1 > bound:
                checker.skip()
                continue
            for mu in o.level(s):
                for nu0 in o.level(t0):
                    for nu1 in o.level(t1):
                        try:
                            derived = o.compose(s, mu, [(t0, nu0), (t1, nu1)])
                        except (TruncationError, InputError):
                            checker.skip()
                            continue
                        step = law.circ(s, 0, t0, mu, nu0)
                        if step is None:
                            continue
                        direct = law.circ(step[0], t0.arity, t1, step[1], nu1)
                        if direct is None:
                            continue
                        checker.expect(
                            derived == direct, "multicomposition", outer=s, atom=mu, first=nu0, second=nu1,
                            left=derived[1], right=direct[1],
                        )


def operads_equal(a: ColoredOperad, b: ColoredOperad, arity_bound: Optional[int] = None) -> ValidationReport:
    """Level-for-level comparison of colors, levels, units, actions and partial composites."""
    bound = min(a.arity_bound, b.arity_bound, arity_bound or a.arity_bound)
    checker = Checker(f"{a.name} == {b.name}")
    if a.colors != b.colors:
        checker.fail("colors", left=list(a.colors), right=list(b.colors))
        return checker.report
    for c in a.colors:
        checker.expect(a.units.get(c) == b.units.get(c), "units", color=c)
    sigs = a.signatures(bound)
    if sigs != b.signatures(bound):
        checker.fail("levels", left=[str(s) for s in sigs], right=[str(s) for s in b.signatures(bound)])
        return checker.report
    for s in sigs:
        if not checker.expect(a.level(s) == b.level(s), "levels", signature=s):
            continue
        for mu in a.level(s):
            for alpha in symmetric_group(s.arity):
                checker.expect(a.act(alpha, s, mu) == b.act(alpha, s, mu), "action", signature=s, atom=mu, alpha=alpha)
    for s in sigs:
        for i in range(s.arity):
            for t in sigs:
                if t.output != s.inputs[i] or s.arity + t.arity - 1 > bound:
                    continue
                for mu in a.level(s):
                    for nu in a.level(t):
                        checker.expect(
                            a.circ(s, i, t, mu, nu) == b.circ(s, i, t, mu, nu), "composition",
                            outer=s, slot=i, inner=t, left=mu, right=nu,
                        )
    return checker.report


# -------------------------
# Bundled operads
# -------------------------
def _one_colored_levels(bound: int, level: Callable[[int], FinSet]) -> Dict[Signature, FinSet]:
    return {Signature((ONE,) * n, ONE): level(n) for n in range(bound + 1)}


def _ass_partial(s, i, t, mu, nu):
    b = len(nu)
    p = mu[i]
    out = []
    for k, q in enumerate(mu):
        if k == i:
            out.extend(p + m for m in nu)
        else:
            out.append(q if q < p else q + b - 1)
    return tuple(out)


def ass(bound: int = 4) -> ColoredOperad:
    """
    Ass(n) = Sigma_n. An element mu places variable j at word position mu(j);
    the right action is mu . sigma = mu sigma.
    """
    return ColoredOperad(
        [ONE],
        _one_colored_levels(bound, lambda n: FinSet(symmetric_group(n))),
        {ONE: (0,)},
        _ass_partial,
        action=lambda alpha, s, mu: compose_perm(mu, alpha),
        arity_bound=bound,
        name="ass",
        provenance={"name": "ass", "params": {"bound": bound}},
    )


def com(bound: int = 4) -> ColoredOperad:
    return ColoredOperad(
        [ONE],
        _one_colored_levels(bound, lambda n: FinSet([()])),
        {ONE: ()},
        lambda s, i, t, mu, nu: (),
        action=lambda alpha, s, mu: mu,
        arity_bound=bound,
        name="com",
        provenance={"name": "com", "params": {"bound": bound}},
    )


def operad_of_monoid(monoid: Monoid, bound: int = 4) -> ColoredOperad:
    """O_A: the carrier in arity one, nothing elsewhere; composition is multiplication."""
    report = check_monoid(monoid)
    if not report.ok:
        raise InvalidStructure(f"{monoid.name} is not a monoid", report)
    return ColoredOperad(
        [ONE],
        {Signature((ONE,), ONE): monoid.carrier},
        {ONE: monoid.unit},
        lambda s, i, t, mu, nu: monoid.mul(mu, nu),
        action=lambda alpha, s, mu: mu,
        arity_bound=bound,
        name=f"O_{monoid.name}",
    )


def collapse_map(source: ColoredOperad, target: Optional[ColoredOperad] = None) -> OperadMap:
    """The unique map into com."""
    target = target or com(source.arity_bound)
    return OperadMap(source, target, lambda s, mu: (), name=f"{source.name} -> {target.name}")


def _one_colored_sig(n: int) -> Signature:
    return Signature((ONE,) * n, ONE)


def mod_operad(o: ColoredOperad) -> ColoredOperad:
    """
    Mod_O over {r, m}: (r..r;r) and the signatures with exactly one m-input and
    output m carry O(n); every other level is empty.
    """
    if len(o.colors) != 1:
        raise InputError(f"Mod needs a one-colored operad, {o.name} has colors {list(o.colors)}")
    (base,) = o.colors.elements

    def base_sig(s: Signature) -> Signature:
        return Signature((base,) * s.arity, base)

    levels = {}
    for s in signatures_over(["r", "m"], o.arity_bound):
        m_inputs = sum(1 for c in s.inputs if c == "m")
        if (s.output == "r" and m_inputs == 0) or (s.output == "m" and m_inputs == 1):
            levels[s] = o.level(base_sig(s))
    op = ColoredOperad(
        ["r", "m"],
        levels,
        {"r": o.unit(base), "m": o.unit(base)},
        lambda s, i, t, mu, nu: o.circ(base_sig(s), i, base_sig(t), mu, nu)[1],
        action=lambda alpha, s, mu: o.act(alpha, base_sig(s), mu),
        arity_bound=o.arity_bound,
        name=f"Mod_{o.name}",
        provenance={"name": "mod", "params": {"base": o.provenance}} if o.provenance else None,
    )
    op.base = o
    return op


def restrict(alpha: Dict[Color, Color], o: ColoredOperad, name: Optional[str] = None) -> ColoredOperad:
    """alpha^* O, with (alpha^* O)(c1..cn;c) = O(alpha(c1)..alpha(cn);alpha(c))."""
    for d in alpha.values():
        if d not in o.colors:
            raise InputError(f"Color function lands outside the colors of {o.name}: {d!r}")

    def image(s: Signature) -> Signature:
        return Signature(tuple(alpha[c] for c in s.inputs), alpha[s.output])

    levels = {}
    for s in signatures_over(list(alpha), o.arity_bound):
        level = o.level(image(s))
        if len(level):
            levels[s] = level
    units = {c: o.units[alpha[c]] for c in alpha if alpha[c] in o.units}
    return ColoredOperad(
        list(alpha),
        levels,
        units,
        lambda s, i, t, mu, nu: o.circ(image(s), i, image(t), mu, nu)[1],
        action=lambda a, s, mu: o.act(a, image(s), mu),
        arity_bound=o.arity_bound,
        name=name or f"restrict({o.name})",
    )


def rename_colors(o: ColoredOperad, renaming: Dict[Color, Color]) -> ColoredOperad:
    """Transport along a bijection of colors."""
    if len(set(renaming.values())) != len(renaming) or set(renaming) != set(o.colors):
        raise InputError("Color renaming must be a bijection on the colors")
    inverse = {new: old for old, new in renaming.items()}
    return restrict(inverse, o, name=o.name)


# -------------------------
# Endomorphism operads
# -------------------------
class _Hom:
    """Functions prod X(c_i) -> X(c) stored as output tuples in lexicographic input order."""

    def __init__(self, carrier: Dict[Color, FinSet]):
        self.carrier = carrier
        self.positions = {c: {x: k for k, x in enumerate(xs)} for c, xs in carrier.items()}
        self._strides: Dict[tuple, List[int]] = {}
        self._plans: Dict[tuple, Any] = {}

    def strides(self, inputs: tuple) -> List[int]:
        if inputs not in self._strides:
            strides, step = [], 1
            for c in reversed(inputs):
                strides.append(step)
                step *= len(self.carrier[c])
            self._strides[inputs] = list(reversed(strides))
        return self._strides[inputs]

    def domain(self, inputs: tuple):
        return itertools.product(*[self.carrier[c].elements for c in inputs])

    def domain_size(self, inputs: tuple) -> int:
        size = 1
        for c in inputs:
            size *= len(self.carrier[c])
        return size

    def index(self, inputs: tuple, ys: Sequence[Atom]) -> int:
        return sum(self.positions[c][y] * k for c, y, k in zip(inputs, ys, self.strides(inputs)))

    def apply(self, s: Signature, f: tuple, ys: Sequence[Atom]) -> Atom:
        return f[self.index(s.inputs, ys)]

    def level(self, s: Signature, size_cap: Optional[int] = None) -> FinSet:
        n_inputs = self.domain_size(s.inputs)
        ensure_within_cap(len(self.carrier[s.output]) ** n_inputs, f"End level {s}", size_cap)
        return FinSet(itertools.product(self.carrier[s.output].elements, repeat=n_inputs))

    def act(self, alpha: Perm, s: Signature, f: tuple) -> tuple:
        key = ("act", s, alpha)
        if key not in self._plans:
            moved = s.permute(alpha)
            self._plans[key] = [self.index(s.inputs, place_permute(alpha, y)) for y in self.domain(moved.inputs)]
        return tuple(f[k] for k in self._plans[key])

    def circ(self, s: Signature, i: int, t: Signature, f: tuple, g: tuple) -> tuple:
        key = ("circ", s, i, t)
        if key not in self._plans:
            b = t.arity
            stride = self.strides(s.inputs)[i] if s.arity else 0
            plan = []
            for w in self.domain(s.substitute(i, t).inputs):
                inner = self.index(t.inputs, w[i:i + b])
                outer = w[:i] + (self.carrier[s.inputs[i]].elements[0],) + w[i + b:]
                plan.append((inner, self.index(s.inputs, outer)))
            self._plans[key] = (stride, plan)
        stride, plan = self._plans[key]
        pos = self.positions[s.inputs[i]]
        return tuple(f[base + stride * pos[g[inner]]] for inner, base in plan)

    def identity(self, c: Color) -> tuple:
        return tuple(self.carrier[c].elements)


def endomorphism_operad(x: Dict[Color, FinSet], arity_bound: int, size_cap: Optional[int] = None, name: str = "End") -> ColoredOperad:
    """End(X)(c1..cn;c) = Hom(X(c1) x ... x X(cn), X(c)); raises SizeCapExceeded on blow-up."""
    hom = _Hom(x)
    levels = {s: hom.level(s, size_cap) for s in signatures_over(list(x), arity_bound)}
    op = ColoredOperad(
        list(x),
        levels,
        {c: hom.identity(c) for c in x},
        hom.circ,
        action=hom.act,
        arity_bound=arity_bound,
        name=name,
    )
    op.hom = hom
    return op


class EndOfMap(NamedTuple):
    operad: ColoredOperad
    to_source: OperadMap
    to_target: OperadMap


def end_of_map(f: Dict[Color, FinMap], arity_bound: int, size_cap: Optional[int] = None) -> EndOfMap:
    """
    End(f): per signature the pullback of End(X) -> Hom(X, Y) <- End(Y), with
    g |-> f g and h |-> h (f x ... x f). The middle set is the union of the two
    images, so Hom itself is never enumerated.
    """
    x = {c: m.source for c, m in f.items()}
    y = {c: m.target for c, m in f.items()}
    end_x = endomorphism_operad(x, arity_bound, size_cap, name="End(X)")
    end_y = endomorphism_operad(y, arity_bound, size_cap, name="End(Y)")
    hx, hy = end_x.hom, end_y.hom
    levels = {}
    for s in signatures_over(list(f), arity_bound):
        domain = list(hx.domain(s.inputs))
        fc = f[s.output]
        push = {g: tuple(fc(hx.apply(s, g, ys)) for ys in domain) for g in end_x.level(s)}
        pull = {
            h: tuple(hy.apply(s, h, tuple(f[c](v) for c, v in zip(s.inputs, ys))) for ys in domain)
            for h in end_y.level(s)
        }
        middle = FinSet(list(push.values()) + list(pull.values()))
        pb = pullback(FinMap(end_x.level(s), middle, push, check=False), FinMap(end_y.level(s), middle, pull, check=False))
        ensure_within_cap(len(pb.obj), f"End(f) level {s}", size_cap)
        levels[s] = pb.obj
    op = ColoredOperad(
        list(f),
        levels,
        {c: (end_x.unit(c), end_y.unit(c)) for c in f},
        lambda s, i, t, p, q: (hx.circ(s, i, t, p[0], q[0]), hy.circ(s, i, t, p[1], q[1])),
        action=lambda alpha, s, p: (hx.act(alpha, s, p[0]), hy.act(alpha, s, p[1])),
        arity_bound=arity_bound,
        name="End(f)",
    )
    return EndOfMap(
        op,
        OperadMap(op, end_x, lambda s, p: p[0], name="End(f) -> End(X)"),
        OperadMap(op, end_y, lambda s, p: p[1], name="End(f) -> End(Y)"),
    )


class RestrictedEnd(NamedTuple):
    operad: ColoredOperad
    inclusion: OperadMap
    full: ColoredOperad


def restricted_end(o: ColoredOperad, x: Dict[Color, FinSet], size_cap: Optional[int] = None) -> RestrictedEnd:
    """End_O(X): the End(X) level where O's level is nonempty, empty otherwise."""
    full = endomorphism_operad(x, o.arity_bound, size_cap)
    levels = {s: full.level(s) for s in full.signatures() if len(o.level(s))}
    op = full.replace(levels=levels, name=f"End_{o.name}(X)")
    op.hom = full.hom
    return RestrictedEnd(op, OperadMap(op, full, lambda s, g: g, name="inclusion"), full)


def factor_through_restricted(structure: OperadMap, restricted: RestrictedEnd) -> Tuple[OperadMap, ValidationReport]:
    """
    The factorization O -> End_O(X) of a structure map O -> End(X). The inclusion is
    levelwise injective, so the factor is unique when it exists.
    """
    checker = Checker(f"factorization of {structure.name}")
    source = structure.source
    for s in source.signatures():
        for mu in source.level(s):
            value = structure(s, mu)
            checker.expect(value in restricted.operad.level(s), "factorization", signature=s, atom=mu)
            checker.expect(restricted.inclusion(s, value) == value, "uniqueness", signature=s, atom=mu)
    factor = OperadMap(source, restricted.operad, structure._fn, name=f"{structure.name} through End_O")
    return factor, checker.report
