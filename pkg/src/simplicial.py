"""
Truncated finite simplicial and bisimplicial sets, the diagonal, coends against
the standard simplices, and split augmentations.

Two representations are used. SimplicialObject holds explicit levels with face
and degeneracy maps (possibly partial, as in truncated bar objects).
FinSimplicialSet is skeletal: non-degenerate simplices plus their faces in
normal form, every simplex being a pair (surjection, non-degenerate simplex).
"""

import itertools
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from tqdm import tqdm

from src.basecat import Atom, FinMap, FinSet, UnionFind, least
from src.reports import Checker, StopCheck, ValidationReport, log_report
from src.utils import InputError, TruncationInsufficient

logger = logging.getLogger(__name__)

Surjection = Tuple[int, ...]
Operator = Callable[[int, int, Atom], Atom]


# -------------------------
# Monotone maps of [p] -> [n]
# -------------------------
def monotone_maps(p: int, n: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(n + 1), p + 1))


def _after_coface(i: int, a: tuple) -> tuple:
    """delta_i o a: skip the value i."""
    return tuple(v if v < i else v + 1 for v in a)


def _after_codegeneracy(j: int, a: tuple) -> tuple:
    """sigma_j o a: merge the values j and j+1."""
    return tuple(v if v <= j else v - 1 for v in a)


def _drop(a: tuple, i: int) -> tuple:
    """a o delta_i."""
    return a[:i] + a[i + 1:]


def _repeat(a: tuple, j: int) -> tuple:
    """a o sigma_j."""
    return a[:j + 1] + a[j:]


def _split_image(a: tuple, n: int):
    """a = mono o epi: the values of [n] a misses, and the surjection onto its image."""
    image = sorted(set(a))
    missing = [v for v in range(n + 1) if v not in set(image)]
    position = {v: k for k, v in enumerate(image)}
    return missing, tuple(position[v] for v in a)


def pull_back(x: Atom, a: tuple, n: int, face: Operator, degeneracy: Operator) -> Atom:
    """
    a^* x for a: [p] -> [n]: faces for the missed values (largest first), then
    degeneracies. Operators are called as op(dim, index, atom) with the current dimension.
    """
    missing, epi = _split_image(a, n)
    for v in reversed(missing):
        x = face(n, v, x)
        n -= 1
    for j in range(len(epi) - 1):
        if epi[j] == epi[j + 1]:
            x = degeneracy(n, j, x)
            n += 1
    return x


# -------------------------
# Explicit simplicial objects
# -------------------------
class SimplicialObject:
    """
    Levels 0..max_dim; faces[(n, i)]: X_n -> X_{n-1}, degeneracies[(n, j)]: X_n -> X_{n+1}.
    Maps may be partial (FinMaps out of a subset of the level).
    """

    def __init__(
        self,
        levels: Dict[int, FinSet],
        faces: Dict[Tuple[int, int], FinMap],
        degeneracies: Dict[Tuple[int, int], FinMap],
        name: str = "simplicial set",
    ):
        self.levels = dict(levels)
        self.faces = dict(faces)
        self.degeneracies = dict(degeneracies)
        self.name = name

    @property
    def max_dim(self) -> int:
        return max(self.levels)

    def face(self, n: int, i: int, x: Atom) -> Atom:
        return self.faces[(n, i)](x)

    def degeneracy(self, n: int, j: int, x: Atom) -> Atom:
        return self.degeneracies[(n, j)](x)

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.levels[n]) for n in range(self.max_dim + 1))


def _compose(first: FinMap, second: FinMap, x: Atom) -> Optional[Atom]:
    if not first.defined_at(x):
        return None
    y = first(x)
    return second(y) if second.defined_at(y) else None


def check_simplicial(x: SimplicialObject, fail_fast: bool = False) -> ValidationReport:
    """The simplicial identities on every stored level, skipping where a partial map is undefined."""
    checker = Checker(f"simplicial identities of {x.name}", fail_fast)
    d, s = x.faces, x.degeneracies
    top = x.max_dim

    def compare(law, lhs, rhs, **witness):
        if lhs is None or rhs is None:
            checker.skip()
            return
        checker.expect(lhs == rhs, law, left=lhs, right=rhs, **witness)

    try:
        for n in range(2, top + 1):
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    for a in x.levels[n]:
                        compare("face_face", _compose(d[(n, j)], d[(n - 1, i)], a),
                                _compose(d[(n, i)], d[(n - 1, j - 1)], a), n=n, i=i, j=j, atom=a)
        for n in range(top):
            for j in range(n + 1):
                for a in x.levels[n]:
                    for i in range(n + 2):
                        lhs = _compose(s[(n, j)], d[(n + 1, i)], a)
                        if i < j:
                            rhs = _compose(d[(n, i)], s[(n - 1, j - 1)], a)
                        elif i in (j, j + 1):
                            rhs = a
                        else:
                            rhs = _compose(d[(n, i - 1)], s[(n - 1, j)], a)
                        compare("face_degeneracy", lhs, rhs, n=n, i=i, j=j, atom=a)
        for n in range(top - 1):
            for i in range(n + 1):
                for j in range(i, n + 1):
                    for a in x.levels[n]:
                        compare("degeneracy_degeneracy", _compose(s[(n, j)], s[(n + 1, i)], a),
                                _compose(s[(n, i)], s[(n + 1, j + 1)], a), n=n, i=i, j=j, atom=a)
        for (n, i), f in list(d.items()) + list(s.items()):
            for a in f.source:
                checker.expect(a in x.levels[n], "domain", n=n, index=i, atom=a)
    except StopCheck:
        pass
    log_report(checker.report, quiet=fail_fast)
    return checker.report


def _object_from(
    levels: Dict[int, Sequence[Atom]],
    face: Callable[[int, int, Atom], Atom],
    degeneracy: Callable[[int, int, Atom], Atom],
    name: str,
) -> SimplicialObject:
    sets = {n: FinSet(xs) for n, xs in levels.items()}
    top = max(sets)
    faces = {
        (n, i): FinMap(sets[n], sets[n - 1], {a: face(n, i, a) for a in sets[n]}, check=False)
        for n in range(1, top + 1) for i in range(n + 1)
    }
    degeneracies = {
        (n, j): FinMap(sets[n], sets[n + 1], {a: degeneracy(n, j, a) for a in sets[n]}, check=False)
        for n in range(top) for j in range(n + 1)
    }
    return SimplicialObject(sets, faces, degeneracies, name)


# -------------------------
# Skeletal simplicial sets
# -------------------------
def _identity_surjection(n: int) -> Surjection:
    return tuple(range(n + 1))


def surjections(n: int, m: int) -> List[Surjection]:
    return [a for a in monotone_maps(n, m) if len(set(a)) == m + 1]


class FinSimplicialSet:
    """
    Non-degenerate simplices by dimension, with faces[(y, p)] = (surjection, z):
    the p-th face of y is the degeneracy of z along the surjection.
    """

    def __init__(
        self,
        nondegenerate: Dict[int, FinSet],
        faces: Dict[Tuple[Atom, int], Tuple[Surjection, Atom]],
        name: str = "simplicial set",
    ):
        self.nondegenerate = dict(nondegenerate)
        self.face_data = dict(faces)
        self.name = name
        self.dim_of = {y: m for m, ys in self.nondegenerate.items() for y in ys}
        self.explicit: Optional[SimplicialObject] = None
        self.decomposition: Optional[ValidationReport] = None

    @property
    def max_dim(self) -> int:
        return max(self.nondegenerate, default=0)

    def counts(self, max_dim: Optional[int] = None) -> Tuple[int, ...]:
        top = self.max_dim if max_dim is None else max_dim
        return tuple(len(self.nondegenerate.get(n, ())) for n in range(top + 1))

    def simplices(self, n: int) -> List[Tuple[Surjection, Atom]]:
        return [(sigma, y) for m in range(n + 1) for y in self.nondegenerate.get(m, ()) for sigma in surjections(n, m)]

    def face(self, i: int, simplex: Tuple[Surjection, Atom]) -> Tuple[Surjection, Atom]:
        sigma, y = simplex
        composite = _drop(sigma, i)
        m = self.dim_of[y]
        if len(set(composite)) == m + 1:
            return composite, y
        p = sigma[i]
        reduced = tuple(v if v < p else v - 1 for v in composite)
        tau, z = self.face_data[(y, p)]
        return tuple(tau[v] for v in reduced), z

    def degeneracy(self, j: int, simplex: Tuple[Surjection, Atom]) -> Tuple[Surjection, Atom]:
        sigma, y = simplex
        return _repeat(sigma, j), y

    def to_explicit(self, max_dim: Optional[int] = None) -> SimplicialObject:
        top = self.max_dim if max_dim is None else max_dim
        return _object_from(
            {n: self.simplices(n) for n in range(top + 1)},
            lambda n, i, a: self.face(i, a),
            lambda n, j, a: self.degeneracy(j, a),
            self.name,
        )

    @classmethod
    def from_explicit(cls, obj: SimplicialObject, name: Optional[str] = None) -> "FinSimplicialSet":
        """
        Skeletalization: a simplex is degenerate iff it is some s_j(d_j x); its
        normal form is found by peeling degeneracies, and every peeling order is
        checked to give the same normal form.
        """
        top = obj.max_dim
        images = {
            n: {y for j in range(n) for y in obj.degeneracies[(n - 1, j)].assignment.values()} for n in range(1, top + 1)
        }
        nondegenerate = {n: FinSet(x for x in obj.levels[n] if x not in images.get(n, ())) for n in range(top + 1)}
        checker = Checker(f"normal forms of {obj.name}")
        memo: Dict[Tuple[int, Atom], Tuple[Surjection, Atom]] = {}

        def normal(n: int, x: Atom) -> Tuple[Surjection, Atom]:
            key = (n, x)
            if key in memo:
                return memo[key]
            if x in nondegenerate[n]:
                memo[key] = (_identity_surjection(n), x)
                return memo[key]
            forms = []
            for j in range(n):
                below = obj.faces[(n, j)](x)
                if obj.degeneracies[(n - 1, j)](below) == x:
                    sigma, y = normal(n - 1, below)
                    forms.append((_repeat(sigma, j), y))
            checker.expect(len(set(forms)) == 1, "decomposition", n=n, atom=x, forms=forms)
            memo[key] = forms[0]
            return memo[key]

        faces = {}
        for m in range(1, top + 1):
            for y in nondegenerate[m]:
                for p in range(m + 1):
                    faces[(y, p)] = normal(m - 1, obj.faces[(m, p)](y))
        for n in range(top + 1):
            for x in obj.levels[n]:
                normal(n, x)
        result = cls(nondegenerate, faces, name or obj.name)
        result.explicit = obj
        result.decomposition = checker.report
        return result


def standard_simplex(k: int, name: Optional[str] = None) -> FinSimplicialSet:
    """Delta[k]: non-degenerate simplices are the strictly increasing vertex tuples."""
    nondegenerate = {m: FinSet(itertools.combinations(range(k + 1), m + 1)) for m in range(k + 1)}
    faces = {
        (y, p): (_identity_surjection(m - 1), _drop(y, p))
        for m in range(1, k + 1) for y in nondegenerate[m] for p in range(m + 1)
    }
    return FinSimplicialSet(nondegenerate, faces, name or f"Delta[{k}]")


def point() -> FinSimplicialSet:
    return standard_simplex(0, name="point")


def product(x: FinSimplicialSet, y: FinSimplicialSet, max_dim: int) -> FinSimplicialSet:
    """Levelwise product, skeletalized."""
    ex, ey = x.to_explicit(max_dim), y.to_explicit(max_dim)
    obj = _object_from(
        {n: list(itertools.product(ex.levels[n], ey.levels[n])) for n in range(max_dim + 1)},
        lambda n, i, a: (ex.face(n, i, a[0]), ey.face(n, i, a[1])),
        lambda n, j, a: (ex.degeneracy(n, j, a[0]), ey.degeneracy(n, j, a[1])),
        f"{x.name} x {y.name}",
    )
    return FinSimplicialSet.from_explicit(obj)


# -------------------------
# Bisimplicial sets
# -------------------------
class BisimplicialSet:
    """
    Levels X_{n,m} for n <= caps[0], m <= caps[1]. Horizontal operators move n,
    vertical ones move m.
    """

    def __init__(
        self,
        levels: Dict[Tuple[int, int], FinSet],
        horizontal_faces: Dict[Tuple[int, int, int], FinMap],
        vertical_faces: Dict[Tuple[int, int, int], FinMap],
        horizontal_degeneracies: Dict[Tuple[int, int, int], FinMap],
        vertical_degeneracies: Dict[Tuple[int, int, int], FinMap],
        caps: Tuple[int, int],
        name: str = "bisimplicial set",
    ):
        self.levels = levels
        self.dh = horizontal_faces
        self.dv = vertical_faces
        self.sh = horizontal_degeneracies
        self.sv = vertical_degeneracies
        self.caps = caps
        self.name = name

    def row(self, m: int) -> SimplicialObject:
        return SimplicialObject(
            {n: self.levels[(n, m)] for n in range(self.caps[0] + 1)},
            {(n, i): f for (n, mm, i), f in self.dh.items() if mm == m},
            {(n, j): f for (n, mm, j), f in self.sh.items() if mm == m},
            name=f"{self.name} row {m}",
        )

    def column(self, n: int) -> SimplicialObject:
        return SimplicialObject(
            {m: self.levels[(n, m)] for m in range(self.caps[1] + 1)},
            {(m, i): f for (nn, m, i), f in self.dv.items() if nn == n},
            {(m, j): f for (nn, m, j), f in self.sv.items() if nn == n},
            name=f"{self.name} column {n}",
        )

    def pull(self, x: Atom, n: int, m: int, a: tuple, b: tuple) -> Atom:
        """X(a, b) x for a: [p] -> [n], b: [q] -> [m]."""
        q = len(b) - 1
        x = pull_back(x, b, m, lambda k, i, v: self.dv[(n, k, i)](v), lambda k, j, v: self.sv[(n, k, j)](v))
        return pull_back(x, a, n, lambda k, i, v: self.dh[(k, q, i)](v), lambda k, j, v: self.sh[(k, q, j)](v))


BiOperator = Callable[[int, int, int, Atom], Atom]


def _bisimplicial_from(
    caps: Tuple[int, int],
    level: Callable[[int, int], Sequence[Atom]],
    dh: BiOperator,
    dv: BiOperator,
    sh: BiOperator,
    sv: BiOperator,
    name: str,
) -> BisimplicialSet:
    """Tabulates operators called as op(n, m, index, atom) at the source level (n, m)."""
    top_n, top_m = caps
    levels = {(n, m): FinSet(level(n, m)) for n in range(top_n + 1) for m in range(top_m + 1)}

    def table(source, target, fn, i):
        n, m = source
        return FinMap(levels[source], levels[target], {x: fn(n, m, i, x) for x in levels[source]}, check=False)

    hf, vf, hs, vs = {}, {}, {}, {}
    for n in range(top_n + 1):
        for m in range(top_m + 1):
            for i in range(n + 1):
                if n >= 1:
                    hf[(n, m, i)] = table((n, m), (n - 1, m), dh, i)
                if n < top_n:
                    hs[(n, m, i)] = table((n, m), (n + 1, m), sh, i)
            for i in range(m + 1):
                if m >= 1:
                    vf[(n, m, i)] = table((n, m), (n, m - 1), dv, i)
                if m < top_m:
                    vs[(n, m, i)] = table((n, m), (n, m + 1), sv, i)
    return BisimplicialSet(levels, hf, vf, hs, vs, caps, name)


def external_product(x: FinSimplicialSet, y: FinSimplicialSet, caps: Tuple[int, int]) -> BisimplicialSet:
    """(X boxtimes Y)_{n,m} = X_n x Y_m."""
    ex, ey = x.to_explicit(caps[0]), y.to_explicit(caps[1])
    return _bisimplicial_from(
        caps,
        lambda n, m: list(itertools.product(ex.levels[n], ey.levels[m])),
        lambda n, m, i, p: (ex.face(n, i, p[0]), p[1]),
        lambda n, m, i, p: (p[0], ey.face(m, i, p[1])),
        lambda n, m, j, p: (ex.degeneracy(n, j, p[0]), p[1]),
        lambda n, m, j, p: (p[0], ey.degeneracy(m, j, p[1])),
        f"{x.name} [x] {y.name}",
    )


def vertically_discrete(s: SimplicialObject, caps: Tuple[int, int]) -> BisimplicialSet:
    """X_{n,m} = S_n: each X_n is a discrete simplicial set."""
    return _bisimplicial_from(
        caps,
        lambda n, m: s.levels[n].elements,
        lambda n, m, i, a: s.face(n, i, a),
        lambda n, m, i, a: a,
        lambda n, m, j, a: s.degeneracy(n, j, a),
        lambda n, m, j, a: a,
        f"discrete({s.name})",
    )


def horizontally_constant(y: SimplicialObject, caps: Tuple[int, int]) -> BisimplicialSet:
    """X_{n,m} = Y_m: the constant simplicial object at Y."""
    return _bisimplicial_from(
        caps,
        lambda n, m: y.levels[m].elements,
        lambda n, m, i, a: a,
        lambda n, m, i, a: y.face(m, i, a),
        lambda n, m, j, a: a,
        lambda n, m, j, a: y.degeneracy(m, j, a),
        f"constant({y.name})",
    )


def check_bisimplicial(x: BisimplicialSet, fail_fast: bool = False) -> ValidationReport:
    """Every row and column is simplicial and horizontal operators commute with vertical ones."""
    report = ValidationReport(name=f"bisimplicial identities of {x.name}")
    for m in range(x.caps[1] + 1):
        report.merge(check_simplicial(x.row(m), fail_fast))
    for n in range(x.caps[0] + 1):
        report.merge(check_simplicial(x.column(n), fail_fast))
    checker = Checker(f"commutation in {x.name}", fail_fast)
    horizontal = [(x.dh, -1), (x.sh, 1)]
    vertical = [(x.dv, -1), (x.sv, 1)]
    try:
        for h_maps, dn in horizontal:
            for (n, m, i), h in h_maps.items():
                for v_maps, dm in vertical:
                    for (nn, mm, j), v in v_maps.items():
                        if (nn, mm) != (n, m):
                            continue
                        v_after = v_maps.get((n + dn, m, j))
                        h_after = h_maps.get((n, m + dm, i))
                        if v_after is None or h_after is None:
                            continue
                        for a in x.levels[(n, m)]:
                            checker.expect(
                                v_after(h(a)) == h_after(v(a)), "commutation",
                                n=n, m=m, horizontal=i, vertical=j, atom=a,
                            )
    except StopCheck:
        pass
    report.merge(checker.report)
    log_report(report, quiet=fail_fast)
    return report


def diag(x: BisimplicialSet) -> FinSimplicialSet:
    """diag(X)_n = X_{n,n}, with d_i = dv_i dh_i and s_j = sv_j sh_j."""
    return FinSimplicialSet.from_explicit(diag_object(x))


def diag_object(x: BisimplicialSet) -> SimplicialObject:
    if x.caps[0] != x.caps[1]:
        raise InputError(f"The diagonal needs square caps, got {x.caps}")
    top = x.caps[0]
    return _object_from(
        {n: x.levels[(n, n)].elements for n in range(top + 1)},
        lambda n, i, a: x.dv[(n - 1, n, i)](x.dh[(n, n, i)](a)),
        lambda n, j, a: x.sv[(n + 1, n, j)](x.sh[(n, n, j)](a)),
        f"diag({x.name})",
    )


# -------------------------
# Coends against the standard simplices
# -------------------------
def _require_caps(x: BisimplicialSet, max_dim: int):
    if x.caps[0] < max_dim or x.caps[1] < max_dim:
        raise TruncationInsufficient(
            f"Caps {x.caps} cannot certify a coend up to dimension {max_dim}: "
            f"every class needs a representative of index at most the dimension"
        )


def coend_realization(x: BisimplicialSet, max_dim: int, progress: bool = False) -> FinSimplicialSet:
    """
    |X|_p = (coproduct over n of Delta[n]_p x X_{n,p}) modulo (n, theta a, x) ~ (k, a, theta^* x)
    for the generating cofaces and codegeneracies theta: [k] -> [n]. Indices n <= p
    suffice in dimension p: each class has a representative (k, surjection, x) with k <= p
    reached through relations of index at most p.
    """
    _require_caps(x, max_dim)
    quotients = {}
    for p in tqdm(range(max_dim + 1), desc="coend", disable=not progress):
        uf = UnionFind(())
        for n in range(p + 1):
            for a in monotone_maps(p, n):
                for v in x.levels[(n, p)]:
                    uf.add((n, a, v))
        for n in range(p + 1):
            for v in x.levels[(n, p)]:
                if n >= 1:
                    for i in range(n + 1):
                        w = x.dh[(n, p, i)](v)
                        for a in monotone_maps(p, n - 1):
                            uf.union((n, _after_coface(i, a), v), (n - 1, a, w))
                if n + 1 <= p:
                    for j in range(n + 1):
                        w = x.sh[(n, p, j)](v)
                        for a in monotone_maps(p, n + 1):
                            uf.union((n, _after_codegeneracy(j, a), v), (n + 1, a, w))
        quotients[p] = uf

    def reduce(n, a, v, p):
        missing, epi = _split_image(a, n)
        for value in reversed(missing):
            v = x.dh[(n, p, value)](v)
            n -= 1
        return (n, epi, v)

    obj = _realized_object(
        quotients,
        max_dim,
        lambda p, i, e: reduce(e[0], _drop(e[1], i), x.dv[(e[0], p, i)](e[2]), p - 1),
        lambda p, j, e: (e[0], _repeat(e[1], j), x.sv[(e[0], p, j)](e[2])),
        f"|{x.name}|",
    )
    return FinSimplicialSet.from_explicit(obj)


def double_coend(x: BisimplicialSet, max_dim: int, progress: bool = False) -> FinSimplicialSet:
    """The coend over both indices of (Delta[n] x Delta[m]) x X_{n,m}."""
    _require_caps(x, max_dim)
    quotients = {}
    for p in tqdm(range(max_dim + 1), desc="double coend", disable=not progress):
        uf = UnionFind(())
        for n in range(p + 1):
            for m in range(p + 1):
                for a in monotone_maps(p, n):
                    for b in monotone_maps(p, m):
                        for v in x.levels[(n, m)]:
                            uf.add((n, m, a, b, v))
        for n in range(p + 1):
            for m in range(p + 1):
                for v in x.levels[(n, m)]:
                    for b in monotone_maps(p, m):
                        if n >= 1:
                            for i in range(n + 1):
                                w = x.dh[(n, m, i)](v)
                                for a in monotone_maps(p, n - 1):
                                    uf.union((n, m, _after_coface(i, a), b, v), (n - 1, m, a, b, w))
                        if n + 1 <= p:
                            for j in range(n + 1):
                                w = x.sh[(n, m, j)](v)
                                for a in monotone_maps(p, n + 1):
                                    uf.union((n, m, _after_codegeneracy(j, a), b, v), (n + 1, m, a, b, w))
                    for a in monotone_maps(p, n):
                        if m >= 1:
                            for i in range(m + 1):
                                w = x.dv[(n, m, i)](v)
                                for b in monotone_maps(p, m - 1):
                                    uf.union((n, m, a, _after_coface(i, b), v), (n, m - 1, a, b, w))
                        if m + 1 <= p:
                            for j in range(m + 1):
                                w = x.sv[(n, m, j)](v)
                                for b in monotone_maps(p, m + 1):
                                    uf.union((n, m, a, _after_codegeneracy(j, b), v), (n, m + 1, a, b, w))
        quotients[p] = uf

    def reduce(n, m, a, b, v):
        missing, epi_a = _split_image(a, n)
        for value in reversed(missing):
            v = x.dh[(n, m, value)](v)
            n -= 1
        missing, epi_b = _split_image(b, m)
        for value in reversed(missing):
            v = x.dv[(n, m, value)](v)
            m -= 1
        return (n, m, epi_a, epi_b, v)

    obj = _realized_object(
        quotients,
        max_dim,
        lambda p, i, e: reduce(e[0], e[1], _drop(e[2], i), _drop(e[3], i), e[4]),
        lambda p, j, e: (e[0], e[1], _repeat(e[2], j), _repeat(e[3], j), e[4]),
        f"double coend of {x.name}",
    )
    return FinSimplicialSet.from_explicit(obj)


def _realized_object(quotients: Dict[int, UnionFind], max_dim: int, face, degeneracy, name: str) -> SimplicialObject:
    names: Dict[int, Dict[Atom, Atom]] = {}
    for p, uf in quotients.items():
        names[p] = {}
        for members in uf.classes():
            rep = least(members)
            for e in members:
                names[p][e] = rep
    levels = {p: FinSet(names[p].values()) for p in quotients}
    faces = {
        (p, i): FinMap(levels[p], levels[p - 1], {e: names[p - 1][face(p, i, e)] for e in levels[p]}, check=False)
        for p in range(1, max_dim + 1) for i in range(p + 1)
    }
    degeneracies = {
        (p, j): FinMap(levels[p], levels[p + 1], {e: names[p + 1][degeneracy(p, j, e)] for e in levels[p]}, check=False)
        for p in range(max_dim) for j in range(p + 1)
    }
    obj = SimplicialObject(levels, faces, degeneracies, name)
    obj.classes = names
    return obj


class DiagCoendResult(NamedTuple):
    report: ValidationReport
    left: FinSimplicialSet
    right: FinSimplicialSet
    bijection: Dict[int, Dict[Atom, Atom]]
    counts: Dict[str, Tuple[int, ...]]


def diag_coend_check(x: BisimplicialSet, max_dim: int, progress: bool = False) -> DiagCoendResult:
    """
    Both sides computed independently, each compared with diag(X) through
    [n, m, a, b, v] |-> X(a, b) v and [n, a, v] |-> diag(a)^* v; the composite is an
    explicit dimensionwise bijection, checked against every face and degeneracy.
    """
    _require_caps(x, max_dim)
    diagonal = diag_object(x)
    left = double_coend(x, max_dim, progress)
    right = coend_realization(vertically_discrete(diagonal, (max_dim, max_dim)), max_dim, progress)
    checker = Checker(f"diagonal coend isomorphism for {x.name}")
    left_obj, right_obj = left.explicit, right.explicit

    def left_to_diag(p, e):
        n, m, a, b, v = e
        return x.pull(v, n, m, a, b)

    def right_to_diag(p, e):
        n, a, v = e
        return pull_back(v, a, n, diagonal.face, diagonal.degeneracy)

    bijection: Dict[int, Dict[Atom, Atom]] = {}
    for p in range(max_dim + 1):
        lmap = {e: left_to_diag(p, e) for e in left_obj.levels[p]}
        rmap = {e: right_to_diag(p, e) for e in right_obj.levels[p]}
        for members in _members(left_obj, p):
            checker.expect(len({left_to_diag(p, e) for e in members}) == 1, "well_defined", side="left", dim=p)
        target = diagonal.levels[p]
        checker.expect(FinSet(lmap.values()) == target and len(lmap) == len(target), "bijection", side="left", dim=p)
        checker.expect(FinSet(rmap.values()) == target and len(rmap) == len(target), "bijection", side="right", dim=p)
        inverse_right = {v: e for e, v in rmap.items()}
        bijection[p] = {e: inverse_right.get(v) for e, v in lmap.items()}
    for (p, i), f in left_obj.faces.items():
        for e in left_obj.levels[p]:
            checker.expect(
                bijection[p - 1][f(e)] == right_obj.faces[(p, i)](bijection[p][e]), "face", dim=p, index=i, atom=e
            )
    for (p, j), f in left_obj.degeneracies.items():
        for e in left_obj.levels[p]:
            checker.expect(
                bijection[p + 1][f(e)] == right_obj.degeneracies[(p, j)](bijection[p][e]),
                "degeneracy", dim=p, index=j, atom=e,
            )
    counts = {
        "left": left.counts(max_dim),
        "right": right.counts(max_dim),
        "diagonal": FinSimplicialSet.from_explicit(diagonal).counts(max_dim),
    }
    checker.expect(counts["left"] == counts["right"] == counts["diagonal"], "counts", **counts)
    log_report(checker.report)
    return DiagCoendResult(checker.report, left, right, bijection, counts)


def _members(obj: SimplicialObject, p: int) -> List[List[Atom]]:
    groups: Dict[Atom, List[Atom]] = {}
    for e, rep in obj.classes[p].items():
        groups.setdefault(rep, []).append(e)
    return list(groups.values())


# -------------------------
# Split augmentations
# -------------------------
class AugmentedSimplicialSet(NamedTuple):
    obj: SimplicialObject
    base: FinSet
    augmentation: FinMap
    extra: Optional[Dict[int, FinMap]] = None


def split_colimit_check(a: AugmentedSimplicialSet) -> ValidationReport:
    """
    The extra degeneracies h_n: X_{n-1} -> X_n (X_{-1} the base) satisfy
    e h_0 = 1, d_0 h_n = 1 and d_i h_n = h_{n-1} d_{i-1}; the coequalizer of
    d_0, d_1 then maps bijectively onto the base.
    """
    if not a.extra:
        raise InputError("Split colimit check needs the extra degeneracies")
    checker = Checker(f"split augmentation of {a.obj.name}")
    obj, eps, h = a.obj, a.augmentation, a.extra
    if 0 not in h:
        checker.fail("extra_degeneracy", dim=0, missing=True)
    else:
        for b in a.base:
            value = _compose(h[0], eps, b)
            checker.expect(value == b, "extra_degeneracy", dim=0, atom=b, value=value)
    for n in range(1, obj.max_dim + 1):
        if n not in h:
            checker.fail("extra_degeneracy", dim=n, missing=True)
            continue
        for x in obj.levels[n - 1]:
            value = _compose(h[n], obj.faces[(n, 0)], x)
            if value is None:
                checker.skip()
            else:
                checker.expect(value == x, "extra_degeneracy", dim=n, face=0, atom=x, value=value)
            for i in range(1, n + 1):
                lhs = _compose(h[n], obj.faces[(n, i)], x)
                lower = eps if n == 1 else obj.faces[(n - 1, i - 1)]
                rhs = _compose(lower, h[n - 1], x)
                if lhs is None or rhs is None:
                    checker.skip()
                    continue
                checker.expect(lhs == rhs, "extra_degeneracy", dim=n, face=i, atom=x, left=lhs, right=rhs)
    if obj.max_dim >= 1:
        d0, d1 = obj.faces[(1, 0)], obj.faces[(1, 1)]
        uf = UnionFind(obj.levels[0])
        for y in obj.levels[1]:
            if d0.defined_at(y) and d1.defined_at(y):
                checker.expect(
                    _compose(d0, eps, y) == _compose(d1, eps, y), "augmentation", atom=y
                )
                uf.union(d0(y), d1(y))
        classes = uf.classes()
        images = set()
        for members in classes:
            values = {eps(x) for x in members if eps.defined_at(x)}
            checker.expect(len(values) == 1, "colimit", class_size=len(members), values=sorted(values, key=repr))
            images |= values
        checker.expect(
            len(classes) == len(a.base) and images == set(a.base), "colimit", classes=len(classes), base=len(a.base)
        )
    log_report(checker.report)
    return checker.report


def constant_augmented(s: FinSet, max_dim: int) -> AugmentedSimplicialSet:
    """The constant object at s augmented by the identity, split by identities."""
    identity = FinMap.identity(s)
    obj = SimplicialObject(
        {n: s for n in range(max_dim + 1)},
        {(n, i): identity for n in range(1, max_dim + 1) for i in range(n + 1)},
        {(n, j): identity for n in range(max_dim) for j in range(n + 1)},
        name=f"constant {list(s)}",
    )
    return AugmentedSimplicialSet(obj, s, identity, {n: identity for n in range(max_dim + 1)})
