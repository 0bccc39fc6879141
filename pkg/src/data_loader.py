"""
Definition files: versioned JSON documents describing one monoid, collection,
operad, algebra, simplicial set or bisimplicial set.

A definition either names a bundled construction with parameters or lists its
tables explicitly; `mutations` replace single table entries on top of either.
JSON has no tuples, so every list inside an atom is read back as a tuple.
"""

import json
import logging
from typing import Any, Callable, Dict, List, Literal, NamedTuple, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from src.basecat import FinSet, Monoid
from src.collection import ColoredCollection, Signature
from src.operads import ColoredOperad, ass, com, endomorphism_operad, mod_operad, operad_of_monoid, with_composition_entry
from src.utils import InputError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
Kind = Literal["collection", "operad", "algebra", "monoid", "simplicial", "bisimplicial"]


def to_atom(value: Any):
    if isinstance(value, list):
        return tuple(to_atom(v) for v in value)
    return value


def from_atom(atom: Any):
    if isinstance(atom, tuple):
        return [from_atom(a) for a in atom]
    return atom


# -------------------------
# Schema
# -------------------------
class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Construction(_Strict):
    name: str
    params: Dict[str, Any] = {}


class SignatureSpec(_Strict):
    inputs: List[Any]
    output: Any

    def to_signature(self) -> Signature:
        return Signature(tuple(to_atom(c) for c in self.inputs), to_atom(self.output))

    @classmethod
    def of(cls, s: Signature) -> "SignatureSpec":
        return cls(inputs=[from_atom(c) for c in s.inputs], output=from_atom(s.output))


class LevelEntry(_Strict):
    signature: SignatureSpec
    atoms: List[Any]


class UnitEntry(_Strict):
    color: Any
    atom: Any


class ActionEntry(_Strict):
    """x . s_j for the adjacent transposition s_j at this signature, as [x, y] pairs."""

    signature: SignatureSpec
    transposition: int
    table: List[List[Any]]


class CompositionEntry(_Strict):
    outer: SignatureSpec
    slot: int
    inner: SignatureSpec
    left: Any
    right: Any
    value: Any

    def key(self) -> tuple:
        return (self.outer.to_signature(), self.slot, self.inner.to_signature(), to_atom(self.left), to_atom(self.right))


class StructureEntry(_Strict):
    signature: SignatureSpec
    operation: Any
    inputs: List[Any]
    value: Any

    def key(self) -> tuple:
        return (self.signature.to_signature(), to_atom(self.operation), tuple(to_atom(x) for x in self.inputs))


class CarrierEntry(_Strict):
    color: Any
    atoms: List[Any]


class ProductEntry(_Strict):
    left: Any
    right: Any
    value: Any


class SimplexEntry(_Strict):
    """A non-degenerate simplex; each face is a simplex name or [surjection, name]."""

    name: Any
    dim: int
    faces: List[Any] = []


class DefinitionFile(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    kind: Kind
    name: Optional[str] = None
    construction: Optional[Construction] = None
    arity_bound: Optional[int] = None
    colors: Optional[List[Any]] = None
    levels: Optional[List[LevelEntry]] = None
    units: Optional[List[UnitEntry]] = None
    action: Optional[List[ActionEntry]] = None
    composition: Optional[List[CompositionEntry]] = None
    operad: Optional["DefinitionFile"] = None
    carriers: Optional[List[CarrierEntry]] = None
    structure: Optional[List[StructureEntry]] = None
    carrier: Optional[List[Any]] = None
    products: Optional[List[ProductEntry]] = None
    unit: Optional[Any] = None
    simplices: Optional[List[SimplexEntry]] = None
    mutations: List[Union[CompositionEntry, StructureEntry, ProductEntry]] = []


DefinitionFile.model_rebuild()


class LoadedDefinition(NamedTuple):
    definition: DefinitionFile
    value: Any


# -------------------------
# Reading and writing
# -------------------------
def parse_definition(text: str, source: str = "<string>") -> DefinitionFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return DefinitionFile.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
        )
        raise InputError(f"{source}: {problems}") from e


def read_definition(path: str) -> DefinitionFile:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"Cannot read definition file {path}: {e}") from e
    return parse_definition(text, source=path)


def serialize_definition(definition: DefinitionFile) -> str:
    """Canonical form: sorted keys, unset fields dropped."""
    payload = definition.model_dump(mode="json", exclude_none=True, exclude_defaults=True)
    payload["schema_version"] = definition.schema_version
    payload["kind"] = definition.kind
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def dump_definition(definition: DefinitionFile, path: str):
    with open(path, "w") as f:
        f.write(serialize_definition(definition))


def load_definition(path: str) -> LoadedDefinition:
    definition = read_definition(path)
    value = build(definition)
    logger.info(f"Loaded {definition.kind} {getattr(value, 'name', '')} from {path}")
    return LoadedDefinition(definition, value)


# -------------------------
# Building objects
# -------------------------
def build(definition: DefinitionFile):
    builders: Dict[str, Callable[[DefinitionFile], Any]] = {
        "monoid": _build_monoid,
        "collection": _build_collection,
        "operad": _build_operad,
        "algebra": _build_algebra,
        "simplicial": _build_simplicial,
        "bisimplicial": _build_bisimplicial,
    }
    return builders[definition.kind](definition)


def _construct(kind: str, construction: Construction, registry: Dict[str, Callable[..., Any]]):
    if construction.name not in registry:
        raise InputError(f"Unknown {kind} construction {construction.name!r}; known: {sorted(registry)}")
    try:
        return registry[construction.name](**construction.params)
    except TypeError as e:
        raise InputError(f"Bad parameters for {kind} construction {construction.name!r}: {e}") from e


def _sub_definition(kind: Kind, value: Any) -> DefinitionFile:
    """Nested definitions inside construction parameters."""
    if isinstance(value, DefinitionFile):
        return value
    if not isinstance(value, dict):
        raise InputError(f"Expected a nested {kind} definition, got {value!r}")
    payload = dict(value)
    payload.setdefault("kind", kind)
    try:
        return DefinitionFile.model_validate(payload)
    except ValidationError as e:
        raise InputError(f"Nested {kind} definition: {e.errors()[0]['msg']}") from e


def _require(definition: DefinitionFile, *fields: str):
    missing = [f for f in fields if getattr(definition, f) is None]
    if missing:
        raise InputError(f"{definition.kind} definition needs {', '.join(missing)} (or a construction)")


def _build_monoid(definition: DefinitionFile) -> Monoid:
    if definition.construction is not None:
        monoid = _construct(
            "monoid", definition.construction, {"trivial": Monoid.trivial, "cyclic": lambda n: Monoid.cyclic(n)}
        )
    else:
        _require(definition, "carrier", "products", "unit")
        table = {(to_atom(p.left), to_atom(p.right)): to_atom(p.value) for p in definition.products}
        monoid = Monoid(FinSet(to_atom(x) for x in definition.carrier), table, to_atom(definition.unit))
    for mutation in definition.mutations:
        if not isinstance(mutation, ProductEntry):
            raise InputError("Monoid mutations are product entries")
        table = dict(monoid.table)
        table[(to_atom(mutation.left), to_atom(mutation.right))] = to_atom(mutation.value)
        monoid = Monoid(monoid.carrier, table, monoid.unit, name=f"{monoid.name}*")
    if definition.name:
        monoid.name = definition.name
    return monoid


def _explicit_levels(definition: DefinitionFile) -> Dict[Signature, FinSet]:
    return {e.signature.to_signature(): FinSet(to_atom(a) for a in e.atoms) for e in definition.levels}


def _generator_tables(definition: DefinitionFile):
    return {
        (e.signature.to_signature(), e.transposition): {to_atom(x): to_atom(y) for x, y in e.table}
        for e in definition.action or []
    }


def _build_collection(definition: DefinitionFile) -> ColoredCollection:
    _require(definition, "colors", "levels")
    return ColoredCollection(
        [to_atom(c) for c in definition.colors],
        _explicit_levels(definition),
        generator_tables=_generator_tables(definition),
        name=definition.name or "collection",
    )


def _operad_registry() -> Dict[str, Callable[..., ColoredOperad]]:
    from src.trees import pairs_operad, tree_operad

    def mod(base):
        return mod_operad(_build_operad(_sub_definition("operad", base)))

    def monoid_operad(monoid, bound=4):
        return operad_of_monoid(_build_monoid(_sub_definition("monoid", monoid)), bound)

    def end(carriers, arity_bound=2):
        return endomorphism_operad(
            {to_atom(c): FinSet(to_atom(x) for x in xs) for c, xs in carriers.items()}, arity_bound
        )

    return {
        "ass": ass,
        "com": com,
        "mod": mod,
        "monoid": monoid_operad,
        "trees": tree_operad,
        "pairs": pairs_operad,
        "end": end,
    }


def _build_operad(definition: DefinitionFile) -> ColoredOperad:
    if definition.construction is not None:
        o = _construct("operad", definition.construction, _operad_registry())
    else:
        _require(definition, "colors", "levels", "units", "composition", "arity_bound")
        table = {entry.key(): to_atom(entry.value) for entry in definition.composition}
        name = definition.name or "operad"

        def partial(s, i, t, mu, nu):
            key = (s, i, t, mu, nu)
            if key not in table:
                raise InputError(f"{name} has no composition entry for {mu!r} o_{i} {nu!r} at {s}, {t}")
            return table[key]

        o = ColoredOperad(
            [to_atom(c) for c in definition.colors],
            _explicit_levels(definition),
            {to_atom(u.color): to_atom(u.atom) for u in definition.units},
            partial,
            generator_tables=_generator_tables(definition),
            arity_bound=definition.arity_bound,
            name=name,
        )
    for mutation in definition.mutations:
        if not isinstance(mutation, CompositionEntry):
            raise InputError("Operad mutations are composition entries")
        s, i, t, mu, nu = mutation.key()
        o = with_composition_entry(o, s, i, t, mu, nu, to_atom(mutation.value))
    if definition.name:
        o.name = definition.name
    return o


def _algebra_registry(definition: DefinitionFile) -> Dict[str, Callable[..., Any]]:
    from src.algebras import algebra_from_monoid, free_algebra

    def operad():
        if definition.operad is None:
            raise InputError("Algebra constructions need an `operad` definition")
        return _build_operad(definition.operad)

    def from_monoid(monoid):
        return algebra_from_monoid(operad(), _build_monoid(_sub_definition("monoid", monoid)))

    def free(generators, max_degree):
        o = operad()
        if isinstance(generators, list):
            if len(o.colors) != 1:
                raise InputError("Generators of a colored operad are given per color")
            (c,) = o.colors.elements
            generators = {c: generators}
        return free_algebra(o, {to_atom(c): [to_atom(x) for x in xs] for c, xs in generators.items()}, max_degree)

    return {"from_monoid": from_monoid, "free": free}


def _build_algebra(definition: DefinitionFile):
    from src.algebras import OperadAlgebra, with_structure_entry

    if definition.construction is not None:
        a = _construct("algebra", definition.construction, _algebra_registry(definition))
    else:
        _require(definition, "operad", "carriers", "structure")
        o = _build_operad(definition.operad)
        table = {entry.key(): to_atom(entry.value) for entry in definition.structure}
        name = definition.name or "algebra"

        def structure(s, mu, xs):
            key = (s, mu, tuple(xs))
            if key not in table:
                raise InputError(f"{name} has no structure entry for {mu!r} at {s} on {xs!r}")
            return table[key]

        a = OperadAlgebra(
            o,
            {to_atom(e.color): FinSet(to_atom(x) for x in e.atoms) for e in definition.carriers},
            structure,
            name=name,
        )
    for mutation in definition.mutations:
        if not isinstance(mutation, StructureEntry):
            raise InputError("Algebra mutations are structure entries")
        s, mu, xs = mutation.key()
        a = with_structure_entry(a, s, mu, xs, to_atom(mutation.value))
    if definition.name:
        a.name = definition.name
    return a


def _simplicial_registry() -> Dict[str, Callable[..., Any]]:
    from src.simplicial import point, product, standard_simplex

    def simplicial(value):
        return _build_simplicial(_sub_definition("simplicial", value))

    return {
        "standard_simplex": standard_simplex,
        "point": point,
        "product": lambda left, right, max_dim: product(simplicial(left), simplicial(right), max_dim),
    }


def _build_simplicial(definition: DefinitionFile):
    from src.simplicial import FinSimplicialSet

    if definition.construction is not None:
        x = _construct("simplicial", definition.construction, _simplicial_registry())
    else:
        _require(definition, "simplices")
        by_dim: Dict[int, list] = {}
        faces = {}
        for entry in definition.simplices:
            y = to_atom(entry.name)
            by_dim.setdefault(entry.dim, []).append(y)
            if len(entry.faces) != (entry.dim + 1 if entry.dim else 0):
                raise InputError(f"Simplex {entry.name!r} of dimension {entry.dim} lists {len(entry.faces)} faces")
            for p, face in enumerate(entry.faces):
                if isinstance(face, list) and len(face) == 2 and isinstance(face[0], list):
                    faces[(y, p)] = (tuple(face[0]), to_atom(face[1]))
                else:
                    faces[(y, p)] = (tuple(range(entry.dim)), to_atom(face))
        top = max(by_dim, default=0)
        x = FinSimplicialSet({n: FinSet(by_dim.get(n, ())) for n in range(top + 1)}, faces, definition.name or "simplicial set")
        for (y, p), (sigma, z) in faces.items():
            if z not in x.dim_of or len(sigma) != x.dim_of[y] or (sigma and max(sigma) != x.dim_of[z]):
                raise InputError(f"Face {p} of {y!r} is not a simplex of the right dimension")
    if definition.name:
        x.name = definition.name
    return x


def _build_bisimplicial(definition: DefinitionFile):
    from src.simplicial import external_product, horizontally_constant, vertically_discrete

    def simplicial(value):
        return _build_simplicial(_sub_definition("simplicial", value))

    registry = {
        "external_product": lambda left, right, caps: external_product(simplicial(left), simplicial(right), tuple(caps)),
        "horizontally_constant": lambda of, caps: horizontally_constant(
            simplicial(of).to_explicit(caps[1]), tuple(caps)
        ),
        "vertically_discrete": lambda of, caps: vertically_discrete(simplicial(of).to_explicit(caps[0]), tuple(caps)),
    }
    if definition.construction is None:
        raise InputError("Bisimplicial definitions are given by a construction")
    x = _construct("bisimplicial", definition.construction, registry)
    if definition.name:
        x.name = definition.name
    return x


# -------------------------
# Explicit tables from objects
# -------------------------
def monoid_definition(m: Monoid) -> DefinitionFile:
    return DefinitionFile(
        kind="monoid",
        name=m.name,
        carrier=[from_atom(x) for x in m.carrier],
        unit=from_atom(m.unit),
        products=[
            ProductEntry(left=from_atom(a), right=from_atom(b), value=from_atom(m.mul(a, b)))
            for a in m.carrier for b in m.carrier
        ],
    )


def operad_definition(o: ColoredOperad) -> DefinitionFile:
    """Every level, unit, adjacent-transposition table and in-bound composite of `o`."""
    sigs = o.signatures()
    composition = []
    for s in sigs:
        for i in range(s.arity):
            for t in sigs:
                if t.output != s.inputs[i] or s.arity + t.arity - 1 > o.arity_bound:
                    continue
                for mu in o.level(s):
                    for nu in o.level(t):
                        _, value = o.circ(s, i, t, mu, nu)
                        composition.append(
                            CompositionEntry(
                                outer=SignatureSpec.of(s), slot=i, inner=SignatureSpec.of(t),
                                left=from_atom(mu), right=from_atom(nu), value=from_atom(value),
                            )
                        )
    action = [
        ActionEntry(
            signature=SignatureSpec.of(s), transposition=j,
            table=[[from_atom(x), from_atom(y)] for x, y in sorted(table.items(), key=lambda kv: repr(kv[0]))],
        )
        for (s, j), table in o.collection.generator_table_dump().items()
    ]
    return DefinitionFile(
        kind="operad",
        name=o.name,
        arity_bound=o.arity_bound,
        colors=[from_atom(c) for c in o.colors],
        levels=[LevelEntry(signature=SignatureSpec.of(s), atoms=[from_atom(a) for a in o.level(s)]) for s in sigs],
        units=[UnitEntry(color=from_atom(c), atom=from_atom(u)) for c, u in o.units.items() if o.has_unit(c)],
        action=action,
        composition=composition,
    )
