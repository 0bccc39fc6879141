import itertools

import pytest

from src.basecat import FinMap, FinSet, Monoid, symmetric_group, transposition
from src.collection import sig
from src.operads import (
    ONE,
    OperadMap,
    ass,
    check_operad,
    check_operad_map,
    collapse_map,
    com,
    end_of_map,
    endomorphism_operad,
    equivariance_perm,
    factor_through_restricted,
    mod_operad,
    operad_of_monoid,
    operads_equal,
    rename_colors,
    restrict,
    restricted_end,
    with_composition_entry,
)
from src.trees import A, corolla, pairs_operad, tree_operad
from src.utils import InputError, InvalidStructure, SizeCapExceeded, TruncationError

BINARY = sig([ONE, ONE], ONE)


def one(n):
    return sig([ONE] * n, ONE)


@pytest.mark.parametrize("n, ass_size, com_size", [(0, 1, 1), (1, 1, 1), (2, 2, 1), (3, 6, 1)])
def test_bundled_level_sizes(ass3, com3, n, ass_size, com_size):
    assert len(ass3.level(one(n))) == ass_size
    assert len(com3.level(one(n))) == com_size


def test_ass_and_com_pass():
    assert check_operad(ass(4)).ok
    assert check_operad(com(4)).ok


def test_mutated_ass_fails_associativity(ass3):
    mutated = with_composition_entry(ass3, BINARY, 0, BINARY, (0, 1), (0, 1), (2, 1, 0))
    report = check_operad(mutated)
    assert not report.ok
    assert "associativity" in report.laws_failed()
    assert check_operad(ass3).ok


def test_equivariance_perm_matches_ass(ass3):
    for sigma in symmetric_group(2):
        for i in range(2):
            for nu in ass3.level(BINARY):
                _, left = ass3.circ(BINARY, i, BINARY, ass3.act(sigma, BINARY, (0, 1)), nu)
                _, inner = ass3.circ(BINARY, sigma[i], BINARY, (0, 1), nu)
                tau = equivariance_perm(sigma, i, 2)
                assert left == ass3.act(tau, one(3), inner)


def test_circ_rejects_bad_slots_and_truncates():
    o = ass(2)
    with pytest.raises(InputError):
        o.circ(BINARY, 2, BINARY, (0, 1), (0, 1))
    with pytest.raises(TruncationError):
        o.circ(BINARY, 0, BINARY, (0, 1), (0, 1))


def test_compose_fills_every_slot(ass3):
    s, value = ass3.compose(BINARY, (1, 0), [(one(1), (0,)), (BINARY, (0, 1))])
    assert s == one(3)
    assert value == (2, 0, 1)


def test_mod_ass_levels(ass3):
    mod = mod_operad(ass3)
    assert len(mod.level(sig(["r", "m"], "m"))) == 2
    assert len(mod.level(sig(["m", "m"], "m"))) == 0
    assert len(mod.level(sig(["r", "r"], "m"))) == 0
    assert len(mod.level(sig(["r", "r", "r"], "r"))) == 6
    assert check_operad(mod).ok


def test_restricting_mod_along_r_recovers_the_operad(ass3):
    back = restrict({ONE: "r"}, mod_operad(ass3))
    assert operads_equal(back, ass3).ok


def test_rename_colors_needs_a_bijection(ass3):
    with pytest.raises(InputError):
        rename_colors(ass3, {ONE: "a", "x": "a"})
    renamed = rename_colors(ass3, {ONE: "a"})
    assert len(renamed.level(sig(["a", "a"], "a"))) == 2


def test_operad_of_monoid(z2, semilattice):
    for monoid in (z2, semilattice):
        o = operad_of_monoid(monoid)
        assert check_operad(o).ok
        assert o.signatures() == [one(1)]


def test_operad_of_monoid_rejects_a_non_monoid():
    carrier = FinSet([0, 1])
    # 1 * 1 = 1 but 0 is not a unit
    table = {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1}
    with pytest.raises(InvalidStructure):
        operad_of_monoid(Monoid(carrier, table, 0))


def test_end_sizes_and_laws():
    end = endomorphism_operad({ONE: FinSet([0, 1])}, 2)
    assert [len(end.level(one(n))) for n in range(3)] == [2, 4, 16]
    assert check_operad(end).ok


def test_end_respects_the_size_cap():
    with pytest.raises(SizeCapExceeded):
        endomorphism_operad({ONE: FinSet([0, 1])}, 2, size_cap=10)


def test_end_composition_is_substitution():
    end = endomorphism_operad({ONE: FinSet([0, 1])}, 2)
    # truth tables in lexicographic input order
    conj, neg = (0, 0, 0, 1), (1, 0)
    _, value = end.circ(BINARY, 0, one(1), conj, neg)
    assert value == (0, 1, 0, 0)
    swap = (1, 0)
    impl = (1, 1, 0, 1)
    assert end.act(swap, BINARY, impl) == (1, 0, 1, 1)


def test_end_of_map_nullary_level():
    f = FinMap(FinSet(["a", "b"]), FinSet([ONE]), {"a": ONE, "b": ONE})
    result = end_of_map({"c": f}, 2)
    assert len(result.operad.level(sig([], "c"))) == 2
    assert len(result.operad.level(sig(["c"], "c"))) == 4
    assert check_operad(result.operad).ok
    assert check_operad_map(result.to_source).ok
    assert check_operad_map(result.to_target).ok


def test_collapse_map_is_an_operad_map(ass3):
    assert check_operad_map(collapse_map(ass3)).ok


def test_structure_map_factors_through_restricted_end(z2):
    o = operad_of_monoid(z2, bound=2)
    restricted = restricted_end(o, {ONE: FinSet([0, 1])})
    assert restricted.operad.signatures() == [one(1)]
    assert check_operad(restricted.operad).ok
    swap = OperadMap(o, restricted.full, lambda s, g: (1, 0) if g else (0, 1), name="swap")
    assert check_operad_map(swap).ok
    factor, report = factor_through_restricted(swap, restricted)
    assert report.ok
    assert factor(one(1), 1) == (1, 0)


def test_a_non_multiplicative_map_is_caught(z2):
    o = operad_of_monoid(z2, bound=2)
    end = endomorphism_operad({ONE: FinSet([0, 1])}, 2)
    constant = OperadMap(o, end, lambda s, g: (0, 1) if g == 0 else (0, 0), name="bad")
    report = check_operad_map(constant)
    assert "composition" in report.laws_failed()


# -------------------------
# Single-entry mutations
# -------------------------
JUNK = ("junk",)

OPERADS = {
    "ass": lambda: ass(3),
    "com": lambda: com(3),
    "mod-ass": lambda: mod_operad(ass(3)),
    "mod-com": lambda: mod_operad(com(3)),
    "o-z3": lambda: operad_of_monoid(Monoid.cyclic(3), bound=2),
    "end": lambda: endomorphism_operad({ONE: FinSet([0, 1])}, 2),
    "trees": lambda: tree_operad(2, 2),
    "pairs": lambda: pairs_operad(2, 2),
}

RM_M, MR_M, RR_R = sig(["r", "m"], "m"), sig(["m", "r"], "m"), sig(["r", "r"], "r")
M_M, R = sig(["m"], "m"), sig([], "r")
T2, T11, AA = sig([2], 2), sig([1, 1], 1), sig([A], A)

COMPOSITION_MUTATIONS = [
    ("ass", (one(1), 0, BINARY, (0,), (1, 0)), (0, 1)),
    ("ass", (BINARY, 1, one(1), (1, 0), (0,)), (0, 1)),
    ("ass", (BINARY, 0, BINARY, (0, 1), (0, 1)), (2, 1, 0)),
    ("ass", (BINARY, 1, BINARY, (0, 1), (0, 1)), (0, 2, 1)),
    ("ass", (BINARY, 0, one(0), (0, 1), ()), JUNK),
    ("com", (BINARY, 0, BINARY, (), ()), JUNK),
    ("com", (one(1), 0, one(0), (), ()), JUNK),
    ("mod-ass", (RM_M, 1, M_M, (0, 1), (0,)), (1, 0)),
    ("mod-ass", (RM_M, 0, RR_R, (0, 1), (1, 0)), JUNK),
    ("mod-com", (MR_M, 1, R, (), ()), JUNK),
    ("mod-com", (RR_R, 0, RR_R, (), ()), JUNK),
    ("o-z3", (one(1), 0, one(1), 1, 0), 2),
    ("o-z3", (one(1), 0, one(1), 1, 1), 0),
    ("end", (one(1), 0, one(1), (0, 1), (1, 0)), (0, 1)),
    ("end", (BINARY, 0, one(0), (0, 1, 1, 1), (0,)), JUNK),
    ("trees", (T2, 0, T2, corolla(2), corolla(2, [2, 1])), corolla(2)),
    ("trees", (T2, 0, T2, corolla(2), corolla(2)), JUNK),
    ("pairs", (T2, 0, T2, corolla(2), corolla(2, [2, 1])), corolla(2)),
    ("pairs", (AA, 0, AA, corolla(0), corolla(0)), JUNK),
]

ACTION_MUTATIONS = [
    ("ass", BINARY, 0),
    ("ass", one(3), 1),
    ("com", BINARY, 0),
    ("mod-ass", RM_M, 0),
    ("end", BINARY, 0),
    ("trees", T11, 0),
    ("pairs", T11, 0),
]


def _with_action_entry(o, s, j):
    """Redirects one atom of one adjacent-transposition table."""
    tables = o.collection.generator_table_dump()
    table = dict(tables[(s, j)])
    x = o.level(s).elements[0]
    others = [y for y in o.level(s.permute(transposition(s.arity, j))) if y != table[x]]
    table[x] = others[0] if others else JUNK
    tables[(s, j)] = table
    return o.replace(action=None, generator_tables=tables, name=f"{o.name}*")


@pytest.mark.parametrize("name", sorted(OPERADS))
def test_unmutated_operads_pass(name):
    assert check_operad(OPERADS[name]()).ok


@pytest.mark.parametrize("name, entry, value", COMPOSITION_MUTATIONS)
def test_every_composition_mutation_is_detected(name, entry, value):
    o = OPERADS[name]()
    s, i, t, mu, nu = entry
    assert o.circ(s, i, t, mu, nu)[1] != value
    report = check_operad(with_composition_entry(o, s, i, t, mu, nu, value))
    assert not report.ok


@pytest.mark.parametrize("name, s, j", ACTION_MUTATIONS)
def test_every_action_mutation_is_detected(name, s, j):
    o = OPERADS[name]()
    assert check_operad(o.replace(action=None, generator_tables=o.collection.generator_table_dump())).ok
    assert not check_operad(_with_action_entry(o, s, j)).ok


# -------------------------
# Restriction along every color function
# -------------------------
RESTRICTION_TARGETS = {
    "mod-ass": lambda: mod_operad(ass(3)),
    "mod-com": lambda: mod_operad(com(3)),
    "end-two-colors": lambda: endomorphism_operad({"a": FinSet([0, 1]), "b": FinSet([0])}, 2),
}


@pytest.mark.parametrize("name", sorted(RESTRICTION_TARGETS))
@pytest.mark.parametrize("domain", [["u"], ["u", "v"]], ids=["one-color", "two-colors"])
def test_restriction_along_every_color_function(name, domain):
    o = RESTRICTION_TARGETS[name]()
    targets = list(o.colors)
    for images in itertools.product(targets, repeat=len(domain)):
        alpha = dict(zip(domain, images))
        restricted = restrict(alpha, o)
        report = check_operad(restricted)
        assert report.ok, (alpha, report.laws_failed())
        for s in restricted.signatures():
            image = sig([alpha[c] for c in s.inputs], alpha[s.output])
            assert restricted.level(s) == o.level(image)
