import itertools
from math import comb

import pytest

from src.algebras import (
    AlgebraMap,
    Bimodule,
    algebra_from_monoid,
    algebra_maps,
    algebras_equal,
    bar_resolution,
    bimodule_of_pair,
    check_algebra,
    check_algebra_map,
    check_bar,
    enumerate_algebras,
    enumerate_modules,
    free_algebra,
    mod_algebra_from_bimodule,
    mod_algebra_from_module,
    module_of_pair,
    monoid_of_algebra,
    pair_of_mod_algebra,
    restrict_algebra,
    structure_map,
    universal_property_check,
    with_structure_entry,
)
from src.basecat import FinSet, Monoid, enumerate_monoids
from src.collection import sig
from src.operads import ONE, ass, check_operad_map, com
from src.utils import InputError, InvalidStructure, TruncationError

BINARY = sig([ONE, ONE], ONE)


@pytest.fixture
def left_zero():
    """{a, b} with xy = x, plus a unit e: associative, not commutative."""
    carrier = FinSet(["a", "b", "e"])
    table = {}
    for x in carrier:
        for y in carrier:
            table[(x, y)] = y if x == "e" else x
    return Monoid(carrier, table, "e", name="left-zero")


def _degree_sizes(free):
    return [len(free.pieces[ONE][n]) for n in range(free.max_degree + 1)]


def test_monoid_algebras_pass(ass3, com3, z2, semilattice):
    for o in (ass3, com3):
        for monoid in (z2, semilattice):
            assert check_algebra(algebra_from_monoid(o, monoid)).ok


def test_non_commutative_monoid_is_an_ass_algebra_only(ass3, com3, left_zero):
    assert check_algebra(algebra_from_monoid(ass3, left_zero)).ok
    report = check_algebra(algebra_from_monoid(com3, left_zero))
    assert "equivariance" in report.laws_failed()


def test_monoid_of_algebra_recovers_the_table(ass3, left_zero):
    back = monoid_of_algebra(algebra_from_monoid(ass3, left_zero))
    assert back.table == left_zero.table
    assert back.unit == "e"


def test_mutated_structure_entry_is_caught(ass3, z2):
    a = algebra_from_monoid(ass3, z2)
    broken = with_structure_entry(a, BINARY, (0, 1), (1, 1), 1)
    assert not check_algebra(broken).ok


def test_free_com_on_one_generator(com3):
    free = free_algebra(com3, {ONE: ["x"]}, 3)
    assert _degree_sizes(free) == [1, 1, 1, 1]
    assert check_algebra(free).ok


def test_free_ass_on_two_generators(ass3):
    free = free_algebra(ass3, {ONE: ["x", "y"]}, 2)
    assert _degree_sizes(free) == [1, 2, 4]
    assert len(free.carriers[ONE]) == 7
    assert check_algebra(free).ok


@pytest.mark.parametrize("k, n", list(itertools.product([1, 2, 3], [3])))
def test_free_sizes_match_closed_forms(ass3, com3, k, n):
    gens = [f"x{i}" for i in range(k)]
    assert _degree_sizes(free_algebra(ass3, {ONE: gens}, n)) == [k ** d for d in range(n + 1)]
    assert _degree_sizes(free_algebra(com3, {ONE: gens}, n)) == [comb(k + d - 1, d) for d in range(n + 1)]


def test_free_algebra_truncates_above_the_cap(ass3):
    free = free_algebra(ass3, {ONE: ["x"]}, 2)
    x = free.generator(ONE, "x")
    square = free.act(BINARY, (0, 1), (x, x))
    assert len(square[0]) == 2
    with pytest.raises(TruncationError):
        free.act(BINARY, (0, 1), (square, x))


def test_degree_cap_above_the_arity_bound_is_rejected(ass3):
    with pytest.raises(InputError):
        free_algebra(ass3, {ONE: ["x"]}, 4)


def test_free_ass_words_keep_their_order(ass3):
    free = free_algebra(ass3, {ONE: ["x", "y"]}, 2)
    x, y = free.generator(ONE, "x"), free.generator(ONE, "y")
    assert free.act(BINARY, (0, 1), (x, y)) != free.act(BINARY, (0, 1), (y, x))
    assert free.act(BINARY, (1, 0), (x, y)) == free.act(BINARY, (0, 1), (y, x))


def test_universal_property(ass3, z2):
    a = algebra_from_monoid(ass3, z2)
    result = universal_property_check(ass3, {ONE: ["x"]}, a, {ONE: {"x": 1}}, 2)
    assert result.report.ok
    assert result.candidates == 1
    # [mu; x, x] evaluates to 1 + 1
    free = result.map.source
    xx = free.act(BINARY, (0, 1), (free.generator(ONE, "x"),) * 2)
    assert result.map(ONE, xx) == 0


@pytest.mark.parametrize(
    "operad, degree",
    [(ass(3), 3), (com(4), 4)],
    ids=["ass", "com"],
)
def test_universal_property_on_three_generators(operad, degree):
    a = algebra_from_monoid(operad, Monoid.cyclic(3))
    g = {ONE: {"x": 0, "y": 1, "z": 2}}
    result = universal_property_check(operad, {ONE: ["x", "y", "z"]}, a, g, degree)
    assert result.report.ok
    assert result.candidates == 1
    free = result.map.source
    ternary = sig([ONE] * 3, ONE)
    xyz = free.act(ternary, operad.level(ternary).elements[0], tuple(free.generator(ONE, v) for v in "xyz"))
    assert result.map(ONE, xyz) == 0


def test_fixed_values_restrict_the_enumeration(ass3, z2):
    a = algebra_from_monoid(ass3, z2)
    maps = algebra_maps(a, a, fixed={(ONE, 1): 1})
    assert [m.components[ONE] for m in maps] == [{0: 0, 1: 1}]
    with pytest.raises(InputError):
        algebra_maps(a, a, fixed={(ONE, 5): 0})


def test_algebra_maps_between_monoid_algebras(ass3, z2):
    a = algebra_from_monoid(ass3, z2)
    maps = algebra_maps(a, a)
    assert {tuple(sorted(m.components[ONE].items())) for m in maps} == {((0, 0), (1, 0)), ((0, 0), (1, 1))}
    for m in maps:
        assert check_algebra_map(m).ok


def test_non_homomorphism_fails_both_ways(ass3, z2):
    a = algebra_from_monoid(ass3, z2)
    report = check_algebra_map(AlgebraMap(a, a, {ONE: {0: 1, 1: 1}}))
    assert "square" in report.laws_failed()
    assert "end_factorization" in report.laws_failed()
    assert "verdict_mismatch" not in report.laws_failed()


def test_structure_map_is_an_operad_map(ass3, z2):
    assert check_operad_map(structure_map(algebra_from_monoid(ass3, z2))).ok


def _monoid_key(m):
    return (m.unit, tuple(sorted(m.table.items())))


@pytest.mark.parametrize("name", ["ass", "com"])
def test_enumerated_structures_are_the_monoids(ass3, com3, name):
    o = com3 if name == "com" else ass3
    carrier = FinSet([0, 1])
    found = enumerate_algebras(o, {ONE: carrier})
    from_algebras = {_monoid_key(monoid_of_algebra(a)) for a in found}
    monoids = enumerate_monoids(carrier)
    assert len(found) == len(from_algebras) == 4
    assert from_algebras == {_monoid_key(m) for m in monoids}


def test_bimodule_round_trip(ass3, z2):
    regular = Bimodule(z2, z2.carrier, dict(z2.table), dict(z2.table))
    x = mod_algebra_from_bimodule(ass3, regular)
    assert check_algebra(x).ok
    pair = pair_of_mod_algebra(x)
    back = bimodule_of_pair(pair)
    assert back.left == regular.left
    assert back.right == regular.right
    assert algebras_equal(restrict_algebra({ONE: "r"}, x), algebra_from_monoid(ass3, z2)).ok


def test_module_round_trip(com3, z2):
    carrier = FinSet(["p", "q"])
    swap = {"p": "q", "q": "p"}
    action = {(r, m): swap[m] if r else m for r in z2.carrier for m in carrier}
    x = mod_algebra_from_module(com3, z2, carrier, action)
    assert check_algebra(x).ok
    assert module_of_pair(pair_of_mod_algebra(x)) == action


def test_bad_module_is_rejected(com3, z2):
    carrier = FinSet(["p", "q"])
    constant = {(r, m): "p" for r in z2.carrier for m in carrier}
    with pytest.raises(InvalidStructure):
        mod_algebra_from_module(com3, z2, carrier, constant)


def test_modules_of_z2_are_involutions(z2):
    carrier = FinSet(["p", "q", "s"])
    involutions = [
        p for p in itertools.permutations(carrier.elements)
        if all(p[carrier.elements.index(p[i])] == carrier.elements[i] for i in range(3))
    ]
    assert len(enumerate_modules(z2, carrier)) == len(involutions) == 4


@pytest.mark.parametrize("name, depth, sizes", [("com", 2, [6, 28, 435]), ("ass", 1, [7, 57])])
def test_bar_resolution(com3, ass3, z2, name, depth, sizes):
    o = com3 if name == "com" else ass3
    bar = bar_resolution(algebra_from_monoid(o, z2), depth, 2)
    assert [len(level.carriers[ONE]) for level in bar.levels] == sizes
    assert check_bar(bar).ok


def test_bar_needs_an_ungraded_valid_algebra(com3, ass3, z2):
    with pytest.raises(InputError):
        bar_resolution(free_algebra(com3, {ONE: ["x"]}, 2), 1, 2)
    broken = with_structure_entry(algebra_from_monoid(ass3, z2), BINARY, (0, 1), (1, 1), 1)
    with pytest.raises(InvalidStructure):
        bar_resolution(broken, 1, 2)
