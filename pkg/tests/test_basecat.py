import itertools
from functools import reduce

import pytest

from src.basecat import (
    FinMap,
    FinSet,
    Monoid,
    SymAction,
    atom_key,
    block_permutation,
    check_monoid,
    coequalizer,
    compose_perm,
    coproduct,
    enumerate_monoids,
    identity_perm,
    inverse_perm,
    orbit_quotient,
    permute_right,
    place_permute,
    product,
    pullback,
    symmetric_group,
    tensor_over_group,
    transposition,
    transposition_word,
)
from src.utils import InputError


def test_finset_is_canonically_ordered():
    s = FinSet([(1,), "b", 2, "a", 0, 2])
    assert s.elements == (0, 2, "a", "b", (1,))
    assert s == FinSet(reversed(s.elements))
    assert len(s) == 5


def test_unsupported_atom_is_rejected():
    with pytest.raises(InputError):
        atom_key(1.5)


def test_finmap_must_be_total_and_land_in_target():
    x, y = FinSet([0, 1]), FinSet(["a"])
    with pytest.raises(InputError):
        FinMap(x, y, {0: "a"})
    with pytest.raises(InputError):
        FinMap(x, y, {0: "a", 1: "b"})
    f = FinMap(x, y, {0: "a", 1: "a"})
    with pytest.raises(InputError):
        f(2)


def test_partial_composite_keeps_only_defined_points():
    f = FinMap(FinSet([0, 1, 2]), FinSet([0, 1, 2]), {0: 1, 1: 2, 2: 0})
    g = FinMap(FinSet([1, 2]), FinSet(["x"]), {1: "x", 2: "x"}, check=False)
    h = f.then(g)
    assert h.source == FinSet([0, 1])
    assert h(0) == "x" and not h.defined_at(2)


def test_product_and_coproduct_sizes():
    a, b = FinSet([0, 1]), FinSet(["x", "y", "z"])
    p = product([a, b])
    assert len(p.obj) == 6
    assert p.projections[1]((1, "z")) == "z"
    c = coproduct([a, b])
    assert len(c.obj) == 5
    assert c.injections[0](1) == (0, 1)


def test_pullback_pairs_points_over_the_same_image():
    f = FinMap.from_function(FinSet([0, 1, 2]), FinSet([0, 1]), lambda x: x % 2)
    g = FinMap(FinSet(["a", "b"]), FinSet([0, 1]), {"a": 0, "b": 0})
    pb = pullback(f, g)
    assert pb.obj == FinSet([(0, "a"), (0, "b"), (2, "a"), (2, "b")])
    assert pb.left((2, "b")) == 2 and pb.right((2, "b")) == "b"


def test_pullback_rejects_ill_formed_cospan():
    f = FinMap.identity(FinSet([0]))
    g = FinMap.identity(FinSet([1]))
    with pytest.raises(InputError):
        pullback(f, g)


def test_coequalizer_of_a_chain_has_two_classes():
    chain = FinSet(range(5))
    source = FinSet(range(3))
    f = FinMap.from_function(source, chain, lambda i: i)
    g = FinMap.from_function(source, chain, lambda i: i + 1)
    q = coequalizer(f, g)
    assert len(q.obj) == 2
    assert q.projection(3) == 0 and q.projection(4) == 4


def test_orbits_of_binary_words_under_place_permutation():
    words = product([FinSet([0, 1])] * 3).obj
    q = orbit_quotient(words, symmetric_group(3), place_permute)
    # one orbit per number of ones
    assert len(q.obj) == 4


def test_tensor_of_regular_action_with_pairs_has_four_orbits():
    x = FinSet(["x", "y"])
    pairs = product([x, x]).obj
    q = tensor_over_group(SymAction.regular(2), pairs)
    assert len(q.obj) == 4
    assert all(len(members) == 2 for members in q.classes().values())


def test_tensor_rejects_degree_mismatch():
    triples = product([FinSet([0])] * 3).obj
    with pytest.raises(InputError):
        tensor_over_group(SymAction.regular(2), triples)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_transposition_words_multiply_back(n):
    for alpha in symmetric_group(n):
        word = transposition_word(alpha)
        assert reduce(compose_perm, [transposition(n, j) for j in word], identity_perm(n)) == alpha


def test_place_and_right_actions_are_inverse_readings():
    xs = ("a", "b", "c", "d")
    for sigma in symmetric_group(4):
        moved = place_permute(sigma, xs)
        assert all(moved[sigma[i]] == xs[i] for i in range(4))
        assert permute_right(moved, sigma) == xs
        assert compose_perm(sigma, inverse_perm(sigma)) == identity_perm(4)


def test_block_permutation_moves_whole_blocks():
    assert block_permutation((0, 1), (2, 1)) == (0, 1, 2)
    bp = block_permutation((1, 0), (2, 1))
    assert place_permute(bp, ("a", "b", "c")) == ("c", "a", "b")


def test_regular_action_is_an_action():
    assert SymAction.regular(3).check().ok


def test_cyclic_and_trivial_monoids_pass(trivial_monoid):
    assert check_monoid(Monoid.cyclic(3)).ok
    assert check_monoid(trivial_monoid).ok


def test_non_associative_table_is_reported():
    carrier = FinSet([0, 1, 2])
    table = {(a, b): (a - b) % 3 if a and b else a + b for a in carrier for b in carrier}
    report = check_monoid(Monoid(carrier, table, 0))
    assert not report.ok
    assert "associativity" in report.laws_failed()


def test_monoid_table_must_be_complete():
    with pytest.raises(InputError):
        Monoid(FinSet([0, 1]), {(0, 0): 0}, 0)


def test_two_element_monoids_by_brute_force():
    carrier = FinSet([0, 1])
    found = enumerate_monoids(carrier)
    oracle = 0
    for unit in carrier:
        for values in itertools.product(carrier.elements, repeat=4):
            table = dict(zip(itertools.product(carrier.elements, repeat=2), values))
            if any(table[(unit, a)] != a or table[(a, unit)] != a for a in carrier):
                continue
            if all(
                table[(table[(a, b)], c)] == table[(a, table[(b, c)])]
                for a, b, c in itertools.product(carrier.elements, repeat=3)
            ):
                oracle += 1
    assert len(found) == oracle == 4
