from math import factorial

import pytest

from src.algebras import algebra_from_monoid, algebras_equal, check_algebra
from src.operads import ONE, ass, check_operad, operads_equal
from src.trees import (
    A,
    BARE,
    corolla,
    embed_operad,
    enumerate_trees,
    evaluate_tree,
    format_tree,
    graft,
    graft_at,
    pairs_algebra_assemble,
    pairs_algebra_decompose,
    pairs_level,
    pairs_operad,
    parse_profile,
    parse_tree,
    sigma_action,
    stabilizer_freeness,
    tree_operad,
)
from src.collection import sig
from src.utils import InputError


@pytest.mark.parametrize(
    "arities, n, expected",
    [((2,), 2, 2), ((2, 2), 3, 24), ((3,), 3, 6), ((2, 2), 4, 0), ((), 1, 1), ((0,), 0, 1), ((2, 1, 0), 1, 6)],
)
def test_tree_counts(arities, n, expected):
    assert len(enumerate_trees(arities, n)) == expected


@pytest.mark.parametrize("arities", [(1, 1), (2, 0), (2, 2, 0), (3, 1), (1, 2, 1), (2, 2, 1)])
def test_counts_match_the_slot_factorial(arities):
    # vertex-labelled shapes times leaf labellings collapse to (sum of arities)!
    n = sum(arities) - (len(arities) - 1)
    assert len(enumerate_trees(arities, n)) == factorial(sum(arities))


def test_stabilizer_acts_freely():
    freeness = stabilizer_freeness((2, 2), 3)
    assert freeness.report.ok
    assert (freeness.trees, freeness.stabilizer, freeness.orbits) == (24, 2, 12)


def test_format_and_parse():
    t = parse_tree("v1(v2(1,2),3)")
    assert t.profile() == sig((2, 2), 3)
    assert format_tree(t) == "v1(v2(1,2),3)"
    assert parse_tree("|") == BARE
    assert format_tree(corolla(2, [2, 1])) == "v1(2,1)"
    for text in enumerate_trees((2, 1), 2):
        assert parse_tree(format_tree(text)) == text


@pytest.mark.parametrize("text", ["v1(1,1)", "v1(1", "v2(1)", "v1(v1(1),2)", "x"])
def test_malformed_trees_are_rejected(text):
    with pytest.raises(InputError):
        parse_tree(text)


def test_parse_profile():
    assert parse_profile("2,2->3") == sig((2, 2), 3)
    assert parse_profile("->1") == sig((), 1)
    assert parse_profile("1,a->a") == sig((1, A), A)
    with pytest.raises(InputError):
        parse_profile("2,2")


def test_graft_relabels_through_the_vertex():
    t = parse_tree("v1(v2(1,2),3)")
    assert format_tree(graft_at(t, 1, corolla(2, [2, 1]))) == "v1(v2(2,1),3)"
    assert graft_at(corolla(3), 0, t) == t
    assert graft_at(parse_tree("v1(v2(1),2)"), 1, BARE) == corolla(2)
    assert graft(t, [corolla(2), corolla(2)]) == t
    with pytest.raises(InputError):
        graft_at(t, 0, corolla(3))


def test_sigma_action_renumbers_vertices():
    t = parse_tree("v1(v2(1,2),3)")
    assert format_tree(sigma_action((1, 0), t)) == "v2(v1(1,2),3)"
    assert sigma_action((1, 0), sigma_action((1, 0), t)) == t


def test_tree_operad_laws():
    assert check_operad(tree_operad(max_color=2, arity_bound=2)).ok


def test_pairs_levels():
    assert len(pairs_level(sig((2, A, A), A))) == len(enumerate_trees((2, 0, 0), 0)) == 2
    assert len(pairs_level(sig((1, A), 1))) == 0
    assert check_operad(pairs_operad(max_color=2, arity_bound=2)).ok


def test_evaluate_tree_reads_leaves_in_order(ass3):
    assert evaluate_tree(ass3, parse_tree("v1(v2(1,2),3)"), [(0, 1), (0, 1)]) == (0, 1, 2)
    assert evaluate_tree(ass3, parse_tree("v1(v2(2,1),3)"), [(0, 1), (0, 1)]) == (1, 0, 2)
    assert evaluate_tree(ass3, BARE, []) == (0,)


def test_pairs_round_trip(ass3, z2):
    x = pairs_algebra_assemble(ass3, algebra_from_monoid(ass3, z2), max_color=2, arity_bound=2)
    assert check_algebra(x).ok
    decomposition = pairs_algebra_decompose(x, 2)
    assert decomposition.report.ok
    assert operads_equal(decomposition.operad, ass(2)).ok
    assert algebras_equal(decomposition.algebra, algebra_from_monoid(ass(2), z2)).ok
    assert decomposition.algebra.carriers[ONE] == z2.carrier


def test_embedded_operad_acts_on_constants(ass3):
    x = embed_operad(ass3, max_color=2, arity_bound=2)
    assert check_algebra(x).ok
    assert len(x.carriers[A]) == 1
