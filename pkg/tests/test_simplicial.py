import itertools
from math import comb

import pytest

from src.algebras import algebra_from_monoid, bar_resolution
from src.basecat import FinSet
from src.simplicial import (
    AugmentedSimplicialSet,
    FinSimplicialSet,
    check_bisimplicial,
    check_simplicial,
    coend_realization,
    constant_augmented,
    diag,
    diag_coend_check,
    diag_object,
    double_coend,
    external_product,
    horizontally_constant,
    monotone_maps,
    point,
    product,
    pull_back,
    split_colimit_check,
    standard_simplex,
    vertically_discrete,
)
from src.utils import InputError, TruncationInsufficient


def _chains(a: int, b: int, length: int) -> int:
    """Strict chains in the poset [a] x [b]: the non-degenerate simplices of the nerve."""
    grid = list(itertools.product(range(a + 1), range(b + 1)))

    def below(u, v):
        return u != v and u[0] <= v[0] and u[1] <= v[1]

    return sum(
        1 for chain in itertools.combinations(sorted(grid), length)
        if all(below(chain[k], chain[k + 1]) for k in range(length - 1))
    )


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_standard_simplex_counts(k):
    assert standard_simplex(k).counts() == tuple(comb(k + 1, m + 1) for m in range(k + 1))


def test_explicit_levels_are_monotone_maps():
    explicit = standard_simplex(1).to_explicit(3)
    assert explicit.sizes() == tuple(len(monotone_maps(n, 1)) for n in range(4)) == (2, 3, 4, 5)
    assert check_simplicial(explicit).ok


def test_faces_of_degenerate_simplices():
    s = standard_simplex(1)
    assert s.face(0, ((0, 0, 1), (0, 1))) == ((0, 1), (0, 1))
    assert s.face(2, ((0, 0, 1), (0, 1))) == ((0, 0), (0,))
    assert s.degeneracy(1, ((0, 1), (0, 1))) == ((0, 1, 1), (0, 1))


def test_pull_back_along_a_monotone_map():
    s = standard_simplex(2)
    top = ((0, 1, 2), (0, 1, 2))
    pulled = pull_back(top, (0, 0, 2), 2, lambda n, i, x: s.face(i, x), lambda n, j, x: s.degeneracy(j, x))
    assert pulled == ((0, 0, 1), (0, 2))


def test_square_counts():
    square = product(standard_simplex(1), standard_simplex(1), 3)
    assert square.counts(3) == (4, 5, 2, 0)
    assert square.decomposition.ok


def test_prism_counts_match_the_nerve_of_the_grid():
    prism = product(standard_simplex(2), standard_simplex(1), 4)
    expected = tuple(_chains(2, 1, m + 1) for m in range(5))
    assert expected == (6, 12, 10, 3, 0)
    assert prism.counts(4) == expected
    # Euler characteristic of a contractible space
    assert sum((-1) ** m * c for m, c in enumerate(expected)) == 1


def test_from_explicit_recovers_a_skeletal_set():
    s = standard_simplex(2)
    again = FinSimplicialSet.from_explicit(s.to_explicit(3))
    assert again.counts(3) == (3, 3, 1, 0)
    assert again.decomposition.ok


def test_bisimplicial_identities():
    square = external_product(standard_simplex(1), standard_simplex(1), (2, 2))
    assert check_bisimplicial(square).ok
    assert check_bisimplicial(horizontally_constant(standard_simplex(1).to_explicit(2), (2, 2))).ok


def test_diagonal_of_an_external_product_is_the_product():
    square = external_product(standard_simplex(1), standard_simplex(1), (2, 2))
    assert diag(square).counts(2) == (4, 5, 2)


def test_diagonal_needs_square_caps():
    with pytest.raises(InputError):
        diag_object(external_product(point(), standard_simplex(1), (1, 2)))


def test_diag_coend_check_on_the_square():
    square = external_product(standard_simplex(1), standard_simplex(1), (2, 2))
    result = diag_coend_check(square, 2)
    assert result.report.ok
    assert result.counts["left"] == result.counts["right"] == result.counts["diagonal"] == (4, 5, 2)
    assert all(None not in level.values() for level in result.bijection.values())


def test_coends_need_large_enough_caps():
    square = external_product(standard_simplex(1), standard_simplex(1), (1, 1))
    with pytest.raises(TruncationInsufficient):
        diag_coend_check(square, 2)
    with pytest.raises(TruncationInsufficient):
        double_coend(square, 2)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_realizing_a_simplex_gives_it_back(k):
    explicit = standard_simplex(k).to_explicit(k + 1)
    realized = coend_realization(vertically_discrete(explicit, (k + 1, k + 1)), k + 1)
    assert realized.counts(k + 1) == standard_simplex(k).counts(k + 1)


def test_realizing_a_discrete_object():
    points = FinSimplicialSet({0: FinSet(["p", "q"])}, {}, name="two points").to_explicit(2)
    realized = coend_realization(vertically_discrete(points, (2, 2)), 2)
    assert realized.counts(2) == (2, 0, 0)


def test_constant_augmentation_splits():
    assert split_colimit_check(constant_augmented(FinSet([0, 1, 2]), 3)).ok


def test_bar_resolution_splits_after_forgetting(com3, z2):
    augmented = bar_resolution(algebra_from_monoid(com3, z2), 1, 2).forget()
    assert check_simplicial(augmented.obj).ok
    assert split_colimit_check(augmented).ok
    assert augmented.base == z2.carrier


def test_a_missing_extra_degeneracy_fails():
    augmented = constant_augmented(FinSet([0, 1]), 2)
    extra = {n: h for n, h in augmented.extra.items() if n != 1}
    report = split_colimit_check(augmented._replace(extra=extra))
    assert "extra_degeneracy" in report.laws_failed()


def test_split_check_needs_the_extra_degeneracies():
    augmented = constant_augmented(FinSet([0, 1]), 2)
    with pytest.raises(InputError):
        split_colimit_check(AugmentedSimplicialSet(augmented.obj, augmented.base, augmented.augmentation))


def test_constant_objects_with_shared_atoms():
    # every level holds the same atoms
    constant = constant_augmented(FinSet(["p", "q"]), 2).obj
    assert check_bisimplicial(vertically_discrete(constant, (2, 2))).ok
    assert check_bisimplicial(horizontally_constant(constant, (2, 2))).ok
    realized = coend_realization(vertically_discrete(constant, (2, 2)), 2)
    assert realized.counts(2) == (2, 0, 0)
