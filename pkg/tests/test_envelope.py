from math import comb

import pytest

from src.algebras import free_algebra
from src.basecat import FinSet
from src.collection import sig
from src.envelope import (
    act_on_free,
    algebra_to_module,
    check_env_module,
    check_graded_monoid,
    env_of_free,
    env_to_words,
    graded_isomorphism,
    module_to_algebra,
    modules_dictionary,
    one_hole_words,
)
from src.operads import ONE, ass, com
from src.utils import InputError, InvalidStructure


@pytest.mark.parametrize(
    "operad, generators, max_degree, sizes",
    [
        (ass(5), ["x"], 4, (1, 2, 3, 4, 5)),
        (com(5), ["x"], 4, (1, 1, 1, 1, 1)),
        (ass(3), ["x", "y"], 2, (1, 4, 12)),
    ],
)
def test_envelope_sizes(operad, generators, max_degree, sizes):
    env = env_of_free(operad, generators, max_degree)
    assert env.sizes() == sizes
    assert check_graded_monoid(env).ok


@pytest.mark.parametrize("k", [1, 2, 3])
def test_envelope_closed_forms(k):
    gens = [f"x{i}" for i in range(k)]
    assert env_of_free(ass(3), gens, 2).sizes() == tuple((n + 1) * k ** n for n in range(3))
    assert env_of_free(com(3), gens, 2).sizes() == tuple(comb(n + k - 1, n) for n in range(3))


def test_bound_must_cover_one_more_than_the_degree():
    with pytest.raises(InputError):
        env_of_free(ass(3), ["x"], 3)


def test_ass_envelope_is_one_hole_words():
    env = env_of_free(ass(3), ["x", "y"], 2)
    words = one_hole_words(["x", "y"], 2)
    assert words.sizes() == env.sizes()
    iso = graded_isomorphism(env, words)
    assert iso.report.ok
    assert iso.mapping[env.unit] == ((), ())


def test_words_read_the_hole_position():
    # variable 0 is the hole, placed second
    assert env_to_words(((1, 0), ("x",))) == (("x",), ())
    assert env_to_words(((0, 1), ("x",))) == ((), ("x",))


def test_a_broken_product_is_caught():
    env = env_of_free(ass(3), ["x"], 2)
    x_left, x_right = sorted(env.pieces[1])
    broken = env.with_entry(x_left, x_right, env.unit)
    report = check_graded_monoid(broken)
    assert "degree" in report.laws_failed()
    assert not graded_isomorphism(broken, one_hole_words(["x"], 2)).report.ok


def test_free_algebra_is_a_module_over_its_envelope(ass3, com3):
    for o in (ass3, com3):
        env = env_of_free(o, ["x", "y"], 2)
        free = free_algebra(o, {ONE: ["x", "y"]}, 2)
        assert check_env_module(env, free).ok


def test_filling_the_hole_matches_the_product(ass3):
    free = free_algebra(ass3, {ONE: ["x", "y"]}, 2)
    gx, gy = free.generator(ONE, "x"), free.generator(ONE, "y")
    x_then_hole = ((1, 0), ("x",))
    assert act_on_free(ass3, free, x_then_hole, gy) == free.act(sig([ONE, ONE], ONE), (0, 1), (gx, gy))


def test_trivial_monoid_has_one_module(trivial_monoid):
    dictionary = modules_dictionary(trivial_monoid, ["p", "q"])
    assert len(dictionary.modules) == len(dictionary.algebras) == 1
    assert dictionary.report.ok


def test_z2_modules_and_algebras_agree(z2):
    dictionary = modules_dictionary(z2, ["p", "q"])
    assert len(dictionary.modules) == len(dictionary.algebras) == 2
    assert dictionary.report.ok


def test_module_translation_round_trip(z2):
    carrier = FinSet(["p", "q"])
    swap = {(0, "p"): "p", (0, "q"): "q", (1, "p"): "q", (1, "q"): "p"}
    assert algebra_to_module(module_to_algebra(z2, carrier, swap)) == swap
    with pytest.raises(InvalidStructure):
        module_to_algebra(z2, carrier, {(r, m): "p" for r, m in swap})
