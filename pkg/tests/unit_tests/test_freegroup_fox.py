import pytest

from atap.algebra.freegroup_fox import (
    A,
    B,
    GroupRingElt,
    Word,
    build_relator,
    build_w,
    delta_p,
    fox_derivative,
    inverse,
    power,
    relator_derivative_closed,
)
from atap.errors import InvalidParam
from atap.representations.sl2_reps import KnotParams

SIGNED = [-3, -2, -1, 1, 2, 3]


def test_word_reduction():
    assert Word.parse("a a^-1 b") == B
    assert Word.parse("aA").is_identity()
    assert Word.parse("a^2 a^-3") == inverse(A)
    assert Word.parse("bAB a") == Word((("b", 1), ("a", -1), ("b", -1), ("a", 1)))
    assert len(Word.parse("a^3 b^-2")) == 5
    assert str(Word.parse("a^-1 b")) == "a^-1 b"
    assert str(Word.identity()) == "1"


def test_word_unknown_generator():
    with pytest.raises(InvalidParam):
        Word((("c", 1),))


def test_power_and_inverse():
    u = Word.parse("a b")
    assert power(u, -2) == Word.parse("B A B A")
    assert power(u, 0).is_identity()
    assert u * ~u == Word.identity()
    assert (u ** 3).exponent_sum() == 6


def test_group_ring_arithmetic():
    x = GroupRingElt.of(A) + 1
    assert x * (GroupRingElt.of(A) - 1) == GroupRingElt.of("a^2") - 1
    assert (x - x) == 0
    assert GroupRingElt.of(A) - GroupRingElt.of(A) == GroupRingElt.zero()


def test_fox_derivative_basic():
    assert fox_derivative(Word.parse("a^3"), "a") == GroupRingElt({Word.identity(): 1, A: 1, Word.parse("a^2"): 1})
    assert fox_derivative(inverse(A), "a") == -GroupRingElt.of(inverse(A))
    assert fox_derivative(B, "a") == 0
    assert fox_derivative(Word.parse("a b a^-1"), "b") == GroupRingElt.of(A)


@pytest.mark.parametrize("text", ["a b a^-1 b^-1", "b^3 a^-2 b a", "a^-1 b^-1 a^2 b^-1", "a"])
def test_fundamental_formula(text):
    u = Word.parse(text)
    lhs = fox_derivative(u, "a") * (GroupRingElt.of(A) - 1) + fox_derivative(u, "b") * (GroupRingElt.of(B) - 1)
    assert lhs == GroupRingElt.of(u) - 1


@pytest.mark.parametrize("p", range(-4, 5))
def test_delta_p_telescopes(p):
    u = Word.parse("a b^-1")
    assert (1 - GroupRingElt.of(u)) * delta_p(u, p) == 1 - GroupRingElt.of(power(u, p + 1))


def test_delta_p_values():
    u = Word.parse("b a^-1")
    assert delta_p(u, 0) == 1
    assert delta_p(u, -1) == 0
    assert delta_p(u, -3) == -(GroupRingElt.of(power(u, -1)) + GroupRingElt.of(power(u, -2)))
    assert delta_p(Word.identity(), 2) == 3


def test_build_w():
    assert build_w(1) == Word.parse("b a^-1 b^-1 a")
    assert build_w(-1) == Word.parse("a b^-1 a^-1 b")
    assert build_w(2).exponent_sum() == 0
    with pytest.raises(InvalidParam):
        build_w(0)


def test_build_relator():
    r = build_relator(KnotParams(1, 1))
    assert r == Word.parse("b a^-1 b^-1 a  a  a^-1 b a b^-1  b^-1")
    assert r.exponent_sum() == 0


@pytest.mark.parametrize("m", SIGNED)
@pytest.mark.parametrize("n", SIGNED)
def test_relator_derivative_closed_form(m, n):
    params = KnotParams(m, n)
    assert fox_derivative(build_relator(params), "a") == relator_derivative_closed(params)
