"""Free group on {a, b}, its integral group ring, and Fox free derivatives.

Words are stored as freely reduced syllable tuples ``((generator, exponent), ...)``
and are hashable, so group-ring elements are plain ``{Word: int}`` maps.
Equality in this module is exact.
"""
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

from atap.errors import InvalidParam

GENERATORS = ("a", "b")

Syllable = Tuple[str, int]


def _reduce(syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    stack = []
    for gen, exp in syllables:
        if gen not in GENERATORS:
            raise InvalidParam(f"unknown generator '{gen}'")
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            merged = stack[-1][1] + exp
            stack.pop()
            if merged != 0:
                stack.append((gen, merged))
        else:
            stack.append((gen, exp))
    return tuple(stack)


@dataclass(frozen=True, order=True)
class Word:
    syllables: Tuple[Syllable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "syllables", _reduce(self.syllables))

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    @classmethod
    def generator(cls, gen: str, exp: int = 1) -> "Word":
        return cls(((gen, exp),))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Read words like ``"b a^-1 b^-1 a"``, ``"ba^-1"`` or ``"bAB a"``.

        An upper-case letter is the inverse generator.
        """
        syllables = []
        for letter, exp in re.findall(r"([abAB])(?:\^(-?\d+))?", text):
            power = int(exp) if exp else 1
            if letter.isupper():
                power = -power
            syllables.append((letter.lower(), power))
        return cls(tuple(syllables))

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return inverse(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def __len__(self) -> int:
        return sum(abs(exp) for _, exp in self.syllables)

    def letters(self) -> Iterator[Syllable]:
        """Single letters (generator, +1 or -1) from left to right."""
        for gen, exp in self.syllables:
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, step

    def exponent_sum(self) -> int:
        return sum(exp for _, exp in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __str__(self) -> str:
        if self.is_identity():
            return "1"
        return " ".join(gen if exp == 1 else f"{gen}^{exp}" for gen, exp in self.syllables)


def concat(u: Word, v: Word) -> Word:
    return Word(u.syllables + v.syllables)


def inverse(u: Word) -> Word:
    return Word(tuple((gen, -exp) for gen, exp in reversed(u.syllables)))


def power(u: Word, k: int) -> Word:
    if k < 0:
        return power(inverse(u), -k)
    return Word(u.syllables * k)


A = Word.generator("a")
B = Word.generator("b")


@dataclass(frozen=True)
class GroupRingElt:
    """Finite integer combination of reduced words; zero coefficients are dropped."""
    terms: Mapping[Word, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {w: c for w, c in self.terms.items() if c != 0})

    @classmethod
    def zero(cls) -> "GroupRingElt":
        return cls({})

    @classmethod
    def one(cls) -> "GroupRingElt":
        return cls({Word.identity(): 1})

    @classmethod
    def of(cls, word: Union[Word, str], coeff: int = 1) -> "GroupRingElt":
        if isinstance(word, str):
            word = Word.parse(word)
        return cls({word: coeff})

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = GroupRingElt.one() * other if other else GroupRingElt.zero()
        if isinstance(other, Word):
            other = GroupRingElt.of(other)
        if not isinstance(other, GroupRingElt):
            return NotImplemented
        return self.terms == other.terms

    def __iter__(self) -> Iterator[Tuple[Word, int]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __neg__(self) -> "GroupRingElt":
        return GroupRingElt({w: -c for w, c in self.terms.items()})

    def __add__(self, other) -> "GroupRingElt":
        other = _as_elt(other)
        total: Dict[Word, int] = defaultdict(int, self.terms)
        for w, c in other.terms.items():
            total[w] += c
        return GroupRingElt(total)

    __radd__ = __add__

    def __sub__(self, other) -> "GroupRingElt":
        return self + (-_as_elt(other))

    def __rsub__(self, other) -> "GroupRingElt":
        return _as_elt(other) - self

    def __mul__(self, other) -> "GroupRingElt":
        if isinstance(other, int):
            return GroupRingElt({w: c * other for w, c in self.terms.items()})
        other = _as_elt(other)
        product: Dict[Word, int] = defaultdict(int)
        for u, cu in self.terms.items():
            for v, cv in other.terms.items():
                product[u * v] += cu * cv
        return GroupRingElt(product)

    def __rmul__(self, other) -> "GroupRingElt":
        if isinstance(other, int):
            return self * other
        return _as_elt(other) * self

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self:
            parts.append(f"{'+' if c > 0 else '-'} {'' if abs(c) == 1 else abs(c)}{w}")
        return " ".join(parts).lstrip("+ ")


def _as_elt(value) -> GroupRingElt:
    if isinstance(value, GroupRingElt):
        return value
    if isinstance(value, Word):
        return GroupRingElt.of(value)
    if isinstance(value, int):
        return GroupRingElt({Word.identity(): value})
    raise TypeError(f"cannot use {type(value).__name__} as a group-ring element")


def fox_derivative(u: Word, g: str) -> GroupRingElt:
    """The Fox derivative d u / d g, with d(uv) = du + u dv."""
    if g not in GENERATORS:
        raise InvalidParam(f"unknown generator '{g}'")
    terms: Dict[Word, int] = defaultdict(int)
    prefix = Word.identity()
    for gen, step in u.letters():
        letter = Word.generator(gen, step)
        if gen == g:
            if step > 0:
                terms[prefix] += 1
            else:
                terms[prefix * letter] -= 1
        prefix = prefix * letter
    return GroupRingElt(terms)


def delta_p(u: Word, p: int) -> GroupRingElt:
    """1 + u + ... + u^p, extended to all p by (1 - u) delta_p(u) = 1 - u^(p+1)."""
    if u.is_identity():
        return GroupRingElt.one() * (p + 1)
    if p >= 0:
        return GroupRingElt({power(u, i): 1 for i in range(p + 1)})
    return -GroupRingElt({power(u, i): 1 for i in range(p + 1, 0)})


def build_w(m: int) -> Word:
    """w = (b a^-1)^m (b^-1 a)^m."""
    if m == 0:
        raise InvalidParam("w is defined for m != 0 only")
    return power(Word.parse("b a^-1"), m) * power(Word.parse("b^-1 a"), m)


def _knot_indices(params) -> Tuple[int, int]:
    m, n = params.m, params.n
    if m == 0 or n == 0:
        raise InvalidParam(f"J(2m,2n) needs mn != 0, got m={m}, n={n}")
    return m, n


def build_relator(params) -> Word:
    """r = w^n a w^-n b^-1, the relator of <a, b | w^n a = b w^n>."""
    m, n = _knot_indices(params)
    w_n = power(build_w(m), n)
    return w_n * A * inverse(w_n) * inverse(B)


def relator_derivative_closed(params) -> GroupRingElt:
    """d r / d a = w^n [1 + (1-a) delta_{n-1}(w^-1) (a^-1 b)^m (b^-1 - 1) delta_{m-1}(a b^-1)]."""
    m, n = _knot_indices(params)
    w = build_w(m)
    inner = (
        (1 - GroupRingElt.of(A))
        * delta_p(inverse(w), n - 1)
        * GroupRingElt.of(power(Word.parse("a^-1 b"), m))
        * (GroupRingElt.of(inverse(B)) - 1)
        * delta_p(Word.parse("a b^-1"), m - 1)
    )
    return GroupRingElt.of(power(w, n)) * (1 + inner)
