"""Exact arithmetic in the rational group ring of pi = F x F x F.

A free word is a tuple of signed letters: 1 and 2 are the generators a1, a2,
and -1, -2 their inverses.  A product word is a triple of free words, one per
free factor.  Group ring elements map product words to ``Fraction``
coefficients.
"""
from __future__ import annotations

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

FreeWord = tuple
ProductWord = tuple

IDENTITY: ProductWord = ((), (), ())
GENERATORS = ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2))

_LETTER_RANK = {1: 0, -1: 1, 2: 2, -2: 3}
_LETTER_TEXT = {1: "a1", -1: "A1", 2: "a2", -2: "A2"}
_TEXT_LETTER = {v: k for k, v in _LETTER_TEXT.items()}

Scalar = Union[int, Fraction]


def _letter(x) -> int:
    if isinstance(x, tuple):
        if len(x) != 2:
            raise ValueError(f"letter must be (index, exponent), got {x!r}")
        i, e = x
        if i not in (1, 2) or e not in (1, -1):
            raise ValueError(f"invalid letter {x!r}")
        return i * e
    if x not in _LETTER_RANK:
        raise ValueError(f"invalid generator letter {x!r}")
    return int(x)


def reduce_word(letters: Iterable) -> FreeWord:
    """Freely reduce a letter sequence with a stack.

    Letters are either signed ints (``2`` is a2, ``-2`` its inverse) or
    ``(index, exponent)`` pairs.
    """
    out: list[int] = []
    for x in letters:
        l = _letter(x)
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def word_mul(u: FreeWord, v: FreeWord) -> FreeWord:
    # both inputs are already reduced, so cancellation only happens at the seam
    k = 0
    n = min(len(u), len(v))
    while k < n and u[len(u) - 1 - k] == -v[k]:
        k += 1
    if k == 0:
        return u + v
    return u[: len(u) - k] + v[k:]


def word_inverse(w: FreeWord) -> FreeWord:
    return tuple(-l for l in reversed(w))


def pw_mul(g: ProductWord, h: ProductWord) -> ProductWord:
    return (word_mul(g[0], h[0]), word_mul(g[1], h[1]), word_mul(g[2], h[2]))


def pw_inverse(g: ProductWord) -> ProductWord:
    return (word_inverse(g[0]), word_inverse(g[1]), word_inverse(g[2]))


def word_key(w: FreeWord) -> tuple:
    return (len(w), tuple(_LETTER_RANK[l] for l in w))


def pw_key(g: ProductWord) -> tuple:
    """Shortlex key: total length first, then factor 1, 2, 3."""
    return (len(g[0]) + len(g[1]) + len(g[2]), word_key(g[0]), word_key(g[1]), word_key(g[2]))


def word_text(w: FreeWord) -> str:
    return " ".join(_LETTER_TEXT[l] for l in w) if w else "e"


def parse_word(text: str) -> FreeWord:
    text = text.strip()
    if text == "e" or text == "":
        return ()
    letters = []
    for tok in text.split():
        if tok not in _TEXT_LETTER:
            raise ValueError(f"unknown letter {tok!r}")
        letters.append(_TEXT_LETTER[tok])
    w = tuple(letters)
    if reduce_word(w) != w:
        raise ValueError(f"word {text!r} is not freely reduced")
    return w


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")


class GroupRingElement:
    """Finitely supported map from product words to exact rationals.

    ``radius`` is optional metadata recording the ball on which a truncated
    approximation was computed.  It plays no role in arithmetic or equality.
    """

    __slots__ = ("_terms", "radius")

    def __init__(self, terms: Mapping[ProductWord, Scalar] | None = None, radius: int | None = None):
        clean: dict[ProductWord, Fraction] = {}
        if terms:
            for g, c in terms.items():
                c = _frac(c)
                if c:
                    if len(g) != 3:
                        raise ValueError("product words have exactly three factors")
                    clean[g] = c
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "radius", radius)

    def __setattr__(self, name, value):
        raise AttributeError("GroupRingElement is immutable")

    @classmethod
    def _raw(cls, terms: dict, radius=None) -> "GroupRingElement":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "radius", radius)
        return obj

    @property
    def terms(self) -> Mapping[ProductWord, Fraction]:
        return MappingProxyType(self._terms)

    def support(self) -> list[ProductWord]:
        return sorted(self._terms, key=pw_key)

    def coefficient(self, g: ProductWord) -> Fraction:
        return self._terms.get(g, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def length(self) -> int:
        """Largest total word length in the support (-1 for zero)."""
        return max((len(g[0]) + len(g[1]) + len(g[2]) for g in self._terms), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.scalar(other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.scalar(other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        out = dict(self._terms)
        for g, c in other._terms.items():
            s = out.get(g, 0) + c
            if s:
                out[g] = s
            else:
                out.pop(g, None)
        return GroupRingElement._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement._raw({g: -c for g, c in self._terms.items()}, self.radius)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GroupRingElement.scalar(other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if not c:
                return GroupRingElement()
            return GroupRingElement._raw({g: v * c for g, v in self._terms.items()})
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return gr_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def involution(self) -> "GroupRingElement":
        return involution(self)

    def augmentation(self) -> Fraction:
        return augmentation(self)

    def serialize(self) -> str:
        return serialize(self)

    def __repr__(self) -> str:
        return f"GroupRingElement({serialize(self)!r})"

    @staticmethod
    def scalar(c: Scalar) -> "GroupRingElement":
        return GroupRingElement({IDENTITY: c})

    @staticmethod
    def word(g: ProductWord, c: Scalar = 1) -> "GroupRingElement":
        return GroupRingElement({g: c})


def one() -> GroupRingElement:
    return GroupRingElement.scalar(1)


def zero() -> GroupRingElement:
    return GroupRingElement()


def factor_word(s: int, w: FreeWord) -> ProductWord:
    """Place a free word in factor ``s`` (1-based) of a product word."""
    g = [(), (), ()]
    g[s - 1] = w
    return tuple(g)


def gen(s: int, i: int, e: int = 1) -> GroupRingElement:
    """The generator a^s_i (or its inverse when ``e = -1``)."""
    if s not in (1, 2, 3):
        raise ValueError(f"factor index must be 1..3, got {s}")
    return GroupRingElement({factor_word(s, reduce_word([(i, e)])): 1})


def gr_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    out: dict[ProductWord, Fraction] = {}
    yt = list(y._terms.items())
    for g, c in x._terms.items():
        g0, g1, g2 = g
        for h, d in yt:
            k = (word_mul(g0, h[0]), word_mul(g1, h[1]), word_mul(g2, h[2]))
            s = out.get(k, 0) + c * d
            if s:
                out[k] = s
            else:
                del out[k]
    return GroupRingElement._raw(out)


def involution(x: GroupRingElement) -> GroupRingElement:
    return GroupRingElement._raw({pw_inverse(g): c for g, c in x._terms.items()}, x.radius)


def augmentation(x: GroupRingElement) -> Fraction:
    return sum(x._terms.values(), Fraction(0))


def factor_of(x: GroupRingElement) -> int | None:
    """Index of the single factor carrying the support, 0 for scalars, None if mixed."""
    found = 0
    for g in x._terms:
        for s in range(3):
            if g[s]:
                if found and found != s + 1:
                    return None
                found = s + 1
    return found


def serialize(x: GroupRingElement) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for g in x.support():
        parts.append(f"{x._terms[g]}*[{word_text(g[0])}|{word_text(g[1])}|{word_text(g[2])}]")
    return " + ".join(parts)


_TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)\*\[([^|\]]*)\|([^|\]]*)\|([^|\]]*)\]\s*$")


def parse(text: str) -> GroupRingElement:
    text = text.strip()
    if text == "0":
        return GroupRingElement()
    out: dict[ProductWord, Fraction] = {}
    for chunk in text.split(" + "):
        m = _TERM.match(chunk)
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        g = (parse_word(m.group(2)), parse_word(m.group(3)), parse_word(m.group(4)))
        if g in out:
            raise ValueError(f"repeated word in {text!r}")
        out[g] = Fraction(m.group(1))
    return GroupRingElement(out)


# ---------------------------------------------------------------- Fox calculus

Letter6 = tuple  # (factor s, generator i, exponent e)


def reduce_word6(letters: Sequence[Letter6]) -> tuple:
    """Free reduction in the free group on the six generators a^s_i."""
    out: list = []
    for s, i, e in letters:
        if s not in (1, 2, 3) or i not in (1, 2) or e not in (1, -1):
            raise ValueError(f"invalid letter {(s, i, e)!r}")
        if out and out[-1] == (s, i, -e):
            out.pop()
        else:
            out.append((s, i, e))
    return tuple(out)


def project(letters: Sequence[Letter6]) -> ProductWord:
    """Image in pi of a word in the six generators."""
    parts: list[list] = [[], [], []]
    for s, i, e in letters:
        parts[s - 1].append(i * e)
    return tuple(reduce_word(p) for p in parts)


def fox_derivative_free(relator: Sequence[Letter6], generator: tuple) -> dict:
    """Fox derivative in the integral group ring of the free group on six letters.

    Returns a map from reduced six-letter words to integer coefficients.
    """
    out: dict = {}
    s0, i0 = generator
    for k, (s, i, e) in enumerate(relator):
        if (s, i) != (s0, i0):
            continue
        if e == 1:
            w, c = reduce_word6(relator[:k]), 1
        else:
            w, c = reduce_word6(relator[: k + 1]), -1
        out[w] = out.get(w, 0) + c
        if out[w] == 0:
            del out[w]
    return out


def fox_boundary(relator: Sequence[Letter6]) -> list[GroupRingElement]:
    """Boundary coefficients of the 2-cell attached along ``relator``.

    One coefficient per generator, in the order a^1_1, a^1_2, a^2_1, ..., a^3_2,
    with every Fox derivative projected into pi.
    """
    out = []
    for g in GENERATORS:
        terms: dict[ProductWord, Fraction] = {}
        for w, c in fox_derivative_free(relator, g).items():
            p = project(w)
            terms[p] = terms.get(p, 0) + c
        out.append(GroupRingElement(terms))
    return out


def commutator(k: int, i: int, l: int, j: int) -> list[Letter6]:
    """The relator a^k_i a^l_j (a^k_i)^-1 (a^l_j)^-1."""
    return [(k, i, 1), (l, j, 1), (k, i, -1), (l, j, -1)]


# ------------------------------------------------ factored (tensor) elements

_ONE = GroupRingElement({IDENTITY: 1})
_PRODUCTS: dict = {}


def _cached_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    """Product with shortcuts for the identity and a memo for repeated large products."""
    if len(a) == 1 and IDENTITY in a._terms:
        c = a._terms[IDENTITY]
        return b if c == 1 else b * c
    if len(b) == 1 and IDENTITY in b._terms:
        c = b._terms[IDENTITY]
        return a if c == 1 else a * c
    if len(a) * len(b) < 64:
        return gr_mul(a, b)
    # small operands are keyed by value, large ones by identity (kept alive in the memo)
    ka = a if len(a) <= 8 else id(a)
    kb = b if len(b) <= 8 else id(b)
    hit = _PRODUCTS.get((ka, kb))
    if hit is not None and (len(a) <= 8 or hit[0] is a) and (len(b) <= 8 or hit[1] is b):
        return hit[2]
    if len(_PRODUCTS) > 4096:
        _PRODUCTS.clear()
    out = gr_mul(a, b)
    _PRODUCTS[(ka, kb)] = (a, b, out)
    return out


class FactoredElement:
    """Sum of pure tensors c * x1 x2 x3, where x_s is supported in factor s.

    Elements such as products of the truncated kernel elements of each free
    factor have supports that are products of three large balls; keeping
    them factored makes them cheap to induce to quotients.
    """

    __slots__ = ("_terms", "radius")

    def __init__(self, terms: Iterable = (), radius: int | None = None):
        clean = []
        for c, comps in terms:
            c = _frac(c)
            if not c or any(x.is_zero() for x in comps):
                continue
            if len(comps) != 3:
                raise ValueError("pure tensors have three components")
            for s, x in enumerate(comps):
                f = factor_of(x)
                if f not in (0, s + 1):
                    raise ValueError(f"component {s + 1} is not supported in factor {s + 1}")
            clean.append((c, tuple(comps)))
        object.__setattr__(self, "_terms", tuple(clean))
        object.__setattr__(self, "radius", radius)

    def __setattr__(self, name, value):
        raise AttributeError("FactoredElement is immutable")

    @property
    def terms(self) -> tuple:
        return self._terms

    @staticmethod
    def from_element(x: GroupRingElement) -> "FactoredElement":
        f = factor_of(x)
        if f is not None:
            # supported in one factor: a single pure tensor
            comps = [_ONE, _ONE, _ONE]
            comps[(f or 1) - 1] = x
            return FactoredElement([(1, tuple(comps))])
        terms = []
        for g, c in x.terms.items():
            terms.append((c, tuple(GroupRingElement({factor_word(s + 1, g[s]): 1}) for s in range(3))))
        return FactoredElement(terms)

    @staticmethod
    def pure(c: Scalar, x1: GroupRingElement, x2: GroupRingElement, x3: GroupRingElement) -> "FactoredElement":
        return FactoredElement([(c, (x1, x2, x3))])

    def expansion_size(self) -> int:
        return sum(len(a) * len(b) * len(d) for _, (a, b, d) in self._terms)

    def expand(self, limit: int | None = 2_000_000) -> GroupRingElement:
        if limit is not None and self.expansion_size() > limit:
            raise OverflowError(f"expansion would need {self.expansion_size()} products")
        out = GroupRingElement()
        for c, (a, b, d) in self._terms:
            out = out + (a * b * d) * c
        return out

    def is_zero(self, limit: int | None = 2_000_000) -> bool:
        if not self._terms:
            return True
        return self.expand(limit).is_zero()

    def augmentation(self) -> Fraction:
        return sum((c * a.augmentation() * b.augmentation() * d.augmentation() for c, (a, b, d) in self._terms), Fraction(0))

    def involution(self) -> "FactoredElement":
        return FactoredElement([(c, tuple(x.involution() for x in comps)) for c, comps in self._terms], self.radius)

    def __add__(self, other):
        if isinstance(other, GroupRingElement):
            other = FactoredElement.from_element(other)
        if isinstance(other, (int, Fraction)):
            other = FactoredElement.from_element(GroupRingElement.scalar(other))
        if not isinstance(other, FactoredElement):
            return NotImplemented
        return FactoredElement(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return FactoredElement([(-c, comps) for c, comps in self._terms], self.radius)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FactoredElement([(c * other, comps) for c, comps in self._terms])
        if isinstance(other, GroupRingElement):
            other = FactoredElement.from_element(other)
        if not isinstance(other, FactoredElement):
            return NotImplemented
        out = []
        for c, (a1, a2, a3) in self._terms:
            for d, (b1, b2, b3) in other._terms:
                out.append((c * d, (_cached_mul(a1, b1), _cached_mul(a2, b2), _cached_mul(a3, b3))))
        return FactoredElement(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        if isinstance(other, GroupRingElement):
            return FactoredElement.from_element(other) * self
        return NotImplemented

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"FactoredElement({len(self._terms)} pure tensors)"

    def serialize(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for c, comps in self._terms:
            parts.append(f"{c}*<" + " ; ".join(serialize(x) for x in comps) + ">")
        return " ++ ".join(parts)
