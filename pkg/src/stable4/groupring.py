"""Exact sparse arithmetic in Z[pi] with the oriented involution g -> g^-1.

Elements are finite integer combinations of group elements of one family,
stored as a map from canonical normal forms to nonzero coefficients.
Coefficients are Python ints, so Fox derivatives of long relators cannot
overflow.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import DomainError, InputError
from .words import GroupFamily, parse_word


class RingElem:
    """Sparse element of the integral group ring of a family group."""

    __slots__ = ("family", "_terms")

    def __init__(self, family: GroupFamily, terms: Mapping | Iterable | None = None):
        self.family = family
        data: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for g, c in items:
                if not isinstance(c, int):
                    raise DomainError(f"coefficient {c!r} is not an integer")
                if c:
                    data[g] = data.get(g, 0) + c
                    if not data[g]:
                        del data[g]
        self._terms = data

    # -- constructors

    @classmethod
    def zero(cls, family: GroupFamily) -> "RingElem":
        return cls(family)

    @classmethod
    def integer(cls, family: GroupFamily, n: int) -> "RingElem":
        return cls(family, {family.identity(): n})

    @classmethod
    def one(cls, family: GroupFamily) -> "RingElem":
        return cls.integer(family, 1)

    @classmethod
    def group(cls, family: GroupFamily, element, coeff: int = 1) -> "RingElem":
        return cls(family, {element: coeff})

    # -- accessors

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, g) -> int:
        return self._terms.get(g, 0)

    def support(self):
        return set(self._terms)

    def items(self):
        """Terms sorted by the family's canonical element order."""
        return sorted(self._terms.items(), key=lambda kv: self.family.sort_key(kv[0]))

    def __len__(self) -> int:
        return len(self._terms)

    # -- ring structure

    def _require_same_family(self, other: "RingElem") -> None:
        if self.family != other.family:
            raise DomainError(
                f"family mismatch: {self.family!r} vs {other.family!r}"
            )

    def __add__(self, other: "RingElem") -> "RingElem":
        self._require_same_family(other)
        data = dict(self._terms)
        for g, c in other._terms.items():
            data[g] = data.get(g, 0) + c
        return RingElem(self.family, data)

    def __neg__(self) -> "RingElem":
        return RingElem(self.family, {g: -c for g, c in self._terms.items()})

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElem(
                self.family, {g: c * other for g, c in self._terms.items()}
            )
        self._require_same_family(other)
        fam = self.family
        data: dict = {}
        for g, c in self._terms.items():
            for h, d in other._terms.items():
                k = fam.multiply(g, h)
                data[k] = data.get(k, 0) + c * d
        return RingElem(fam, data)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def conjugate(self) -> "RingElem":
        """The involution: sum c_g g  ->  sum c_g g^-1."""
        fam = self.family
        return RingElem(fam, {fam.invert(g): c for g, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.family == other.family and self._terms == other._terms

    def __hash__(self):
        return hash((self.family, frozenset(self._terms.items())))

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for g, c in self.items():
            s = self.family.element_str(g)
            body = str(abs(c)) if s == "1" else (s if abs(c) == 1 else f"{abs(c)}*{s}")
            parts.append(("- " if c < 0 else ("+ " if parts else "")) + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"<RingElem {self.to_text()}>"


def involution(x: RingElem) -> RingElem:
    return x.conjugate()


def augmentation(x: RingElem) -> int:
    """Coefficient sum; x lies in the augmentation ideal iff this is 0."""
    return sum(x._terms.values())


def phi(x: RingElem) -> int:
    """Augmentation reduced modulo 2."""
    return augmentation(x) % 2


def in_image_one_plus_T(x: RingElem) -> bool:
    """Decide whether x = p + conj(p) for some p in the group ring.

    Closed-form criterion: the coefficients must be symmetric under g -> g^-1
    and even at every self-inverse element.  Sufficiency: a pair {g, g^-1}
    with g != g^-1 is hit by taking p_g := x_g and p at g^-1 zero, while a
    self-inverse g needs p_g = x_g / 2; necessity is immediate from
    (p + conj p)_g = p_g + p_{g^-1}.  Non-symmetric inputs simply return
    False.
    """
    fam = x.family
    for g, c in x._terms.items():
        gi = fam.invert(g)
        if x.coefficient(gi) != c:
            return False
        if g == gi and c % 2:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON format: a list of {"coeff": int, "word": word-string} terms


def ring_elem_to_json(x: RingElem):
    return [
        {"coeff": c, "word": x.family.element_str(g)}
        for g, c in x.items()
    ]


def ring_elem_from_json(obj, family: GroupFamily) -> RingElem:
    if not isinstance(obj, list):
        raise InputError("ring element JSON must be a list of terms")
    terms: list = []
    for item in obj:
        try:
            coeff = int(item["coeff"])
            word_text = item["word"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad ring element term: {exc}") from None
        w = parse_word(word_text, family.generators)
        terms.append((family.reduce_word(w), coeff))
    return RingElem(family, terms)
