"""Hermitian forms over the group ring and their parity and signature.

A form on Ipi^eps + Zpi^k is stored through its unique extension to a
hermitian matrix over Zpi (the pairing on the augmentation ideal extends
uniquely to the whole group ring, and restricting the first slot recovers
it).  At most one augmentation-ideal summand is supported, which matches
every module shape that arises here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, InputError
from .groupring import (
    RingElem,
    augmentation,
    in_image_one_plus_T,
    ring_elem_from_json,
    ring_elem_to_json,
)
from .words import GroupFamily, family_from_json, family_to_json


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class RingMatrix:
    """Square matrix over one family's group ring."""

    __slots__ = ("family", "entries")

    def __init__(self, family: GroupFamily, entries: Sequence[Sequence[RingElem]]):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise DomainError("matrix must be square")
            for x in row:
                if not isinstance(x, RingElem) or x.family != family:
                    raise DomainError("entries must be ring elements of the family")
        self.family = family
        self.entries = rows

    @classmethod
    def from_int_rows(cls, family: GroupFamily, rows: Sequence[Sequence[int]]):
        return cls(
            family,
            [[RingElem.integer(family, v) for v in row] for row in rows],
        )

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> RingElem:
        return self.entries[i][j]

    def adjoint(self) -> "RingMatrix":
        """Conjugate transpose: entry (i, j) becomes conj(entry (j, i))."""
        n = self.size
        return RingMatrix(
            self.family,
            [[self.entries[j][i].conjugate() for j in range(n)] for i in range(n)],
        )

    def is_hermitian(self) -> bool:
        return self == self.adjoint()

    def direct_sum(self, other: "RingMatrix") -> "RingMatrix":
        if self.family != other.family:
            raise DomainError("family mismatch in direct sum")
        zero = RingElem.zero(self.family)
        n, m = self.size, other.size
        rows = []
        for i in range(n):
            rows.append(list(self.entries[i]) + [zero] * m)
        for i in range(m):
            rows.append([zero] * n + list(other.entries[i]))
        return RingMatrix(self.family, rows)

    def negate(self) -> "RingMatrix":
        return RingMatrix(self.family, [[-x for x in row] for row in self.entries])

    def augmentation_rows(self) -> list[list[int]]:
        """Apply the augmentation entrywise; the integer shadow of the form."""
        return [[augmentation(x) for x in row] for row in self.entries]

    def integer_rows(self) -> list[list[int]]:
        """Entries as plain integers; requires support inside the identity."""
        identity = self.family.identity()
        out = []
        for row in self.entries:
            ints = []
            for x in row:
                if any(g != identity for g in x.support()):
                    raise DomainError("matrix entry has non-identity support")
                ints.append(x.coefficient(identity))
            out.append(ints)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.family == other.family and self.entries == other.entries

    def __repr__(self) -> str:
        rows = "; ".join(
            ", ".join(x.to_text() for x in row) for row in self.entries
        )
        return f"<RingMatrix [{rows}]>"


def adjoint(m: RingMatrix) -> RingMatrix:
    return m.adjoint()


def is_hermitian(m: RingMatrix) -> bool:
    return m.is_hermitian()


@dataclass(frozen=True)
class AugmentedForm:
    """Hermitian form on Ipi^epsilon + Zpi^(size - epsilon).

    epsilon is 1 when the leading summand is the augmentation ideal; the
    stored matrix is the unique extension of the form to free modules.
    """

    epsilon: int
    matrix: RingMatrix

    def __post_init__(self) -> None:
        if self.epsilon not in (0, 1):
            raise DomainError("epsilon must be 0 or 1")
        if self.matrix.size < self.epsilon:
            raise DomainError("matrix too small for the Ipi summand")
        if not self.matrix.is_hermitian():
            raise DomainError("matrix is not hermitian")

    @property
    def family(self) -> GroupFamily:
        return self.matrix.family

    @property
    def n_free(self) -> int:
        return self.matrix.size - self.epsilon


def direct_sum(a: AugmentedForm, b: AugmentedForm) -> AugmentedForm:
    """Block sum; the operand carrying the Ipi summand ends up leading."""
    if a.epsilon and b.epsilon:
        raise DomainError("at most one Ipi summand per form")
    if b.epsilon:
        a, b = b, a
    return AugmentedForm(a.epsilon, a.matrix.direct_sum(b.matrix))


def hyperbolic_matrix(family: GroupFamily) -> RingMatrix:
    return RingMatrix.from_int_rows(family, [[0, 1], [1, 0]])


def stabilize_hyperbolic(a: AugmentedForm, k: int) -> AugmentedForm:
    """Append k hyperbolic planes; this is what summing S^2 x S^2's does."""
    if k < 0:
        raise DomainError("stabilization count must be nonnegative")
    m = a.matrix
    for _ in range(k):
        m = m.direct_sum(hyperbolic_matrix(a.family))
    return AugmentedForm(a.epsilon, m)


def zero_form(family: GroupFamily, rank: int = 0) -> AugmentedForm:
    zero = RingElem.zero(family)
    return AugmentedForm(0, RingMatrix(family, [[zero] * rank for _ in range(rank)]))


def restrict_to_Ipi(a: AugmentedForm) -> RingElem:
    """The ring element whose right-multiplication gives the Ipi pairing.

    The pairing on the ideal is (beta, beta') -> beta * alpha * conj(beta')
    where alpha is the corner entry of the unique extension.
    """
    if a.epsilon != 1:
        raise DomainError("form has no Ipi summand")
    return a.matrix.entry(0, 0)


def parity(a: AugmentedForm) -> Parity:
    """Even/odd parity of a form that admits a quadratic refinement.

    With an Ipi summand present the parity is decided by its corner alone:
    the form is even iff the corner element is of the shape p + conj(p).  On
    a purely free module the form is even iff every diagonal entry is; the
    witness q copies the strict upper triangle and halves the diagonal.
    """
    if a.epsilon == 1:
        corner_even = in_image_one_plus_T(restrict_to_Ipi(a))
        return Parity.EVEN if corner_even else Parity.ODD
    for i in range(a.matrix.size):
        if not in_image_one_plus_T(a.matrix.entry(i, i)):
            return Parity.ODD
    return Parity.EVEN


# ---------------------------------------------------------------------------
# Integer signatures, exactly


def ldlt_signature(rows: Sequence[Sequence[int]]) -> int:
    """Signature of a symmetric rational matrix by exact pivoting.

    Symmetric Gaussian elimination over Fraction: a nonzero diagonal pivot
    contributes its sign; if the active diagonal vanishes entirely, a 2x2
    off-diagonal pivot block [[0,b],[b,0]] contributes zero and is
    eliminated via its Schur complement.  No floating point, no tolerances.
    """
    n = len(rows)
    s = [[Fraction(v) for v in row] for row in rows]
    for i in range(n):
        if len(rows[i]) != n:
            raise DomainError("matrix must be square")
        for j in range(n):
            if s[i][j] != s[j][i]:
                raise DomainError("matrix must be symmetric")
    active = list(range(n))
    signature = 0
    while active:
        pivot = max(
            (i for i in active if s[i][i]),
            key=lambda i: abs(s[i][i]),
            default=None,
        )
        if pivot is not None:
            d = s[pivot][pivot]
            signature += 1 if d > 0 else -1
            active.remove(pivot)
            for r in active:
                if not s[r][pivot]:
                    continue
                factor = s[r][pivot] / d
                for c in active:
                    s[r][c] -= factor * s[pivot][c]
            for r in active:
                s[r][pivot] = s[pivot][r] = Fraction(0)
            continue
        block = next(
            (
                (p, q)
                for p in active
                for q in active
                if p < q and s[p][q]
            ),
            None,
        )
        if block is None:
            break  # remaining block is zero: degenerate part, signature 0
        p, q = block
        b = s[p][q]
        active.remove(p)
        active.remove(q)
        for r in active:
            for c in active:
                s[r][c] -= (s[r][p] * s[q][c] + s[r][q] * s[p][c]) / b
    return signature


def signature_int(a: AugmentedForm | RingMatrix) -> int:
    """Signature of an integer form (all entries supported on the identity)."""
    matrix = a.matrix if isinstance(a, AugmentedForm) else a
    return ldlt_signature(matrix.integer_rows())


def augmentation_signature(a: AugmentedForm) -> int:
    """Signature of the integer shadow obtained by augmenting entrywise."""
    return ldlt_signature(a.matrix.augmentation_rows())


_E8_CHAIN = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]


def e8_block(family: GroupFamily) -> RingMatrix:
    """The rank-8 even unimodular positive definite form, E8.

    Cartan-matrix convention: 2 on the diagonal, -1 on the edges of the E8
    diagram (a chain of seven nodes with the eighth attached to the fifth).
    """
    rows = [[0] * 8 for _ in range(8)]
    for i in range(8):
        rows[i][i] = 2
    for i, j in _E8_CHAIN:
        rows[i][j] = rows[j][i] = -1
    return RingMatrix.from_int_rows(family, rows)


def identity_block(family: GroupFamily, size: int, sign: int = 1) -> RingMatrix:
    rows = [[sign if i == j else 0 for j in range(size)] for i in range(size)]
    return RingMatrix.from_int_rows(family, rows)


# ---------------------------------------------------------------------------
# JSON format: {"epsilon": 0|1, "family": tag, "entries": row-major terms}


def form_to_json(a: AugmentedForm):
    n = a.matrix.size
    return {
        "epsilon": a.epsilon,
        "family": family_to_json(a.family),
        "size": n,
        "entries": [
            ring_elem_to_json(a.matrix.entry(i, j))
            for i in range(n)
            for j in range(n)
        ],
    }


def form_from_json(obj) -> AugmentedForm:
    """Load a form; refuses non-hermitian input."""
    try:
        epsilon = int(obj["epsilon"])
        family = family_from_json(obj["family"])
        flat = list(obj["entries"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad form JSON: {exc}") from None
    n = obj.get("size")
    if n is None:
        n = int(round(len(flat) ** 0.5))
    if n * n != len(flat):
        raise InputError("entry list length is not a perfect square")
    entries = [
        [ring_elem_from_json(flat[i * n + j], family) for j in range(n)]
        for i in range(n)
    ]
    return AugmentedForm(epsilon, RingMatrix(family, entries))
