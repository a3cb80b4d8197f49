"""Model intersection-form data for the classification.

Builds the invariant package of a 4-manifold (its w-type, signature,
equivariant intersection form on Ipi + free, and -- when defined -- the
order-one intersection class in H_2(Bpi; Z/2)) for the standard models:

* ``model_M_sigma``      -- surgery on X x S^1; extension matrix [[s,1],[1,0]].
* ``model_P``            -- surgery on a doubled twisted model; the even
                            representatives, with a Fox-derivative block
                            controlled by a homomorphism pi -> Z/2.
* ``model_N_almost_spin``-- the null-bordant circle-bundle surgery, hyperbolic.
* ``realize_form``       -- the complete realization list per w-type.

The H_2 coordinates used throughout identify H_2(Bpi;Z/2) with Hom(pi,Z/2):
for Z^3 the coordinates are the generator values (g1, g2, g3); for the Nil
families they are (x, y) when z is odd and (x, y, a) when z is even, the
central/torsion coordinate last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DomainError, InputError
from .f2 import F2Vec
from .forms import (
    AugmentedForm,
    Parity,
    RingMatrix,
    e8_block,
    form_from_json,
    form_to_json,
    hyperbolic_matrix,
    identity_block,
    parity,
)
from .groupring import RingElem
from .words import (
    GroupFamily,
    NilFamily,
    Presentation,
    ZnFamily,
    fox_derivative,
    parse_word,
)


class _Infinity:
    """The totally non-spin w-type."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "infinity"


INFINITY = _Infinity()


@dataclass(frozen=True)
class HAN1:
    """Hermitian augmented normal 1-type: (family, w, signature, form, tau).

    ``w`` is an element of H^2(Bpi;Z/2) (zero meaning spin) or INFINITY for
    totally non-spin.  ``tau`` is present only when the form is even and the
    model provenance pins it down; it is always absent for odd forms.
    ``spin_bordism`` records, for the spin surgery models, the bordism
    element (signature, phi, eps) they were built to represent.
    """

    w: object
    signature: int
    form: AugmentedForm
    tau: F2Vec | None = None
    spin_bordism: tuple[int, F2Vec, int] | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        if self.w is not INFINITY:
            if not isinstance(self.w, F2Vec):
                raise DomainError("w must be an F2 vector or INFINITY")
            if self.signature % 8:
                raise DomainError(
                    "signature of a manifold with spin universal cover "
                    "must be divisible by 8"
                )
            if self.tau is not None and self.tau.dim != self.w.dim:
                raise DomainError("tau and w dimensions differ")
            if self.tau is not None and parity(self.form) is Parity.ODD:
                raise DomainError("odd forms carry no tau class")
        elif self.tau is not None:
            raise DomainError("totally non-spin types carry no tau class")

    @property
    def family(self) -> GroupFamily:
        return self.form.family


# ---------------------------------------------------------------------------
# H_2 coordinates for the built-in families


def h2_dimension(family: GroupFamily) -> int:
    """dim H_2(Bpi; Z/2) for the built-in aspherical families."""
    if isinstance(family, ZnFamily) and family.n == 3:
        return 3
    if isinstance(family, NilFamily):
        return 2 if family.z % 2 else 3
    raise DomainError(f"no H_2 data for family {family!r}")


def hom_bits_to_h2(family: GroupFamily, bits: Sequence[int]) -> F2Vec:
    """Coordinates of a homomorphism pi -> Z/2 given on the generators."""
    if len(bits) != family.rank or any(b not in (0, 1) for b in bits):
        raise DomainError("need one bit per generator")
    if isinstance(family, ZnFamily) and family.n == 3:
        coords = tuple(bits)
    elif isinstance(family, NilFamily):
        a, x, y = bits
        if family.z % 2:
            if a:
                raise DomainError(
                    "gamma(a) must vanish: a has odd order in H_1 mod 2"
                )
            coords = (x, y)
        else:
            coords = (x, y, a)
    else:
        raise DomainError(f"no H_2 data for family {family!r}")
    return F2Vec(len(coords), sum(b << i for i, b in enumerate(coords)))


def h2_to_hom_bits(family: GroupFamily, v: F2Vec) -> tuple[int, ...]:
    """Inverse of hom_bits_to_h2, in generator order."""
    if v.dim != h2_dimension(family):
        raise DomainError("H_2 vector has the wrong dimension")
    if isinstance(family, ZnFamily) and family.n == 3:
        return v.coords()
    if isinstance(family, NilFamily):
        if family.z % 2:
            return (0, v.bit(0), v.bit(1))
        return (v.bit(2), v.bit(0), v.bit(1))
    raise DomainError(f"no H_2 data for family {family!r}")


def builtin_presentation(family: GroupFamily) -> Presentation:
    """The standard square presentation used by the surgery models."""
    if isinstance(family, ZnFamily) and family.n == 3:
        gens = family.generators
        relators = tuple(
            parse_word(f"{gens[i]} {gens[j]} {gens[i]}^-1 {gens[j]}^-1", gens)
            for i, j in itertools.combinations(range(3), 2)
        )
        return Presentation(gens, relators)
    if isinstance(family, NilFamily):
        gens = family.generators
        texts = (
            "x a x^-1 a^-1",
            "y a y^-1 a^-1",
            f"x y x^-1 y^-1 a^-{family.z}",
        )
        return Presentation(gens, tuple(parse_word(t, gens) for t in texts))
    raise DomainError(f"no built-in presentation for family {family!r}")


def fox_jacobian(pres: Presentation, family: GroupFamily) -> list[list[RingElem]]:
    """Matrix of Fox derivatives D_k R_i (rows: relators, columns: gens)."""
    if tuple(pres.generators) != family.generators:
        raise DomainError("presentation generators do not match the family")
    return [
        [fox_derivative(rel, k, family) for k in range(family.rank)]
        for rel in pres.relators
    ]


# ---------------------------------------------------------------------------
# The models


def _int(family: GroupFamily, n: int) -> RingElem:
    return RingElem.integer(family, n)


def model_M_sigma(
    family: GroupFamily, sigma: int, gamma: F2Vec | None = None
) -> HAN1:
    """Surgery on X x S^1: the form extends to [[sigma, 1], [1, 0]].

    sigma = 0 is the null-bordant spin model (hyperbolic extension, tau = 0);
    sigma = 1 realizes the bordism classes (0, gamma, 1) and its form is odd,
    so no tau class exists.
    """
    d = h2_dimension(family)
    if sigma not in (0, 1):
        raise DomainError("sigma must be 0 or 1")
    if gamma is None:
        gamma = F2Vec.zero(d)
    if gamma.dim != d:
        raise DomainError("gamma has the wrong dimension")
    if sigma == 0 and not gamma.is_zero:
        raise DomainError("sigma = 0 only represents the zero bordism class")
    matrix = RingMatrix.from_int_rows(family, [[sigma, 1], [1, 0]])
    form = AugmentedForm(1, matrix)
    return HAN1(
        w=F2Vec.zero(d),
        signature=0,
        form=form,
        tau=F2Vec.zero(d) if sigma == 0 else None,
        spin_bordism=(0, gamma, sigma),
        notes=f"M_{sigma} over {family.generators}",
    )


def _gamma_bits(family: GroupFamily, gamma) -> tuple[int, ...]:
    if isinstance(gamma, str):
        bits = tuple(int(ch) for ch in gamma)
    elif isinstance(gamma, Mapping):
        bits = tuple(int(gamma.get(name, 0)) for name in family.generators)
    else:
        bits = tuple(int(b) for b in gamma)
    if len(bits) != family.rank or any(b not in (0, 1) for b in bits):
        raise InputError("gamma needs one bit per generator")
    return bits


def model_P(
    pres: Presentation, family: GroupFamily, gamma
) -> HAN1:
    """The even spin models: surgery on a doubled twisted product.

    gamma assigns a bit to each generator and must define a homomorphism
    pi -> Z/2 (each relator must have even total gamma-weight).  The form
    lives on Ipi + Zpi^(2n+1); in the block order (Zpi, Ipi, Zpi^n, Zpi^n)
    of the construction it reads

        [ 0   1        0                    0        ]
        [ 1   2        (1 - g_j^-1)         0        ]
        [ 0   (1-g_i)  (1-g_i)(1-g_j^-1)    delta_ij ]
        [ 0   0        delta_ij             F_ij     ]

    with F_ij = sum_k gamma(g_k) (D_k R_i) conj(D_k R_j) the Fox block.
    Storage moves the Ipi slot to index 0 (permutation [1, 0, 2, ..., 2n+1])
    so that the leading summand is the augmentation ideal.

    The corner 2 = 1 + conj(1) makes the form even for every gamma, and the
    class of the model in H_2(Bpi;Z/2) is gamma itself.
    """
    if not pres.is_square:
        raise DomainError(
            f"need a square presentation, got {len(pres.generators)} "
            f"generators and {len(pres.relators)} relators"
        )
    if tuple(pres.generators) != family.generators:
        raise DomainError("presentation generators do not match the family")
    bits = _gamma_bits(family, gamma)
    for rel in pres.relators:
        weight = sum(exp * bits[gen] for gen, exp in rel.letters)
        if weight % 2:
            raise DomainError(
                "gamma does not define a homomorphism: relator "
                f"{rel!r} has odd gamma-weight"
            )

    n = family.rank
    jac = fox_jacobian(pres, family)
    zero = RingElem.zero(family)
    size = 2 * n + 2
    m = [[zero for _ in range(size)] for _ in range(size)]

    # indices after the recorded permutation: 0 = Ipi, 1 = Zpi,
    # 2..n+1 = first free block (v), n+2..2n+1 = Fox block (w)
    V = lambda i: 2 + i
    W = lambda i: 2 + n + i

    m[0][0] = _int(family, 2)
    m[0][1] = m[1][0] = _int(family, 1)
    for j in range(n):
        g_j = family.generator_element(j)
        one_minus_gj = _int(family, 1) - RingElem.group(family, g_j)
        m[0][V(j)] = one_minus_gj.conjugate()
        m[V(j)][0] = one_minus_gj
    for i in range(n):
        g_i = family.generator_element(i)
        one_minus_gi = _int(family, 1) - RingElem.group(family, g_i)
        for j in range(n):
            g_j = family.generator_element(j)
            one_minus_gj = _int(family, 1) - RingElem.group(family, g_j)
            m[V(i)][V(j)] = one_minus_gi * one_minus_gj.conjugate()
        m[V(i)][W(i)] = m[W(i)][V(i)] = _int(family, 1)
    for i in range(n):
        for j in range(n):
            total = zero
            for k in range(n):
                if bits[k]:
                    total = total + jac[i][k] * jac[j][k].conjugate()
            m[W(i)][W(j)] = total

    form = AugmentedForm(1, RingMatrix(family, m))
    tau = hom_bits_to_h2(family, bits)
    return HAN1(
        w=F2Vec.zero(tau.dim),
        signature=0,
        form=form,
        tau=tau,
        spin_bordism=(0, tau, 0),
        notes=f"P(gamma={''.join(map(str, bits))}) over {family.generators}",
    )


def model_N_almost_spin(family: GroupFamily, w: F2Vec) -> HAN1:
    """Null-bordant almost-spin model: hyperbolic extension, class zero."""
    d = h2_dimension(family)
    if w.dim != d:
        raise DomainError("w has the wrong dimension")
    if w.is_zero:
        raise DomainError("w must be nonzero; use model_M_sigma for spin")
    form = AugmentedForm(1, hyperbolic_matrix(family))
    return HAN1(
        w=w,
        signature=0,
        form=form,
        tau=F2Vec.zero(d),
        spin_bordism=None,
        notes=f"N(w={w.to_bits()}) over {family.generators}",
    )


def _e8_stack(family: GroupFamily, count: int) -> RingMatrix | None:
    """count copies of E8 (negated when count < 0), or None when count = 0."""
    if count == 0:
        return None
    block = e8_block(family) if count > 0 else e8_block(family).negate()
    out = block
    for _ in range(abs(count) - 1):
        out = out.direct_sum(block)
    return out


def realize_form(
    family: GroupFamily,
    w,
    signature: int,
    parity_target: Parity | None = None,
    tau: F2Vec | None = None,
    category: str = "topological",
) -> HAN1:
    """A model with prescribed (w, signature, parity, tau), per the
    realization list.

    * w = INFINITY: any signature; lambda_{M_0} + Id_m + (-Id_n), m, n >= 1.
    * w = 0, odd:  lambda_{M_1} + n E8 with 8n the signature.
    * w = 0, even: lambda_P(gamma) + n E8, gamma the homomorphism with
      class tau.
    * w nonzero:   lambda_N + n E8.  Only the signature part of the
      almost-spin classification has explicit matrices; nonzero tau targets
      are refused rather than guessed.

    Smooth spin targets need signature divisible by 16, all other non-spin
    w-types by 8.
    """
    if category not in ("smooth", "topological"):
        raise InputError(f"unknown category {category!r}")

    if w is INFINITY:
        if tau is not None:
            raise DomainError("totally non-spin targets carry no tau")
        m0 = model_M_sigma(family, 0)
        m = max(1, signature + 1)
        n = m - signature
        blocks = identity_block(family, m).direct_sum(identity_block(family, n, -1))
        form = AugmentedForm(1, m0.form.matrix.direct_sum(blocks))
        return HAN1(
            w=INFINITY,
            signature=signature,
            form=form,
            tau=None,
            notes=f"M_0 + Id_{m} + (-Id_{n})",
        )

    d = h2_dimension(family)
    if not isinstance(w, F2Vec) or w.dim != d:
        raise DomainError("w must be an F2 vector of the family's H_2 dimension")
    if signature % 8:
        raise DomainError("signature must be divisible by 8 for this w-type")

    if w.is_zero:
        if parity_target is None:
            raise DomainError("spin targets need a parity")
        if category == "smooth" and signature % 16:
            raise DomainError("smooth spin signatures are divisible by 16")
        n_e8 = signature // 8
        if parity_target is Parity.ODD:
            if tau is not None:
                raise DomainError("odd targets carry no tau")
            base = model_M_sigma(family, 1)
            label = "M_1"
        else:
            if tau is None:
                raise DomainError("even spin targets need a tau class")
            gamma = h2_to_hom_bits(family, tau)
            base = model_P(builtin_presentation(family), family, gamma)
            label = f"P(gamma={''.join(map(str, gamma))})"
        extra = _e8_stack(family, n_e8)
        matrix = base.form.matrix if extra is None else base.form.matrix.direct_sum(extra)
        return HAN1(
            w=F2Vec.zero(d),
            signature=signature,
            form=AugmentedForm(1, matrix),
            tau=base.tau,
            spin_bordism=base.spin_bordism,
            notes=f"{label} + {n_e8} E8",
        )

    # almost spin
    if parity_target is Parity.ODD:
        raise DomainError("almost-spin intersection forms are even")
    if tau is not None and not tau.is_zero:
        raise DomainError(
            "almost-spin realization beyond the signature part is not "
            "constructed: no explicit matrices exist for the H_2 part"
        )
    base = model_N_almost_spin(family, w)
    extra = _e8_stack(family, signature // 8)
    matrix = base.form.matrix if extra is None else base.form.matrix.direct_sum(extra)
    return HAN1(
        w=w,
        signature=signature,
        form=AugmentedForm(1, matrix),
        tau=F2Vec.zero(d),
        notes=f"N(w={w.to_bits()}) + {signature // 8} E8 (signature part only)",
    )


# ---------------------------------------------------------------------------
# JSON wrapper


def w_to_json(w) -> str:
    return "infinity" if w is INFINITY else w.to_bits()


def w_from_json(obj):
    if obj == "infinity":
        return INFINITY
    if isinstance(obj, str):
        return F2Vec.from_bits(obj)
    raise InputError(f"bad w value {obj!r}")


def han1_to_json(h: HAN1):
    return {
        "w": w_to_json(h.w),
        "signature": h.signature,
        "parity": parity(h.form).value if h.w is not INFINITY else None,
        "tau": None if h.tau is None else h.tau.to_bits(),
        "form": form_to_json(h.form),
        "notes": h.notes,
    }


def han1_from_json(obj) -> HAN1:
    try:
        w = w_from_json(obj["w"])
        signature = int(obj["signature"])
        tau = obj.get("tau")
        form = form_from_json(obj["form"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad HAN1 JSON: {exc}") from None
    return HAN1(
        w=w,
        signature=signature,
        form=form,
        tau=None if tau is None else F2Vec.from_bits(tau),
        notes=str(obj.get("notes", "")),
    )
