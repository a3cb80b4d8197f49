"""Classification tables and the pairwise stable-equivalence decision.

The finite part of each table is computed from the group actions on the
bordism data, not copied from the statements: the spin case runs an orbit
enumeration of pairs (phi, eps) under

    m . (phi, eps) = (eps m + phi, eps)      for m in H^1(Bpi;Z/2), and
    rho . (phi, eps) = (rho phi, eps)        for rho in the Out(pi)-image,

and the almost-spin case enumerates orbits of ker<w,-> (smooth) or all of
H_2 (topological) under the stabilizer of w inside the closure of the
Out-image.  The signature sits in a separate 16Z / 8Z / Z coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, InputError
from .f2 import (
    F2Mat,
    F2Vec,
    f2mat_from_json,
    f2mat_to_json,
    group_closure,
    orbit_of,
    orbits,
)
from .forms import Parity, parity
from .models import HAN1, INFINITY, w_from_json, w_to_json

SMOOTH = "smooth"
TOPOLOGICAL = "topological"
_CATEGORIES = {SMOOTH: SMOOTH, TOPOLOGICAL: TOPOLOGICAL, "top": TOPOLOGICAL}


def normalize_category(category: str) -> str:
    try:
        return _CATEGORIES[category]
    except KeyError:
        raise InputError(f"unknown category {category!r}") from None


class _TauUnknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "tau-unknown"


TAU_UNKNOWN = _TauUnknown()


@dataclass(frozen=True)
class FamilyData:
    """The F2 side of an example group: dim H_2 and the Out(pi)-image."""

    name: str
    d: int
    out_generators: tuple[F2Mat, ...]
    h1_dual_action: str = (
        "H^1(Bpi;Z/2) = Hom(pi,Z/2) acts through the same F2^d coordinates "
        "as H_2 (Poincare duality + Kronecker evaluation); an element m "
        "sends (phi, eps) to (eps m + phi, eps)"
    )
    notes: str = ""

    def __post_init__(self) -> None:
        for g in self.out_generators:
            if g.dim != self.d:
                raise DomainError("generator dimension mismatch")
            if not g.is_invertible():
                raise DomainError("Out-action generators must be invertible")


@dataclass(frozen=True)
class BordismClassSpin:
    """Element (sigma, phi, eps) of the spin bordism group Z + F2^d + Z/2."""

    sigma: int
    phi: F2Vec
    eps: int

    def __post_init__(self) -> None:
        if self.eps not in (0, 1):
            raise DomainError("eps must be a bit")

    def validate(self, category: str) -> None:
        stride = 16 if normalize_category(category) == SMOOTH else 8
        if self.sigma % stride:
            raise DomainError(
                f"{category} spin signatures are divisible by {stride}"
            )


def _gl2_generators() -> tuple[F2Mat, ...]:
    return (
        F2Mat.from_rows(["01", "10"]),
        F2Mat.from_rows(["11", "01"]),
    )


def _gl3_generators() -> tuple[F2Mat, ...]:
    # a transposition, the 3-cycle, and one transvection generate GL_3(F2)
    return (
        F2Mat.from_rows(["010", "100", "001"]),
        F2Mat.from_rows(["001", "100", "010"]),
        F2Mat.from_rows(["110", "010", "001"]),
    )


def family_z3() -> FamilyData:
    """Z^3 = pi_1(T^3): d = 3 and the Out-image is all of GL_3(F2)."""
    return FamilyData(
        name="z3",
        d=3,
        out_generators=_gl3_generators(),
        notes="GL_3(Z) -> GL_3(Z/2) is surjective",
    )


def family_nil(z: int) -> FamilyData:
    """Central extension of Z^2 by Z with parameter z >= 1.

    For odd z, H_2 has dimension 2 and carries the full GL_2(F2) action.
    For even z a torsion coordinate appears (stored last); the Out-image is
    GL_2(F2) on the first two coordinates together with the transvections
    that add the torsion coordinate to each of them, coming from the
    automorphisms fixing the torsion class and multiplying a Z^2 generator
    by it.
    """
    if z <= 0:
        raise DomainError("z must be positive")
    if z % 2:
        return FamilyData(name=f"nil:{z}", d=2, out_generators=_gl2_generators())
    a, b = _gl2_generators()
    pad = lambda m: F2Mat.from_rows([row + "0" for row in m.to_rows()] + ["001"])
    transvections = (
        F2Mat.from_rows(["101", "010", "001"]),
        F2Mat.from_rows(["100", "011", "001"]),
    )
    return FamilyData(
        name=f"nil:{z}",
        d=3,
        out_generators=(pad(a), pad(b)) + transvections,
        notes="torsion coordinate last; transvections add it to x and y",
    )


def family_custom(name: str, d: int, generators: Sequence[F2Mat], notes: str = "") -> FamilyData:
    return FamilyData(name=name, d=d, out_generators=tuple(generators), notes=notes)


# ---------------------------------------------------------------------------
# Action and orbits


def act_spin(m, c: BordismClassSpin, family: FamilyData) -> BordismClassSpin:
    """One automorphism applied to a spin bordism element.

    A vector m (from H^1) sends (sigma, phi, eps) to (sigma, eps m + phi,
    eps); a matrix (an Out-element) sends it to (sigma, rho phi, eps).  The
    signature never moves.
    """
    if isinstance(m, F2Vec):
        if m.dim != family.d or c.phi.dim != family.d:
            raise DomainError("dimension mismatch")
        phi = c.phi ^ m if c.eps else c.phi
        return BordismClassSpin(c.sigma, phi, c.eps)
    if isinstance(m, F2Mat):
        if m.dim != family.d or c.phi.dim != family.d:
            raise DomainError("dimension mismatch")
        return BordismClassSpin(c.sigma, m.apply(c.phi), c.eps)
    raise InputError(f"cannot act by {m!r}")


def spin_state_orbits(family: FamilyData) -> list[list[BordismClassSpin]]:
    """Orbits of the (phi, eps) states at signature zero under the full
    automorphism action (H^1 basis vectors plus the Out-generators)."""
    actions = [F2Vec.basis(family.d, i) for i in range(family.d)]
    actions += list(family.out_generators)
    states = [
        BordismClassSpin(0, F2Vec(family.d, bits), eps)
        for eps in (0, 1)
        for bits in range(1 << family.d)
    ]
    seen = set()
    parts: list[list[BordismClassSpin]] = []
    key = lambda s: (s.eps, s.phi.coords())
    for start in states:
        if key(start) in seen:
            continue
        orbit = {key(start): start}
        frontier = [start]
        while frontier:
            s = frontier.pop()
            for a in actions:
                t = act_spin(a, s, family)
                if key(t) not in orbit:
                    orbit[key(t)] = t
                    frontier.append(t)
        seen |= orbit.keys()
        parts.append(sorted(orbit.values(), key=key))
    parts.sort(key=lambda orb: key(orb[0]))
    return parts


def stabilizer_of_w(family: FamilyData, w: F2Vec, cap: int | None = None) -> list[F2Mat]:
    """Elements of the Out-image whose induced H^2 action fixes w.

    w is the coefficient vector of the evaluation functional on H_2, so the
    condition on a matrix rho is rho^T w = w.  Computed by closing the
    generator set (capped) and filtering.
    """
    if w.dim != family.d:
        raise DomainError("w dimension mismatch")
    closure = group_closure(family.out_generators, cap=cap)
    stab = [m for m in closure if m.transpose().apply(w) == w]
    stab.sort(key=lambda m: m.rows)
    return stab


@dataclass(frozen=True)
class ClassEntry:
    """One finite class: an H_2 orbit, the odd class, or signature-only."""

    kind: str  # "orbit" | "odd" | "signature-only"
    representative: F2Vec | None = None
    orbit: tuple[F2Vec, ...] = ()

    def label(self) -> str:
        if self.kind == "orbit":
            return self.representative.to_bits()
        return self.kind


@dataclass(frozen=True)
class ClassificationTable:
    w: object
    category: str
    signature_stride: int
    classes: tuple[ClassEntry, ...]
    ks_rule: str
    family_name: str = ""

    def __post_init__(self) -> None:
        if not self.classes:
            raise DomainError("a classification table cannot be empty")


def classify(family: FamilyData, w, category: str, cap: int | None = None) -> ClassificationTable:
    """The stable classification table for one normal 1-type.

    Spin tables list the H_2 orbits under the full Out-image plus a single
    odd class; almost-spin tables list orbits under the stabilizer of w, of
    the kernel of evaluation (smooth) or of everything (topological);
    totally non-spin tables are signature-only.  Strides: 1 for totally
    non-spin, 16 for smooth spin, 8 otherwise.
    """
    category = normalize_category(category)

    if w is INFINITY:
        return ClassificationTable(
            w=INFINITY,
            category=category,
            signature_stride=1,
            classes=(ClassEntry("signature-only"),),
            ks_rule="independent-bit" if category == TOPOLOGICAL else "none",
            family_name=family.name,
        )

    if not isinstance(w, F2Vec) or w.dim != family.d:
        raise DomainError("w must be an F2 vector matching the family dimension")

    if w.is_zero:
        entries: list[ClassEntry] = []
        odd_count = 0
        for orbit in spin_state_orbits(family):
            if orbit[0].eps == 1:
                odd_count += 1
                entries.append(ClassEntry("odd"))
            else:
                entries.append(
                    ClassEntry(
                        "orbit",
                        representative=orbit[0].phi,
                        orbit=tuple(s.phi for s in orbit),
                    )
                )
        if odd_count != 1:
            raise DomainError(
                f"expected exactly one odd class, found {odd_count}"
            )
        return ClassificationTable(
            w=w,
            category=category,
            signature_stride=16 if category == SMOOTH else 8,
            classes=tuple(entries),
            ks_rule="sigma/8" if category == TOPOLOGICAL else "none",
            family_name=family.name,
        )

    # almost spin
    stab = stabilizer_of_w(family, w, cap=cap)
    subset = (lambda v: w.dot(v) == 0) if category == SMOOTH else None
    parts = orbits(family.d, stab, subset=subset, max_states=cap)
    entries = tuple(
        ClassEntry("orbit", representative=orb[0], orbit=tuple(orb))
        for orb in parts
    )
    return ClassificationTable(
        w=w,
        category=category,
        signature_stride=8,
        classes=entries,
        ks_rule="sigma/8 + <w,->" if category == TOPOLOGICAL else "none",
        family_name=family.name,
    )


# ---------------------------------------------------------------------------
# Kirby-Siebenmann


def ks(
    w,
    sigma: int,
    category: str = TOPOLOGICAL,
    h2_class: F2Vec | None = None,
    free_bit: int | None = None,
) -> int:
    """Kirby-Siebenmann invariant of a topological stable class.

    Spin: sigma/8 mod 2 (Rochlin).  Almost spin: sigma/8 plus the evaluation
    of w on the H_2 class.  Totally non-spin: not determined by the other
    data; the caller-supplied free bit is passed through.
    """
    if normalize_category(category) != TOPOLOGICAL:
        raise DomainError("the KS invariant lives in the topological category")
    if w is INFINITY:
        if free_bit not in (0, 1):
            raise DomainError("totally non-spin KS is an independent bit; supply it")
        return free_bit
    if not isinstance(w, F2Vec):
        raise DomainError("w must be an F2 vector or INFINITY")
    if sigma % 8:
        raise DomainError("signature must be divisible by 8 for this w-type")
    if w.is_zero:
        return (sigma // 8) % 2
    if h2_class is None or h2_class.dim != w.dim:
        raise DomainError("almost-spin KS needs the H_2 class of the manifold")
    return (sigma // 8 + w.dot(h2_class)) % 2


# ---------------------------------------------------------------------------
# Invariant tuples and the equivalence decision


@dataclass(frozen=True)
class InvariantTuple:
    """(w-type, signature, parity, tau): the data deciding stable equivalence.

    parity is None exactly for totally non-spin types.  tau is present iff
    the parity is even; the TAU_UNKNOWN sentinel marks an even form whose
    tau class has no model provenance, which decide_stable_equiv refuses.
    """

    w: object
    signature: int
    parity: Parity | None
    tau: object = None  # F2Vec | None | TAU_UNKNOWN

    def describe(self) -> str:
        if self.w is INFINITY:
            return f"(w=infinity, sigma={self.signature})"
        tau = (
            "?" if self.tau is TAU_UNKNOWN
            else (self.tau.to_bits() if self.tau is not None else "-")
        )
        return (
            f"(w={w_to_json(self.w)}, sigma={self.signature}, "
            f"{self.parity.value}, tau={tau})"
        )


def invariants_of(h: HAN1, category: str = TOPOLOGICAL) -> InvariantTuple:
    """Extract the invariant tuple of a model.

    Even forms without tau provenance come back flagged TAU_UNKNOWN; such
    tuples cannot be fed to decide_stable_equiv.
    """
    category = normalize_category(category)
    if h.w is INFINITY:
        return InvariantTuple(INFINITY, h.signature, None, None)
    p = parity(h.form)
    if p is Parity.ODD:
        tau = None
    else:
        tau = h.tau if h.tau is not None else TAU_UNKNOWN
    tup = InvariantTuple(h.w, h.signature, p, tau)
    _validate_tuple(tup, category, allow_unknown_tau=True)
    return tup


def _validate_tuple(
    t: InvariantTuple, category: str, allow_unknown_tau: bool = False
) -> None:
    if t.w is INFINITY:
        if t.parity is not None or t.tau is not None:
            raise DomainError("totally non-spin tuples carry only a signature")
        return
    if not isinstance(t.w, F2Vec):
        raise DomainError("w must be an F2 vector or INFINITY")
    if t.parity is None:
        raise DomainError("spin-cover tuples need a parity")
    if t.signature % 8:
        raise DomainError("signature must be divisible by 8 for this w-type")
    if t.w.is_zero and category == SMOOTH and t.signature % 16:
        raise DomainError("smooth spin signatures are divisible by 16")
    if (
        not t.w.is_zero
        and category == SMOOTH
        and isinstance(t.tau, F2Vec)
        and t.w.dot(t.tau)
    ):
        raise DomainError(
            "smooth almost-spin classes pair to zero with w; this tuple is "
            "only realizable topologically"
        )
    if t.parity is Parity.ODD:
        if t.tau is not None:
            raise DomainError("odd tuples carry no tau")
    else:
        if t.tau is TAU_UNKNOWN:
            if allow_unknown_tau:
                return
            raise DomainError("tau class unknown; cannot decide equivalence")
        if not isinstance(t.tau, F2Vec):
            raise DomainError("even tuples need a tau class")
        if t.tau.dim != t.w.dim:
            raise DomainError("tau dimension mismatch")


def decide_stable_equiv(
    a: InvariantTuple,
    b: InvariantTuple,
    category: str,
    family: FamilyData,
    cap: int | None = None,
) -> bool:
    """Are two invariant tuples stably equivalent?

    Signatures and parities must agree; even classes additionally need their
    tau classes in one orbit (full Out-image for spin, stabilizer of w for
    almost spin).  Odd classes are decided by the signature alone.  Tuples
    with different w-types are never equivalent.
    """
    category = normalize_category(category)
    _validate_tuple(a, category)
    _validate_tuple(b, category)
    if (a.w is INFINITY) != (b.w is INFINITY):
        return False
    if a.w is INFINITY:
        return a.signature == b.signature
    if a.w != b.w:
        return False
    if a.signature != b.signature or a.parity != b.parity:
        return False
    if a.parity is Parity.ODD:
        return True
    if a.w.is_zero:
        mats = list(family.out_generators)
    else:
        mats = stabilizer_of_w(family, a.w, cap=cap)
    return b.tau.bits in orbit_of(a.tau, mats)


# ---------------------------------------------------------------------------
# Serialization


def family_data_to_json(f: FamilyData):
    return {
        "name": f.name,
        "d": f.d,
        "out_generators": [f2mat_to_json(m) for m in f.out_generators],
        "notes": f.notes,
    }


def family_data_from_json(obj) -> FamilyData:
    try:
        return FamilyData(
            name=str(obj["name"]),
            d=int(obj["d"]),
            out_generators=tuple(f2mat_from_json(m) for m in obj["out_generators"]),
            notes=str(obj.get("notes", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad family JSON: {exc}") from None


def table_to_json(t: ClassificationTable):
    classes = []
    for entry in t.classes:
        item = {"kind": entry.kind}
        if entry.kind == "orbit":
            item["representative"] = entry.representative.to_bits()
            item["orbit"] = [v.to_bits() for v in entry.orbit]
        classes.append(item)
    return {
        "family": t.family_name,
        "w": w_to_json(t.w),
        "category": t.category,
        "signature_stride": t.signature_stride,
        "ks_rule": t.ks_rule,
        "classes": classes,
    }


def table_to_text(t: ClassificationTable) -> str:
    lines = [
        f"family {t.family_name}   w {w_to_json(t.w)}   category {t.category}",
        f"signatures: {t.signature_stride}*Z    ks: {t.ks_rule}",
        f"finite classes per signature: {len(t.classes)}",
    ]
    width = max(len(e.label()) for e in t.classes)
    for entry in t.classes:
        if entry.kind == "orbit":
            members = " ".join(v.to_bits() for v in entry.orbit)
            lines.append(f"  {entry.label():<{width}}  orbit {{ {members} }}")
        else:
            lines.append(f"  {entry.label():<{width}}")
    return "\n".join(lines)


def invariant_tuple_to_json(t: InvariantTuple):
    return {
        "w": w_to_json(t.w),
        "signature": t.signature,
        "parity": None if t.parity is None else t.parity.value,
        "tau": t.tau.to_bits() if isinstance(t.tau, F2Vec) else None,
    }


def invariant_tuple_from_json(obj) -> InvariantTuple:
    try:
        w = w_from_json(obj["w"])
        signature = int(obj["signature"])
        parity_raw = obj.get("parity")
        tau_raw = obj.get("tau")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad invariant tuple JSON: {exc}") from None
    if parity_raw is None:
        par = None
    else:
        try:
            par = Parity(parity_raw)
        except ValueError:
            raise InputError(f"bad parity {parity_raw!r}") from None
    tau = None if tau_raw is None else F2Vec.from_bits(tau_raw)
    return InvariantTuple(w, signature, par, tau)
