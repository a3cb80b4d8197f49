import pytest

from stable4.errors import DomainError
from stable4.f2 import F2Vec
from stable4.forms import (
    AugmentedForm,
    Parity,
    augmentation_signature,
    hyperbolic_matrix,
    parity,
    restrict_to_Ipi,
)
from stable4.groupring import RingElem
from stable4.models import (
    HAN1,
    INFINITY,
    builtin_presentation,
    fox_jacobian,
    h2_dimension,
    h2_to_hom_bits,
    han1_from_json,
    han1_to_json,
    hom_bits_to_h2,
    model_M_sigma,
    model_N_almost_spin,
    model_P,
    realize_form,
    w_from_json,
)
from stable4.words import NilFamily, Presentation, ZnFamily, parse_word

Z3 = ZnFamily(3)
NIL2 = NilFamily(2)
NIL3 = NilFamily(3)


def all_h2_vectors(family):
    d = h2_dimension(family)
    return [F2Vec(d, bits) for bits in range(1 << d)]


# ---------------------------------------------------------------------------
# H_2 coordinates


def test_h2_dimensions():
    assert h2_dimension(Z3) == 3
    assert h2_dimension(NIL3) == 2
    assert h2_dimension(NIL2) == 3


def test_h2_coordinates_round_trip():
    for fam in (Z3, NIL2, NIL3):
        for v in all_h2_vectors(fam):
            bits = h2_to_hom_bits(fam, v)
            assert hom_bits_to_h2(fam, bits) == v


def test_h2_rejects_torsion_violation():
    # gamma(a) must vanish when z is odd: a maps into 3-torsion of H_1
    with pytest.raises(DomainError):
        hom_bits_to_h2(NIL3, (1, 0, 0))


# ---------------------------------------------------------------------------
# M_sigma


def test_m0_is_exactly_hyperbolic():
    h = model_M_sigma(NIL2, 0)
    assert h.form.matrix == hyperbolic_matrix(NIL2)
    assert h.form.epsilon == 1
    assert h.signature == 0
    assert parity(h.form) == Parity.EVEN
    assert h.tau == F2Vec.zero(3)


def test_m1_form_and_parity():
    h = model_M_sigma(Z3, 1, F2Vec.from_bits("010"))
    assert h.form.matrix.integer_rows() == [[1, 1], [1, 0]]
    assert parity(h.form) == Parity.ODD
    assert h.tau is None
    assert h.spin_bordism == (0, F2Vec.from_bits("010"), 1)


def test_m_sigma_rejects_nonzero_gamma_at_sigma_zero():
    with pytest.raises(DomainError):
        model_M_sigma(Z3, 0, F2Vec.from_bits("100"))


def test_m_sigma_any_gamma_at_sigma_one():
    for gamma in all_h2_vectors(NIL2):
        h = model_M_sigma(NIL2, 1, gamma)
        assert h.spin_bordism[2] == 1


# ---------------------------------------------------------------------------
# the P models


def test_p_fox_block_single_generator_weight():
    # gamma supported on x alone; first relator x a x^-1 a^-1
    h = model_P(builtin_presentation(NIL2), NIL2, "010")
    n = 3
    fox_entry = h.form.matrix.entry(2 + n, 2 + n)
    a = RingElem.group(NIL2, (1, 0, 0))
    expected = RingElem.integer(NIL2, 2) - a - a.conjugate()
    assert fox_entry == expected


def test_p_corner_and_couplings():
    h = model_P(builtin_presentation(Z3), Z3, "000")
    m = h.form.matrix
    n = 3
    assert m.size == 2 * n + 2
    assert restrict_to_Ipi(h.form) == RingElem.integer(Z3, 2)
    assert m.entry(0, 1) == RingElem.one(Z3)
    one = RingElem.one(Z3)
    for j in range(n):
        g = RingElem.group(Z3, Z3.generator_element(j))
        assert m.entry(0, 2 + j) == (one - g).conjugate()
        assert m.entry(2 + j, 0) == one - g
        assert m.entry(2 + j, 2 + n + j) == one
        # zero gamma kills the Fox block
        for k in range(n):
            assert m.entry(2 + n + j, 2 + n + k).is_zero


def test_p_even_and_hermitian_for_all_gamma():
    for fam in (Z3, NIL2, NIL3):
        pres = builtin_presentation(fam)
        for v in all_h2_vectors(fam):
            h = model_P(pres, fam, h2_to_hom_bits(fam, v))
            assert h.form.matrix.is_hermitian()
            assert parity(h.form) == Parity.EVEN
            assert h.tau == v
            assert h.signature == 0


def test_p_rejects_non_square_presentation():
    pres = Presentation(("x", "y"), (parse_word("x y x^-1 y^-1", ("x", "y")),))
    with pytest.raises(DomainError):
        model_P(pres, NilFamily(1), (0, 0))


def test_p_rejects_non_homomorphism():
    # z odd forces gamma(a) = 0
    with pytest.raises(DomainError):
        model_P(builtin_presentation(NIL3), NIL3, "100")


def test_p_rejects_arity_mismatch():
    from stable4.errors import InputError

    with pytest.raises(InputError):
        model_P(builtin_presentation(NIL2), NIL2, "01")


def test_fox_jacobian_shape():
    jac = fox_jacobian(builtin_presentation(Z3), Z3)
    assert len(jac) == 3 and len(jac[0]) == 3


# ---------------------------------------------------------------------------
# N models


def test_n_is_the_hyperbolic_model():
    w = F2Vec.from_bits("100")
    h = model_N_almost_spin(NIL2, w)
    assert h.form.matrix == model_M_sigma(NIL2, 0).form.matrix
    assert parity(h.form) == Parity.EVEN
    assert h.signature == 0
    assert h.w == w
    assert h.tau == F2Vec.zero(3)


def test_n_rejects_zero_w():
    with pytest.raises(DomainError):
        model_N_almost_spin(NIL2, F2Vec.zero(3))


# ---------------------------------------------------------------------------
# shared invariants of all models


def _zero_signature_models():
    yield model_M_sigma(Z3, 0)
    yield model_M_sigma(Z3, 1)
    yield model_M_sigma(NIL2, 1, F2Vec.from_bits("011"))
    yield model_N_almost_spin(Z3, F2Vec.from_bits("110"))
    for fam in (Z3, NIL2, NIL3):
        pres = builtin_presentation(fam)
        for v in all_h2_vectors(fam):
            yield model_P(pres, fam, h2_to_hom_bits(fam, v))


def test_all_models_hermitian():
    for h in _zero_signature_models():
        assert h.form.matrix.is_hermitian()


def test_all_zero_signature_models_have_zero_integer_shadow_signature():
    for h in _zero_signature_models():
        assert augmentation_signature(h.form) == 0


# ---------------------------------------------------------------------------
# HAN1 validation


def test_han1_rejects_tau_on_odd_form():
    m1 = RingMatrix_int([[1, 1], [1, 0]])
    with pytest.raises(DomainError):
        HAN1(w=F2Vec.zero(3), signature=0, form=m1, tau=F2Vec.zero(3))


def RingMatrix_int(rows):
    from stable4.forms import RingMatrix

    return AugmentedForm(1, RingMatrix.from_int_rows(Z3, rows))


def test_han1_rejects_bad_signature():
    with pytest.raises(DomainError):
        HAN1(w=F2Vec.zero(3), signature=4, form=RingMatrix_int([[0, 1], [1, 0]]))


def test_han1_infinity_allows_any_signature():
    h = HAN1(w=INFINITY, signature=5, form=RingMatrix_int([[0, 1], [1, 0]]))
    assert h.signature == 5


# ---------------------------------------------------------------------------
# realization


def test_realize_totally_non_spin_signature_zero():
    h = realize_form(Z3, INFINITY, 0)
    rows = h.form.matrix.integer_rows()
    assert rows[2][2] == 1 and rows[3][3] == -1
    assert h.form.matrix.size == 4


def test_realize_odd_spin_with_e8():
    h = realize_form(Z3, F2Vec.zero(3), 8, Parity.ODD, category="topological")
    assert h.form.matrix.size == 2 + 8
    assert parity(h.form) == Parity.ODD
    assert signature_int_of_shadow(h) == 8


def signature_int_of_shadow(h):
    from stable4.forms import ldlt_signature

    return ldlt_signature(h.form.matrix.augmentation_rows())


def test_realize_even_spin_plain_p():
    tau = F2Vec.from_bits("110")
    h = realize_form(Z3, F2Vec.zero(3), 0, Parity.EVEN, tau)
    assert h.tau == tau
    assert parity(h.form) == Parity.EVEN
    assert h.form.matrix.size == 8


def test_realize_negative_signatures():
    h = realize_form(Z3, F2Vec.zero(3), -16, Parity.ODD, category="smooth")
    assert signature_int_of_shadow(h) == -16


def test_realize_validation():
    with pytest.raises(DomainError):
        realize_form(Z3, F2Vec.zero(3), 8, Parity.ODD, category="smooth")
    with pytest.raises(DomainError):
        realize_form(Z3, F2Vec.zero(3), 4, Parity.ODD)
    with pytest.raises(DomainError):
        realize_form(Z3, F2Vec.from_bits("100"), 8, Parity.EVEN,
                     tau=F2Vec.from_bits("010"))
    with pytest.raises(DomainError):
        realize_form(Z3, F2Vec.from_bits("100"), 8, Parity.ODD)
    with pytest.raises(DomainError):
        realize_form(Z3, F2Vec.zero(3), 8, Parity.EVEN)  # tau missing


# ---------------------------------------------------------------------------
# serialization


def test_han1_json_round_trip():
    pres = builtin_presentation(NIL2)
    for h in (
        model_M_sigma(NIL2, 1, F2Vec.from_bits("101")),
        model_P(pres, NIL2, "110"),
        model_N_almost_spin(NIL2, F2Vec.from_bits("010")),
        realize_form(NIL2, INFINITY, 3),
    ):
        blob = han1_to_json(h)
        back = han1_from_json(blob)
        assert back.w == h.w
        assert back.signature == h.signature
        assert back.tau == h.tau
        assert back.form == h.form


def test_w_json():
    assert w_from_json("infinity") is INFINITY
    assert w_from_json("011") == F2Vec.from_bits("011")


def test_h2_dimension_rejects_unsupported_families():
    from stable4.models import h2_dimension
    from stable4.words import FreeFamily

    with pytest.raises(DomainError):
        h2_dimension(ZnFamily(2))
    with pytest.raises(DomainError):
        h2_dimension(FreeFamily(("x",)))
