"""Pairs of binary forms: parsing, resultants, conjugation, iteration, reduction."""

import pytest

from berkres import ratmap
from berkres.errors import DegenerateMapError, DegreeCapError
from berkres.ratmap import (
    HomogeneousPair,
    Mobius,
    conjugate,
    iterate,
    normalize,
    parse_map,
    projectively_equal,
    reduce_map,
)
from berkres.valfield import INF_TAG, FieldConfig, format_scalar

from conftest import random_mobius, random_quadratic, rng_for

CFG3 = FieldConfig("padic", p=3, e=2)
CFG5 = FieldConfig("padic", p=5, e=1)


# -- parsing ------------------------------------------------------------------


def test_parse_z_squared():
    m = parse_map("z^2", CFG3)
    assert m.degree == 2
    assert [format_scalar(c) for c in m.f] == ["0", "0", "1"]
    assert [format_scalar(c) for c in m.g] == ["1", "0", "0"]


def test_parse_loxodromic_normal_form():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    assert m.degree == 2
    # (-X(X - 10Y), Y(X - 4Y))
    assert [format_scalar(c) for c in m.f] == ["0", "10", "-1"]
    assert [format_scalar(c) for c in m.g] == ["-4", "1", "0"]


def test_parse_degenerate():
    with pytest.raises(DegenerateMapError):
        parse_map("(z-1)/(z-1)", CFG3)


def test_parse_degree_zero():
    with pytest.raises(DegenerateMapError):
        parse_map("3/4", CFG3)


# -- normalization ------------------------------------------------------------


def test_normalize_scales_out_p():
    m = HomogeneousPair(
        [CFG3.zero(), CFG3.zero(), CFG3.from_int(3)],
        [CFG3.from_int(3), CFG3.zero(), CFG3.zero()],
        CFG3,
        check=False,
    )
    n = normalize(m)
    assert n.min_coeff_valuation() == 0
    assert format_scalar(n.f[2]) == "1"


def test_normalize_no_op_when_min_zero():
    m = parse_map("5*z^2", CFG5)
    assert normalize(m) is m


def test_normalize_mixed_uniformizer():
    pi = CFG3.uniformizer()
    m = HomogeneousPair(
        [CFG3.zero(), CFG3.zero(), pi],
        [CFG3.from_int(3), CFG3.zero(), CFG3.zero()],
        CFG3,
        check=False,
    )
    n = normalize(m)
    # divide by pi: (X^2, pi Y^2)
    assert format_scalar(n.f[2]) == "1"
    assert format_scalar(n.g[0]) == "pi"


# -- resultants ---------------------------------------------------------------


def test_resultant_good_reduction():
    assert parse_map("z^2", CFG5).resultant() == CFG5.one()


def test_resultant_pz2():
    # 4x4 Sylvester determinant of (5X^2, Y^2) is 25
    assert parse_map("5*z^2", CFG5).resultant() == CFG5.from_int(25)


def test_resultant_product_over_roots():
    # Res(X^2 - XY, Y^2) = 1: product of F over the roots of G with lead factors
    m = HomogeneousPair(
        [CFG5.zero(), CFG5.from_int(-1), CFG5.one()],
        [CFG5.one(), CFG5.zero(), CFG5.zero()],
        CFG5,
        check=False,
    )
    assert m.resultant() == CFG5.one()


def test_resultant_covariance_under_scaling():
    rng = rng_for("cov")
    for _ in range(10):
        m = random_quadratic(CFG3, rng)
        lam = CFG3.from_int(rng.choice([2, 3, 5]))
        scaled = HomogeneousPair([c * lam for c in m.f], list(m.g), CFG3, check=False)
        assert scaled.resultant() == lam**m.degree * m.resultant()


def test_resultant_covariance_under_conjugation():
    rng = rng_for("cov2")
    d = 2
    for _ in range(8):
        m = random_quadratic(CFG3, rng)
        g = random_mobius(CFG3, rng)
        # composing with g on the source multiplies Res by det(g)^(d^2)
        pform = [g.b, g.a]
        qform = [g.d, g.c]
        comp = HomogeneousPair(
            ratmap.form_compose(m.f, pform, qform, CFG3),
            ratmap.form_compose(m.g, pform, qform, CFG3),
            CFG3,
            check=False,
        )
        assert comp.resultant() == m.resultant() * g.det() ** (d * d)


# -- conjugation ----------------------------------------------------------------


def test_conjugate_inversion_of_z2():
    m = parse_map("z^2", CFG5)
    conj = conjugate(m, Mobius.inversion(CFG5))
    assert projectively_equal(normalize(conj), m)


def test_conjugate_identity():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    conj = conjugate(m, Mobius.identity(CFG3))
    assert projectively_equal(normalize(conj), normalize(m))


def test_conjugate_scaling_moves_good_reduction():
    # (p z^2) conjugated by w -> w/p becomes w^2 up to scalar
    m = parse_map("5*z^2", CFG5)
    gamma = Mobius.affine(CFG5, CFG5.one() / CFG5.from_int(5), CFG5.zero())
    conj = normalize(conjugate(m, gamma))
    assert projectively_equal(conj, parse_map("z^2", CFG5))


def test_ordres_lift_independent():
    # v(Res) after normalization does not depend on the chosen lift of gamma
    rng = rng_for("lift")
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    for _ in range(10):
        g = random_mobius(CFG3, rng)
        lam = CFG3.from_int(rng.choice([2, 3, 7])) * CFG3.uniformizer_power(rng.randint(0, 2))
        g_scaled = Mobius(g.a * lam, g.b * lam, g.c * lam, g.d * lam)
        v1 = normalize(conjugate(m, g)).resultant().valuation()
        v2 = normalize(conjugate(m, g_scaled)).resultant().valuation()
        assert v1 == v2


# -- iteration ------------------------------------------------------------------


def test_iterate_z2():
    m = iterate(parse_map("z^2", CFG5), 3)
    assert m.degree == 8
    assert format_scalar(m.f[8]) == "1" and format_scalar(m.g[0]) == "1"


def test_iterate_identity_case():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    assert projectively_equal(iterate(m, 1), normalize(m))


def test_iterate_matches_pointwise_evaluation():
    # phi^2 evaluated at 5 rational points equals phi(phi(.))
    cfg = FieldConfig("padic", p=2, e=2)
    m = parse_map("(z-2)*(z-1)/z", cfg)
    m2 = iterate(m, 2)
    assert m2.degree == 4
    for k in (1, 3, 5, 7, 9):
        x = cfg.from_int(k)
        assert m2.apply_p1(x) == m.apply_p1(m.apply_p1(x))


def test_iterate_stage_composition():
    rng = rng_for("stage")
    m = random_quadratic(CFG3, rng)
    a = iterate(m, 3)
    b = normalize(ratmap.compose_pairs(iterate(m, 2), iterate(m, 1)))
    assert projectively_equal(a, b)


def test_iterate_degree_cap():
    with pytest.raises(DegreeCapError):
        iterate(parse_map("z^2", CFG5), 7)


# -- reduction -------------------------------------------------------------------


def test_reduce_good_reduction():
    red = reduce_map(parse_map("z^2", CFG5))
    assert red.kind == ratmap.NONCONSTANT
    assert red.hole_degree == 0
    assert red.divided_degree == 2


def test_reduce_pz2():
    red = reduce_map(parse_map("5*z^2", CFG5))
    assert red.kind == ratmap.CONSTANT
    assert red.hole_y_mult == 2  # hole divisor Y^2
    f5 = CFG5.residue_field()
    assert red.constant_tag == f5.zero


def test_reduce_loxodromic():
    red = reduce_map(parse_map("-z*(z-10)/(z-4)", CFG3))
    assert red.kind == ratmap.NONCONSTANT
    assert red.divided_degree == 1
    f3 = CFG3.residue_field()
    # hole divisor X - Y: single root at 1
    assert red.hole_uni[1] != f3.zero
    root = -red.hole_uni[0] / red.hole_uni[1]
    assert root == f3.from_int(1)
    # divided map is -z
    assert red.divided_apply(f3.from_int(1)) == f3.from_int(2)


def test_reduce_requires_normalized():
    m = HomogeneousPair(
        [CFG5.zero(), CFG5.zero(), CFG5.from_int(5)],
        [CFG5.from_int(5), CFG5.zero(), CFG5.zero()],
        CFG5,
        check=False,
    )
    with pytest.raises(ValueError):
        reduce_map(m)


def test_hole_plus_divided_degree_is_total():
    rng = rng_for("holes")
    for _ in range(40):
        m = random_quadratic(CFG3, rng)
        red = reduce_map(normalize(m))
        assert red.hole_degree + red.divided_degree == m.degree


def test_reduce_infinity_constant():
    # (X^2, 5Y^2): G reduces to 0, hole = X^2, constant value infinity
    m = HomogeneousPair(
        [CFG5.zero(), CFG5.zero(), CFG5.one()],
        [CFG5.from_int(5), CFG5.zero(), CFG5.zero()],
        CFG5,
        check=False,
    )
    red = reduce_map(m)
    assert red.kind == ratmap.CONSTANT
    assert red.constant_tag is INF_TAG
    assert red.hole_degree == 2 and red.hole_y_mult == 0
