"""Tree geometry: metric, wedges, directions, transport, image points."""

from fractions import Fraction

import pytest

from berkres import berktree
from berkres.berktree import (
    Segment,
    TypeIIPoint,
    apply_mobius_point,
    direction_of,
    format_point,
    gauss_point,
    image_point,
    parse_point,
    point_along,
    rho,
    wedge,
)
from berkres.errors import EnlargeRamificationError
from berkres.ratmap import Mobius, parse_map, reduce_map, normalize
from berkres.valfield import INF_POINT, FieldConfig

from conftest import random_mobius, random_point, random_quadratic, rng_for

CFG3 = FieldConfig("padic", p=3, e=2)
CFG5 = FieldConfig("padic", p=5, e=1)


def pt(cfg, center, t):
    return TypeIIPoint(cfg, cfg.from_int(center), Fraction(t))


# -- metric --------------------------------------------------------------------


def test_rho_nested():
    assert rho(gauss_point(CFG3), pt(CFG3, 0, -1)) == 1


def test_rho_disjoint_subdisks():
    assert rho(pt(CFG3, 0, Fraction(-1, 2)), pt(CFG3, 1, Fraction(-1, 2))) == 1


def test_rho_identity():
    x = pt(CFG3, 4, Fraction(-1, 2))
    assert rho(x, x) == 0


def test_rho_symmetric_and_tree_triangle():
    rng = rng_for("metric")
    for _ in range(200):
        x = random_point(CFG3, rng)
        y = random_point(CFG3, rng)
        b = random_point(CFG3, rng)
        assert rho(x, y) == rho(y, x)
        assert (rho(x, y) == 0) == (x == y)
        w = wedge(x, y, b)
        # the wedge lies on [x, y]: distances add exactly through it
        assert rho(x, y) == rho(x, w) + rho(w, y)


def test_point_equality_same_disk():
    assert pt(CFG3, 1, Fraction(-1, 2)) == pt(CFG3, 4, Fraction(-1, 2))
    assert pt(CFG3, 1, Fraction(-1, 2)) != pt(CFG3, 2, Fraction(-1, 2))


# -- wedge -----------------------------------------------------------------------


def test_wedge_disjoint_subdisks():
    g = gauss_point(CFG3)
    assert wedge(pt(CFG3, 0, -1), pt(CFG3, 1, -1), g) == g


def test_wedge_degenerate():
    x = pt(CFG3, 0, -2)
    assert wedge(x, x, gauss_point(CFG3)) == x


def test_wedge_collinear():
    assert wedge(pt(CFG3, 0, -2), pt(CFG3, 0, -1), gauss_point(CFG3)) == pt(CFG3, 0, -1)


def test_wedge_on_segment():
    # wedge(x, y, base) = x when x lies on [base, y]
    base = gauss_point(CFG3)
    x = pt(CFG3, 0, -1)
    y = pt(CFG3, 0, -2)
    assert wedge(x, y, base) == x


# -- directions --------------------------------------------------------------------


def test_direction_examples():
    g = gauss_point(CFG3)
    f3 = CFG3.residue_field()
    assert direction_of(g, pt(CFG3, 0, -1)).tag == f3.zero
    assert direction_of(g, pt(CFG3, 4, Fraction(-1, 2))).tag == f3.from_int(1)
    assert direction_of(g, INF_POINT).tag is berktree.INF_TAG


def test_direction_requires_distinct():
    g = gauss_point(CFG3)
    with pytest.raises(ValueError):
        direction_of(g, gauss_point(CFG3))


def test_direction_equality_across_centers():
    # the same disk written with two centers produces comparable directions
    a = pt(CFG3, 1, Fraction(-1, 2))
    b = pt(CFG3, 4, Fraction(-1, 2))
    target = pt(CFG3, 1, -1)
    assert direction_of(a, target) == direction_of(b, target)
    # a genuinely different subdisk gives a different direction
    off = TypeIIPoint(CFG3, CFG3.from_int(1) + CFG3.uniformizer(), Fraction(-1))
    assert direction_of(a, target) != direction_of(b, off)


def test_direction_contains_representative():
    g = gauss_point(CFG3)
    v = direction_of(g, pt(CFG3, 4, Fraction(-1, 2)))
    rep = v.representative(Fraction(1, 2))
    assert direction_of(g, rep) == v


# -- parametrized segments ------------------------------------------------------------


def test_point_along_examples():
    g = gauss_point(CFG3)
    tgt = pt(CFG3, 0, -1)
    assert point_along(g, tgt, 1) == tgt
    assert point_along(g, tgt, Fraction(1, 2)) == pt(CFG3, 0, Fraction(-1, 2))
    with pytest.raises(ValueError):
        point_along(g, tgt, 2)


def test_point_along_needs_representable_exponent():
    cfg = FieldConfig("padic", p=5, e=1)
    g = gauss_point(cfg)
    with pytest.raises(EnlargeRamificationError):
        point_along(g, pt(cfg, 0, -1), Fraction(1, 2))


def test_segment_length():
    # path goes up 1 to the join at the Gauss point, then down 1
    seg = Segment(pt(CFG3, 0, -1), pt(CFG3, 1, -1))
    assert seg.length == 2
    assert seg.point_at(1) == gauss_point(CFG3)


# -- Moebius transport ------------------------------------------------------------------


def test_mobius_scaling():
    gamma = Mobius.affine(CFG5, CFG5.one() / CFG5.from_int(5), CFG5.zero())
    assert apply_mobius_point(gamma, gauss_point(CFG5)) == pt(CFG5, 0, 1)


def test_mobius_inversion_zero_centered():
    gamma = Mobius.inversion(CFG5)
    assert apply_mobius_point(gamma, pt(CFG5, 0, -1)) == pt(CFG5, 0, 1)


def test_mobius_translation():
    gamma = Mobius.affine(CFG3, CFG3.one(), CFG3.from_int(4))
    assert apply_mobius_point(gamma, pt(CFG3, 0, Fraction(-1, 2))) == pt(
        CFG3, 4, Fraction(-1, 2)
    )


def test_mobius_preserves_rho():
    rng = rng_for("isom")
    for _ in range(60):
        g = random_mobius(CFG3, rng)
        x = random_point(CFG3, rng)
        y = random_point(CFG3, rng)
        assert rho(apply_mobius_point(g, x), apply_mobius_point(g, y)) == rho(x, y)


def test_mobius_round_trip():
    rng = rng_for("roundtrip")
    for _ in range(40):
        g = random_mobius(CFG3, rng)
        x = random_point(CFG3, rng)
        assert apply_mobius_point(g.inverse(), apply_mobius_point(g, x)) == x


# -- image points -------------------------------------------------------------------------


def test_image_point_good_reduction():
    m = parse_map("z^2", CFG5)
    assert image_point(m, gauss_point(CFG5)) == gauss_point(CFG5)


def test_image_point_pz2():
    m = parse_map("5*z^2", CFG5)
    assert image_point(m, gauss_point(CFG5)) == pt(CFG5, 0, -1)


def test_image_point_parabolic_period_two():
    # phi^2 fixes the ramification retraction point (p = 2 fixture)
    cfg = FieldConfig("padic", p=2, e=2)
    m = parse_map("(z-2)*(z-1)/z", cfg)
    from berkres.ratmap import iterate

    m2 = iterate(m, 2)
    xi_m = pt(cfg, 0, Fraction(-1, 2))
    assert image_point(m2, xi_m) == xi_m


def test_image_fixed_iff_nonconstant_reduction():
    from berkres import ratmap as rm

    rng = rng_for("fixiff")
    for _ in range(60):
        m = normalize(random_quadratic(CFG3, rng))
        red = reduce_map(m)
        fixed = image_point(m, gauss_point(CFG3)) == gauss_point(CFG3)
        assert fixed == (red.kind == rm.NONCONSTANT)


def test_loxodromic_isometry_on_marked_segment():
    # rho(phi x, phi y) = rho(x, y) for sampled pairs on [gauss, xi_M]
    cfg = FieldConfig("padic", p=3, e=8)
    m = parse_map("-z*(z-10)/(z-4)", cfg)
    g = gauss_point(cfg)
    xi_m = TypeIIPoint(cfg, cfg.from_int(4), Fraction(-1, 2))
    samples = [point_along(g, xi_m, Fraction(k, 8)) for k in range(5)]
    pairs = [(samples[i], samples[j]) for i in range(3) for j in range(i + 1, 5)][:5]
    for x, y in pairs:
        assert rho(image_point(m, x), image_point(m, y)) == rho(x, y)


# -- literals --------------------------------------------------------------------------------


def test_point_literals():
    assert parse_point("4@-1/2", CFG3) == pt(CFG3, 4, Fraction(-1, 2))
    assert format_point(parse_point("4@-1/2", CFG3)) == "4@-1/2"
    # inf@t is the inverted-chart disk: the standard-chart point (0, -t)
    assert parse_point("inf@-1", CFG3) == pt(CFG3, 0, 1)
