"""Intrinsic reductions, depths, local degrees, semistability."""

from fractions import Fraction

import pytest

from berkres import redtheory as rt
from berkres.berktree import TypeIIPoint, direction_of, gauss_point, image_point
from berkres.ratmap import parse_map
from berkres.redtheory import Semistability
from berkres.valfield import INF_TAG, FieldConfig

from conftest import random_point, random_quadratic, rng_for

CFG3 = FieldConfig("padic", p=3, e=2)
CFG5 = FieldConfig("padic", p=5, e=1)


def pt(cfg, center, t):
    return TypeIIPoint(cfg, cfg.from_int(center), Fraction(t))


# -- intrinsic reduction ---------------------------------------------------------


def test_intrinsic_z2_fixed():
    ir = rt.intrinsic_reduction(parse_map("z^2", CFG5), gauss_point(CFG5))
    assert ir.fixed and ir.reduction.divided_degree == 2


def test_intrinsic_pz2_constant():
    ir = rt.intrinsic_reduction(parse_map("5*z^2", CFG5), gauss_point(CFG5))
    assert not ir.fixed
    assert ir.constant_dir.tag == CFG5.residue_field().zero


def test_intrinsic_loxodromic():
    ir = rt.intrinsic_reduction(parse_map("-z*(z-10)/(z-4)", CFG3), gauss_point(CFG3))
    assert ir.fixed and ir.reduction.divided_degree == 1
    f3 = CFG3.residue_field()
    # residue action is -z
    assert ir.acts_on_tag(f3.from_int(1)) == f3.from_int(2)


# -- depth profiles: worked examples and the brute-force oracle -------------------


def test_profile_z2():
    prof = rt.depth_profile(parse_map("z^2", CFG5), gauss_point(CFG5))
    assert prof.point_mass == 2 and not prof.entries


def test_profile_pz2():
    prof = rt.depth_profile(parse_map("5*z^2", CFG5), gauss_point(CFG5))
    assert prof.point_mass == 0
    assert len(prof.entries) == 1
    assert prof.entries[0].tag is INF_TAG and prof.entries[0].dep == 2


def test_profile_loxodromic():
    prof = rt.depth_profile(parse_map("-z*(z-10)/(z-4)", CFG3), gauss_point(CFG3))
    assert prof.point_mass == 1
    assert len(prof.entries) == 1
    assert prof.entries[0].tag == CFG3.residue_field().from_int(1)
    assert prof.entries[0].dep == 1


def preimage_oracle_masses(m, x, candidates):
    """Brute-force oracle: the pullback of the Dirac mass at x, located by
    directly checking image_point on hand-listed candidate preimages."""
    found = []
    total = 0
    for cand, mult in candidates:
        if image_point(m, cand) == x:
            found.append((cand, mult))
            total += mult
    assert total == m.degree, "oracle candidate list must capture all preimages"
    return found


def test_profile_matches_preimage_count_pz2():
    # preimage of the Gauss point under 5z^2 is the single point 0@1/2, mass 2
    cfg = FieldConfig("padic", p=5, e=2)
    m = parse_map("5*z^2", cfg)
    g = gauss_point(cfg)
    pre = pt(cfg, 0, Fraction(1, 2))
    masses = preimage_oracle_masses(m, g, [(pre, 2)])
    prof = rt.depth_profile(m, g)
    for point, mult in masses:
        v = direction_of(g, point)
        assert prof.dep_at(v) == mult


def test_profile_matches_preimage_count_loxodromic():
    # preimages of the Gauss point: itself (mass 1) and 1@-1 inside U(1)
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    g = gauss_point(CFG3)
    eta = pt(CFG3, 1, -1)
    masses = preimage_oracle_masses(m, g, [(g, 1), (eta, 1)])
    assert len(masses) == 2
    prof = rt.depth_profile(m, g)
    assert prof.point_mass == 1
    assert prof.dep_at(direction_of(g, eta)) == 1


# -- tangent maps -------------------------------------------------------------------


def test_tangent_z2():
    m = parse_map("z^2", CFG5)
    g = gauss_point(CFG5)
    v0 = direction_of(g, pt(CFG5, 0, -1))
    assert rt.tangent_image(m, g, v0).tag == CFG5.residue_field().zero


def test_tangent_loxodromic_rotates():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    g = gauss_point(CFG3)
    prof = rt.depth_profile(m, g)
    v1 = prof.direction(prof.entries[0].tag)
    assert rt.tangent_image(m, g, v1).tag == CFG3.residue_field().from_int(2)


def test_tangent_pz2_inf():
    m = parse_map("5*z^2", CFG5)
    g = gauss_point(CFG5)
    prof = rt.depth_profile(m, g)
    img = rt.tangent_image(m, g, prof.direction(INF_TAG))
    # the image direction at 0@-1 contains the Gauss point
    assert img.base == pt(CFG5, 0, -1)
    assert img == direction_of(img.base, g)


def test_probe_agrees_with_residue_action():
    rng = rng_for("probe-res")
    checked = 0
    for _ in range(40):
        m = random_quadratic(CFG3, rng)
        g = gauss_point(CFG3)
        prof = rt.depth_profile(m, g)
        y = image_point(m, g)
        for entry in prof.entries:
            v = prof.direction(entry.tag)
            if not v.is_liftable():
                continue
            try:
                probed = rt.probe_tangent_image(m, g, v)
            except rt.ProbeStabilizationError:
                continue
            assert probed == rt._tangent_image_residue(m, g, y, v)
            checked += 1
    assert checked >= 10


# -- local degrees --------------------------------------------------------------------


def test_local_degree_examples():
    assert rt.local_degree(parse_map("z^2", CFG5), gauss_point(CFG5)) == 2
    lox = parse_map("-z*(z-10)/(z-4)", CFG3)
    assert rt.local_degree(lox, gauss_point(CFG3)) == 1
    assert rt.local_degree(lox, pt(CFG3, 4, Fraction(-1, 2))) == 2


def test_surplus_examples():
    # z^2: m = 2, s = 0 on the fixed 0 direction (no surplus anywhere)
    data = rt.directional_surplus_degrees(parse_map("z^2", CFG5), gauss_point(CFG5))
    assert data.deg_xi == 2 and not data.rows

    # pz^2 at the inf direction: dep 2 = s 0 + m 2 * [indicator 1]
    data = rt.directional_surplus_degrees(parse_map("5*z^2", CFG5), gauss_point(CFG5))
    assert len(data.rows) == 1
    row = data.rows[0]
    assert (row.m, row.s, row.indicator) == (2, 0, 1)

    # loxodromic at the marked direction: fixed point case, dep = s
    data = rt.directional_surplus_degrees(
        parse_map("-z*(z-10)/(z-4)", CFG3), gauss_point(CFG3)
    )
    row = data.rows[0]
    assert (row.m, row.s, row.indicator) == (1, 1, 0)


def test_isometry_criterion_along_germ():
    # m_v = 1 at the marked direction implies local degree 1 along its germ
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    g = gauss_point(CFG3)
    data = rt.directional_surplus_degrees(m, g)
    row = data.rows[0]
    assert row.m == 1
    cfg8 = FieldConfig("padic", p=3, e=8)
    m8 = parse_map("-z*(z-10)/(z-4)", cfg8)
    # strictly inside the germ (before the breakpoint at 1/2)
    for h in (Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)):
        sample = TypeIIPoint(cfg8, cfg8.from_int(1), -h)
        assert rt.local_degree(m8, sample) == 1

    # contrapositive: at the ramification point the local degree is 2
    assert rt.local_degree(m8, TypeIIPoint(cfg8, cfg8.from_int(4), Fraction(-1, 2))) == 2


# -- the random bookkeeping suite --------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_random_bookkeeping(p):
    """Mass conservation, the argument-principle double computation, and the
    two sum rules on random quadratic maps at random type II points; the
    checks raise inside directional_surplus_degrees on any disagreement."""
    cfg = FieldConfig("padic", p=p, e=2)
    rng = rng_for(f"bookkeeping:{p}")
    maps_done = 0
    while maps_done < 34:
        m = random_quadratic(cfg, rng)
        maps_done += 1
        for _ in range(3):
            x = random_point(cfg, rng)
            prof = rt.depth_profile(m, x)
            total = prof.point_mass + sum(e.dep * e.nroots for e in prof.entries)
            assert total == 2
            data = rt.directional_surplus_degrees(m, x)
            assert sum(r.s * r.nroots for r in data.rows) == 2 - data.deg_xi
            for row in data.rows:
                assert row.dep == row.s + row.m * row.indicator


# -- semistability ------------------------------------------------------------------------


def test_semistability_examples():
    assert rt.semistability_check(parse_map("z^2", CFG5), gauss_point(CFG5)) is Semistability.STABLE
    assert (
        rt.semistability_check(parse_map("5*z^2", CFG5), gauss_point(CFG5))
        is Semistability.UNSTABLE
    )
    assert (
        rt.semistability_check(parse_map("-z*(z-10)/(z-4)", CFG3), gauss_point(CFG3))
        is Semistability.STABLE
    )


def test_semistability_needs_degree():
    with pytest.raises(ValueError):
        rt.semistability_check(
            parse_map("z+1", CFG5), gauss_point(CFG5)
        )
