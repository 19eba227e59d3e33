"""Verification pipeline: normal forms, classification, sequences, reports."""

from fractions import Fraction

import pytest

from berkres import hypres, ratmap
from berkres.berktree import TypeIIPoint, apply_mobius_point, gauss_point
from berkres.harness import (
    BIJECTIVE_ACYCLIC,
    BIJECTIVE_CYCLIC,
    CONSTANT_IMAGE,
    TWO_TO_ONE,
    NormalFormSpec,
    abc_sequences,
    classify_reduction,
    ramification_retraction,
    verify_theorem,
)
from berkres.ratmap import parse_map
from berkres.valfield import FieldConfig

from conftest import random_mobius, rng_for

CFG3 = FieldConfig("padic", p=3, e=2)
CFG2 = FieldConfig("padic", p=2, e=2)
CFG5 = FieldConfig("padic", p=5, e=1)
LAU = FieldConfig("laurent", e=1)


def pt(cfg, center, t):
    return TypeIIPoint(cfg, cfg.from_int(center), Fraction(t))


# -- normal forms ----------------------------------------------------------------


def test_loxodromic_normal_form_matches_expression():
    spec = NormalFormSpec(
        CFG3,
        "loxodromic",
        omega=CFG3.from_int(-1),
        a=CFG3.from_int(4),
        b=CFG3.from_int(10),
    )
    assert spec.period == 2
    built = spec.to_map()
    parsed = parse_map("-z*(z-10)/(z-4)", CFG3)
    assert ratmap.projectively_equal(
        ratmap.normalize(built), ratmap.normalize(parsed)
    )


def test_parabolic_normal_form_matches_expression():
    spec = NormalFormSpec(CFG2, "parabolic", b=CFG2.from_int(2))
    assert spec.period == 2
    built = spec.to_map()
    parsed = parse_map("(z-2)*(z-1)/z", CFG2)
    assert ratmap.projectively_equal(
        ratmap.normalize(built), ratmap.normalize(parsed)
    )


def test_normal_form_validation():
    with pytest.raises(ValueError):
        NormalFormSpec(
            CFG3, "loxodromic", omega=CFG3.from_int(-1), a=CFG3.from_int(4), b=CFG3.from_int(4)
        )
    with pytest.raises(ValueError):
        NormalFormSpec(
            CFG3, "loxodromic", omega=CFG3.from_int(-1), a=CFG3.from_int(3), b=CFG3.from_int(10)
        )
    with pytest.raises(ValueError):
        NormalFormSpec(CFG2, "parabolic", b=CFG2.from_int(1))  # |b| = 1


# -- classification ----------------------------------------------------------------


def test_classify_z2():
    assert classify_reduction(parse_map("z^2", CFG5)).kind == TWO_TO_ONE


def test_classify_constant_image():
    # reduces to the constant 0 with two simple holes at 2 and 3 mod 5, so
    # the Gauss point minimizes while its image sits strictly below it
    m = parse_map("(5*z^2 - 5)/(z^2 + 1)", CFG5)
    cl = classify_reduction(m)
    assert cl.kind == CONSTANT_IMAGE
    assert cl.xi_phi == gauss_point(CFG5)
    rep = verify_theorem(m, 3)
    assert rep.holds
    for row in rep.per_j:
        assert row.locus == gauss_point(CFG5)


def test_classify_loxodromic():
    cl = classify_reduction(parse_map("-z*(z-10)/(z-4)", CFG3))
    assert cl.kind == BIJECTIVE_CYCLIC and cl.period == 2


def test_classify_parabolic():
    cl = classify_reduction(parse_map("(z-2)*(z-1)/z", CFG2))
    assert cl.kind == BIJECTIVE_CYCLIC and cl.period == 2


def test_classify_acyclic_laurent():
    cl = classify_reduction(parse_map("s*z*(z-(1+t^2))/(z-(1+t))", LAU))
    assert cl.kind == BIJECTIVE_ACYCLIC


# -- ramification retraction ---------------------------------------------------------


def test_retraction_loxodromic():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    assert ramification_retraction(m) == pt(CFG3, 4, Fraction(-1, 2))


def test_retraction_parabolic():
    m = parse_map("(z-2)*(z-1)/z", CFG2)
    assert ramification_retraction(m) == pt(CFG2, 0, Fraction(-1, 2))


def test_retraction_already_ramified():
    m = parse_map("z^2", CFG5)
    cl = classify_reduction(m)
    assert ramification_retraction(m, cl) == gauss_point(CFG5)


# -- depth sequences ---------------------------------------------------------------


def test_abc_sequences_loxodromic():
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    seqs = abc_sequences(m, 4)
    assert seqs.a == [1, 1, 3, 5]
    assert seqs.b == [0, 0, 2, 2]
    assert seqs.c == [1, 1, 3, 5]
    assert seqs.check_bounds() == []
    assert seqs.check_recursions() == []
    # A_1 = 1 and B_1 = 0: single hole below the period
    assert (seqs.a[0], seqs.b[0]) == (1, 0)


def test_abc_total_mass():
    m = parse_map("(z-2)*(z-1)/z", CFG2)
    seqs = abc_sequences(m, 3)
    for j1 in (1, 2, 3):
        total = seqs.a[j1 - 1] + seqs.b[j1 - 1] + seqs.c[j1 - 1] + seqs.point_masses[j1 - 1]
        assert total == 2**j1


def test_abc_bounds_at_period():
    # C_2 <= A_2 <= (2^2 - 2)/2 = 1 and B_2 < (2^2 - 1)/2
    m = parse_map("(z-2)*(z-1)/z", CFG2)
    seqs = abc_sequences(m, 2)
    assert seqs.c[1] <= seqs.a[1] <= 1
    assert seqs.b[1] < Fraction(3, 2)


# -- the full verifier ----------------------------------------------------------------


def test_verify_z2_all_loci_at_gauss():
    rep = verify_theorem(parse_map("z^2", CFG5), 4, map_text="z^2")
    assert rep.holds
    for row in rep.per_j:
        assert row.locus == gauss_point(CFG5)


def test_verify_report_schema():
    rep = verify_theorem(parse_map("-z*(z-10)/(z-4)", CFG3), 3, map_text="-z*(z-10)/(z-4)")
    data = rep.to_dict()
    assert set(data["field"]) == {"backend", "p", "e"}
    for key in ("map", "classification", "period", "xi_phi", "xi_0", "per_j"):
        assert key in data
    for row in data["per_j"]:
        for key in ("j", "locus", "semistability", "depths", "millis"):
            assert key in row
    assert data["per_j"][0]["locus"] == {"center": "0", "t": "0"}
    assert data["per_j"][1]["locus"]["t"] == "-1/2"


def test_semistability_coincides_with_locus():
    """Non-unstable exactly on the reported locus: probe points separated
    from it along the connecting ray are unstable."""
    from berkres import redtheory
    from berkres.redtheory import Semistability

    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    for j in (1, 2, 3):
        mj = ratmap.iterate(m, j)
        locus = hypres.min_locus(mj)
        assert redtheory.semistability_check(mj, locus) is not Semistability.UNSTABLE
        g = gauss_point(CFG3)
        probes = []
        if locus != g:
            # between the Gauss point and the locus, and beyond it
            probes.append(g)
            beyond = TypeIIPoint(CFG3, locus.center, locus.texp - Fraction(1, 2))
            probes.append(beyond)
        else:
            probes.append(pt(CFG3, 0, -1))
            probes.append(pt(CFG3, 0, 1))
        for x in probes:
            assert redtheory.semistability_check(mj, x) is Semistability.UNSTABLE


def test_pipeline_mobius_equivariance():
    """verify_theorem on a conjugated map reports transported loci."""
    rng = rng_for("pipeline-equiv")
    m = parse_map("-z*(z-10)/(z-4)", CFG3)
    base = verify_theorem(m, 2)
    for _ in range(3):
        g = random_mobius(CFG3, rng)
        conj = ratmap.normalize(ratmap.conjugate(m, g))
        rep = verify_theorem(conj, 2)
        assert rep.holds
        for row_base, row_conj in zip(base.per_j, rep.per_j):
            assert row_conj.locus == apply_mobius_point(g.inverse(), row_base.locus)
