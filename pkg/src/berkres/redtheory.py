"""Intrinsic reductions, depth profiles, local degrees, and semistability.

The computational route is reduction-theoretic throughout.  Conjugating the
map so the base point sits at the Gauss point makes the pullback of the Dirac
mass readable off the hole divisor: the mass entering the component U(v) is
the multiplicity of v's residue tag in H, and the mass staying at the point
is the degree of the divided reduction when the point is fixed.  Surplus
degrees come from the same rule applied to the pair whose source frame is the
base point but whose target frame is the image point, and every quantity is
cross-checked through the non-archimedean argument principle, failing loudly
on any disagreement.
"""

import enum
from fractions import Fraction

from . import berktree, polys, ratmap, valfield
from .berktree import Direction, direction_of, frame, image_point
from .errors import (
    ConsistencyError,
    IrrationalDirectionError,
    ProbeStabilizationError,
    UnliftableDirectionError,
)
from .finitefield import FFElem, FiniteField, embed, get_field, minimal_polynomial
from .ratmap import normalize, reduce_map
from .valfield import ConjClassTag, INF_TAG


class ProfileEntry:
    """One direction class in a depth profile: per-root depth and root count."""

    __slots__ = ("tag", "dep", "nroots")

    def __init__(self, tag, dep, nroots=1):
        self.tag = tag
        self.dep = dep
        self.nroots = nroots

    def __repr__(self):
        return f"({valfield.format_residue(self.tag)}: dep {self.dep} x{self.nroots})"


class DepthProfile:
    """Finitely supported direction -> mass map of the pulled-back Dirac measure."""

    def __init__(self, base, frame_mobius, entries, point_mass, reduction, degree):
        self.base = base
        self.frame = frame_mobius
        self.entries = entries
        self.point_mass = point_mass
        self.reduction = reduction  # ReducedMap of the conjugated normalized pair
        self.degree = degree
        total = point_mass + sum(e.dep * e.nroots for e in entries)
        if total != degree:
            raise ConsistencyError(
                f"depth masses {total} do not add up to the degree {degree}"
            )

    def direction(self, tag):
        return Direction(self.base, tag, self.frame)

    def support(self):
        return [self.direction(e.tag) for e in self.entries]

    def dep_at_tag(self, tag):
        for e in self.entries:
            if berktree._tags_equal(e.tag, tag):
                return e.dep
        return 0

    def dep_at(self, direction):
        """Depth at an externally constructed direction (frames reconciled)."""
        here = Direction(self.base, direction.tag, direction.frame)
        for e in self.entries:
            if self.direction(e.tag) == here:
                return e.dep
        return 0

    def __repr__(self):
        return f"DepthProfile(point {self.point_mass}, {self.entries})"


class IntrinsicReduction:
    """Tangent action at a fixed point, or the constant image direction."""

    def __init__(self, base, fixed, reduction=None, frame_mobius=None, constant_dir=None):
        self.base = base
        self.fixed = fixed
        self.reduction = reduction        # ReducedMap when fixed
        self.frame = frame_mobius
        self.constant_dir = constant_dir  # Direction when not fixed

    def acts_on_tag(self, tag):
        """Image of a direction tag under the residue action (fixed case)."""
        if not self.fixed:
            raise ValueError("constant intrinsic reduction has no residue action")
        return _divided_image_tag(self.reduction, tag)

    def fixes_tag(self, tag):
        """Whether the direction with this profile-frame tag is fixed."""
        if not self.fixed:
            # the constant direction maps every direction, itself included,
            # to itself; all other directions move
            const = self.constant_dir
            probe = Direction(self.base, tag, self.frame)
            return probe == const
        if isinstance(tag, ConjClassTag):
            return _class_maps_to(self.reduction, tag, tag)
        return berktree._tags_equal(self.acts_on_tag(tag), tag)

    def __repr__(self):
        if self.fixed:
            return f"IntrinsicReduction(fixed, deg {self.reduction.divided_degree})"
        return f"IntrinsicReduction(constant -> {self.constant_dir})"


def intrinsic_reduction(m, x):
    """The tangent-space reduction of the map at x."""
    y = image_point(m, x)
    fr = frame(x)
    if y == x:
        conj = normalize(ratmap.conjugate(m, fr))
        red = reduce_map(conj)
        if red.kind != ratmap.NONCONSTANT:
            raise ConsistencyError("fixed point with constant divided reduction")
        return IntrinsicReduction(x, True, reduction=red, frame_mobius=fr)
    return IntrinsicReduction(
        x, False, frame_mobius=fr, constant_dir=direction_of(x, y)
    )


# ---------------------------------------------------------------------------
# Depth profiles via the hole divisor
# ---------------------------------------------------------------------------


def _hole_entries(cfg, red):
    """Profile entries of a reduced map's hole divisor."""
    entries = []
    if polys.pdeg(red.hole_uni) >= 1:
        for fac, mult in valfield.residue_factor(cfg, red.hole_uni):
            deg = len(fac) - 1
            if deg == 1:
                root = -fac[0] / fac[1]
                if cfg.backend == valfield.PADIC:
                    root = valfield.canonical_residue(root)
                entries.append(ProfileEntry(root, mult, 1))
                continue
            roots = valfield.residue_roots(cfg, fac)
            if roots is None:
                entries.append(ProfileEntry(ConjClassTag(red.field, fac), mult, deg))
            else:
                for root in roots:
                    entries.append(ProfileEntry(root, mult, 1))
    if red.hole_y_mult:
        entries.append(ProfileEntry(INF_TAG, red.hole_y_mult, 1))
    return entries


def depth_profile(m, x):
    """Masses of the pulled-back Dirac measure at x, by direction at x."""
    fr = frame(x)
    conj = normalize(ratmap.conjugate(m, fr))
    red = reduce_map(conj)
    entries = _hole_entries(m.cfg, red)
    point_mass = red.divided_degree if red.kind == ratmap.NONCONSTANT else 0
    return DepthProfile(x, fr, entries, point_mass, red, m.degree)


# ---------------------------------------------------------------------------
# Tangent maps
# ---------------------------------------------------------------------------

_PROBE_LADDER_START = 8  # first probe step 8/e, halving down to 1/e


def probe_tangent_image(m, x, v):
    """Tangent image by step-halving probes along a liftable direction.

    A probe at step h is certified against the probe at 2h: the directions
    must agree and the image distance must exactly halve (below the first
    breakpoint the map is affine through the base point with slope m_v).
    Raises ProbeStabilizationError when the representable ladder (steps down
    to 1/e) is exhausted without a certified pair.
    """
    y = image_point(m, x)
    e = m.cfg.e
    step = Fraction(_PROBE_LADDER_START, e)
    prev = None  # (direction, image distance) at the previous (doubled) step
    for _ in range(8):
        xp = v.representative(step)
        yp = image_point(m, xp)
        if yp == y:
            # image folded back onto phi(x): the step is beyond a breakpoint
            prev = None
        else:
            cur = direction_of(y, yp)
            dist = berktree.rho(y, yp)
            if prev is not None and cur == prev[0] and prev[1] == 2 * dist:
                return cur
            prev = (cur, dist)
        step = step / 2
        if step.denominator > e:
            break
    raise ProbeStabilizationError(
        f"tangent probe did not stabilize at {berktree.format_point(x)}"
    )


def tangent_image(m, x, v):
    """Image direction of v under the tangent map at x.

    Probes along the direction per probe_tangent_image and cross-checks the
    result against the exact residue action of the source/target-conjugated
    divided reduction; when the direction has no center lift or the
    representable probe ladder is too coarse to certify, the residue action
    alone is used.
    """
    y = image_point(m, x)
    algebraic = _tangent_image_residue(m, x, y, v)
    if v.is_liftable():
        try:
            probed = probe_tangent_image(m, x, v)
        except ProbeStabilizationError:
            probed = None
        if probed is not None and probed != algebraic:
            raise ConsistencyError(
                f"probe tangent {probed!r} disagrees with residue action {algebraic!r}"
            )
    return algebraic


def _two_frame_reduction(m, x, y):
    psi = normalize(ratmap.conjugate_frames(m, frame(x), frame(y)))
    red = reduce_map(psi)
    if red.kind != ratmap.NONCONSTANT:
        raise ConsistencyError("source/target conjugated pair has constant reduction")
    return red


def _divided_image_tag(red, tag):
    if isinstance(tag, ConjClassTag):
        return _class_image_tag(red, tag)
    out = red.divided_apply(tag)
    if isinstance(out, FFElem):
        out = valfield.canonical_residue(out)
    return out


def _tangent_image_residue(m, x, y, v):
    red = _two_frame_reduction(m, x, y)
    fr = frame(x)
    # re-express the tag in the frame the reduction was computed in
    tag = berktree.transport_tag(Direction(x, INF_TAG, fr), v)
    return Direction(y, _divided_image_tag(red, tag), frame(y))


def _adhoc_quotient(tag):
    """F_p[x]/(h) for a conjugacy class over the prime field."""
    base = tag.field
    if base.m != 1:
        raise UnliftableDirectionError("nested conjugacy classes are unsupported")
    coeffs = [c.coeffs[0] for c in tag.coeffs]
    return FiniteField(base.p, len(coeffs) - 1, coeffs)


def _class_image_tag(red, tag):
    """Minimal polynomial of the divided-map image of a class root."""
    quotient = _adhoc_quotient(tag)
    base = tag.field
    emb = lambda b: quotient.from_int(b.coeffs[0])  # noqa: E731
    p_div = [emb(c) for c in red.divided[0]]
    q_div = [emb(c) for c in red.divided[1]]
    alpha = quotient.gen()
    num = polys.peval(p_div, alpha, quotient)
    den = polys.peval(q_div, alpha, quotient)
    if den == quotient.zero:
        return INF_TAG
    beta = num / den
    mp = minimal_polynomial(beta, quotient, emb, base)
    if len(mp) == 2:
        return -mp[0] / mp[1]
    return ConjClassTag(base, polys.pmonic(mp, base))


def _class_maps_to(red, tag, target):
    """Whether the divided reduction sends the class roots onto the target tag."""
    field = tag.field
    h = list(tag.coeffs)
    p_div, q_div = list(red.divided[0]), list(red.divided[1])
    if target is INF_TAG:
        w = q_div
    elif isinstance(target, ConjClassTag):
        # target poly evaluated at P/Q and cleared: sum w_i P^i Q^(k-i)
        k = target.count
        w = []
        for i, wc in enumerate(target.coeffs):
            term = polys.pmul(
                polys.ppow(p_div, i, field),
                polys.ppow(q_div, k - i, field),
                field,
            )
            w = polys.padd(w, polys.pscale(term, wc))
    else:
        w = polys.psub(p_div, polys.pscale(q_div, target))
    if polys.pzero(w):
        return True
    return polys.pzero(polys.pmod(w, h, field))


# ---------------------------------------------------------------------------
# Local degrees
# ---------------------------------------------------------------------------


def local_degree(m, x):
    """deg_x(phi): degree of the divided reduction with both frames moved."""
    y = image_point(m, x)
    red = _two_frame_reduction(m, x, y)
    return red.divided_degree


def _fiber_form(red, target):
    """Form whose roots are the divided-map preimages of the target tag."""
    field = red.field
    p_div, q_div = list(red.divided[0]), list(red.divided[1])
    if target is INF_TAG:
        w = list(q_div)
    else:
        w = [pc - target * qc for pc, qc in zip(p_div, q_div)]
    return w


def _tag_multiplicity(cfg, form_coeffs, tag, formal_degree):
    """Multiplicity of the direction tag as a root of the given residue form."""
    uni = polys.ptrim(list(form_coeffs))
    if not uni:
        raise ConsistencyError("fiber form vanished identically")
    if tag is INF_TAG:
        return formal_degree - polys.pdeg(uni)
    if isinstance(tag, ConjClassTag):
        field = tag.field
        h = list(tag.coeffs)
        mult = 0
        while True:
            q, r = polys.pdivmod(uni, h, field)
            if not polys.pzero(r):
                return mult
            mult += 1
            uni = q
            if polys.pzero(uni):
                return mult
    field = tag.field if isinstance(tag, FFElem) else cfg.residue_field()
    if isinstance(tag, FFElem) and uni and isinstance(uni[0], FFElem):
        coeff_field = uni[0].field
        if coeff_field is not field:
            if field.m % coeff_field.m == 0:
                phi = embed(coeff_field, field)
                uni = [phi(c) for c in uni]
            else:
                big = get_field(field.p, _lcm(field.m, coeff_field.m))
                phi_c = embed(coeff_field, big)
                phi_t = embed(field, big)
                return polys.root_multiplicity([phi_c(c) for c in uni], phi_t(tag), big)
    return polys.root_multiplicity(uni, tag, field)


def _lcm(a, b):
    from math import gcd

    return a * b // gcd(a, b)


class DirectionalDegrees:
    """Per-direction bookkeeping row: depth, m_v, s_v, tangent indicator."""

    __slots__ = ("tag", "nroots", "dep", "m", "s", "indicator")

    def __init__(self, tag, nroots, dep, m, s, indicator):
        self.tag = tag
        self.nroots = nroots
        self.dep = dep
        self.m = m
        self.s = s
        self.indicator = indicator

    def __repr__(self):
        return (
            f"(dir {valfield.format_residue(self.tag)}: dep {self.dep}, "
            f"m {self.m}, s {self.s}, ind {self.indicator})"
        )


class LocalDegreeData:
    def __init__(self, base, frame_mobius, deg_xi, rows):
        self.base = base
        self.frame = frame_mobius
        self.deg_xi = deg_xi
        self.rows = rows

    def __repr__(self):
        return f"LocalDegreeData(deg {self.deg_xi}, rows {self.rows})"


def directional_surplus_degrees(m, x):
    """Directional and surplus local degrees on the depth support.

    m_v is the local multiplicity of the two-frame divided reduction at v's
    tag; s_v is measured twice, as the hole multiplicity of the two-frame
    pair and through the argument principle from the depth profile, and the
    two sum rules are checked exactly.  Any disagreement raises.
    """
    cfg = m.cfg
    profile = depth_profile(m, x)
    y = image_point(m, x)
    fixed_point = y == x
    red2 = _two_frame_reduction(m, x, y)
    deg_xi = red2.divided_degree
    back_dir = None if fixed_point else direction_of(y, x)

    # surplus via the two-frame hole divisor: (phi^* delta_y)(U(v))
    surplus_entries = _hole_entries(cfg, red2)

    def surplus_at(tag):
        for e in surplus_entries:
            if berktree._tags_equal(e.tag, tag):
                return e.dep
        return 0

    rows = []
    for entry in profile.entries:
        tag = entry.tag
        target = _divided_image_tag(red2, tag)
        if isinstance(target, ConjClassTag):
            # fiber form over a class target: clear the target through the pair
            m_v = _class_fiber_multiplicity(red2, tag, target)
        else:
            m_v = _tag_multiplicity(cfg, _fiber_form(red2, target), tag, deg_xi)
        if not 1 <= m_v <= deg_xi:
            raise ConsistencyError(f"directional degree {m_v} outside 1..{deg_xi}")
        if fixed_point:
            indicator = 0
        else:
            if isinstance(tag, ConjClassTag):
                img_dir = _tangent_image_residue(m, x, y, profile.direction(tag))
                indicator = 1 if img_dir == back_dir else 0
            else:
                img_dir = tangent_image(m, x, profile.direction(tag))
                indicator = 1 if img_dir == back_dir else 0
        s_v = entry.dep - m_v * indicator
        if s_v < 0 or s_v > m.degree - deg_xi:
            raise ConsistencyError(
                f"surplus {s_v} outside 0..{m.degree - deg_xi} at {tag!r}"
            )
        measured = surplus_at(tag)
        if measured != s_v:
            raise ConsistencyError(
                f"argument principle mismatch at {tag!r}: "
                f"dep {entry.dep} = s {measured} + m {m_v} * ind {indicator} fails"
            )
        rows.append(DirectionalDegrees(tag, entry.nroots, entry.dep, m_v, s_v, indicator))

    # sum rule (surplus): total surplus = d - deg_xi
    total_s = sum(r.s * r.nroots for r in rows)
    if total_s != m.degree - deg_xi:
        raise ConsistencyError(
            f"surplus sum {total_s} != degree difference {m.degree - deg_xi}"
        )

    # sum rule (directional): every reachable target's fiber sums to deg_xi
    targets = []
    for r in rows:
        t = _divided_image_tag(red2, r.tag)
        if not any(berktree._tags_equal(t, u) for u in targets):
            targets.append(t)
    for t in targets:
        if isinstance(t, ConjClassTag):
            continue  # class fibers are checked through their members above
        fiber = _fiber_form(red2, t)
        total = 0
        uni = polys.ptrim(list(fiber))
        inf_mult = deg_xi - polys.pdeg(uni) if uni else deg_xi
        total += inf_mult
        if uni and polys.pdeg(uni) >= 1:
            for fac, mult in valfield.residue_factor(cfg, uni):
                total += mult * (len(fac) - 1)
        if total != deg_xi:
            raise ConsistencyError(
                f"directional sum over the fiber of {t!r} is {total} != {deg_xi}"
            )
    return LocalDegreeData(x, profile.frame, deg_xi, rows)


def _class_fiber_multiplicity(red, tag, target):
    """m_v when the image tag is itself a conjugacy class."""
    field = tag.field
    h = list(tag.coeffs)
    p_div, q_div = list(red.divided[0]), list(red.divided[1])
    k = target.count
    w = []
    for i, wc in enumerate(target.coeffs):
        term = polys.pmul(
            polys.ppow(p_div, i, field), polys.ppow(q_div, k - i, field), field
        )
        w = polys.padd(w, polys.pscale(term, wc))
    mult = 0
    uni = polys.ptrim(w)
    while uni:
        q, r = polys.pdivmod(uni, h, field)
        if not polys.pzero(r):
            break
        mult += 1
        uni = q
    # w stacks k target factors; each contributes the same root multiplicity
    if mult % k != 0:
        raise ConsistencyError("class fiber multiplicity not divisible by class size")
    return mult // k


# ---------------------------------------------------------------------------
# Semistability
# ---------------------------------------------------------------------------


class Semistability(enum.Enum):
    STABLE = "stable"
    SEMISTABLE_NOT_STABLE = "semistable-not-stable"
    UNSTABLE = "unstable"


def _fixed_direction_tags(cfg, ir):
    """Tags of fixed directions (profile frame); irrational Q(s) classes are
    skipped, which is safe: their depth is forced to 0 by the profile already
    having factored, and depth-0 directions never violate the bounds."""
    if not ir.fixed:
        return [ir.constant_dir.tag]
    red = ir.reduction
    field = red.field
    p_div, q_div = list(red.divided[0]), list(red.divided[1])
    # finite fixed tags are the roots of P(x) - x*Q(x)
    fix = polys.psub(list(p_div), polys.pshift(list(q_div), 1, field))
    tags = []
    uni = polys.ptrim(fix)
    if uni and polys.pdeg(uni) >= 1:
        try:
            factors = valfield.residue_factor(cfg, uni)
        except IrrationalDirectionError:
            factors = []
        for fac, _mult in factors:
            deg = len(fac) - 1
            if deg == 1:
                root = -fac[0] / fac[1]
                if cfg.backend == valfield.PADIC:
                    root = valfield.canonical_residue(root)
                tags.append(root)
            else:
                roots = valfield.residue_roots(cfg, fac)
                if roots is None:
                    tags.append(ConjClassTag(field, fac))
                else:
                    tags.extend(roots)
    elif polys.pzero(uni):
        # the divided map is the identity: every direction is fixed
        return None
    if berktree._tags_equal(_divided_image_tag(red, INF_TAG), INF_TAG):
        tags.append(INF_TAG)
    return tags


def semistability_check(m, x):
    """Two-tier depth bounds over depth-positive and fixed directions."""
    d = m.degree
    if d <= 1:
        raise ValueError("semistability needs degree > 1")
    profile = depth_profile(m, x)
    ir = intrinsic_reduction(m, x)
    half_up = Fraction(d + 1, 2)
    half = Fraction(d, 2)
    half_down = Fraction(d - 1, 2)

    fixed_tags = _fixed_direction_tags(m.cfg, ir)
    identity_action = fixed_tags is None

    def is_fixed(tag):
        if identity_action:
            return True
        if any(berktree._tags_equal(tag, t) for t in fixed_tags):
            return True
        if not ir.fixed:
            return ir.fixes_tag(tag)
        return False

    semistable = True
    stable = True
    for entry in profile.entries:
        dep = Fraction(entry.dep)
        if is_fixed(entry.tag):
            if not dep < half:
                semistable = False
            if not dep < half_down:
                stable = False
        else:
            if not dep <= half_up:
                semistable = False
            if not dep <= half:
                stable = False
    # fixed directions outside the support have depth 0, and 0 < (d-1)/2
    # for every d > 1, so they can never violate either bound
    if not semistable:
        return Semistability.UNSTABLE
    if not stable:
        return Semistability.SEMISTABLE_NOT_STABLE
    return Semistability.STABLE
