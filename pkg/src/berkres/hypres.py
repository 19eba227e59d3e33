"""Rumely's resultant function, its hyperbolic companion, and exact minimization.

ordRes at a point is the valuation of the resultant of a normalized lift
moved to that point's frame.  The hyperbolic companion adds the distance to
the Gauss point, the wedge distance to the image, and an integral of the
pulled-back Dirac mass retracted onto the segment back to the Gauss point;
the integral is a finite sum because the retracted mass is an integer step
function, evaluated exactly on the (1/e)-exponent grid with each cell's jump
certified through mass conservation.  Minimization walks the slope formula:
depths are integers, slope signs are exact, and the descent only stops at a
point (or segment, odd degree) where every directional slope is nonnegative.
"""

from fractions import Fraction

from . import berktree, ratmap, redtheory
from .berktree import (
    Direction,
    Segment,
    direction_of,
    frame,
    gauss_point,
    image_point,
    point_along,
    rho,
    wedge,
)
from .errors import (
    ConsistencyError,
    EnlargeRamificationError,
    IterationCapError,
    UnliftableDirectionError,
)
from .ratmap import normalize, reduce_map
from .valfield import INF_POINT, INF_TAG

_DESCENT_CAP = 200
_DOUBLING_CAP = 48


def ord_res_at(m, x):
    """Valuation of the resultant of the normalized lift framed at x."""
    conj = normalize(ratmap.conjugate(m, frame(x)))
    return Fraction(conj.resultant().valuation())


def _mass_toward(m, base, target):
    """(phi^* delta_gauss)(U(v)) for v the direction at base toward target.

    Only the source is reframed, so the pulled-back point is the Gauss point
    of the original target coordinates.
    """
    pair = normalize(berktree._pair_source_composed(m, frame(base)))
    red = reduce_map(pair)
    v = direction_of(base, target)
    for entry in redtheory._hole_entries(m.cfg, red):
        if berktree._tags_equal(entry.tag, v.tag):
            return entry.dep
    return 0


def _retraction_integral(m, x):
    """Integral of rho(gauss, retraction of .) against phi^* delta_gauss
    over the segment [gauss, x]."""
    cfg = m.cfg
    g = gauss_point(cfg)
    total_len = rho(g, x)
    if total_len == 0:
        return Fraction(0)
    d = m.degree
    step = Fraction(1, cfg.e)

    cache = {}

    def mass_fwd(tau):
        if tau == total_len:
            return 0
        if tau not in cache:
            cache[tau] = _mass_toward(m, point_along(g, x, tau), x)
        return cache[tau]

    def jump_at(tau):
        # mass retracting exactly onto the parameter-tau point
        pt = point_along(g, x, tau)
        back = _mass_toward(m, pt, g)
        fwd = mass_fwd(tau)
        return d - fwd - back

    def cell(a, b, ma, mb):
        if ma == mb:
            return ma * (b - a)
        if ma < mb:
            raise ConsistencyError("retracted mass increased along the segment")
        if b - a == step:
            if ma - mb != jump_at(b):
                raise EnlargeRamificationError(
                    f"pullback mass jumps strictly inside the cell ({a}, {b}); "
                    f"a larger ramification index is needed to locate it"
                )
            return ma * (b - a)
        mid = a + ((b - a) / 2 / step).__floor__() * step
        if mid in (a, b):
            mid = a + step
        mm = mass_fwd(mid)
        return cell(a, mid, ma, mm) + cell(mid, b, mm, mb)

    n_cells = total_len / step
    if n_cells.denominator != 1:
        raise EnlargeRamificationError("segment length is off the exponent grid")
    return cell(Fraction(0), total_len, mass_fwd(Fraction(0)), 0)


def hypres_eval(m, x):
    """The convex piecewise-affine companion of ordRes (0 at the Gauss point)."""
    if m.degree <= 1:
        raise ValueError("hyperbolic resultant needs degree > 1")
    cfg = m.cfg
    g = gauss_point(cfg)
    y = image_point(m, x)
    rho_term = rho(x, g) / 2
    wedge_term = rho(x, wedge(y, x, g))
    integral = _retraction_integral(m, x)
    return rho_term + Fraction(wedge_term - integral, 1) / (m.degree - 1)


# ---------------------------------------------------------------------------
# Slopes
# ---------------------------------------------------------------------------


def _profile_fixedness(profile, tag, m, x):
    """Whether the direction with this profile tag is fixed by the reduction."""
    red = profile.reduction
    if red.kind == ratmap.NONCONSTANT:
        if isinstance(tag, redtheory.ConjClassTag):
            return redtheory._class_maps_to(red, tag, tag)
        return berktree._tags_equal(red.divided_apply(tag), tag)
    const_dir = direction_of(x, image_point(m, x))
    return profile.direction(tag) == const_dir


def slope_at(m, x, v):
    """Directional derivative of hypres_eval via the slope formula."""
    d = m.degree
    if d <= 1:
        raise ValueError("slope formula needs degree > 1")
    profile = redtheory.depth_profile(m, x)
    ref = Direction(x, INF_TAG, profile.frame)
    tag = berktree.transport_tag(ref, v)
    dep = profile.dep_at_tag(tag)
    fixed = _profile_fixedness(profile, tag, m, x)
    shift = Fraction(d - 1, 2) if fixed else Fraction(d + 1, 2)
    return (Fraction(-dep) + shift) / (d - 1)


def _slope_of_tag(m, x, profile, tag):
    dep = profile.dep_at_tag(tag)
    fixed = _profile_fixedness(profile, tag, m, x)
    d = m.degree
    shift = Fraction(d - 1, 2) if fixed else Fraction(d + 1, 2)
    return (Fraction(-dep) + shift) / (d - 1)


# ---------------------------------------------------------------------------
# Minimization
# ---------------------------------------------------------------------------


def _negative_candidates(m, x):
    """(slope, direction) for depth-positive directions; only those can have
    slope <= 0, since a depth-0 direction contributes +((d -+ 1)/2)/(d-1)."""
    profile = redtheory.depth_profile(m, x)
    out = []
    for entry in profile.entries:
        s = _slope_of_tag(m, x, profile, entry.tag)
        out.append((s, profile.direction(entry.tag)))
    return out


def _ray_walker(m, x, v):
    """Helpers for walking the geodesic ray from x in direction v."""
    cfg = m.cfg
    if v.tag is INF_TAG:
        endpoint = INF_POINT

        def at(h):
            return berktree.TypeIIPoint(cfg, x.center, x.texp + h)

    else:
        if not v.is_liftable():
            raise UnliftableDirectionError(
                "cannot walk along a direction without a rational center"
            )
        from .valfield import lift_residue

        center = v.frame.apply_p1(lift_residue(cfg, v.tag))
        endpoint = center

        def at(h):
            return berktree.TypeIIPoint(cfg, center, x.texp - h)

    def forward_slope(h):
        pt = at(h)
        return slope_at(m, pt, direction_of(pt, endpoint))

    def backward_slope(h):
        pt = at(h)
        return slope_at(m, pt, direction_of(pt, x))

    return at, forward_slope, backward_slope


def _advance(m, x, v, stop_predicate):
    """Walk from x along v to the first grid point where stop_predicate(slope)
    holds; the slope along a ray is nondecreasing (convexity), so doubling
    then grid bisection is exact."""
    step = Fraction(1, m.cfg.e)
    at, fwd, back = _ray_walker(m, x, v)
    lo = Fraction(0)
    h = step
    for _ in range(_DOUBLING_CAP):
        if stop_predicate(fwd(h)):
            break
        lo = h
        h = 2 * h
    else:
        raise IterationCapError("descent ray ran away without a sign change")
    hi = h
    while hi - lo > step:
        mid = lo + ((hi - lo) / 2 / step).__floor__() * step
        if mid in (lo, hi):
            mid = lo + step
        if stop_predicate(fwd(mid)):
            hi = mid
        else:
            lo = mid
    return at(hi), fwd, back, hi


def min_locus(m, descent_cap=_DESCENT_CAP):
    """Exact slope descent from the Gauss point.

    Returns the unique minimizing point for even degree; for odd degree a
    zero-slope direction at the minimizer extends to the maximal flat
    segment, whose endpoints are certified by a strict slope change.
    """
    if m.degree <= 1:
        raise ValueError("minimization needs degree > 1")
    x = gauss_point(m.cfg)
    for _ in range(descent_cap):
        cands = _negative_candidates(m, x)
        negative = [(s, v) for s, v in cands if s < 0]
        if not negative:
            zero = [(s, v) for s, v in cands if s == 0]
            if not zero:
                return x
            if m.degree % 2 == 0:
                raise ConsistencyError("zero slope at even degree cannot happen")
            return _flat_segment(m, x, [v for _s, v in zero])
        negative.sort(key=lambda sv: sv[0])
        _s, v = negative[0]
        nxt, fwd, back, h = _advance(m, x, v, lambda s: s >= 0)
        if back(h) < 0:
            raise EnlargeRamificationError(
                "the minimizer lies strictly inside a grid cell; enlarge e"
            )
        x = nxt
    raise IterationCapError(f"slope descent exceeded {descent_cap} steps")


def _flat_segment(m, x, zero_dirs):
    """Maximal zero-slope segment through x (odd degree)."""
    if len(zero_dirs) > 2:
        # impossible: zero slope needs depth (d-1)/2 on a fixed direction or
        # (d+1)/2 otherwise, and three such depths exceed the total mass
        raise ConsistencyError("more than two zero-slope directions")
    endpoints = []
    for v in zero_dirs:
        pt, fwd, back, h = _advance(m, x, v, lambda s: s > 0)
        # the plateau must close exactly at a grid point
        if back(h) != 0:
            raise EnlargeRamificationError(
                "flat segment endpoint lies strictly inside a grid cell; enlarge e"
            )
        endpoints.append(pt)
    if len(endpoints) == 2:
        return Segment(endpoints[0], endpoints[1])
    return Segment(x, endpoints[0])


# ---------------------------------------------------------------------------
# Profiles along segments
# ---------------------------------------------------------------------------


def profile_rows(m, start, end, samples):
    """Exact (t, ord_res, hyp_res) rows at evenly spaced points of [start, end]."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    length = rho(start, end)
    rows = []
    for k in range(samples):
        dist = length * k / (samples - 1)
        pt = point_along(start, end, dist)
        rows.append((pt.texp, ord_res_at(m, pt), hypres_eval(m, pt)))
    return rows
