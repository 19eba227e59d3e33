"""Type II points of the Berkovich line and the tree geometry around them.

A point is the closed disk B(center, r) with r = p^texp (or |t|^(-texp) on
the Laurent backend); two centers give the same point exactly when their
difference has valuation >= -texp.  The Gauss point is (0, 0).  Directions at
a point are tagged by residue classes after recentering the point to the
Gauss point (the recentering frame is kept with the direction), the
hyperbolic metric is the log-radius path metric, and Moebius maps act by the
two-case disk transport (pole inside or outside the disk).
"""

from fractions import Fraction

from . import ratmap, valfield
from .errors import (
    ConfigMismatchError,
    EnlargeRamificationError,
    IterationCapError,
    ParseError,
    UnliftableDirectionError,
)
from .ratmap import Mobius, reduce_map, normalize, form_compose, HomogeneousPair
from .valfield import INF, INF_POINT, INF_TAG, ConjClassTag, lift_residue


class TypeIIPoint:
    """Closed disk B(center, radius^texp) as a point of the tree."""

    __slots__ = ("cfg", "center", "texp")

    def __init__(self, cfg, center, texp):
        texp = Fraction(texp)
        if cfg.e % texp.denominator != 0:
            raise EnlargeRamificationError(
                f"radius exponent {texp} needs e divisible by {texp.denominator}, have e={cfg.e}"
            )
        if center.cfg != cfg:
            raise ConfigMismatchError("center scalar from a different config")
        self.cfg = cfg
        self.center = center
        self.texp = texp

    def __eq__(self, other):
        if not isinstance(other, TypeIIPoint):
            return NotImplemented
        if self.cfg != other.cfg or self.texp != other.texp:
            return False
        return (self.center - other.center).valuation() >= -self.texp

    def __hash__(self):
        # centers of equal disks differ, so only the exponent can be hashed
        return hash((self.cfg, self.texp))

    def contains_p1(self, a):
        """Whether the type I point a lies in the closed disk."""
        if a is INF_POINT:
            return False
        return (a - self.center).valuation() >= -self.texp

    def contains_disk(self, other):
        return other.texp <= self.texp and (
            (self.center - other.center).valuation() >= -self.texp
        )

    def __repr__(self):
        return f"Point({format_point(self)})"


def gauss_point(cfg):
    return TypeIIPoint(cfg, cfg.zero(), Fraction(0))


def frame(x):
    """The affine map sending the Gauss point to x: w -> center + c*w, v(c) = -texp."""
    k = x.texp * x.cfg.e
    scale = x.cfg.uniformizer_power(-int(k))
    return Mobius.affine(x.cfg, scale, x.center)


def join_exponent(x, y):
    """Radius exponent of the smallest disk containing both."""
    t = max(x.texp, y.texp)
    v = (x.center - y.center).valuation()
    if -v > t:  # equal centers give v = INF and never enter
        t = Fraction(-v)
    return t


def join_point(x, y):
    return TypeIIPoint(x.cfg, x.center, join_exponent(x, y))


def rho(x, y):
    """Hyperbolic distance in log-radius units."""
    if x.cfg != y.cfg:
        raise ConfigMismatchError("points from different configs")
    t = join_exponent(x, y)
    return (t - x.texp) + (t - y.texp)


def wedge(x, y, base):
    """The triple point: the unique point on all three pairwise segments."""
    cands = [join_point(x, y), join_point(x, base), join_point(y, base)]
    best = min(cands, key=lambda p: p.texp)
    return best


class Segment:
    """Ordered pair of points with the affine length parametrization."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        if a.cfg != b.cfg:
            raise ConfigMismatchError("segment endpoints from different configs")
        self.a = a
        self.b = b

    @property
    def length(self):
        return rho(self.a, self.b)

    def point_at(self, dist):
        return point_along(self.a, self.b, dist)

    def __repr__(self):
        return f"Segment({format_point(self.a)} -> {format_point(self.b)})"


def point_along(a, b, dist):
    """The point on [a, b] at hyperbolic distance dist from a."""
    dist = Fraction(dist)
    total = rho(a, b)
    if dist < 0 or dist > total:
        raise ValueError(f"distance {dist} outside [0, {total}]")
    t_join = join_exponent(a, b)
    up = t_join - a.texp
    if dist <= up:
        return TypeIIPoint(a.cfg, a.center, a.texp + dist)
    return TypeIIPoint(a.cfg, b.center, t_join - (dist - up))


class Direction:
    """A tangent direction at a type II point.

    The tag is the residue class of the recentered representative: an element
    of the residue field (or extension / conjugacy class) for directions into
    the disk, INF_TAG for the direction of larger disks.  The frame mapping
    the Gauss point to the base point is stored so tags computed against
    different center representations stay comparable.
    """

    __slots__ = ("base", "tag", "frame")

    def __init__(self, base, tag, frame_mobius=None):
        self.base = base
        self.tag = tag
        self.frame = frame_mobius if frame_mobius is not None else frame(base)

    def __eq__(self, other):
        if not isinstance(other, Direction):
            return NotImplemented
        if self.base != other.base:
            return False
        tag2 = transport_tag(self, other)
        return _tags_equal(self.tag, tag2)

    def __hash__(self):
        return hash((self.base.cfg, self.base.texp))

    def is_liftable(self):
        if self.tag is INF_TAG:
            return True
        if isinstance(self.tag, ConjClassTag):
            return False
        if self.base.cfg.backend == valfield.PADIC and self.tag.field.m != 1:
            return valfield.canonical_residue(self.tag).field.m == 1
        return True

    def representative(self, h):
        """A point at hyperbolic distance h from the base inside U(self)."""
        h = Fraction(h)
        if h <= 0:
            raise ValueError("representative distance must be positive")
        cfg = self.base.cfg
        if self.tag is INF_TAG:
            return TypeIIPoint(cfg, self.base.center, self.base.texp + h)
        tag = self.tag
        if isinstance(tag, ConjClassTag):
            raise UnliftableDirectionError("conjugacy-class direction has no center lift")
        lift = lift_residue(cfg, tag)
        center = self.frame.apply_p1(lift)
        return TypeIIPoint(cfg, center, self.base.texp - h)

    def __repr__(self):
        return f"Direction({format_point(self.base)} toward {valfield.format_residue(self.tag) if self.tag is not INF_TAG else 'inf'})"


def _tags_equal(a, b):
    if a is INF_TAG or b is INF_TAG:
        return a is b
    if isinstance(a, ConjClassTag) or isinstance(b, ConjClassTag):
        return a == b
    return a == b


def transport_tag(target_dir, source_dir):
    """Re-express source_dir's tag in target_dir's frame (equal base disks)."""
    if (
        source_dir.frame.a == target_dir.frame.a
        and source_dir.frame.b == target_dir.frame.b
    ):
        return source_dir.tag
    mu = target_dir.frame.inverse().compose(source_dir.frame)
    # mu is affine with unit scale: residue action is w -> a*w + b
    scale = (mu.a / mu.d).residue()
    shift = valfield.coeff_residue(mu.b / mu.d)
    tag = source_dir.tag
    if tag is INF_TAG:
        return INF_TAG
    if isinstance(tag, ConjClassTag):
        field = tag.field
        inv = field.one / scale
        sub = [(-shift) * inv, inv]  # x -> (x - shift)/scale
        from . import polys

        moved = polys.pcompose(list(tag.coeffs), sub, field)
        return ConjClassTag(field, polys.pmonic(moved, field))
    return scale * tag + shift


def direction_of(base, target):
    """The direction at base containing target (a point or a P^1 point)."""
    cfg = base.cfg
    fr = frame(base)
    rec = fr.inverse()
    if isinstance(target, TypeIIPoint):
        if target == base:
            raise ValueError("direction toward the base point itself")
        moved = apply_mobius_point(rec, target)
        if moved.texp >= 0:
            return Direction(base, INF_TAG, fr)
        v = moved.center.valuation()
        if v < 0:
            return Direction(base, INF_TAG, fr)
        return Direction(base, valfield.coeff_residue(moved.center), fr)
    if target is INF_POINT:
        return Direction(base, INF_TAG, fr)
    if base.contains_p1(target):
        moved = rec.apply_p1(target)
        return Direction(base, valfield.coeff_residue(moved), fr)
    return Direction(base, INF_TAG, fr)


def direction_from_tag(base, tag, fr=None):
    return Direction(base, tag, fr if fr is not None else frame(base))


def apply_mobius_point(g, x):
    """Image disk-point of x under the Moebius map g (rho-isometric)."""
    cfg = x.cfg
    if g.c.is_zero():
        scale = g.a / g.d
        shift = g.b / g.d
        center = shift + scale * x.center
        texp = x.texp - scale.valuation()
        return TypeIIPoint(cfg, center, texp)
    pole = -g.d / g.c
    alpha = g.a / g.c
    beta = -g.det() / (g.c * g.c)
    vb = beta.valuation()
    v0 = (x.center - pole).valuation()
    if v0 >= -x.texp:
        # pole inside the disk: B = B(pole, r); inversion flips the exponent
        texp = -x.texp - vb
        return TypeIIPoint(cfg, alpha, texp)
    center = alpha + beta / (x.center - pole)
    texp = x.texp + 2 * v0 - vb
    return TypeIIPoint(cfg, center, texp)


# ---------------------------------------------------------------------------
# Image of a type II point under a rational map
# ---------------------------------------------------------------------------


def _pair_source_composed(m, gamma):
    """(F o gamma, G o gamma): source reframed, target untouched."""
    p_form = [gamma.b, gamma.a]
    q_form = [gamma.d, gamma.c]
    f = form_compose(m.f, p_form, q_form, m.cfg)
    g = form_compose(m.g, p_form, q_form, m.cfg)
    return HomogeneousPair(f, g, m.cfg, check=False)


def image_point(m, x):
    """phi(x): conjugate the source to the Gauss point, then peel constant
    reductions (shift by the lifted constant, divide by the content) until the
    divided reduction is nonconstant; unwind the accumulated target moves."""
    cfg = m.cfg
    cur = normalize(_pair_source_composed(m, frame(x)))
    target = Mobius.identity(cfg)
    spread = max(
        (int(c.valuation() * cfg.e) for c in cur.f + cur.g if not c.is_zero()),
        default=0,
    )
    cap = 8 * (1 + m.degree) + 4 * m.degree * max(spread, 1)
    steps = 0
    while True:
        steps += 1
        if steps > cap:
            raise IterationCapError(
                f"image_point did not stabilize within {cap} steps at {format_point(x)}"
            )
        red = reduce_map(cur)
        if red.kind == ratmap.NONCONSTANT:
            return apply_mobius_point(target, gauss_point(cfg))
        tag = red.constant_tag
        if tag is INF_TAG:
            cur = HomogeneousPair(cur.g, cur.f, cfg, check=False)
            target = target.compose(Mobius.inversion(cfg))
            continue
        c = lift_residue(cfg, tag)
        new_f = [fc - c * gc for fc, gc in zip(cur.f, cur.g)]
        kappa = ratmap.form_min_valuation(new_f)
        if kappa == INF:
            raise AssertionError("degenerate pair inside image_point loop")
        k = int(kappa * cfg.e)
        sigma = cfg.uniformizer_power(k)
        inv = cfg.uniformizer_power(-k)
        new_f = [fc * inv for fc in new_f]
        cur = HomogeneousPair(new_f, list(cur.g), cfg, check=False)
        target = target.compose(Mobius.affine(cfg, sigma, c))


# ---------------------------------------------------------------------------
# Literals
# ---------------------------------------------------------------------------


def parse_point(text, cfg):
    """Point literal "center@t": center a scalar literal or "inf", t rational.

    "inf@t" is the disk of radius exponent t around infinity in the inverted
    chart, i.e. the point (0, -t) in the standard chart.
    """
    if "@" not in text:
        raise ParseError(f"point literal needs 'center@t': {text!r}")
    center_text, _, t_text = text.partition("@")
    center_text = center_text.strip()
    try:
        t = Fraction(t_text.strip())
    except (ValueError, ZeroDivisionError) as ex:
        raise ParseError(f"bad radius exponent {t_text!r}") from ex
    if center_text == "inf":
        return TypeIIPoint(cfg, cfg.zero(), -t)
    center = valfield.parse_scalar(center_text, cfg)
    return TypeIIPoint(cfg, center, t)


def format_point(x):
    return f"{valfield.format_scalar(x.center)}@{valfield.format_fraction(x.texp)}"
