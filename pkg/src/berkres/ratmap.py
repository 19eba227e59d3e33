"""Rational maps as pairs of binary forms.

A degree-d map is a pair (F, G) of binary forms with nonzero resultant,
stored as coefficient tuples [c_0..c_d] where c_i multiplies X^i Y^(d-i).
Parsing, normalization (scaling so the minimum coefficient valuation is 0),
Sylvester resultants, Moebius conjugation, iteration, and coefficient-wise
reduction modulo the maximal ideal all live here.
"""

from . import exprparse, polys, valfield
from .errors import ConfigMismatchError, DegenerateMapError, DegreeCapError, ParseError
from .valfield import INF, INF_POINT, INF_TAG, scalar_domain

DEFAULT_DEGREE_CAP = 64


# ---------------------------------------------------------------------------
# Binary form helpers (coefficient lists over the scalar field)
# ---------------------------------------------------------------------------


def form_degree(coeffs):
    return len(coeffs) - 1


def form_mul(a, b, cfg):
    dom = scalar_domain(cfg)
    out = [dom.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + x * y
    return out


def form_compose(outer, p, q, cfg):
    """outer(p(X,Y), q(X,Y)); p and q must have equal formal degree."""
    dom = scalar_domain(cfg)
    d = form_degree(outer)
    # powers of p and q up to d
    ppow = [[dom.one]]
    qpow = [[dom.one]]
    for _ in range(d):
        ppow.append(form_mul(ppow[-1], p, cfg))
        qpow.append(form_mul(qpow[-1], q, cfg))
    inner_deg = form_degree(p)
    out = [dom.zero] * (d * inner_deg + 1)
    for i, c in enumerate(outer):
        if c.is_zero():
            continue
        term = form_mul(ppow[i], qpow[d - i], cfg)
        for k, v in enumerate(term):
            out[k] = out[k] + c * v
    return out


def form_eval(coeffs, x, y):
    """Evaluate the form at scalars (x, y)."""
    acc = None
    d = form_degree(coeffs)
    for i, c in enumerate(coeffs):
        term = c * x**i * y ** (d - i)
        acc = term if acc is None else acc + term
    return acc


def form_deriv_x(coeffs, cfg):
    d = form_degree(coeffs)
    return [coeffs[i] * i for i in range(1, d + 1)] or [cfg.zero()]


def form_deriv_y(coeffs, cfg):
    d = form_degree(coeffs)
    return [coeffs[i] * (d - i) for i in range(0, d)] or [cfg.zero()]


def form_min_valuation(coeffs):
    best = INF
    for c in coeffs:
        v = c.valuation()
        if v < best:
            best = v
    return best


# ---------------------------------------------------------------------------
# Moebius transformations
# ---------------------------------------------------------------------------


class Mobius:
    """2x2 scalar matrix [[a, b], [c, d]] with nonzero determinant."""

    __slots__ = ("a", "b", "c", "d", "cfg")

    def __init__(self, a, b, c, d):
        self.cfg = a.cfg
        for x in (b, c, d):
            if x.cfg != self.cfg:
                raise ConfigMismatchError("Moebius entries from different configs")
        self.a, self.b, self.c, self.d = a, b, c, d
        if self.det().is_zero():
            raise DegenerateMapError("Moebius matrix with zero determinant")

    @classmethod
    def identity(cls, cfg):
        return cls(cfg.one(), cfg.zero(), cfg.zero(), cfg.one())

    @classmethod
    def affine(cls, cfg, scale, shift):
        """z -> shift + scale * z."""
        return cls(scale, shift, cfg.zero(), cfg.one())

    @classmethod
    def inversion(cls, cfg):
        return cls(cfg.zero(), cfg.one(), cfg.one(), cfg.zero())

    def det(self):
        return self.a * self.d - self.b * self.c

    def inverse(self):
        """The adjugate; projectively the inverse transformation."""
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, other):
        """self after other: (self.compose(other))(z) = self(other(z))."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply_p1(self, x):
        """Image of a point of P^1(K), with INF_POINT for infinity."""
        if x is INF_POINT:
            if self.c.is_zero():
                return INF_POINT
            return self.a / self.c
        num = self.a * x + self.b
        den = self.c * x + self.d
        if den.is_zero():
            return INF_POINT
        return num / den

    def __repr__(self):
        ents = ", ".join(valfield.format_scalar(v) for v in (self.a, self.b, self.c, self.d))
        return f"Mobius[{ents}]"


# ---------------------------------------------------------------------------
# The pair itself
# ---------------------------------------------------------------------------


class HomogeneousPair:
    """Degree-d rational map given by a lift (F, G), Res(F, G) != 0."""

    __slots__ = ("cfg", "degree", "f", "g", "_res")

    def __init__(self, f, g, cfg, check=True):
        f, g = list(f), list(g)
        if len(f) != len(g) or len(f) < 2:
            raise DegenerateMapError("forms must share a formal degree >= 1")
        self.cfg = cfg
        self.degree = len(f) - 1
        self.f = tuple(f)
        self.g = tuple(g)
        self._res = None
        if check and self.resultant().is_zero():
            raise DegenerateMapError("zero resultant: not a rational map")

    def resultant(self):
        if self._res is None:
            self._res = _sylvester_resultant(self.f, self.g, self.cfg)
        return self._res

    def min_coeff_valuation(self):
        return min(form_min_valuation(self.f), form_min_valuation(self.g))

    def is_normalized(self):
        return self.min_coeff_valuation() == 0

    def apply_p1(self, x):
        """Evaluate the map at a point of P^1(K)."""
        if x is INF_POINT:
            fx, gx = self.f[-1], self.g[-1]
        else:
            one = self.cfg.one()
            fx = form_eval(self.f, x, one)
            gx = form_eval(self.g, x, one)
        if gx.is_zero():
            return INF_POINT
        return fx / gx

    def __repr__(self):
        fs = ", ".join(valfield.format_scalar(c) for c in self.f)
        gs = ", ".join(valfield.format_scalar(c) for c in self.g)
        return f"Pair(deg {self.degree}; F=[{fs}]; G=[{gs}])"


def _sylvester_resultant(f, g, cfg):
    """Determinant of the 2d x 2d Sylvester matrix of two degree-d forms."""
    dom = scalar_domain(cfg)
    d = len(f) - 1
    n = 2 * d
    rows = []
    fd = list(reversed(f))  # descending: X^d .. Y^d
    gd = list(reversed(g))
    for k in range(d):
        rows.append([dom.zero] * k + fd + [dom.zero] * (d - 1 - k))
    for k in range(d):
        rows.append([dom.zero] * k + gd + [dom.zero] * (d - 1 - k))
    assert all(len(r) == n for r in rows)
    return polys.bareiss_det(rows, dom)


def normalize(m):
    """Scale both forms by one uniformizer power so min coefficient valuation is 0."""
    v = m.min_coeff_valuation()
    if v == 0:
        return m
    if v == INF:
        raise DegenerateMapError("cannot normalize a pair of zero forms")
    k = v * m.cfg.e
    if k.denominator != 1:
        raise AssertionError("coefficient valuation outside (1/e)Z")
    scale = m.cfg.uniformizer_power(-int(k))
    f = [c * scale for c in m.f]
    g = [c * scale for c in m.g]
    return HomogeneousPair(f, g, m.cfg, check=False)


def conjugate(m, gamma):
    """Lift of gamma^{-1} o phi o gamma."""
    return conjugate_frames(m, gamma, gamma)


def conjugate_frames(m, src, tgt):
    """Lift of tgt^{-1} o phi o src (source and target reframed independently)."""
    cfg = m.cfg
    p_form = [src.b, src.a]  # aX + bY
    q_form = [src.d, src.c]  # cX + dY
    fg = form_compose(m.f, p_form, q_form, cfg)
    gg = form_compose(m.g, p_form, q_form, cfg)
    new_f = [tgt.d * x - tgt.b * y for x, y in zip(fg, gg)]
    new_g = [-tgt.c * x + tgt.a * y for x, y in zip(fg, gg)]
    return HomogeneousPair(new_f, new_g, cfg, check=False)


def compose_pairs(outer, inner):
    """Lift of outer o inner."""
    cfg = outer.cfg
    f = form_compose(outer.f, inner.f, inner.g, cfg)
    g = form_compose(outer.g, inner.f, inner.g, cfg)
    return HomogeneousPair(f, g, cfg, check=False)


def iterate(m, j, degree_cap=DEFAULT_DEGREE_CAP):
    """Lift of the j-th iterate, renormalized after every composition."""
    if j < 1:
        raise ValueError("iterate needs j >= 1")
    if m.degree**j > degree_cap:
        raise DegreeCapError(
            f"degree {m.degree}^{j} exceeds the cap {degree_cap}"
        )
    acc = normalize(m)
    base = acc
    for _ in range(j - 1):
        acc = normalize(compose_pairs(base, acc))
    return acc


# ---------------------------------------------------------------------------
# Reduction modulo the maximal ideal
# ---------------------------------------------------------------------------

CONSTANT = "constant"
NONCONSTANT = "nonconstant"


class ReducedMap:
    """Residue forms, hole divisor, and divided map of a normalized pair."""

    __slots__ = (
        "field",
        "f_res",
        "g_res",
        "hole",
        "hole_uni",
        "hole_y_mult",
        "divided",
        "kind",
        "constant_tag",
    )

    def __init__(self, field, f_res, g_res, hole, hole_uni, hole_y_mult, divided, kind, constant_tag):
        self.field = field
        self.f_res = f_res
        self.g_res = g_res
        self.hole = hole            # residue binary form coefficient list
        self.hole_uni = hole_uni    # finite-direction part, univariate in x
        self.hole_y_mult = hole_y_mult  # multiplicity of the infinity direction
        self.divided = divided      # (P, Q) residue forms of formal degree d*
        self.kind = kind
        self.constant_tag = constant_tag  # residue tag or INF_TAG when constant

    @property
    def hole_degree(self):
        return len(self.hole) - 1

    @property
    def divided_degree(self):
        return len(self.divided[0]) - 1

    def divided_apply(self, tag):
        """Action of the divided map on a residue tag (Fact-1 identification)."""
        p, q = list(self.divided[0]), list(self.divided[1])
        field = self.field
        if tag is INF_TAG:
            num, den = p[-1], q[-1]
        else:
            from . import finitefield

            if isinstance(tag, finitefield.FFElem) and tag.field is not field:
                emb = finitefield.embed(field, tag.field)
                p = [emb(c) for c in p]
                q = [emb(c) for c in q]
                field = tag.field
            num = polys.peval(p, tag, field)
            den = polys.peval(q, tag, field)
        if den == field.zero:
            return INF_TAG
        return num / den

    def __repr__(self):
        return f"ReducedMap({self.kind}, hole deg {self.hole_degree})"


def reduce_map(m):
    """Residue forms, hole divisor H = gcd (with gcd(0, g) := g), divided map."""
    if not m.is_normalized():
        raise ValueError("reduce_map needs a normalized pair")
    cfg = m.cfg
    field = cfg.residue_field()
    d = m.degree
    f_res = [valfield.coeff_residue(c) for c in m.f]
    g_res = [valfield.coeff_residue(c) for c in m.g]
    f_uni = polys.ptrim(list(f_res))
    g_uni = polys.ptrim(list(g_res))

    zero, one = field.zero, field.one
    if not f_uni and not g_uni:
        raise AssertionError("normalized pair reduced to (0, 0)")

    def y_mult(uni):
        return d - (len(uni) - 1)

    if not f_uni:
        h_uni = polys.pmonic(g_uni, field)
        ym = y_mult(g_uni)
    elif not g_uni:
        h_uni = polys.pmonic(f_uni, field)
        ym = y_mult(f_uni)
    else:
        h_uni = valfield.residue_poly_gcd(cfg, f_uni, g_uni)
        ym = min(y_mult(f_uni), y_mult(g_uni))

    # the form is Y^ym * homog(h_uni): same low coefficients, zeros on top
    hole = (list(h_uni) if h_uni else [one]) + [zero] * ym
    hole_deg = len(hole) - 1
    dstar = d - hole_deg

    def divide_out(uni):
        if not uni:
            return [zero] * (dstar + 1)
        q, r = polys.pdivmod(uni, h_uni, field)
        if r:
            raise AssertionError("hole divisor does not divide a residue form")
        pad = dstar - (len(q) - 1) if q else dstar + 1
        return list(q) + [zero] * max(pad, 0) if q else [zero] * (dstar + 1)

    p_div = divide_out(f_uni)
    q_div = divide_out(g_uni)
    if len(p_div) != dstar + 1 or len(q_div) != dstar + 1:
        raise AssertionError("divided forms have inconsistent degree")

    h_list = list(h_uni) if h_uni else [one]
    if dstar == 0:
        p0, q0 = p_div[0], q_div[0]
        tag = INF_TAG if q0 == zero else p0 / q0
        return ReducedMap(field, f_res, g_res, hole, h_list, ym, (p_div, q_div), CONSTANT, tag)
    return ReducedMap(field, f_res, g_res, hole, h_list, ym, (p_div, q_div), NONCONSTANT, None)


def wronskian(m):
    """The critical form dF/dX * dG/dY - dF/dY * dG/dX, degree 2d - 2."""
    cfg = m.cfg
    fx = form_deriv_x(m.f, cfg)
    fy = form_deriv_y(m.f, cfg)
    gx = form_deriv_x(m.g, cfg)
    gy = form_deriv_y(m.g, cfg)
    a = form_mul(fx, gy, cfg)
    b = form_mul(fy, gx, cfg)
    n = max(len(a), len(b))
    dom = scalar_domain(cfg)
    a = a + [dom.zero] * (n - len(a))
    b = b + [dom.zero] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def projectively_equal(m1, m2):
    """Whether two pairs define the same map (joint scalar between lifts)."""
    if m1.degree != m2.degree or m1.cfg != m2.cfg:
        return False
    c1 = list(m1.f) + list(m1.g)
    c2 = list(m2.f) + list(m2.g)
    lam = None
    for a, b in zip(c1, c2):
        az, bz = a.is_zero(), b.is_zero()
        if az != bz:
            return False
        if not az and lam is None:
            lam = b / a
    if lam is None:
        return False
    return all((a * lam) == b for a, b in zip(c1, c2))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _MapSemantics:
    """Values are fractions (num, den) of z-polynomials over scalars."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.dom = scalar_domain(cfg)
        self.scalars = valfield._ScalarSemantics(cfg)

    def _const(self, sc):
        return ([sc], [self.dom.one])

    def from_int(self, n):
        return self._const(self.cfg.from_int(n))

    def atom(self, name):
        if name == "z":
            return ([self.dom.zero, self.dom.one], [self.dom.one])
        return self._const(self.scalars.atom(name))

    def add(self, a, b):
        num = polys.padd(
            polys.pmul(a[0], b[1], self.dom), polys.pmul(b[0], a[1], self.dom)
        )
        return (num, polys.pmul(a[1], b[1], self.dom))

    def sub(self, a, b):
        return self.add(a, (polys.pneg(b[0]), b[1]))

    def mul(self, a, b):
        return (polys.pmul(a[0], b[0], self.dom), polys.pmul(a[1], b[1], self.dom))

    def div(self, a, b):
        if polys.pzero(b[0]):
            raise ParseError("division by the zero map")
        return (polys.pmul(a[0], b[1], self.dom), polys.pmul(a[1], b[0], self.dom))

    def neg(self, a):
        return (polys.pneg(a[0]), a[1])

    def pow(self, a, n):
        if n < 0:
            return self.pow((a[1], a[0]), -n)
        return (polys.ppow(a[0], n, self.dom), polys.ppow(a[1], n, self.dom))


def parse_map(text, cfg):
    """Parse a rational-map expression in z into a homogeneous pair."""
    num, den = exprparse.parse(text, _MapSemantics(cfg))
    num = polys.ptrim(num)
    den = polys.ptrim(den)
    if polys.pzero(num) and polys.pzero(den):
        raise ParseError("empty map")
    d = max(polys.pdeg(num), polys.pdeg(den))
    if d < 1:
        raise DegenerateMapError("degree-0 map")
    dom = scalar_domain(cfg)
    f = list(num) + [dom.zero] * (d - polys.pdeg(num))
    g = list(den) + [dom.zero] * (d - polys.pdeg(den))
    if polys.pzero(num):
        f = [dom.zero] * (d + 1)
    if polys.pzero(den):
        g = [dom.zero] * (d + 1)
    return HomogeneousPair(f, g, cfg, check=True)
