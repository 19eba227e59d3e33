"""Exact arithmetic, valuations, and residue fields for two valued-field backends.

MixedChar ("padic"): the field Q[pi]/(pi^e - p) with v(p) = 1, v(pi) = 1/e.
Scalars are vectors of e exact rationals.  The residue field is F_p, with
finite extensions F_{p^m} built on demand for factoring residue polynomials.

EqualCharZero ("laurent"): rational functions in the uniformizer t (internally
in u with u^e = t) whose coefficients are rational functions of a
transcendental parameter s.  v(t) = 1, v(u) = 1/e; the residue field is Q(s).

Everything is an immutable exact value; no floats anywhere.
"""

from fractions import Fraction

from . import exprparse, finitefield, polys
from .errors import (
    ConfigMismatchError,
    IrrationalDirectionError,
    ParseError,
    UnliftableDirectionError,
)
from .polys import QQ, RatFunc, RatFuncField

INF = float("inf")  # valuation of zero; compares exactly against Fractions


class _Sentinel:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label

    def __repr__(self):
        return self.label


INF_TAG = _Sentinel("inf")  # the point at infinity of the residue P^1
INF_POINT = _Sentinel("inf")  # the point at infinity of P^1(K)

# A valuation is an exact Fraction with denominator dividing e, or INF for
# zero; |x| = p^(-v) on the padic backend, |t|^v on the laurent one.
ValExp = Fraction | float

# Residue coefficient field Q(s) of the Laurent backend, and the scalar
# carrier Q(s)(u).  Shared singletons keep elements comparable.
QS_FIELD = RatFuncField(QQ, "s")
U_FIELD = RatFuncField(QS_FIELD, "u")

PADIC = "padic"
LAURENT = "laurent"


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FieldConfig:
    """Immutable backend descriptor: ("padic", p, e) or ("laurent", e)."""

    __slots__ = ("backend", "p", "e")

    def __init__(self, backend, p=None, e=1):
        if backend not in (PADIC, LAURENT):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == PADIC:
            if p is None or not _is_prime(p):
                raise ValueError(f"p must be prime, got {p!r}")
        else:
            p = None
        if e < 1:
            raise ValueError("ramification index e must be >= 1")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "e", int(e))

    def __setattr__(self, *a):
        raise AttributeError("FieldConfig is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, FieldConfig)
            and self.backend == other.backend
            and self.p == other.p
            and self.e == other.e
        )

    def __hash__(self):
        return hash((self.backend, self.p, self.e))

    def __repr__(self):
        if self.backend == PADIC:
            return f"FieldConfig(padic, p={self.p}, e={self.e})"
        return f"FieldConfig(laurent, e={self.e})"

    # -- scalar constructors ------------------------------------------
    def zero(self):
        return self.from_fraction(Fraction(0))

    def one(self):
        return self.from_fraction(Fraction(1))

    def from_int(self, n):
        return self.from_fraction(Fraction(n))

    def from_fraction(self, q):
        q = Fraction(q)
        if self.backend == PADIC:
            vec = (q,) + (Fraction(0),) * (self.e - 1)
            return Scalar(self, vec)
        c = RatFunc([q], field=QQ, reduce=False) if q else RatFunc([], field=QQ, reduce=False)
        payload = RatFunc([c], field=QS_FIELD) if q else RatFunc([], field=QS_FIELD)
        return Scalar(self, payload)

    def uniformizer(self):
        """pi (padic, pi^e = p) or u (laurent, u^e = t)."""
        return self.uniformizer_power(1)

    def uniformizer_power(self, k):
        """Scalar of valuation k/e, k any integer."""
        k = int(k)
        if self.backend == PADIC:
            q, r = divmod(k, self.e)
            vec = [Fraction(0)] * self.e
            vec[r] = Fraction(self.p) ** q
            return Scalar(self, tuple(vec))
        one = QS_FIELD.one
        if k >= 0:
            payload = RatFunc([QS_FIELD.zero] * k + [one], field=QS_FIELD, reduce=False)
        else:
            payload = RatFunc([one], [QS_FIELD.zero] * (-k) + [one], field=QS_FIELD, reduce=False)
        return Scalar(self, payload)

    def t_scalar(self):
        if self.backend != LAURENT:
            raise ParseError("'t' only exists on the laurent backend")
        return self.uniformizer_power(self.e)

    def s_scalar(self):
        if self.backend != LAURENT:
            raise ParseError("'s' only exists on the laurent backend")
        return Scalar(self, RatFunc([QS_FIELD.gen()], field=QS_FIELD, reduce=False))

    # -- residue field -------------------------------------------------
    def residue_field(self):
        """Field descriptor of the residue field (F_p or Q(s))."""
        if self.backend == PADIC:
            return finitefield.get_field(self.p, 1)
        return QS_FIELD

    def residue_char(self):
        return self.p if self.backend == PADIC else 0


class Scalar:
    """Exact element of the configured valued field."""

    __slots__ = ("cfg", "payload")

    def __init__(self, cfg, payload):
        self.cfg = cfg
        self.payload = payload

    # -- plumbing -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.cfg != self.cfg:
                raise ConfigMismatchError(f"{self.cfg} vs {other.cfg}")
            return other
        if isinstance(other, int):
            return self.cfg.from_int(other)
        if isinstance(other, Fraction):
            return self.cfg.from_fraction(other)
        return None

    def is_zero(self):
        if self.cfg.backend == PADIC:
            return all(c == 0 for c in self.payload)
        return self.payload.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.payload == other.payload

    def __hash__(self):
        if self.cfg.backend == PADIC:
            return hash((self.cfg, self.payload))
        return hash((self.cfg, self.payload))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.cfg.backend == PADIC:
            return Scalar(self.cfg, tuple(a + b for a, b in zip(self.payload, other.payload)))
        return Scalar(self.cfg, self.payload + other.payload)

    __radd__ = __add__

    def __neg__(self):
        if self.cfg.backend == PADIC:
            return Scalar(self.cfg, tuple(-a for a in self.payload))
        return Scalar(self.cfg, -self.payload)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.cfg.backend == PADIC:
            e, p = self.cfg.e, self.cfg.p
            out = [Fraction(0)] * e
            for i, a in enumerate(self.payload):
                if not a:
                    continue
                for j, b in enumerate(other.payload):
                    if not b:
                        continue
                    k = i + j
                    if k < e:
                        out[k] += a * b
                    else:
                        out[k - e] += a * b * p  # pi^e = p
            return Scalar(self.cfg, tuple(out))
        return Scalar(self.cfg, self.payload * other.payload)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("scalar division by zero")
        if self.cfg.backend == PADIC:
            return self * other._padic_inverse()
        return Scalar(self.cfg, self.payload / other.payload)

    def __rtruediv__(self, other):
        coerced = self._coerce(other)
        return coerced / self

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return (self.cfg.one() / self) ** (-n)
        out = self.cfg.one()
        base = self
        while n > 0:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def _padic_inverse(self):
        # extended Euclid between the payload polynomial and X^e - p over Q
        e, p = self.cfg.e, self.cfg.p
        if e == 1:
            return Scalar(self.cfg, (Fraction(1) / self.payload[0],))
        modulus = [Fraction(-p)] + [Fraction(0)] * (e - 1) + [Fraction(1)]
        r0, r1 = modulus, polys.ptrim(list(self.payload))
        s0, s1 = [], [Fraction(1)]
        while True:
            if len(r1) == 1:
                inv = Fraction(1) / r1[0]
                s1 = polys.pscale(s1, inv)
                vec = list(s1) + [Fraction(0)] * e
                return Scalar(self.cfg, tuple(vec[:e]))
            q, r = polys.pdivmod(r0, r1, QQ)
            r0, r1 = r1, r
            s0, s1 = s1, polys.psub(s0, polys.pmul(q, s1, QQ))

    # -- valuation and residue ---------------------------------------------
    def valuation(self):
        """Exact valuation in (1/e)Z, or INF for zero."""
        if self.cfg.backend == PADIC:
            e, p = self.cfg.e, self.cfg.p
            best = INF
            for i, c in enumerate(self.payload):
                if not c:
                    continue
                v = Fraction(_ord_p(c, p)) + Fraction(i, e)
                if v < best:
                    best = v
            return best
        num, den = self.payload.num, self.payload.den
        if not num:
            return INF
        return Fraction(_ord_u(num) - _ord_u(den), self.cfg.e)

    def residue(self):
        """Image in the residue field; requires valuation 0."""
        if self.valuation() != 0:
            raise ValueError("reduce_unit needs a scalar of valuation exactly 0")
        if self.cfg.backend == PADIC:
            fp = self.cfg.residue_field()
            c0 = self.payload[0]
            num = c0.numerator % self.cfg.p
            den = pow(c0.denominator % self.cfg.p, -1, self.cfg.p)
            return fp.from_int(num * den)
        num, den = self.payload.num, self.payload.den
        return num[0] / den[0]

    def __repr__(self):
        return f"Scalar({format_scalar(self)})"


def _ord_p(q, p):
    """p-adic order of a nonzero Fraction."""
    n, d = q.numerator, q.denominator
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


def _ord_u(coeffs):
    for i, c in enumerate(coeffs):
        if not c.is_zero():
            return i
    return 0


class ScalarDomain:
    """polys.py field descriptor over the scalars of one config."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.zero = cfg.zero()
        self.one = cfg.one()

    def from_int(self, n):
        return self.cfg.from_int(n)

    def __repr__(self):
        return f"Scalars({self.cfg!r})"


_DOMAIN_CACHE = {}


def scalar_domain(cfg):
    dom = _DOMAIN_CACHE.get(cfg)
    if dom is None:
        dom = ScalarDomain(cfg)
        _DOMAIN_CACHE[cfg] = dom
    return dom


def coeff_residue(x):
    """Residue of an integral scalar (0 for positive valuation)."""
    v = x.valuation()
    if v == INF or v > 0:
        f = x.cfg.residue_field()
        return f.zero
    if v < 0:
        raise ValueError("coefficient has negative valuation; normalize first")
    return x.residue()


def valuation(x):
    return x.valuation()


def reduce_unit(x):
    return x.residue()


def lift_residue(cfg, tag):
    """A scalar of valuation 0 reducing to the given residue element."""
    if cfg.backend == PADIC:
        tag = canonical_residue(tag)
        if tag.field.m != 1:
            raise UnliftableDirectionError(
                f"residue element {tag!r} lies in a proper extension of F_{cfg.p}"
            )
        return cfg.from_int(tag.coeffs[0])
    return Scalar(cfg, RatFunc([tag], field=QS_FIELD))


_SUBFIELD_TABLES = {}


def canonical_residue(elem):
    """Rewrite an F_{p^m} element in the smallest subfield containing it."""
    field = elem.field
    if field.m == 1:
        return elem
    p = field.p
    for k in _divisors(field.m):
        if k == field.m:
            return elem
        if elem ** (p**k) != elem:
            continue
        small = finitefield.get_field(p, k)
        key = (p, k, field.m)
        table = _SUBFIELD_TABLES.get(key)
        if table is None:
            emb = finitefield.embed(small, field)
            table = {emb(b).coeffs: b for b in small.elements()}
            _SUBFIELD_TABLES[key] = table
        return table[elem.coeffs]
    return elem


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


class ConjClassTag:
    """A Galois conjugacy class of residue directions.

    Stands for the deg(poly) roots of one monic irreducible over the base
    residue field whose splitting extension is too large to enumerate.  Only
    divisibility-level operations are ever performed on it.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    @property
    def count(self):
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return (
            isinstance(other, ConjClassTag)
            and self.field is other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __repr__(self):
        return f"ConjClass({format_residue_poly(list(self.coeffs))})"


# ---------------------------------------------------------------------------
# Residue polynomial factorization
# ---------------------------------------------------------------------------


def residue_factor(cfg, coeffs):
    """Factor a nonzero polynomial over the residue field.

    Returns a list of (monic irreducible coefficient list, multiplicity);
    the product times the input's leading unit re-multiplies to the input.
    On the laurent backend any irreducible of degree > 1 raises
    IrrationalDirectionError (directions must be rational over Q(s)).
    """
    coeffs = polys.ptrim(list(coeffs))
    if not coeffs:
        raise ValueError("cannot factor the zero polynomial")
    if cfg.backend == PADIC:
        field = coeffs[0].field if isinstance(coeffs[0], finitefield.FFElem) else cfg.residue_field()
        _unit, factors = finitefield.factor(coeffs, field)
        return [(list(f), m) for f, m in factors]
    return _laurent_factor(coeffs)


def residue_roots(cfg, factor_coeffs):
    """Roots of one irreducible residue factor, or None if not enumerable.

    Degree-1 factors give their rational root.  Over MixedChar a degree-k
    factor splits in F_{p^k}; roots are returned as canonical extension
    elements when that field is enumerable, else None (use a ConjClassTag).
    """
    deg = len(factor_coeffs) - 1
    if deg == 1:
        return [-factor_coeffs[0] / factor_coeffs[1]]
    if cfg.backend == LAURENT:
        raise IrrationalDirectionError(
            f"direction of degree {deg} is irrational over Q(s)"
        )
    base = factor_coeffs[0].field
    if base.order**deg > finitefield.ENUM_CAP:
        return None
    big = finitefield.get_field(base.p, base.m * deg)
    emb = finitefield.embed(base, big)
    lifted = [emb(c) for c in factor_coeffs]
    return [canonical_residue(r) for r in finitefield.roots_in_field(lifted, big)]


def residue_poly_gcd(cfg, f, g):
    """Monic gcd of residue polynomials (gcd(0, g) := monic g)."""
    f = polys.ptrim(list(f))
    g = polys.ptrim(list(g))
    if not f and not g:
        raise ValueError("gcd(0, 0) undefined")
    field = cfg.residue_field() if cfg.backend == LAURENT else (f or g)[0].field
    if not f:
        return polys.pmonic(g, field)
    if not g:
        return polys.pmonic(f, field)
    if cfg.backend == PADIC:
        return polys.pgcd(f, g, field)
    return _laurent_gcd(f, g)


# -- sympy bridge for the Q(s) residue field --------------------------------


def _sympy_syms():
    import sympy

    return sympy, sympy.Symbol("s"), sympy.Symbol("X")


def _qs_to_sympy(elem, sympy, s):
    def side(coeffs):
        return sum(
            (sympy.Rational(c.numerator, c.denominator) * s**i for i, c in enumerate(coeffs)),
            start=sympy.Integer(0),
        )

    return side(elem.num) / side(elem.den)


def _sympy_to_qs(expr, sympy, s):
    expr = sympy.cancel(sympy.together(expr))
    num, den = sympy.fraction(expr)
    return RatFunc(_sympy_poly_coeffs(num, sympy, s), _sympy_poly_coeffs(den, sympy, s), field=QQ)


def _sympy_poly_coeffs(expr, sympy, s):
    poly = sympy.Poly(expr, s, domain="QQ")
    if poly.is_zero:
        return []
    out = [Fraction(0)] * (poly.degree() + 1)
    for (i,), c in poly.terms():
        if c:
            out[i] = Fraction(c.numerator, c.denominator)
    return out


def _laurent_poly_expr(coeffs, sympy, s, X):
    expr = sympy.Integer(0)
    for i, c in enumerate(coeffs):
        if not c.is_zero():
            expr += _qs_to_sympy(c, sympy, s) * X**i
    num, _den = sympy.fraction(sympy.together(expr))
    return sympy.expand(num)


def _laurent_factor(coeffs):
    sympy, s, X = _sympy_syms()
    num = _laurent_poly_expr(coeffs, sympy, s, X)
    _content, raw = sympy.factor_list(num, X)
    out = []
    for fac, mult in raw:
        poly = sympy.Poly(fac, X)
        deg = poly.degree()
        if deg == 0:
            continue  # unit in Q(s)
        if deg > 1:
            raise IrrationalDirectionError(
                f"residue factor of degree {deg} over Q(s): {fac}"
            )
        cs = [_sympy_to_qs(poly.nth(i), sympy, s) for i in range(deg + 1)]
        lead = cs[-1]
        monic = [c / lead for c in cs]
        out.append((monic, mult))
    out.sort(key=lambda fm: (len(fm[0]), repr(fm[0])))
    return out


def _laurent_gcd(f, g):
    sympy, s, X = _sympy_syms()
    fe = _laurent_poly_expr(f, sympy, s, X)
    ge = _laurent_poly_expr(g, sympy, s, X)
    h = sympy.gcd(fe, ge, X)
    poly = sympy.Poly(h, X)
    if poly.degree() <= 0:
        return [QS_FIELD.one]
    cs = [_sympy_to_qs(poly.nth(i), sympy, s) for i in range(poly.degree() + 1)]
    lead = cs[-1]
    return [c / lead for c in cs]


# ---------------------------------------------------------------------------
# Literals
# ---------------------------------------------------------------------------


class _ScalarSemantics:
    def __init__(self, cfg):
        self.cfg = cfg

    def from_int(self, n):
        return self.cfg.from_int(n)

    def atom(self, name):
        if name == "pi":
            if self.cfg.backend != PADIC:
                raise ParseError("'pi' only exists on the padic backend")
            return self.cfg.uniformizer()
        if name == "t":
            return self.cfg.t_scalar()
        if name == "s":
            return self.cfg.s_scalar()
        raise ParseError(f"unknown scalar symbol {name!r}")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def pow(self, a, n):
        return a**n


def parse_scalar(text, cfg):
    """Parse a scalar literal: integers, rationals a/b, pi, t, s, arithmetic."""
    return exprparse.parse(text, _ScalarSemantics(cfg))


def format_fraction(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x):
    if x.cfg.backend == PADIC:
        terms = []
        for i, c in enumerate(x.payload):
            if not c:
                continue
            if i == 0:
                terms.append(format_fraction(c))
            else:
                power = "pi" if i == 1 else f"pi^{i}"
                terms.append(power if c == 1 else f"{format_fraction(c)}*{power}")
        return " + ".join(terms) if terms else "0"
    return _format_laurent(x)


def format_qs(elem):
    """Rational function of s as a string."""
    num = _format_qq_poly(elem.num, "s")
    if elem.den == [Fraction(1)]:
        return num
    den = _format_qq_poly(elem.den, "s")
    return f"({num})/({den})"


def _format_qq_poly(coeffs, var):
    if not coeffs:
        return "0"
    terms = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        if i == 0:
            terms.append(format_fraction(c))
        else:
            power = var if i == 1 else f"{var}^{i}"
            terms.append(power if c == 1 else f"{format_fraction(c)}*{power}")
    return " + ".join(terms)


def _format_laurent(x):
    e = x.cfg.e

    def upoly(coeffs):
        if not coeffs:
            return "0"
        terms = []
        for i, c in enumerate(coeffs):
            if c.is_zero():
                continue
            cs = format_qs(c)
            if "/" in cs or "+" in cs or " " in cs:
                cs = f"({cs})"
            if i == 0:
                terms.append(cs)
                continue
            if i % e == 0:
                power = "t" if i == e else f"t^{i // e}"
            else:
                power = f"t^({i}/{e})"
            terms.append(power if cs == "1" else f"{cs}*{power}")
        return " + ".join(terms)

    num = upoly(x.payload.num)
    if x.payload.den == [QS_FIELD.one]:
        return num
    return f"({num})/({upoly(x.payload.den)})"


def format_residue(tag):
    """Residue element or conjugacy class as a string ('inf' handled upstream)."""
    if isinstance(tag, finitefield.FFElem):
        return finitefield.format_elem(tag)
    if isinstance(tag, ConjClassTag):
        return f"class[{format_residue_poly(list(tag.coeffs))}]"
    if isinstance(tag, RatFunc):
        return format_qs(tag)
    return str(tag)


def format_residue_poly(coeffs):
    terms = []
    for i, c in enumerate(coeffs):
        if isinstance(c, finitefield.FFElem):
            if c.is_zero():
                continue
            cs = finitefield.format_elem(c)
        else:
            if c.is_zero():
                continue
            cs = format_qs(c)
        power = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if power and cs == "1":
            terms.append(power)
        else:
            terms.append(f"{cs}{'*' if power else ''}{power}")
    return " + ".join(terms) if terms else "0"
