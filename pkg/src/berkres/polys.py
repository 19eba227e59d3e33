"""Dense exact polynomial arithmetic over a generic coefficient field.

Polynomials are plain coefficient lists [c0, c1, ...] (ascending degree,
trailing zeros stripped, [] is the zero polynomial).  Coefficients are any
exact field elements supporting +, -, *, /, ==; a small `field` descriptor
supplies zero / one / from_int so the routines stay generic over Fraction,
finite-field elements and rational functions.
"""

from fractions import Fraction


class FractionField:
    """Field descriptor for the exact rationals."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def from_int(n):
        return Fraction(n)

    def __repr__(self):
        return "QQ"


QQ = FractionField()


def ptrim(c):
    while c and c[-1] == 0 * c[-1]:
        c = c[:-1]
    return c


def pzero(c):
    return len(c) == 0


def pdeg(c):
    return len(c) - 1


def padd(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else None
        y = b[i] if i < len(b) else None
        if x is None:
            out.append(y)
        elif y is None:
            out.append(x)
        else:
            out.append(x + y)
    return ptrim(out)


def pneg(a):
    return [-x for x in a]


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b, field):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == field.zero:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pscale(a, c):
    return ptrim([x * c for x in a])


def ppow(a, n, field):
    out = [field.one]
    base = a
    while n > 0:
        if n & 1:
            out = pmul(out, base, field)
        base = pmul(base, base, field)
        n >>= 1
    return out


def pdivmod(a, b, field):
    """Euclidean division; the divisor's leading coefficient must be a unit."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [field.zero] * max(len(a) - len(b) + 1, 0)
    inv_lead = field.one / b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] * inv_lead
        q[k] = f
        for i, y in enumerate(b):
            a[k + i] = a[k + i] - f * y
        a = ptrim(a)
    return ptrim(q), a


def pmod(a, b, field):
    return pdivmod(a, b, field)[1]


def pgcd(a, b, field):
    """Monic gcd by the Euclidean algorithm."""
    a, b = ptrim(list(a)), ptrim(list(b))
    while b:
        a, b = b, pmod(a, b, field)
    if a:
        a = pscale(a, field.one / a[-1])
    return a


def pmonic(a, field):
    if not a:
        return a
    return pscale(a, field.one / a[-1])


def peval(a, x, field):
    acc = field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a, field):
    return ptrim([a[i] * field.from_int(i) for i in range(1, len(a))])


def pshift(a, k, field):
    """Multiply by x^k."""
    if not a:
        return a
    return [field.zero] * k + list(a)


def pcompose(a, b, field):
    """a(b(x)) by Horner."""
    acc = []
    for c in reversed(a):
        acc = padd(pmul(acc, b, field), [c])
    return acc


def root_multiplicity(a, r, field):
    """Multiplicity of the root r in a (0 if not a root)."""
    m = 0
    lin = [-r, field.one]
    while a:
        q, rem = pdivmod(a, lin, field)
        if rem:
            break
        m += 1
        a = q
    return m


class RatFunc:
    """Reduced fraction of polynomials over an exact coefficient field.

    Canonical form: gcd(num, den) = 1 and den monic, so == and hash are
    structural.  Instances are immutable values.
    """

    __slots__ = ("num", "den", "field")

    def __init__(self, num, den=None, field=None, reduce=True):
        if field is None:
            raise ValueError("RatFunc needs a coefficient field descriptor")
        self.field = field
        num = ptrim(list(num))
        den = [field.one] if den is None else ptrim(list(den))
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            num, den = self._reduce(num, den, field)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num, den, field):
        if not num:
            return [], [field.one]
        if len(den) == 1:
            if den[0] != field.one:
                inv = field.one / den[0]
                num = pscale(num, inv)
            return num, [field.one]
        g = pgcd(num, den, field)
        if len(g) > 1:
            num = pdivmod(num, g, field)[0]
            den = pdivmod(den, g, field)[0]
        if den[-1] != field.one:
            inv = field.one / den[-1]
            num = pscale(num, inv)
            den = pscale(den, inv)
        return num, den

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c, field):
        z = field.zero
        return cls([c] if c != z else [], field=field, reduce=False)

    @classmethod
    def var(cls, field):
        return cls([field.zero, field.one], field=field, reduce=False)

    # -- predicates ---------------------------------------------------
    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == [self.field.one] and self.den == [self.field.one]

    def is_polynomial(self):
        return self.den == [self.field.one]

    def is_constant(self):
        return len(self.num) <= 1 and self.den == [self.field.one]

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num[0] if self.num else self.field.zero

    # -- arithmetic ---------------------------------------------------
    def _wrap(self, num, den, reduce=True):
        return RatFunc(num, den, field=self.field, reduce=reduce)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.field
        num = padd(pmul(self.num, other.den, f), pmul(other.num, self.den, f))
        den = pmul(self.den, other.den, f)
        return self._wrap(num, den)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(pneg(self.num), self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.field
        return self._wrap(pmul(self.num, other.num, f), pmul(self.den, other.den, f))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        f = self.field
        return self._wrap(pmul(self.num, other.den, f), pmul(self.den, other.num, f))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return (RatFunc([self.field.one], field=self.field) / self) ** (-n)
        f = self.field
        return self._wrap(ppow(self.num, n, f), ppow(self.den, n, f), reduce=False)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, int):
            return RatFunc.const(self.field.from_int(other), self.field)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den)))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc({self.num}, {self.den})"


class RatFuncField:
    """Field descriptor for RatFunc over a base field descriptor."""

    def __init__(self, base, name="x"):
        self.base = base
        self.name = name
        self.zero = RatFunc([], field=base, reduce=False)
        self.one = RatFunc([base.one], field=base, reduce=False)

    def from_int(self, n):
        return RatFunc.const(self.base.from_int(n), self.base)

    def gen(self):
        return RatFunc.var(self.base)

    def __repr__(self):
        return f"Frac({self.base!r}[{self.name}])"


def bareiss_det(matrix, field):
    """Fraction-free determinant (Bareiss elimination) over a field.

    Divisions are by earlier pivots and are exact, which keeps the
    intermediate entries minor-sized instead of product-sized.
    """
    n = len(matrix)
    if n == 0:
        return field.one
    m = [list(row) for row in matrix]
    zero = field.zero
    sign = 1
    prev = field.one
    for k in range(n - 1):
        if m[k][k] == zero:
            for i in range(k + 1, n):
                if m[i][k] != zero:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return zero
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) / prev
            m[i][k] = zero
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det
