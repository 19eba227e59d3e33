"""Small finite fields F_{p^m} with deterministic moduli.

Fields are built as F_p[x]/(g_m) where g_m is the lexicographically first
monic irreducible of degree m, so the quotient chosen for a given (p, m) is
the same in every run and element tags stay comparable across computations.
Factorization is squarefree decomposition + distinct-degree splitting +
brute-force root search in enumerable extensions; that is all the desk-scale
inputs here need, and it keeps everything exact.
"""

from . import polys

# Extensions beyond this many elements are never enumerated; same-degree
# factor products that would need it raise instead.
ENUM_CAP = 200_000

_FIELD_CACHE = {}
_EMBED_CACHE = {}


class FFElem:
    """Element of F_{p^m}, a residue polynomial modulo the field modulus."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def _check(self, other):
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise ValueError("elements of different finite fields")
            return other
        return None

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        p = self.field.p
        return FFElem(self.field, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, [(-a) % p for a in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self.field._mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one
        base = self
        while n > 0:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        return self.field._inverse(self)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FFElem):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __repr__(self):
        return f"FF({self.field.p}^{self.field.m}):{format_elem(self)}"


class FiniteField:
    """F_{p^m} as a polys.py field descriptor with FFElem elements."""

    def __init__(self, p, m, modulus):
        self.p = p
        self.m = m
        self.modulus = modulus  # int coeff list over F_p, monic, degree m
        self.zero = FFElem(self, (0,) * m)
        one = [0] * m
        one[0] = 1
        self.one = FFElem(self, one)
        self.order = p**m

    def from_int(self, n):
        c = [0] * self.m
        c[0] = n % self.p
        return FFElem(self, c)

    def gen(self):
        if self.m == 1:
            return self.one
        c = [0] * self.m
        c[1] = 1
        return FFElem(self, c)

    def element(self, index):
        """The index-th element in the fixed enumeration order."""
        c = []
        for _ in range(self.m):
            index, r = divmod(index, self.p)
            c.append(r)
        return FFElem(self, c)

    def elements(self):
        for i in range(self.order):
            yield self.element(i)

    def _mul(self, a, b):
        p = self.p
        m = self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(b.coeffs):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the field modulus
        for k in range(len(prod) - 1, m - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = 0
            for i in range(m):
                prod[k - m + i] = (prod[k - m + i] - c * self.modulus[i]) % p
        return FFElem(self, prod[:m])

    def _inverse(self, a):
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        p = self.p
        # extended Euclid over F_p[x] between a and the modulus
        r0, r1 = list(self.modulus), list(a.coeffs)
        s0, s1 = [], [1]
        while True:
            r1 = _trim_int(r1)
            if len(r1) == 1:
                inv = pow(r1[0], -1, p)
                s1 = [(c * inv) % p for c in s1]
                c = s1 + [0] * self.m
                return FFElem(self, c[: self.m])
            q, r = _divmod_int(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _sub_int(s0, _mul_int(q, s1, p), p)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"


def _trim_int(c):
    while c and c[-1] == 0:
        c = c[:-1]
    return c


def _mul_int(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _trim_int(out)


def _sub_int(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = (x - y) % p
    return _trim_int(out)


def _divmod_int(a, b, p):
    a = list(a)
    binv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = (a[-1] * binv) % p
        q[k] = f
        for i, y in enumerate(b):
            a[k + i] = (a[k + i] - f * y) % p
        a = _trim_int(a)
    return q, a


def _powmod_x(q, f, p):
    """x^q modulo f over F_p by square-and-multiply on exponents of x."""
    result = [0, 1]
    result = _divmod_int(result, f, p)[1]
    base = result
    out = [1]
    n = q
    while n > 0:
        if n & 1:
            out = _divmod_int(_mul_int(out, base, p), f, p)[1]
        base = _divmod_int(_mul_int(base, base, p), f, p)[1]
        n >>= 1
    return out


def _gcd_int(a, b, p):
    a, b = _trim_int(list(a)), _trim_int(list(b))
    while b:
        a, b = b, _divmod_int(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _is_irreducible_int(f, p):
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    xq = _powmod_x(p**n, f, p)
    if _trim_int(_sub_int(xq, [0, 1], p)):
        return False
    for r in _prime_divisors(n):
        xq = _powmod_x(p ** (n // r), f, p)
        g = _gcd_int(_sub_int(xq, [0, 1], p), f, p)
        if len(g) != 1:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def get_field(p, m=1):
    """The canonical F_{p^m}: first monic irreducible of degree m."""
    key = (p, m)
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    if m == 1:
        modulus = [0, 1]
    else:
        modulus = None
        for idx in range(p**m):
            c = []
            i = idx
            for _ in range(m):
                i, r = divmod(i, p)
                c.append(r)
            cand = c + [1]
            if _is_irreducible_int(cand, p):
                modulus = cand
                break
        if modulus is None:  # cannot happen: irreducibles exist in every degree
            raise RuntimeError(f"no irreducible of degree {m} over F_{p}")
    field = FiniteField(p, m, modulus)
    _FIELD_CACHE[key] = field
    return field


def embed(small, big):
    """Embedding F_{p^a} -> F_{p^b} (a | b) as an element map.

    The generator of the small field goes to the first root of its modulus
    found in the big field's enumeration order, so the embedding is
    deterministic.  Requires the big field to be enumerable.
    """
    if small.p != big.p:
        raise ValueError("different characteristics")
    if small.m == 1:
        return lambda e: big.from_int(e.coeffs[0])
    if big.m % small.m != 0:
        raise ValueError("no embedding: degree does not divide")
    key = (small.p, small.m, big.m)
    if key in _EMBED_CACHE:
        img = _EMBED_CACHE[key]
    else:
        if big.order > ENUM_CAP:
            raise ValueError("embedding target too large to enumerate")
        mod = [big.from_int(c) for c in small.modulus]
        img = None
        for cand in big.elements():
            if polys.peval(mod, cand, big) == big.zero:
                img = cand
                break
        if img is None:
            raise RuntimeError("modulus has no root in extension")
        _EMBED_CACHE[key] = img

    def phi(e):
        acc = big.zero
        for c in reversed(e.coeffs):
            acc = acc * img + big.from_int(c)
        return acc

    return phi


def squarefree_decomposition(f, field):
    """Yield (squarefree factor, multiplicity) with product f up to a unit."""
    p = field.p
    f = polys.pmonic(f, field)
    out = []

    def rec(g, mult):
        if polys.pdeg(g) < 1:
            return
        dg = polys.pderiv(g, field)
        if not dg:
            # g = h(x^p); take the p-th root of coefficients via Frobenius
            root = []
            for i in range(0, len(g), p):
                c = g[i]
                root.append(c ** (p ** (field.m - 1)) if field.m > 1 else c)
            rec(polys.ptrim(root), mult * p)
            return
        w = polys.pgcd(g, dg, field)
        sf = polys.pdivmod(g, w, field)[0]
        k = mult
        while polys.pdeg(sf) >= 1:
            nxt = polys.pgcd(sf, w, field)
            part = polys.pdivmod(sf, nxt, field)[0]
            if polys.pdeg(part) >= 1:
                out.append((polys.pmonic(part, field), k))
            sf = nxt
            w = polys.pdivmod(w, nxt, field)[0]
            k += mult
        # factors of p-divisible multiplicity survive in w as an exact p-th
        # power; the Frobenius-root branch applies the factor p itself
        rec(w, mult)

    rec(f, 1)
    return out


def _distinct_degree(f, field):
    """Split a squarefree monic poly into (product of degree-k irreducibles, k)."""
    out = []
    q = field.order
    xq = [field.zero, field.one]
    k = 0
    rest = list(f)
    while polys.pdeg(rest) >= 1:
        k += 1
        if 2 * k > polys.pdeg(rest):
            out.append((rest, polys.pdeg(rest)))
            break
        xq = _pow_x_q(xq, q, rest, field)
        g = polys.pgcd(polys.psub(xq, [field.zero, field.one]), rest, field)
        if polys.pdeg(g) >= 1:
            out.append((g, k))
            rest = polys.pdivmod(rest, g, field)[0]
            xq = polys.pmod(xq, rest, field)
    return out


def _pow_x_q(base, q, mod, field):
    out = base
    n = q
    acc = [field.one]
    while n > 0:
        if n & 1:
            acc = polys.pmod(polys.pmul(acc, out, field), mod, field)
        out = polys.pmod(polys.pmul(out, out, field), mod, field)
        n >>= 1
    return acc


def roots_in_field(f, field):
    """All roots of f in the (enumerable) field, by brute-force search."""
    if field.order > ENUM_CAP:
        raise ValueError(f"field of order {field.order} too large to enumerate")
    out = []
    for cand in field.elements():
        if polys.peval(f, cand, field) == field.zero:
            out.append(cand)
    return out


def minimal_polynomial(alpha, big, base_emb, base):
    """Minimal polynomial over `base` of alpha in `big` (base embedded via base_emb)."""
    q = base.order
    conj = [alpha]
    cur = alpha**q
    while cur != alpha:
        conj.append(cur)
        cur = cur**q
    poly = [big.one]
    for c in conj:
        poly = polys.pmul(poly, [-c, big.one], big)
    # coefficients are Frobenius-fixed, so they pull back to the base field
    table = {base_emb(b).coeffs: b for b in base.elements()}
    out = []
    for c in poly:
        if c.coeffs not in table:
            raise RuntimeError("minimal polynomial coefficient escaped the base field")
        out.append(table[c.coeffs])
    return out


def factor(f, field):
    """Complete factorization into monic irreducibles over the given field.

    Returns (unit, [(factor, multiplicity), ...]).  Splitting several
    same-degree irreducible factors requires enumerating the extension they
    split in; inputs here keep those extensions small.
    """
    f = polys.ptrim(list(f))
    if not f:
        raise ValueError("factor of zero polynomial")
    unit = f[-1]
    if polys.pdeg(f) == 0:
        return unit, []
    out = []
    for sf, mult in squarefree_decomposition(f, field):
        for prod, k in _distinct_degree(sf, field):
            if polys.pdeg(prod) == k:
                out.append((prod, mult))
                continue
            # several irreducible factors of the same degree k: separate by
            # root search in the degree-k extension
            if field.order**k > ENUM_CAP:
                raise ValueError(
                    f"cannot split degree-{polys.pdeg(prod)} product of degree-{k} "
                    f"factors: extension of order {field.order}^{k} not enumerable"
                )
            big = get_field(field.p, field.m * k)
            emb = embed(field, big)
            fe = [emb(c) for c in prod]
            seen = []
            for alpha in big.elements():
                if polys.peval(fe, alpha, big) != big.zero:
                    continue
                mp = minimal_polynomial(alpha, big, emb, field)
                if mp not in seen:
                    seen.append(mp)
                    out.append((mp, mult))
            total = sum(polys.pdeg(g) for g, _ in out[-len(seen):])
            if total != polys.pdeg(prod):
                raise RuntimeError("equal-degree splitting lost factors")
    out.sort(key=lambda fm: (polys.pdeg(fm[0]), [c.coeffs for c in fm[0]]))
    return unit, out


def format_elem(e):
    """Readable form of an F_{p^m} element ('g' is the field generator)."""
    if all(c == 0 for c in e.coeffs):
        return "0"
    terms = []
    for i, c in enumerate(e.coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("g" if c == 1 else f"{c}*g")
        else:
            terms.append(f"g^{i}" if c == 1 else f"{c}*g^{i}")
    return "+".join(terms)
