"""Exact arithmetic for the scalar types of the laboratory.

Everything here is exact.  The types are:

 - ``PrimeField``: the field F_p, elements as integers in [0, p).
 - polynomials over F_p, represented as coefficient tuples with the
   constant term first and no trailing zeros; ``()`` is the zero
   polynomial.  ``Poly`` wraps a tuple, the ``p*`` module functions
   operate on raw tuples (they are the hot path elsewhere).
 - ``LaurentElement``: a fraction n(y) / (y^a (y+1)^b) with a, b >= 0
   and the fraction fully reduced, the scalar ring generated by y,
   1/y and 1/(y+1).  The reduced triple (n, a, b) is unique, so
   elements can be compared and hashed structurally.
 - ``ResidueRing`` / ``ResidueElement``: F_p[y]/(g) with table-backed
   arithmetic on integer-encoded residues; the finite fields F_{p^e}
   used by the flag and quotient modules are instances with g
   irreducible.

No truncated power series appear anywhere; every value admits a
finite canonical representative.
"""

from __future__ import annotations

import re
from functools import lru_cache

DEGREE_CAP = 64


class DegreeCapExceeded(OverflowError):
    """Polynomial degree grew past DEGREE_CAP; almost certainly a bug upstream."""


class IdealNotCoprimeError(ValueError):
    """Residue modulus vanishes at 0 or -1, so y or y+1 is not invertible."""


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """F_p with elements as plain ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return pow(a, self.p - 2, self.p)

    def elements(self):
        return range(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


# ---------------------------------------------------------------------------
# raw polynomial tuples


def pnormalize(coeffs, p):
    c = [x % p for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if len(c) > DEGREE_CAP + 1:
        raise DegreeCapExceeded(f"degree {len(c) - 1} exceeds cap {DEGREE_CAP}")
    return tuple(c)


def pdeg(a):
    return len(a) - 1


def padd(a, b, p):
    if not a:
        return b
    if not b:
        return a
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return pnormalize(out, p)


def psub(a, b, p):
    if not b:
        return a
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return pnormalize(out, p)


def pneg(a, p):
    return tuple((-x) % p for x in a)


def pscale(a, k, p):
    k %= p
    if k == 0:
        return ()
    if k == 1:
        return a
    return pnormalize([x * k for x in a], p)


def pmul(a, b, p):
    if not a or not b:
        return ()
    if len(a) + len(b) - 1 > DEGREE_CAP + 1:
        raise DegreeCapExceeded(f"product degree {len(a) + len(b) - 2} exceeds cap {DEGREE_CAP}")
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return pnormalize(out, p)


def pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    binv = pow(b[-1], p - 2, p)
    r = list(a)
    q = [0] * (len(a) - len(b) + 1)
    while True:
        while r and r[-1] % p == 0:
            r.pop()
        if len(r) < len(b):
            break
        c = (r[-1] * binv) % p
        d = len(r) - len(b)
        q[d] = c
        for i, x in enumerate(b):
            if x:
                r[d + i] = (r[d + i] - c * x) % p
        r.pop()
    return pnormalize(q, p), pnormalize(r, p)


def pmod(a, b, p):
    return pdivmod(a, b, p)[1]


def pgcd(a, b, p):
    """Monic gcd."""
    while b:
        a, b = b, pmod(a, b, p)
    if a:
        a = pscale(a, pow(a[-1], p - 2, p), p)
    return a


def pval(a):
    """Index of the lowest nonzero coefficient; None for the zero polynomial."""
    for i, x in enumerate(a):
        if x:
            return i
    return None


def pshift(a, k):
    """Multiply by y^k, k >= 0."""
    if not a or k == 0:
        return a
    if len(a) + k > DEGREE_CAP + 1:
        raise DegreeCapExceeded(f"shift degree {len(a) + k - 1} exceeds cap {DEGREE_CAP}")
    return (0,) * k + tuple(a)


def pcut(a, k):
    """Exact division by y^k; valuation of a must be >= k."""
    if not a:
        return a
    assert all(x == 0 for x in a[:k])
    return tuple(a[k:])


def peval(a, x, p):
    y = 0
    for c in reversed(a):
        y = (y * x + c) % p
    return y


def pmonic(a, p):
    if not a:
        return a
    return pscale(a, pow(a[-1], p - 2, p), p)


def ypow(k):
    """The monomial y^k as a tuple."""
    return (0,) * k + (1,)


Y = (0, 1)
YP1 = (1, 1)  # y + 1


def is_irreducible(g, p):
    """Trial-division irreducibility test, adequate for desk-scale degrees."""
    d = pdeg(g)
    if d <= 0:
        return False
    if d == 1:
        return True
    for q in _monic_polys_upto(d // 2, p):
        if pmod(g, q, p) == ():
            return False
    return True


@lru_cache(maxsize=None)
def _monic_polys_upto(dmax, p):
    out = []
    for d in range(1, dmax + 1):
        for enc in range(p ** d):
            coeffs = []
            e = enc
            for _ in range(d):
                coeffs.append(e % p)
                e //= p
            coeffs.append(1)
            out.append(tuple(coeffs))
    return tuple(out)


# ---------------------------------------------------------------------------
# Poly wrapper


class Poly:
    """Immutable polynomial over F_p; thin wrapper over a coefficient tuple."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.coeffs = pnormalize(tuple(coeffs), p)

    @classmethod
    def zero(cls, p):
        return cls((), p)

    @classmethod
    def one(cls, p):
        return cls((1,), p)

    @classmethod
    def y(cls, p):
        return cls(Y, p)

    @property
    def degree(self):
        """Degree, or -1 for the zero polynomial."""
        return pdeg(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def monic(self):
        return Poly(pmonic(self.coeffs, self.p), self.p)

    def valuation(self):
        return pval(self.coeffs)

    def __call__(self, x):
        return peval(self.coeffs, x, self.p)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.coeffs
        if isinstance(other, int):
            return pnormalize((other,), self.p)
        if isinstance(other, tuple):
            return pnormalize(other, self.p)
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Poly(padd(self.coeffs, c, self.p), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Poly(psub(self.coeffs, c, self.p), self.p)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Poly(psub(c, self.coeffs, self.p), self.p)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Poly(pmul(self.coeffs, c, self.p), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(pneg(self.coeffs, self.p), self.p)

    def __divmod__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        q, r = pdivmod(self.coeffs, c, self.p)
        return Poly(q, self.p), Poly(r, self.p)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other):
        c = self._coerce(other)
        return Poly(pgcd(self.coeffs, c, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == pnormalize((other,), self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"Poly({poly_to_text(self.coeffs, self.p)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("y" if c == 1 else f"{c}*y")
            else:
                terms.append(f"y^{i}" if c == 1 else f"{c}*y^{i}")
        return " + ".join(terms)


# ---------------------------------------------------------------------------
# text encoding: "p=2; [1,0,1]" is 1 + y^2 over F_2

_POLY_TEXT = re.compile(r"^\s*p\s*=\s*(\d+)\s*;\s*\[([0-9,\s]*)\]\s*$")


def poly_to_text(coeffs, p):
    return f"p={p}; [{','.join(str(c) for c in coeffs)}]"


def poly_from_text(text):
    """Parse "p=2; [1,0,1]" into a Poly."""
    m = _POLY_TEXT.match(text)
    if not m:
        raise ValueError(f"malformed polynomial encoding: {text!r}")
    p = int(m.group(1))
    body = m.group(2).strip()
    coeffs = [int(t) for t in body.split(",")] if body else []
    return Poly(coeffs, p)


def poly_from_csv(text, p):
    """Parse a bare comma-separated coefficient list, constant term first."""
    try:
        coeffs = [int(t) for t in text.split(",")]
    except ValueError:
        raise ValueError(f"malformed polynomial encoding: {text!r}") from None
    return Poly(coeffs, p)


# ---------------------------------------------------------------------------
# LaurentElement


class LaurentElement:
    """n(y) / (y^yexp (y+1)^y1exp) over F_p, kept in reduced canonical form.

    The constructor accepts any integer exponents (negative exponents are
    folded into the numerator) and cancels common y / (y+1) factors, so
    equal values always have equal representations.
    """

    __slots__ = ("p", "num", "yexp", "y1exp")

    def __init__(self, num, yexp=0, y1exp=0, p=None):
        if isinstance(num, Poly):
            p = num.p if p is None else p
            num = num.coeffs
        if p is None:
            raise ValueError("characteristic p required")
        num = pnormalize(tuple(num), p)
        if not num:
            yexp = y1exp = 0
        else:
            if yexp < 0:
                num = pshift(num, -yexp)
                yexp = 0
            if y1exp < 0:
                for _ in range(-y1exp):
                    num = pmul(num, YP1, p)
                y1exp = 0
            if yexp > 0:
                v = pval(num)
                t = min(v, yexp)
                if t:
                    num = pcut(num, t)
                    yexp -= t
            while y1exp > 0 and peval(num, p - 1, p) == 0:
                q, r = pdivmod(num, YP1, p)
                assert r == ()
                num = q
                y1exp -= 1
        self.p = p
        self.num = num
        self.yexp = yexp
        self.y1exp = y1exp

    # -- constructors

    @classmethod
    def from_poly(cls, poly):
        return cls(poly.coeffs, 0, 0, poly.p)

    @classmethod
    def from_int(cls, c, p):
        return cls((c,), 0, 0, p)

    @classmethod
    def y(cls, p, k=1):
        """The monomial y^k; k may be negative."""
        return cls((1,), -k, 0, p)

    @classmethod
    def zero(cls, p):
        return cls((), 0, 0, p)

    @classmethod
    def one(cls, p):
        return cls((1,), 0, 0, p)

    # -- structure

    def is_zero(self):
        return not self.num

    def numerator(self):
        return Poly(self.num, self.p)

    def as_poly(self):
        """The underlying polynomial when there is no denominator."""
        if self.yexp or self.y1exp:
            raise ValueError(f"{self!r} is not polynomial")
        return Poly(self.num, self.p)

    def is_unit(self):
        """Unit of the scalar ring: c * y^a * (y+1)^b with c nonzero."""
        if not self.num:
            return False
        n = pcut(self.num, pval(self.num))
        while pdeg(n) > 0 and peval(n, self.p - 1, self.p) == 0:
            n, r = pdivmod(n, YP1, self.p)
            assert r == ()
        return pdeg(n) == 0

    # -- arithmetic

    def _pair(self, other):
        if isinstance(other, LaurentElement):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other
        if isinstance(other, Poly):
            return LaurentElement(other.coeffs, 0, 0, self.p)
        if isinstance(other, int):
            return LaurentElement((other,), 0, 0, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        a = max(self.yexp, o.yexp)
        b = max(self.y1exp, o.y1exp)
        n1 = pshift(self.num, a - self.yexp)
        for _ in range(b - self.y1exp):
            n1 = pmul(n1, YP1, p)
        n2 = pshift(o.num, a - o.yexp)
        for _ in range(b - o.y1exp):
            n2 = pmul(n2, YP1, p)
        return LaurentElement(padd(n1, n2, p), a, b, p)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement(pneg(self.num, self.p), self.yexp, self.y1exp, self.p)

    def __sub__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return LaurentElement(pmul(self.num, o.num, self.p),
                              self.yexp + o.yexp, self.y1exp + o.y1exp, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero")
        # divisor must be a unit c*y^a*(y+1)^b of the scalar ring, or divide exactly
        p = self.p
        if pdeg(o.num) == 0:
            c = pow(o.num[0], p - 2, p)
            return LaurentElement(pscale(self.num, c, p),
                                  self.yexp - o.yexp, self.y1exp - o.y1exp, p)
        q, r = pdivmod(self.num, o.num, p)
        if r == ():
            return LaurentElement(q, self.yexp - o.yexp, self.y1exp - o.y1exp, p)
        raise ValueError("divisor is not a unit of the scalar ring and does not divide exactly")

    def __eq__(self, other):
        o = self._pair(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.num, self.yexp, self.y1exp) == (o.num, o.yexp, o.y1exp)

    def __hash__(self):
        return hash((self.p, self.num, self.yexp, self.y1exp))

    def __repr__(self):
        s = str(Poly(self.num, self.p))
        if self.yexp or self.y1exp:
            den = []
            if self.yexp:
                den.append("y" if self.yexp == 1 else f"y^{self.yexp}")
            if self.y1exp:
                den.append("(y+1)" if self.y1exp == 1 else f"(y+1)^{self.y1exp}")
            s = f"({s})/({'*'.join(den)})"
        return f"LaurentElement[p={self.p}]({s})"


def canonical_reduce(f):
    """Return the unique reduced representative of f (idempotent)."""
    if not isinstance(f, LaurentElement):
        raise TypeError("canonical_reduce expects a LaurentElement")
    return LaurentElement(f.num, f.yexp, f.y1exp, f.p)


def valuation(f):
    """y-adic valuation: the exponent of the lowest y term after reduction.

    Raises ValueError on zero input.
    """
    if isinstance(f, Poly):
        f = LaurentElement.from_poly(f)
    if f.is_zero():
        raise ValueError("valuation of zero is undefined")
    return pval(f.num) - f.yexp


# ---------------------------------------------------------------------------
# residue rings F_p[y]/(g)

TABLE_Q_CAP = 4096


class ResidueRing:
    """F_p[y]/(g) with g monic; table-backed arithmetic on ints in [0, q).

    Residues are encoded as integers sum(c_i * p^i).  When g is
    irreducible this is the field F_{p^deg g}.
    """

    def __init__(self, p, modulus):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if isinstance(modulus, Poly):
            modulus = modulus.coeffs
        g = pnormalize(tuple(modulus), p)
        if pdeg(g) < 1:
            raise ValueError("modulus must have degree >= 1")
        g = pmonic(g, p)
        self.p = p
        self.modulus = g
        self.deg = pdeg(g)
        self.q = p ** self.deg
        if self.q > TABLE_Q_CAP:
            raise ValueError(f"residue ring of order {self.q} exceeds table cap {TABLE_Q_CAP}")
        self.irreducible = is_irreducible(g, p)
        self._build_tables()

    @classmethod
    def for_order(cls, q):
        """The field F_q for a prime power q, with a fixed default modulus."""
        p, e = _prime_power(q)
        return cls(p, _default_modulus(p, e))

    def _build_tables(self):
        p, q = self.p, self.q
        polys = [self.decode(v) for v in range(q)]
        add = [[self.encode(padd(polys[a], polys[b], p)) for b in range(q)] for a in range(q)]
        mul = [[self.encode(pmod(pmul(polys[a], polys[b], p), self.modulus, p))
                for b in range(q)] for a in range(q)]
        neg = [self.encode(pneg(polys[a], p)) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self.add_table = tuple(tuple(r) for r in add)
        self.mul_table = tuple(tuple(r) for r in mul)
        self.neg_table = tuple(neg)
        self.inv_table = tuple(inv)

    # -- encoding

    def encode(self, coeffs):
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    def decode(self, v):
        c = []
        while v:
            v, r = divmod(v, self.p)
            c.append(r)
        return tuple(c)

    # -- scalar ops on int encodings

    def add(self, a, b):
        return self.add_table[a][b]

    def sub(self, a, b):
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero residue")
        v = self.inv_table[a]
        if v == 0:
            raise ZeroDivisionError(f"residue {a} is not invertible modulo {self.modulus}")
        return v

    def element(self, value):
        if isinstance(value, Poly):
            value = self.encode(pmod(value.coeffs, self.modulus, self.p))
        elif isinstance(value, tuple):
            value = self.encode(pmod(pnormalize(value, self.p), self.modulus, self.p))
        return ResidueElement(self, value % self.q)

    def elements(self):
        return range(self.q)

    # -- matrices (row-major tuples of int encodings)

    def mat_mul(self, A, B):
        n, m, k = len(A), len(B[0]), len(B)
        mul, add = self.mul_table, self.add_table
        out = []
        for i in range(n):
            Ai = A[i]
            row = []
            for j in range(m):
                acc = 0
                for t in range(k):
                    acc = add[acc][mul[Ai[t]][B[t][j]]]
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def mat_vec(self, A, v):
        mul, add = self.mul_table, self.add_table
        out = []
        for row in A:
            acc = 0
            for a, x in zip(row, v):
                acc = add[acc][mul[a][x]]
            out.append(acc)
        return tuple(out)

    def mat_identity(self, n):
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

    def mat_det(self, A):
        n = len(A)
        M = [list(r) for r in A]
        det = 1
        for c in range(n):
            piv = None
            for r in range(c, n):
                if M[r][c]:
                    piv = r
                    break
            if piv is None:
                return 0
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                det = self.neg(det)
            det = self.mul(det, M[c][c])
            ic = self.inv(M[c][c])
            for r in range(c + 1, n):
                if M[r][c]:
                    f = self.mul(M[r][c], ic)
                    for k in range(c, n):
                        M[r][k] = self.sub(M[r][k], self.mul(f, M[c][k]))
        return det

    def mat_inv(self, A):
        n = len(A)
        M = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(A)]
        for c in range(n):
            piv = None
            for r in range(c, n):
                if M[r][c]:
                    piv = r
                    break
            if piv is None:
                raise ZeroDivisionError("singular matrix over residue ring")
            M[c], M[piv] = M[piv], M[c]
            ic = self.inv(M[c][c])
            M[c] = [self.mul(ic, x) for x in M[c]]
            for r in range(n):
                if r != c and M[r][c]:
                    f = M[r][c]
                    M[r] = [self.sub(x, self.mul(f, y)) for x, y in zip(M[r], M[c])]
        return tuple(tuple(row[n:]) for row in M)

    def mat_rref(self, rows):
        """Reduced row echelon form; returns (rref rows without zero rows, pivot cols)."""
        M = [list(r) for r in rows]
        n = len(M[0]) if M else 0
        pivots = []
        r = 0
        for c in range(n):
            piv = None
            for i in range(r, len(M)):
                if M[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            ic = self.inv(M[r][c])
            M[r] = [self.mul(ic, x) for x in M[r]]
            for i in range(len(M)):
                if i != r and M[i][c]:
                    f = M[i][c]
                    M[i] = [self.sub(x, self.mul(f, y)) for x, y in zip(M[i], M[r])]
            pivots.append(c)
            r += 1
            if r == len(M):
                break
        return tuple(tuple(row) for row in M[:r]), tuple(pivots)

    def normalize_projective(self, A):
        """Scale so the first nonzero entry in row-major order is 1."""
        for row in A:
            for x in row:
                if x:
                    ix = self.inv(x)
                    if ix == 1:
                        return tuple(tuple(r) for r in A)
                    return tuple(tuple(self.mul(ix, e) for e in r) for r in A)
        raise ValueError("zero matrix cannot be projectively normalized")

    def __eq__(self, other):
        return (isinstance(other, ResidueRing) and other.p == self.p
                and other.modulus == self.modulus)

    def __hash__(self):
        return hash(("ResidueRing", self.p, self.modulus))

    def __repr__(self):
        return f"ResidueRing(p={self.p}, g={Poly(self.modulus, self.p)})"


class ResidueElement:
    """An element of a ResidueRing; thin wrapper over the int encoding."""

    __slots__ = ("ring", "val")

    def __init__(self, ring, val):
        self.ring = ring
        self.val = val

    @property
    def value(self):
        return Poly(self.ring.decode(self.val), self.ring.p)

    @property
    def modulus(self):
        return Poly(self.ring.modulus, self.ring.p)

    def _coerce(self, other):
        if isinstance(other, ResidueElement):
            if other.ring != self.ring:
                raise ValueError("mixed residue rings")
            return other.val
        if isinstance(other, int):
            return other % self.ring.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return ResidueElement(self.ring, self.ring.add(self.val, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return ResidueElement(self.ring, self.ring.sub(self.val, v))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return ResidueElement(self.ring, self.ring.mul(self.val, v))

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueElement(self.ring, self.ring.neg(self.val))

    def inverse(self):
        return ResidueElement(self.ring, self.ring.inv(self.val))

    def __eq__(self, other):
        if isinstance(other, ResidueElement):
            return self.ring == other.ring and self.val == other.val
        if isinstance(other, int):
            return self.val == other % self.ring.p
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.val))

    def __repr__(self):
        return f"ResidueElement({self.value} mod {self.modulus})"


def residue_reduce(f, g, p=None):
    """Image of f in F_p[y]/(g); y and y+1 map to their modular inverses.

    g must not vanish at 0 or -1, otherwise the denominators of the
    scalar ring have no image and IdealNotCoprimeError is raised.
    Non-monic g is normalized by its leading coefficient.
    """
    if isinstance(g, Poly):
        p = g.p if p is None else p
        g = g.coeffs
    if isinstance(f, Poly):
        f = LaurentElement.from_poly(f)
    if p is None:
        p = f.p
    g = pmonic(pnormalize(tuple(g), p), p)
    if peval(g, 0, p) == 0 or peval(g, p - 1, p) == 0:
        raise IdealNotCoprimeError("modulus vanishes at 0 or -1: ideal not coprime to the denominators")
    ring = ResidueRing(p, g)
    val = ring.encode(pmod(f.num, g, p))
    if f.yexp:
        yinv = ring.inv(ring.encode(pmod(Y, g, p)))
        for _ in range(f.yexp):
            val = ring.mul(val, yinv)
    if f.y1exp:
        y1inv = ring.inv(ring.encode(pmod(YP1, g, p)))
        for _ in range(f.y1exp):
            val = ring.mul(val, y1inv)
    return ResidueElement(ring, val)


def _prime_power(q):
    for p in range(2, q + 1):
        if is_prime(p) and q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")


_DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),          # y^2+y+1
    (2, 3): (1, 1, 0, 1),       # y^3+y+1
    (2, 4): (1, 1, 0, 0, 1),    # y^4+y+1
    (3, 2): (1, 0, 1),          # y^2+1
    (3, 3): (1, 2, 0, 1),       # y^3+2y+1
    (5, 2): (2, 1, 1),          # y^2+y+2
    (7, 2): (1, 0, 1),          # y^2+1
}


def _default_modulus(p, e):
    if e == 1:
        return (0, 1)  # F_p[y]/(y) = F_p
    try:
        g = _DEFAULT_MODULI[(p, e)]
    except KeyError:
        # search for the lexicographically least irreducible monic polynomial
        for enc in range(p ** e):
            coeffs = []
            v = enc
            for _ in range(e):
                coeffs.append(v % p)
                v //= p
            g = tuple(coeffs) + (1,)
            if is_irreducible(g, p):
                return g
        raise ValueError(f"no irreducible modulus found for p={p}, e={e}") from None
    assert is_irreducible(g, p)
    return g
