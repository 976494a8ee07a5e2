"""Exact univariate Laurent polynomial arithmetic over the integers.

Everything here is pure integer arithmetic; there is no floating point
anywhere.  A Laurent polynomial is stored as a dict exponent -> nonzero
integer coefficient.  Ordinary polynomials in Z[t] (used inside the
fraction-free determinant routines) are stored as coefficient lists.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class LaurentPoly:
    """An element of Z[t, t^-1] in canonical sparse form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            coeffs = {}
        self.coeffs = {e: c for e, c in coeffs.items() if c != 0}

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent, coefficient=1):
        return cls({exponent: coefficient})

    @classmethod
    def from_int(cls, n):
        return cls({0: n})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_int(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by t^k."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def min_exp(self):
        return min(self.coeffs) if self.coeffs else 0

    def max_exp(self):
        return max(self.coeffs) if self.coeffs else 0

    def evaluate(self, value):
        """Evaluate at an exact rational value (nonzero for negative exps)."""
        value = Fraction(value)
        total = Fraction(0)
        for e, c in self.coeffs.items():
            total += c * value**e
        return total

    def at_one(self):
        return sum(self.coeffs.values())

    def to_intpoly(self):
        """Return (poly, shift) with poly in Z[t], poly[0] != 0, so that
        self = t^shift * poly."""
        if not self.coeffs:
            return [], 0
        lo = self.min_exp()
        hi = self.max_exp()
        poly = [0] * (hi - lo + 1)
        for e, c in self.coeffs.items():
            poly[e - lo] = c
        return poly, lo

    @classmethod
    def from_intpoly(cls, poly, shift=0):
        return cls({i + shift: c for i, c in enumerate(poly) if c != 0})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{e}")
        return " + ".join(parts).replace("+ -", "- ")


# --- dense Z[t] helpers (coefficient lists, constant term first) ---

def poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return poly_trim(out)


def poly_neg(p):
    return [-c for c in p]


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divexact(p, q):
    """Exact division in Z[t]; raises if q does not divide p exactly."""
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    if not p:
        return []
    p = list(p)
    dq = len(q) - 1
    lead = q[-1]
    out = [0] * (len(p) - dq)
    for i in range(len(p) - 1, dq - 1, -1):
        if p[i] % lead != 0:
            raise ArithmeticError("inexact polynomial division")
        c = p[i] // lead
        out[i - dq] = c
        if c:
            for j, b in enumerate(q):
                p[i - dq + j] -= c * b
    if any(p[:dq]):
        raise ArithmeticError("inexact polynomial division")
    return poly_trim(out)


def poly_content(p):
    g = 0
    for c in p:
        g = gcd(g, abs(c))
    return g


def poly_primitive(p):
    g = poly_content(p)
    if g in (0, 1):
        return list(p)
    return [c // g for c in p]


def poly_gcd(p, q):
    """gcd in Z[t] via the primitive Euclidean algorithm (positive leading
    coefficient, primitive)."""
    p, q = list(p), list(q)
    if not p:
        out = poly_primitive(q)
    elif not q:
        out = poly_primitive(p)
    else:
        a, b = poly_primitive(p), poly_primitive(q)
        while b:
            # pseudo-remainder of a by b
            r = list(a)
            lead = b[-1]
            db = len(b) - 1
            while len(r) - 1 >= db and r:
                shift = len(r) - 1 - db
                c = r[-1]
                r = [x * lead for x in r]
                for j, y in enumerate(b):
                    r[shift + j] -= c * y
                poly_trim(r)
            a, b = b, poly_primitive(r)
        out = a
    if out and out[-1] < 0:
        out = [-c for c in out]
    return out


def poly_eval(p, value):
    value = Fraction(value)
    total = Fraction(0)
    for c in reversed(p):
        total = total * value + c
    return total


class RationalFunction:
    """A nonzero element of Q(t)* up to sign: +- t^m * num/den.

    Canonical form: num, den in Z[t] primitive and coprime, with nonzero
    constant terms and positive leading coefficients; the sign ambiguity is
    structural (torsion is only defined up to sign), so it is not stored.
    """

    __slots__ = ("exponent", "num", "den")

    def __init__(self, exponent, num, den):
        self.exponent = exponent
        self.num = tuple(num)
        self.den = tuple(den)

    @classmethod
    def from_laurent_fraction(cls, numerator: LaurentPoly, denominator: LaurentPoly):
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator")
        if numerator.is_zero():
            raise ValueError("torsion values are nonzero; got zero numerator")
        pn, sn = numerator.to_intpoly()
        pd, sd = denominator.to_intpoly()
        g = poly_gcd(pn, pd)
        if len(g) > 1 or g[:1] != [1]:
            pn = poly_divexact(pn, g)
            pd = poly_divexact(pd, g)
        cn, cd = poly_content(pn), poly_content(pd)
        c = gcd(cn, cd)
        if c > 1:
            pn = [x // c for x in pn]
            pd = [x // c for x in pd]
        if pd[-1] < 0:
            pd = [-x for x in pd]
            pn = [-x for x in pn]
        if pn[-1] < 0:
            pn = [-x for x in pn]
        return cls(sn - sd, pn, pd)

    @classmethod
    def monomial(cls, exponent):
        return cls(exponent, [1], [1])

    def __eq__(self, other):
        return (isinstance(other, RationalFunction)
                and self.exponent == other.exponent
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.exponent, self.num, self.den))

    def times_monomial(self, k):
        return RationalFunction(self.exponent + k, self.num, self.den)

    def is_monomial(self):
        return self.num == (1,) and self.den == (1,)

    def evaluate_abs(self, value):
        """|value| of the function at t = value, as an exact Fraction."""
        v = Fraction(value)
        out = abs(v**self.exponent * poly_eval(self.num, v) / poly_eval(self.den, v))
        return out

    def __repr__(self):
        def fmt(p):
            return repr(LaurentPoly.from_intpoly(p))
        return f"+- t^{self.exponent} * ({fmt(self.num)})/({fmt(self.den)})"
