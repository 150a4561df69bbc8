# qarith.py
# Exact and floating arithmetic for the odometer and the dimension formulas:
# quantum integers, rational functions in q, real algebraic numbers with exact
# comparison, number-field elements and the algebraic-integer test.

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence, Union

import mpmath
import sympy
from sympy import Poly, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

log = logging.getLogger(__name__)

Ordering = Literal["LT", "EQ", "GT"]
RationalLike = Union[int, Fraction, sympy.Rational]

q = sympy.Symbol("q")
x = sympy.Symbol("x")


class BoundError(ValueError):
    """Malformed exact bound token or out-of-domain index."""


def _rat(r: RationalLike) -> sympy.Rational:
    if isinstance(r, Fraction):
        return sympy.Rational(r.numerator, r.denominator)
    return sympy.Rational(r)


def _frac(r) -> Fraction:
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


# -----------------------------
# Rational functions in q
# -----------------------------
def _primitive_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Cancel, clear denominators, drop common content, make lc(den) > 0."""
    g = num.gcd(den)
    if not g.is_one:
        num = num.exquo(g)
        den = den.exquo(g)
    coeffs = [_frac(c) for c in num.all_coeffs() + den.all_coeffs()]
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    num = num.mul_ground(lcm)
    den = den.mul_ground(lcm)
    ints = [int(_frac(c)) for c in num.all_coeffs() + den.all_coeffs()]
    content = 0
    for c in ints:
        content = math.gcd(content, c)
    if content > 1:
        num = num.quo_ground(content)
        den = den.quo_ground(content)
    if den.LC() < 0:
        num, den = -num, -den
    return num, den


@dataclass(frozen=True)
class QRational:
    """A reduced ratio of integer polynomials in the formal variable q."""

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num, den=1) -> "QRational":
        n = Poly(num, q, domain=QQ)
        d = Poly(den, q, domain=QQ)
        if d.is_zero:
            raise ZeroDivisionError("QRational with zero denominator")
        n, d = _primitive_pair(n, d)
        return cls(n, d)

    @classmethod
    def from_expr(cls, expr) -> "QRational":
        n, d = sympy.fraction(sympy.cancel(sympy.together(sympy.sympify(expr))))
        return cls.make(n, d)

    @classmethod
    def var(cls) -> "QRational":
        return cls.make(q)

    def expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def _coerce(self, other) -> "QRational":
        if isinstance(other, QRational):
            return other
        return QRational.make(_rat(other))

    def __add__(self, other):
        o = self._coerce(other)
        return QRational.make(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QRational.make(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.num.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return QRational.make(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QRational.make(self.den ** (-k), self.num ** (-k))
        return QRational.make(self.num**k, self.den**k)

    def __eq__(self, other):
        if not isinstance(other, QRational):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(self.num.all_coeffs()), tuple(self.den.all_coeffs())))

    def __call__(self, qv: float) -> float:
        qv = float(qv)
        n = d = 0.0
        for c in self.num.all_coeffs():
            n = n * qv + float(c)
        for c in self.den.all_coeffs():
            d = d * qv + float(c)
        return n / d

    def exact_at(self, qv: RationalLike) -> sympy.Rational:
        r = _rat(qv)
        return self.num.eval(r) / self.den.eval(r)

    def derivative(self) -> "QRational":
        return QRational.make(
            self.num.diff(q) * self.den - self.num * self.den.diff(q), self.den**2
        )

    def __str__(self) -> str:
        n, d = self.num.as_expr(), self.den.as_expr()
        if d == 1:
            return str(n)
        return f"({n})/({d})"


def quantum_int(k: int, qv: Union[float, QRational, None] = None):
    """[k] = (q^k - q^-k)/(q - q^-1); the limit k at q = 1; symbolic when qv is None or a QRational."""
    if k < 0:
        raise ValueError("quantum integers are defined here for k >= 0")
    if qv is None:
        qv = QRational.var()
    if isinstance(qv, QRational):
        if k == 0:
            return QRational.make(0)
        return (qv ** (2 * k) - 1) / ((qv ** (k - 1)) * (qv**2 - 1))
    qv = float(qv)
    if abs(qv - 1.0) < 1e-12:
        return float(k)
    return (qv**k - qv ** (-k)) / (qv - 1.0 / qv)


def index_to_q(index: float) -> float:
    """The root q >= 1 of q + 1/q = sqrt(index)."""
    index = float(index)
    if index < 4.0:
        raise BoundError(f"index {index} < 4 has no real q >= 1")
    s = math.sqrt(index)
    return (s + math.sqrt(max(s * s - 4.0, 0.0))) / 2.0


def q_to_index(qv: float) -> float:
    return (qv + 1.0 / qv) ** 2


# -----------------------------
# Real algebraic numbers
# -----------------------------
def _integral_primitive(p: Poly) -> Poly:
    p = Poly(p, x, domain=QQ)
    _, p = p.clear_denoms()
    p = Poly(p, x, domain=ZZ).primitive()[1]
    if p.LC() < 0:
        p = -p
    return p


@dataclass(frozen=True)
class AlgebraicReal:
    """A real root of an irreducible integer polynomial, pinned by a rational isolating interval."""

    poly: Poly
    lo: sympy.Rational
    hi: sympy.Rational

    @classmethod
    def rational(cls, r: RationalLike) -> "AlgebraicReal":
        r = _rat(r)
        return cls(_integral_primitive(Poly(x - r, x)), r, r)

    @classmethod
    def largest_root(cls, p) -> "AlgebraicReal":
        """Largest real root of p (any integer/rational polynomial), minimal polynomial attached."""
        p = Poly(p, x, domain=QQ)
        best: AlgebraicReal | None = None
        for factor, _mult in p.factor_list()[1]:
            ivs = factor.intervals()
            if not ivs:
                continue
            (a, b), _ = max(ivs, key=lambda iv: iv[0][0])
            cand = cls(_integral_primitive(factor), sympy.Rational(a), sympy.Rational(b))
            if best is None or compare(cand, best) == "GT":
                best = cand
        if best is None:
            raise ValueError(f"polynomial {p.as_expr()} has no real roots")
        return best

    @classmethod
    def root_in(cls, p, lo: RationalLike, hi: RationalLike) -> "AlgebraicReal":
        """The unique root of p inside [lo, hi]."""
        lo, hi = _rat(lo), _rat(hi)
        p = Poly(p, x, domain=QQ)
        for factor, _mult in p.factor_list()[1]:
            n = factor.count_roots(lo, hi)
            if n == 1:
                if factor.degree() == 1:
                    return cls.rational(-factor.nth(0) / factor.nth(1))
                return cls(_integral_primitive(factor), lo, hi)
            if n > 1:
                raise ValueError("interval does not isolate a single root")
        raise ValueError("no root in the given interval")

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def refine(self, eps: RationalLike = sympy.Rational(1, 10**12)) -> "AlgebraicReal":
        if self.is_rational:
            return self
        a, b = self.poly.refine_root(self.lo, self.hi, eps=_rat(eps))
        return AlgebraicReal(self.poly, sympy.Rational(a), sympy.Rational(b))

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.lo)
        r = self.refine(sympy.Rational(1, 10**15))
        return float((r.lo + r.hi) / 2)

    def to_mpf(self, dps: int = 50) -> mpmath.mpf:
        r = self.refine(sympy.Rational(1, 10 ** (dps + 2)))
        mid = (r.lo + r.hi) / 2
        with mpmath.workdps(dps + 5):
            return mpmath.mpf(int(mid.p)) / int(mid.q)

    def minpoly_str(self) -> str:
        return str(self.poly.as_expr())

    def __str__(self) -> str:
        return f"root of {self.minpoly_str()} in [{self.lo}, {self.hi}] (~{float(self):.12g})"


def exact_compare(a: AlgebraicReal, r: RationalLike) -> Ordering:
    """Exact sign of a - r."""
    r = _rat(r)
    if a.is_rational:
        return "LT" if a.lo < r else ("EQ" if a.lo == r else "GT")
    if r < a.lo:
        return "GT"
    if r > a.hi:
        return "LT"
    if a.poly.eval(r) == 0:
        return "EQ"
    # exactly one root in [lo, hi] and r is not it
    return "LT" if a.poly.count_roots(a.lo, r) == 1 else "GT"


def compare(a: AlgebraicReal, b: AlgebraicReal) -> Ordering:
    """Exact comparison of two real algebraic numbers."""
    if b.is_rational:
        return exact_compare(a, b.lo)
    if a.is_rational:
        flip = exact_compare(b, a.lo)
        return {"LT": "GT", "GT": "LT", "EQ": "EQ"}[flip]
    if a.poly == b.poly:
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        if lo <= hi and a.poly.count_roots(lo, hi) >= 1:
            return "EQ"
    eps = sympy.Rational(1, 2**8)
    for _ in range(400):
        if a.hi < b.lo:
            return "LT"
        if b.hi < a.lo:
            return "GT"
        a, b = a.refine(eps), b.refine(eps)
        eps /= 16
    raise ArithmeticError("comparison did not separate distinct algebraic numbers")


# -----------------------------
# Exact bound tokens
# -----------------------------
_SQRT_TOKEN = re.compile(r"^\s*(?:(\d+)\s*\+\s*)?(\d*)\s*sqrt\s*(\d+)\s*$")


def parse_bound(token: str) -> AlgebraicReal:
    """Index bounds as exact numbers: "31/5", "6", "3+sqrt5", "3+2sqrt2"."""
    token = token.strip()
    m = _SQRT_TOKEN.match(token)
    if m:
        a = int(m.group(1) or 0)
        b = int(m.group(2) or 1)
        n = int(m.group(3))
        root = math.isqrt(n)
        if root * root == n:
            return AlgebraicReal.rational(a + b * root)
        # a + b*sqrt(n) is the larger root of (x - a)^2 - b^2 n
        poly = Poly((x - a) ** 2 - b * b * n, x)
        approx = a + b * math.sqrt(n)
        return AlgebraicReal.root_in(poly, Fraction(approx - 1e-3).limit_denominator(10**6),
                                     Fraction(approx + 1e-3).limit_denominator(10**6))
    try:
        return AlgebraicReal.rational(Fraction(token))
    except (ValueError, ZeroDivisionError) as e:
        raise BoundError(f"cannot read bound token {token!r}") from e


def bound_leq(a: AlgebraicReal, bound: AlgebraicReal) -> bool:
    return compare(a, bound) != "GT"


# -----------------------------
# Number fields Q[x]/(m)
# -----------------------------
class NumberField:
    """Q[x]/(m) with m irreducible; `generator` fixes the real embedding when given."""

    def __init__(self, modulus, generator: AlgebraicReal | None = None):
        m = Poly(modulus, x, domain=QQ)
        if not m.is_irreducible:
            raise ValueError(f"defining polynomial {m.as_expr()} is not irreducible")
        self.modulus = m.monic()
        self.generator = generator

    @property
    def degree(self) -> int:
        return self.modulus.degree()

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.modulus == other.modulus

    def __hash__(self):
        return hash(tuple(self.modulus.all_coeffs()))

    def element(self, value) -> "FieldElement":
        return FieldElement(self, Poly(value, x, domain=QQ).rem(self.modulus))

    def gen(self) -> "FieldElement":
        return self.element(x)

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: NumberField
    poly: Poly

    @property
    def coordinates(self) -> tuple[Fraction, ...]:
        n = self.field.degree
        cs = [_frac(c) for c in reversed(self.poly.all_coeffs())]
        return tuple(cs + [Fraction(0)] * (n - len(cs)))[:n]

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        return self.field.element(_rat(other))

    def __add__(self, other):
        return FieldElement(self.field, (self.poly + self._coerce(other).poly).rem(self.field.modulus))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.poly)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return FieldElement(self.field, (self.poly * self._coerce(other).poly).rem(self.field.modulus))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero in a number field")
        return FieldElement(self.field, self.poly.invert(self.field.modulus))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and (self.poly - other.poly).rem(self.field.modulus).is_zero
        try:
            return (self - other).is_zero
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.coordinates)

    def _interval(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        """Horner evaluation of the coordinate polynomial over [lo, hi]."""
        acc_lo = acc_hi = Fraction(0)
        for c in reversed(self.coordinates):
            prods = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
            acc_lo, acc_hi = min(prods) + c, max(prods) + c
        return acc_lo, acc_hi

    def sign(self) -> int:
        """Sign under the real embedding fixed by the field's generator."""
        if self.is_zero:
            return 0
        g = self.field.generator
        if g is None:
            raise ValueError("field has no real embedding attached")
        if g.is_rational:
            v = self._interval(_frac(g.lo), _frac(g.lo))[0]
            return (v > 0) - (v < 0)
        eps = sympy.Rational(1, 2**10)
        for _ in range(200):
            lo, hi = self._interval(_frac(g.lo), _frac(g.hi))
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            g = g.refine(eps)
            eps /= 16
        raise ArithmeticError("sign evaluation did not terminate")

    def compare_to(self, r: RationalLike) -> Ordering:
        s = (self - _rat(r)).sign()
        return "LT" if s < 0 else ("EQ" if s == 0 else "GT")

    def __float__(self) -> float:
        g = self.field.generator
        if g is None:
            raise ValueError("field has no real embedding attached")
        t = float(g)
        return float(sum(float(c) * t**i for i, c in enumerate(self.coordinates)))

    def power(self, k: int) -> "FieldElement":
        out = self.field.one()
        for _ in range(k):
            out = out * self
        return out

    def __str__(self) -> str:
        return str(self.poly.as_expr())


def _evaluate_at(p: Poly, e: FieldElement) -> FieldElement:
    acc = e.field.zero()
    for c in p.all_coeffs():
        acc = acc * e + _rat(c)
    return acc


def multiplication_matrix(e: FieldElement) -> DomainMatrix:
    n = e.field.degree
    basis = [e.field.element(x**j) for j in range(n)]
    cols = [(e * b).coordinates for b in basis]
    rows = [[QQ(cols[j][i].numerator, cols[j][i].denominator) for j in range(n)] for i in range(n)]
    return DomainMatrix(rows, (n, n), QQ)


def minimal_polynomial_of(e: FieldElement) -> Poly:
    """Monic minimal polynomial over Q: the factor of the multiplication matrix's charpoly vanishing on e."""
    cp = multiplication_matrix(e).charpoly()
    char = Poly([QQ.to_sympy(c) for c in cp], x, domain=QQ)
    for factor, _mult in char.factor_list()[1]:
        if _evaluate_at(factor, e).is_zero:
            return factor.monic()
    raise ArithmeticError("no factor of the characteristic polynomial vanishes on the element")


def is_algebraic_integer(e: FieldElement) -> bool:
    m = minimal_polynomial_of(e)
    return all(sympy.Rational(c).q == 1 for c in m.all_coeffs())


def field_of(theta: AlgebraicReal) -> NumberField:
    return NumberField(theta.poly, generator=theta)


def polys_equal(a: Poly, b: Poly) -> bool:
    return Poly(a, x, domain=QQ).monic() == Poly(b, x, domain=QQ).monic()


__all__: Sequence[str] = (
    "AlgebraicReal",
    "BoundError",
    "FieldElement",
    "NumberField",
    "QRational",
    "bound_leq",
    "compare",
    "exact_compare",
    "field_of",
    "index_to_q",
    "is_algebraic_integer",
    "minimal_polynomial_of",
    "parse_bound",
    "q_to_index",
    "quantum_int",
)
