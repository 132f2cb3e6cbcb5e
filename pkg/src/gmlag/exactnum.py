"""Exact scalar arithmetic: rationals, odd prime fields, univariate polynomials.

Rationals are stdlib ``fractions.Fraction`` (already lowest terms, positive
denominator, arbitrary precision).  Prime-field elements, polynomials and
divisor ideals are defined here.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Fp:
    """Element of the prime field F_p.  p must be an odd prime >= 3."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _check(self, other: "Fp") -> None:
        if self.p != other.p:
            raise ValueError(f"mixed moduli {self.p} and {other.p}")

    def __add__(self, other: "Fp") -> "Fp":
        self._check(other)
        return Fp(self.v + other.v, self.p)

    def __sub__(self, other: "Fp") -> "Fp":
        self._check(other)
        return Fp(self.v - other.v, self.p)

    def __mul__(self, other: "Fp") -> "Fp":
        self._check(other)
        return Fp(self.v * other.v, self.p)

    def __truediv__(self, other: "Fp") -> "Fp":
        self._check(other)
        if other.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(other.v, -1, self.p), self.p)

    def __neg__(self) -> "Fp":
        return Fp(-self.v, self.p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Fp) and self.p == other.p and self.v == other.v

    def __hash__(self) -> int:
        return hash((self.v, self.p))

    def __bool__(self) -> bool:
        return self.v != 0

    def __repr__(self) -> str:
        return f"{self.v} (mod {self.p})"


Scalar = Union[Fraction, Fp]


class RationalField:
    """Descriptor for the rationals.  A singleton in practice (see QQ)."""

    characteristic = 0

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def rand(self, rng, bound: int = 9) -> Fraction:
        return Fraction(rng.randint(-bound, bound))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    def __repr__(self) -> str:
        return "QQ"


class PrimeField:
    """Descriptor for F_p with p an odd prime >= 3."""

    def __init__(self, p: int):
        if p < 3 or p % 2 == 0 or not _is_prime(p):
            raise ValueError(f"need an odd prime >= 3, got {p}")
        self.p = p
        self.characteristic = p

    def zero(self) -> Fp:
        return Fp(0, self.p)

    def one(self) -> Fp:
        return Fp(1, self.p)

    def from_int(self, n: int) -> Fp:
        return Fp(n, self.p)

    def rand(self, rng, bound: int = 0) -> Fp:
        return Fp(rng.randrange(self.p), self.p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self) -> int:
        return hash(("Fp", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


QQ = RationalField()

Field = Union[RationalField, PrimeField]


class UniPoly:
    """Univariate polynomial with exact coefficients, ascending order.

    Coefficients are stored with no trailing zeros; the zero polynomial has an
    empty coefficient tuple.  The parameter name is cosmetic (display only).
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[Scalar]):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, field: Field, c: Scalar) -> "UniPoly":
        return cls(field, [c])

    @classmethod
    def from_ints(cls, field: Field, ints: Sequence[int]) -> "UniPoly":
        return cls(field, [field.from_int(n) for n in ints])

    @classmethod
    def var(cls, field: Field) -> "UniPoly":
        return cls(field, [field.zero(), field.one()])

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self) -> Scalar:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant_value(self) -> Scalar:
        return self.coeffs[0] if self.coeffs else self.field.zero()

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UniPoly)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UniPoly(self.field, out)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if not self.coeffs or not other.coeffs:
            return UniPoly(self.field, [])
        zero = self.field.zero()
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return UniPoly(self.field, out)

    def scale(self, c: Scalar) -> "UniPoly":
        return UniPoly(self.field, [c * a for a in self.coeffs])

    def shift(self, k: int) -> "UniPoly":
        """Multiply by t^k."""
        if not self.coeffs:
            return self
        return UniPoly(self.field, [self.field.zero()] * k + list(self.coeffs))

    def monic(self) -> "UniPoly":
        if not self.coeffs:
            raise ValueError("cannot normalize the zero polynomial")
        lead = self.coeffs[-1]
        if lead == self.field.one():
            return self
        return self.scale(self.field.one() / lead)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        zero = self.field.zero()
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(self.field, []), self
        quot = [zero] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            top = rem[k + len(other.coeffs) - 1]
            if not top:
                continue
            f = top / lead
            quot[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - f * c
        return UniPoly(self.field, quot), UniPoly(self.field, rem)

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def eval(self, x: Scalar) -> Scalar:
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            out.append(c * self.field.from_int(i))
        return UniPoly(self.field, out)

    def __repr__(self) -> str:
        return f"UniPoly({self.format()})"

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c.v) + f" mod {c.p}" if isinstance(c, Fp) else str(c)
            if i == 0:
                parts.append(cs)
            elif i == 1:
                parts.append(f"({cs})*{var}")
            else:
                parts.append(f"({cs})*{var}^{i}")
        return " + ".join(parts)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm; gcd(0, 0) is an error."""
    if a.field != b.field:
        raise ValueError("gcd of polynomials over different fields")
    if not a and not b:
        raise ValueError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return a.monic()


def poly_ext_gcd(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """(g, x, y) with x*a + y*b = g, g the monic gcd."""
    if a.field != b.field:
        raise ValueError("gcd of polynomials over different fields")
    if not a and not b:
        raise ValueError("gcd(0, 0) is undefined")
    field = a.field
    one = UniPoly.const(field, field.one())
    zero = UniPoly(field, [])
    r0, r1 = a, b
    x0, x1 = one, zero
    y0, y1 = zero, one
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    lead = r0.leading()
    inv = field.one() / lead
    return r0.scale(inv), x0.scale(inv), y0.scale(inv)


def poly_divexact(a: UniPoly, b: UniPoly) -> UniPoly:
    """Exact quotient a/b; raises if the remainder is nonzero."""
    q, r = a.divmod(b)
    if r:
        raise ValueError("inexact polynomial division")
    return q


def residue_reduce(a: UniPoly, f: UniPoly) -> UniPoly:
    """Canonical representative of a in k[t]/(f); f must be monic, deg >= 1."""
    if f.degree() < 1:
        raise ValueError("modulus must have degree >= 1")
    if f.leading() != f.field.one():
        raise ValueError("modulus must be monic")
    return a % f


def poly_interpolate(field: Field, points: Sequence[tuple[Scalar, Scalar]]) -> UniPoly:
    """Lagrange interpolation through distinct nodes."""
    n = len(points)
    result = UniPoly(field, [])
    one = field.one()
    for i, (xi, yi) in enumerate(points):
        if not yi:
            continue
        num = UniPoly.const(field, one)
        den = one
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            num = num * UniPoly(field, [-xj, one])
            den = den * (xi - xj)
        result = result + num.scale(yi / den)
    # paranoia: exact fit
    for xi, yi in points:
        if result.eval(xi) != yi:
            raise ValueError("interpolation failed (repeated nodes?)")
    return result


def monic_square_root(g: UniPoly) -> UniPoly | None:
    """Monic h with h*h == g, or None.  Needs char != 2 (guaranteed here)."""
    d = g.degree()
    if d < 0:
        return None
    if d == 0:
        return UniPoly.const(g.field, g.field.one()) if g.coeffs[0] == g.field.one() else None
    if d % 2 == 1 or g.leading() != g.field.one():
        return None
    m = d // 2
    field = g.field
    zero, one = field.zero(), field.one()
    h = [zero] * (m + 1)
    h[m] = one
    two = field.from_int(2)
    # solve top-down: coefficient of t^(m+j) in h^2 equals g's
    for j in range(m - 1, -1, -1):
        acc = zero
        for i in range(j + 1, m):
            if m + j - i <= m:
                acc = acc + h[i] * h[m + j - i]
        target = g.coeffs[m + j] if m + j < len(g.coeffs) else zero
        h[j] = (target - acc) / two
    cand = UniPoly(field, h)
    return cand if cand * cand == g else None


def squarefree_decomposition(g: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: monic pairwise-coprime squarefree factors with exponents.

    Valid in characteristic 0 and in F_p as long as no exponent reaches p,
    which holds for the degree <= 6 inputs this package feeds it.
    """
    if not g:
        raise ValueError("squarefree decomposition of 0")
    g = g.monic()
    if g.degree() == 0:
        return []
    d = g.derivative()
    a = poly_gcd(g, d) if d else g
    out: list[tuple[UniPoly, int]] = []
    if a.degree() == 0:
        return [(g, 1)]
    b = poly_divexact(g, a)
    c = poly_divexact(d, a)
    i = 1
    while b.degree() > 0:
        step = c - b.derivative()
        f = poly_gcd(b, step) if step else b
        if f.degree() > 0:
            out.append((f.monic(), i))
            b = poly_divexact(b, f)
            c = poly_divexact(step, f)
        else:
            c = step
        i += 1
    return out


class DivisorIdeal:
    """Principal ideal of k[t] recorded by its monic generator.

    Generator 1 means the empty divisor; generator 0 is forbidden.
    """

    __slots__ = ("generator",)

    def __init__(self, generator: UniPoly):
        if not generator:
            raise ValueError("zero generator does not define a divisor")
        self.generator = generator.monic()

    @classmethod
    def unit(cls, field: Field) -> "DivisorIdeal":
        return cls(UniPoly.const(field, field.one()))

    def is_unit(self) -> bool:
        return self.generator.degree() == 0

    def degree(self) -> int:
        return self.generator.degree()

    def square(self) -> "DivisorIdeal":
        return DivisorIdeal(self.generator * self.generator)

    def square_root(self) -> "DivisorIdeal | None":
        h = monic_square_root(self.generator)
        return DivisorIdeal(h) if h is not None else None

    def __mul__(self, other: "DivisorIdeal") -> "DivisorIdeal":
        return DivisorIdeal(self.generator * other.generator)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DivisorIdeal) and self.generator == other.generator

    def __hash__(self) -> int:
        return hash(self.generator)

    def __repr__(self) -> str:
        return f"({self.generator.format()})"
