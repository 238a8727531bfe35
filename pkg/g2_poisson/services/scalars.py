"""Scalar backends for jet coefficients.

Every backend is a small field object that knows how to coerce rationals,
take rational powers when the result is representable, decide signs and
read/write its own textual coefficient format. Jet arithmetic itself uses
the Python operators of the coefficient values.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Protocol, Union

import mpmath
from sympy import Poly, QQ, integer_nthroot, symbols

from .errors import ScalarDomainError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

_T = symbols("t")
_RADICAL_TERM = re.compile(r"([+-]?)(\d+/\d+|\d+(?:\.\d+)?)?(\*?t(?:\^(\d+))?)?")


def exact_rational_root(value: Fraction, n: int) -> Optional[Fraction]:
    """Return the real n-th root of a rational if it is rational, else None."""
    value = Fraction(value)
    if n == 1:
        return value
    if value < 0:
        if n % 2 == 0:
            return None
        root = exact_rational_root(-value, n)
        return None if root is None else -root
    num, num_exact = integer_nthroot(value.numerator, n)
    den, den_exact = integer_nthroot(value.denominator, n)
    if not (num_exact and den_exact):
        return None
    return Fraction(int(num), int(den))


def rational_power(value: Fraction, alpha: Fraction) -> Optional[Fraction]:
    """value**alpha when it is rational, else None."""
    alpha = Fraction(alpha)
    if value == 0:
        return Fraction(0) if alpha > 0 else None
    base = Fraction(value) ** alpha.numerator
    return exact_rational_root(base, alpha.denominator)


class ScalarField(Protocol):
    """Protocol every scalar backend implements."""

    tag: str

    @property
    def zero(self) -> Any: ...

    @property
    def one(self) -> Any: ...

    def coerce(self, value: Any) -> Any: ...

    def power(self, value: Any, alpha: Rational) -> Any: ...

    def sign(self, value: Any) -> int: ...

    def is_zero(self, value: Any) -> bool: ...

    def parse(self, text: str) -> Any: ...

    def format(self, value: Any) -> str: ...


def _integer_power(field: Any, value: Any, exponent: int) -> Any:
    if exponent < 0:
        if field.is_zero(value):
            raise ScalarDomainError("zero has no negative powers")
        value = field.one / value
        exponent = -exponent
    result = field.one
    for _ in range(exponent):
        result = result * value
    return result


class RationalField:
    """Exact rationals backed by fractions.Fraction."""

    tag = "rational"
    exact = True

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, value: Any) -> Fraction:
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        raise ScalarDomainError(f"cannot coerce {value!r} into the rational backend")

    def power(self, value: Fraction, alpha: Rational) -> Fraction:
        alpha = Fraction(alpha)
        if alpha.denominator == 1:
            return _integer_power(self, value, alpha.numerator)
        result = rational_power(value, alpha)
        if result is None:
            raise ScalarDomainError(
                f"{value}^({alpha}) is not rational; "
                "use a radical:d:r or bigfloat:bits backend",
                witness=str(value),
            )
        return result

    def sign(self, value: Fraction) -> int:
        return (value > 0) - (value < 0)

    def is_zero(self, value: Fraction) -> bool:
        return value == 0

    def parse(self, text: str) -> Fraction:
        return Fraction(text.strip())

    def format(self, value: Fraction) -> str:
        return str(value)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("rational")

    def __repr__(self) -> str:
        return "RationalField()"


class RadicalNumber:
    """Element a0 + a1 t + ... + a(d-1) t^(d-1) of Q[t]/(t^d - r)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "RadicalField", coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs

    def _other(self, other: Any) -> "RadicalNumber":
        if isinstance(other, RadicalNumber):
            if other.field != self.field:
                raise ScalarDomainError("radical numbers from different rings")
            return other
        return self.field.coerce(other)

    def __add__(self, other: Any) -> "RadicalNumber":
        other = self._other(other)
        return RadicalNumber(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "RadicalNumber":
        return RadicalNumber(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other: Any) -> "RadicalNumber":
        return self + (-self._other(other))

    def __rsub__(self, other: Any) -> "RadicalNumber":
        return self._other(other) - self

    def __mul__(self, other: Any) -> "RadicalNumber":
        other = self._other(other)
        d, r = self.field.degree, self.field.radicand
        out = [Fraction(0)] * d
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                k = i + j
                if k >= d:
                    out[k - d] += a * b * r
                else:
                    out[k] += a * b
        return RadicalNumber(self.field, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "RadicalNumber":
        if not any(self.coeffs):
            raise ZeroDivisionError("inverse of zero in radical ring")
        poly = Poly(list(reversed(self.coeffs)), _T, domain=QQ)
        inverse = poly.invert(self.field.modulus)
        return self.field.from_poly(inverse)

    def __truediv__(self, other: Any) -> "RadicalNumber":
        return self * self._other(other).inverse()

    def __rtruediv__(self, other: Any) -> "RadicalNumber":
        return self._other(other) * self.inverse()

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if isinstance(other, RadicalNumber):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return self.field.format(self)


class RadicalField:
    """Exact arithmetic in Q[t]/(t^d - r) with t the positive real root of r."""

    exact = True

    def __init__(self, degree: int, radicand: Rational):
        radicand = Fraction(radicand)
        if not 2 <= degree <= 9:
            raise ScalarDomainError(f"radical degree must lie in 2..9, got {degree}")
        if radicand <= 0:
            raise ScalarDomainError(f"radicand must be a positive rational, got {radicand}")
        modulus = Poly(_T**degree - radicand, _T, domain=QQ)
        if not modulus.is_irreducible:
            raise ScalarDomainError(
                f"t^{degree} - {radicand} is reducible over the rationals; "
                "pick a radicand that is not a perfect power"
            )
        self.degree = degree
        self.radicand = radicand
        self.modulus = modulus
        self.tag = f"radical:{degree}:{radicand}"

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, RadicalField) and (self.degree, self.radicand) == (
            other.degree,
            other.radicand,
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.radicand))

    def __repr__(self) -> str:
        return f"RadicalField({self.degree}, {self.radicand})"

    @property
    def zero(self) -> RadicalNumber:
        return RadicalNumber(self, (Fraction(0),) * self.degree)

    @property
    def one(self) -> RadicalNumber:
        return self.coerce(1)

    @property
    def generator(self) -> RadicalNumber:
        return self.monomial(Fraction(1), 1)

    def monomial(self, coeff: Rational, power: int) -> RadicalNumber:
        coeffs = [Fraction(0)] * self.degree
        coeffs[power] = Fraction(coeff)
        return RadicalNumber(self, tuple(coeffs))

    def coerce(self, value: Any) -> RadicalNumber:
        if isinstance(value, RadicalNumber):
            if value.field != self:
                raise ScalarDomainError("radical number from a different ring")
            return value
        if isinstance(value, (int, Fraction)):
            return self.monomial(value, 0)
        raise ScalarDomainError(f"cannot coerce {value!r} into {self.tag}")

    def from_poly(self, poly: Poly) -> RadicalNumber:
        coeffs = [Fraction(0)] * self.degree
        for (power,), coeff in poly.terms():
            value = QQ.to_sympy(coeff)
            coeffs[power] = Fraction(int(value.p), int(value.q))
        return RadicalNumber(self, tuple(coeffs))

    def power(self, value: RadicalNumber, alpha: Rational) -> RadicalNumber:
        value = self.coerce(value)
        alpha = Fraction(alpha)
        if alpha.denominator == 1:
            return _integer_power(self, value, alpha.numerator)
        support = [i for i, c in enumerate(value.coeffs) if c != 0]
        if len(support) != 1:
            raise ScalarDomainError(
                f"fractional power of a non-monomial radical number {value!r}",
                witness=repr(value),
            )
        j = support[0]
        c = value.coeffs[j]
        if c < 0:
            raise ScalarDomainError(f"fractional power of a negative number {value!r}")
        # value = (c^d r^j)^(1/d), so value^alpha = u^beta with beta = alpha/d
        base = c**self.degree * self.radicand**j
        beta = alpha / self.degree
        for m in range(self.degree):
            target = base ** (beta.numerator * self.degree) * self.radicand ** (-m * beta.denominator)
            v = exact_rational_root(target, beta.denominator * self.degree)
            if v is not None and v > 0:
                return self.monomial(v, m)
        raise ScalarDomainError(
            f"({value!r})^({alpha}) is not representable in {self.tag}",
            witness=repr(value),
        )

    def to_mpf(self, value: RadicalNumber, ctx: Any = mpmath.mp) -> Any:
        root = ctx.root(ctx.mpf(self.radicand.numerator) / self.radicand.denominator, self.degree)
        total = ctx.mpf(0)
        for i, c in enumerate(value.coeffs):
            total += ctx.mpf(c.numerator) / c.denominator * root**i
        return total

    def sign(self, value: RadicalNumber) -> int:
        if self.is_zero(value):
            return 0
        ctx = mpmath.MPContext()
        for bits in (128, 512, 2048):
            ctx.prec = bits
            approx = self.to_mpf(value, ctx)
            if abs(approx) > ctx.mpf(2) ** (-bits // 2):
                return 1 if approx > 0 else -1
        raise ScalarDomainError(f"could not resolve the sign of {value!r}")

    def is_zero(self, value: RadicalNumber) -> bool:
        return not any(value.coeffs)

    def parse(self, text: str) -> RadicalNumber:
        """Read sums of c, c*t and c*t^k terms; either sign may join them."""
        compact = text.replace(" ", "").replace("+-", "-").replace("-+", "-").replace("--", "+")
        if not compact:
            raise ScalarDomainError(f"empty number for {self.tag}")
        coeffs = [Fraction(0)] * self.degree
        pos = 0
        while pos < len(compact):
            match = _RADICAL_TERM.match(compact, pos)
            sign, head, radical, power = match.groups()
            if match.end() == pos or (head is None and radical is None) or (pos > 0 and not sign):
                raise ScalarDomainError(f"cannot read {text!r} as a number in {self.tag}")
            index = 0 if radical is None else int(power) if power else 1
            if not 0 <= index < self.degree:
                raise ScalarDomainError(f"power t^{index} outside {self.tag}")
            value = Fraction(head) if head else Fraction(1)
            coeffs[index] += -value if sign == "-" else value
            pos = match.end()
        return RadicalNumber(self, tuple(coeffs))

    def format(self, value: RadicalNumber) -> str:
        parts = []
        for i, c in enumerate(value.coeffs):
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{i}")
        return "+".join(parts)


class BigFloatField:
    """Big-float scalars with a fixed precision per computation (mpmath)."""

    exact = False

    def __init__(self, bits: int = 256):
        if bits < 53:
            raise ScalarDomainError(f"big-float precision must be at least 53 bits, got {bits}")
        self.bits = bits
        self.ctx = mpmath.MPContext()
        self.ctx.prec = bits
        # values this small are rounding noise and count as zero
        self.threshold = self.ctx.ldexp(1, -(bits // 2))
        self.tag = f"bigfloat:{bits}"

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, BigFloatField) and other.bits == self.bits

    def __hash__(self) -> int:
        return hash(("bigfloat", self.bits))

    def __repr__(self) -> str:
        return f"BigFloatField({self.bits})"

    @property
    def zero(self) -> Any:
        return self.ctx.mpf(0)

    @property
    def one(self) -> Any:
        return self.ctx.mpf(1)

    def coerce(self, value: Any) -> Any:
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, int):
            return self.ctx.mpf(value)
        if isinstance(value, self.ctx.mpf):
            return value
        if isinstance(value, RadicalNumber):
            return value.field.to_mpf(value, self.ctx)
        raise ScalarDomainError(f"cannot coerce {value!r} into {self.tag}")

    def power(self, value: Any, alpha: Rational) -> Any:
        alpha = Fraction(alpha)
        if alpha.denominator == 1:
            return _integer_power(self, value, alpha.numerator)
        if value <= 0:
            raise ScalarDomainError(f"fractional power of non-positive {value}")
        return self.ctx.power(value, self.coerce(alpha))

    def sign(self, value: Any) -> int:
        if self.is_zero(value):
            return 0
        return int(self.ctx.sign(value))

    def is_zero(self, value: Any) -> bool:
        return abs(value) <= self.threshold

    def parse(self, text: str) -> Any:
        return self.ctx.mpf(text.strip())

    def format(self, value: Any) -> str:
        return self.ctx.nstr(value, self.ctx.dps, min_fixed=-self.ctx.dps, max_fixed=self.ctx.dps)


@dataclass(frozen=True, slots=True)
class DualNumber:
    """re + eps * ε with ε^2 = 0, over any base backend."""

    re: Any
    eps: Any

    def _other(self, other: Any) -> "DualNumber":
        if isinstance(other, DualNumber):
            return other
        return DualNumber(other, other * 0)

    def __add__(self, other: Any) -> "DualNumber":
        other = self._other(other)
        return DualNumber(self.re + other.re, self.eps + other.eps)

    __radd__ = __add__

    def __neg__(self) -> "DualNumber":
        return DualNumber(-self.re, -self.eps)

    def __sub__(self, other: Any) -> "DualNumber":
        other = self._other(other)
        return DualNumber(self.re - other.re, self.eps - other.eps)

    def __rsub__(self, other: Any) -> "DualNumber":
        return self._other(other) - self

    def __mul__(self, other: Any) -> "DualNumber":
        other = self._other(other)
        return DualNumber(self.re * other.re, self.re * other.eps + self.eps * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "DualNumber":
        other = self._other(other)
        if other.re == 0:
            raise ZeroDivisionError("dual division by a number with zero real part")
        re = self.re / other.re
        return DualNumber(re, (self.eps * other.re - self.re * other.eps) / (other.re * other.re))

    def __rtruediv__(self, other: Any) -> "DualNumber":
        return self._other(other) / self

    def __repr__(self) -> str:
        return f"{self.re} + {self.eps}ε"


class DualField:
    """Dual numbers over a base backend, for exact directional derivatives."""

    def __init__(self, base: Any):
        if isinstance(base, DualField):
            raise ScalarDomainError("nested dual fields are not supported")
        self.base = base
        self.exact = base.exact
        self.tag = f"dual({base.tag})"

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, DualField) and other.base == self.base

    def __hash__(self) -> int:
        return hash(("dual", self.base))

    def __repr__(self) -> str:
        return f"DualField({self.base!r})"

    @property
    def zero(self) -> DualNumber:
        return DualNumber(self.base.zero, self.base.zero)

    @property
    def one(self) -> DualNumber:
        return DualNumber(self.base.one, self.base.zero)

    @property
    def epsilon(self) -> DualNumber:
        return DualNumber(self.base.zero, self.base.one)

    def coerce(self, value: Any) -> DualNumber:
        if isinstance(value, DualNumber):
            return value
        return DualNumber(self.base.coerce(value), self.base.zero)

    def power(self, value: DualNumber, alpha: Rational) -> DualNumber:
        value = self.coerce(value)
        alpha = Fraction(alpha)
        if alpha.denominator == 1:
            return _integer_power(self, value, alpha.numerator)
        head = self.base.power(value.re, alpha)
        return DualNumber(head, self.base.coerce(alpha) * head / value.re * value.eps)

    def lift(self, value: Any) -> DualNumber:
        return self.coerce(value)

    def real_part(self, value: DualNumber) -> Any:
        return self.coerce(value).re

    def eps_part(self, value: DualNumber) -> Any:
        return self.coerce(value).eps

    def sign(self, value: DualNumber) -> int:
        return self.base.sign(value.re)

    def is_zero(self, value: DualNumber) -> bool:
        return self.base.is_zero(value.re) and self.base.is_zero(value.eps)

    def parse(self, text: str) -> DualNumber:
        raise ScalarDomainError("dual numbers have no file representation")

    def format(self, value: DualNumber) -> str:
        return f"{self.base.format(value.re)}+({self.base.format(value.eps)})e"


@lru_cache(maxsize=64)
def field_from_tag(tag: str) -> Any:
    """Build (and cache) the backend named by 'rational', 'radical:d:r' or 'bigfloat:bits'."""
    tag = tag.strip()
    if tag == "rational":
        return RationalField()
    if tag.startswith("radical:"):
        try:
            _, degree, radicand = tag.split(":")
            return RadicalField(int(degree), Fraction(radicand))
        except ValueError as e:
            raise ScalarDomainError(f"malformed radical backend tag {tag!r}: {e}")
    if tag.startswith("bigfloat"):
        _, _, bits = tag.partition(":")
        return BigFloatField(int(bits) if bits else 256)
    raise ScalarDomainError(f"unknown scalar backend {tag!r}")


RATIONAL = field_from_tag("rational")
