"""Truncated multivariate power series (jets) in x1..x7 at the origin."""

import logging
import random
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .errors import InsufficientOrderError, OrderMismatchError, ScalarDomainError
from .scalars import DualField, Rational

logger = logging.getLogger(__name__)

DIM = 7

Exponent = tuple[int, int, int, int, int, int, int]

ZERO_EXPONENT: Exponent = (0,) * DIM


def unit_exponent(axis: int, power: int = 1) -> Exponent:
    """Exponent of x_axis**power with axis counted from 1."""
    exps = [0] * DIM
    exps[axis - 1] = power
    return tuple(exps)


def _add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4], a[5] + b[5], a[6] + b[6])


def unify_fields(left: Any, right: Any) -> Any:
    """The field both operands can be promoted into (a base field promotes to its dual)."""
    if left == right:
        return left
    if isinstance(left, DualField) and left.base == right:
        return left
    if isinstance(right, DualField) and right.base == left:
        return right
    raise ScalarDomainError(f"incompatible scalar backends {left.tag} and {right.tag}")


class Jet:
    """Sparse truncated power series with nominal order and effective order.

    `terms` maps exponents of total degree <= order to nonzero coefficients.
    `effective` is the highest total degree that is still trustworthy; it drops
    below `order` under differentiation and never exceeds it.
    Jets are treated as immutable values.
    """

    __slots__ = ("field", "order", "terms", "effective")

    def __init__(
        self,
        field: Any,
        order: int,
        terms: Optional[dict[Exponent, Any]] = None,
        effective: Optional[int] = None,
    ):
        if order < 0:
            raise OrderMismatchError(f"truncation order must be non-negative, got {order}")
        self.field = field
        self.order = order
        self.effective = order if effective is None else max(-1, min(effective, order))
        clean: dict[Exponent, Any] = {}
        if terms:
            is_zero = field.is_zero
            for exps, coeff in terms.items():
                if sum(exps) <= order and not is_zero(coeff):
                    clean[exps] = coeff
        self.terms = clean

    # construction

    @classmethod
    def zero(cls, field: Any, order: int) -> "Jet":
        return cls(field, order)

    @classmethod
    def constant(cls, field: Any, order: int, value: Any) -> "Jet":
        return cls(field, order, {ZERO_EXPONENT: field.coerce(value)})

    @classmethod
    def variable(cls, field: Any, order: int, axis: int) -> "Jet":
        return cls(field, order, {unit_exponent(axis): field.one})

    @classmethod
    def monomial(cls, field: Any, order: int, exps: Sequence[int], coeff: Any = 1) -> "Jet":
        return cls(field, order, {tuple(exps): field.coerce(coeff)})

    @classmethod
    def from_terms(cls, field: Any, order: int, terms: Iterable[tuple[Sequence[int], Any]]) -> "Jet":
        acc: dict[Exponent, Any] = {}
        for exps, coeff in terms:
            key = tuple(exps)
            acc[key] = acc.get(key, field.zero) + field.coerce(coeff)
        return cls(field, order, acc)

    # inspection

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Exponent, Any]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        if not isinstance(other, Jet):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if not self.terms:
            return f"Jet(0; order={self.order}, eff={self.effective})"
        shown = []
        for exps, coeff in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
            )
            shown.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        return f"Jet({' + '.join(shown)}; order={self.order}, eff={self.effective})"

    def coefficient(self, exps: Sequence[int]) -> Any:
        return self.terms.get(tuple(exps), self.field.zero)

    def eval0(self) -> Any:
        """Constant term."""
        return self.terms.get(ZERO_EXPONENT, self.field.zero)

    def valuation(self) -> int:
        """Smallest total degree with a nonzero term; order + 1 for the zero jet."""
        if not self.terms:
            return self.order + 1
        return min(sum(exps) for exps in self.terms)

    def known_valuation(self) -> int:
        """Valuation bounded by what is trustworthy: zero data up to `effective` only says O(x^(eff+1))."""
        return min(self.valuation(), self.effective + 1)

    def homogeneous_part(self, degree: int) -> "Jet":
        return Jet(
            self.field,
            self.order,
            {e: c for e, c in self.terms.items() if sum(e) == degree},
            self.effective,
        )

    def max_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    # ring structure

    def _align(self, other: "Jet") -> tuple["Jet", "Jet"]:
        if self.order != other.order:
            raise OrderMismatchError(
                f"jet truncation orders differ: {self.order} vs {other.order}"
            )
        field = unify_fields(self.field, other.field)
        return self.promote(field), other.promote(field)

    def promote(self, field: Any) -> "Jet":
        if field == self.field:
            return self
        return Jet(field, self.order, {e: field.coerce(c) for e, c in self.terms.items()}, self.effective)

    def __add__(self, other: Any) -> "Jet":
        if not isinstance(other, Jet):
            other = Jet.constant(self.field, self.order, other)
        a, b = self._align(other)
        out = dict(a.terms)
        zero = a.field.zero
        for e, c in b.terms.items():
            out[e] = out.get(e, zero) + c
        return Jet(a.field, a.order, out, min(a.effective, b.effective))

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(self.field, self.order, {e: -c for e, c in self.terms.items()}, self.effective)

    def __sub__(self, other: Any) -> "Jet":
        if not isinstance(other, Jet):
            other = Jet.constant(self.field, self.order, other)
        return self + (-other)

    def __rsub__(self, other: Any) -> "Jet":
        return (-self) + other

    def scale(self, value: Any) -> "Jet":
        """Multiply by a scalar (jet_scale)."""
        if isinstance(value, Jet):
            return self * value
        if isinstance(self.field, DualField) or not _is_dual_value(value):
            c = self.field.coerce(value)
            return Jet(self.field, self.order, {e: c * v for e, v in self.terms.items()}, self.effective)
        field = DualField(self.field)
        return self.promote(field).scale(value)

    def __mul__(self, other: Any) -> "Jet":
        if not isinstance(other, Jet):
            return self.scale(other)
        a, b = self._align(other)
        order = a.order
        if not a.terms or not b.terms:
            product: dict[Exponent, Any] = {}
        else:
            product = {}
            zero = a.field.zero
            by_degree = sorted(((sum(e), e, c) for e, c in b.terms.items()), key=lambda t: t[0])
            for ea, ca in a.terms.items():
                room = order - sum(ea)
                if room < 0:
                    continue
                for deg, eb, cb in by_degree:
                    if deg > room:
                        break
                    key = _add_exponents(ea, eb)
                    product[key] = product.get(key, zero) + ca * cb
        effective = min(a.effective + b.known_valuation(), b.effective + a.known_valuation())
        return Jet(a.field, order, product, effective)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Jet":
        if exponent < 0:
            return self.unit_power(exponent)
        result = Jet.constant(self.field, self.order, 1)
        for _ in range(exponent):
            result = result * self
        return result

    # calculus

    def partial(self, axis: int) -> "Jet":
        """Formal derivative in x_axis; trustworthy to one degree less."""
        i = axis - 1
        out: dict[Exponent, Any] = {}
        for e, c in self.terms.items():
            p = e[i]
            if p:
                key = e[:i] + (p - 1,) + e[i + 1:]
                out[key] = c * p
        return Jet(self.field, self.order, out, self.effective - 1)

    def unit_power(self, alpha: Rational) -> "Jet":
        """a**alpha through the binomial series around the constant term."""
        alpha = Fraction(alpha)
        head = self.eval0()
        if self.field.is_zero(head):
            raise ScalarDomainError("jet power needs a unit constant term", witness=repr(self))
        leading = self.field.power(head, alpha)
        inv_head = self.field.one / head
        w = Jet(
            self.field,
            self.order,
            {e: c * inv_head for e, c in self.terms.items() if e != ZERO_EXPONENT},
            self.effective,
        )
        result = Jet.constant(self.field, self.order, 1)
        term = Jet.constant(self.field, self.order, 1)
        binom = Fraction(1)
        for n in range(1, self.order + 1):
            binom = binom * (alpha - n + 1) / n
            if binom == 0:
                break
            term = term * w
            if not term.terms:
                break
            result = result + term.scale(binom)
        result = result.scale(leading)
        return Jet(result.field, result.order, result.terms, min(result.effective, self.effective))

    def inverse(self) -> "Jet":
        return self.unit_power(-1)

    # projections and substitutions

    def truncate(self, n: int) -> "Jet":
        """Taylor polynomial through degree n, kept at the same nominal order."""
        if n > self.order:
            raise OrderMismatchError(f"cannot truncate order-{self.order} jet at {n}")
        terms = {e: c for e, c in self.terms.items() if sum(e) <= n}
        effective = self.order if n <= self.effective else self.effective
        return Jet(self.field, self.order, terms, effective)

    def drop_through(self, n: int) -> "Jet":
        """Remove every term of total degree <= n."""
        return Jet(
            self.field,
            self.order,
            {e: c for e, c in self.terms.items() if sum(e) > n},
            self.effective,
        )

    def extend(self, order: int) -> "Jet":
        """Store at a higher nominal order without claiming new information."""
        if order < self.order:
            raise OrderMismatchError(f"cannot extend order-{self.order} jet down to {order}")
        return Jet(self.field, order, self.terms, self.effective)

    def exact_extend(self, order: int) -> "Jet":
        """Store an exact polynomial at a higher order; its new terms are genuinely zero."""
        if self.effective < self.order:
            raise InsufficientOrderError("only jets known to their full order are exact polynomials")
        return Jet(self.field, order, self.terms, order)

    def restrict(self, order: int) -> "Jet":
        """Store at a lower nominal order."""
        return Jet(self.field, order, self.terms, min(self.effective, order))

    def with_effective(self, effective: int) -> "Jet":
        return Jet(self.field, self.order, self.terms, effective)

    def dilate(self, s: Any) -> "Jet":
        """Substitute x_i -> x_i / s."""
        s = self.field.coerce(s)
        if self.field.is_zero(s):
            raise ScalarDomainError("dilation by zero")
        inv = self.field.one / s
        powers = [self.field.one]
        for _ in range(self.order):
            powers.append(powers[-1] * inv)
        return Jet(
            self.field,
            self.order,
            {e: c * powers[sum(e)] for e, c in self.terms.items()},
            self.effective,
        )

    def linear_substitution(self, mu: Any) -> "Jet":
        """Substitute x_i -> mu * x_i."""
        return self.dilate(self.field.one / self.field.coerce(mu))

    def map_coefficients(self, fn: Callable[[Any], Any], field: Any) -> "Jet":
        return Jet(field, self.order, {e: fn(c) for e, c in self.terms.items()}, self.effective)

    # comparisons to effective order

    def require_effective(self, n: int, what: str = "jet") -> None:
        if n > self.effective:
            raise InsufficientOrderError(
                f"{what} is only known to order {self.effective}, identity demanded at {n}; "
                "rerun with a larger --order",
                witness=repr(self),
            )

    def vanishes_through(self, n: int) -> bool:
        self.require_effective(n)
        return all(sum(e) > n for e in self.terms)

    def equal_to_order(self, other: "Jet", n: Optional[int] = None) -> bool:
        diff = self - other
        if n is None:
            n = diff.effective
        return diff.vanishes_through(n)


def _is_dual_value(value: Any) -> bool:
    from .scalars import DualNumber

    return isinstance(value, DualNumber)


# Named operations


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_scale(c: Any, a: Jet) -> Jet:
    return a.scale(c)


def jet_partial(a: Jet, axis: int) -> Jet:
    return a.partial(axis)


def jet_unit_power(a: Jet, alpha: Rational) -> Jet:
    return a.unit_power(alpha)


def jet_eval0(a: Jet) -> Any:
    return a.eval0()


def jet_truncate(a: Jet, n: int) -> Jet:
    return a.truncate(n)


def jet_valuation(a: Jet) -> int:
    return a.valuation()


# Matrices of jets

JetMatrix = list[list[Jet]]


def identity_matrix(field: Any, order: int, size: int = DIM, scale: Any = 1) -> JetMatrix:
    return [
        [Jet.constant(field, order, scale) if i == j else Jet.zero(field, order) for j in range(size)]
        for i in range(size)
    ]


def matrix_at_origin(matrix: JetMatrix) -> list[list[Any]]:
    return [[entry.eval0() for entry in row] for row in matrix]


def _eliminate(matrix: JetMatrix, rhs: Optional[JetMatrix]) -> tuple[Jet, Optional[JetMatrix]]:
    """Gauss-Jordan on jets, pivoting on entries with a unit constant term."""
    n = len(matrix)
    a = [list(row) for row in matrix]
    b = [list(row) for row in rhs] if rhs is not None else None
    field = a[0][0].field
    order = a[0][0].order
    det = Jet.constant(field, order, 1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if not field.is_zero(a[r][col].eval0())), None)
        if pivot_row is None:
            raise ScalarDomainError("jet matrix is singular at the origin")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            if b is not None:
                b[col], b[pivot_row] = b[pivot_row], b[col]
            det = -det
        pivot = a[col][col]
        det = det * pivot
        inv = pivot.inverse()
        a[col] = [entry * inv for entry in a[col]]
        if b is not None:
            b[col] = [entry * inv for entry in b[col]]
        for r in range(n):
            if r == col or not a[r][col]:
                continue
            factor = a[r][col]
            a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
            if b is not None:
                b[r] = [x - factor * y for x, y in zip(b[r], b[col])]
    return det, b


def jet_det(matrix: JetMatrix) -> Jet:
    det, _ = _eliminate(matrix, None)
    return det


def jet_inverse(matrix: JetMatrix) -> JetMatrix:
    n = len(matrix)
    field, order = matrix[0][0].field, matrix[0][0].order
    _, inverse = _eliminate(matrix, identity_matrix(field, order, n))
    return inverse


def matmul(a: JetMatrix, b: JetMatrix) -> JetMatrix:
    n, m, p = len(a), len(b), len(b[0])
    field, order = a[0][0].field, a[0][0].order
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = Jet.zero(field, order)
            for k in range(m):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


# Random generation for property suites


def random_scalar(rng: random.Random, field: Any, max_abs: int = 5) -> Any:
    num = rng.randint(-max_abs, max_abs)
    den = rng.randint(1, max_abs)
    return field.coerce(Fraction(num, den))


def random_jet(
    rng: random.Random,
    field: Any,
    order: int,
    n_terms: int = 6,
    min_degree: int = 0,
    max_degree: Optional[int] = None,
    max_abs: int = 5,
) -> Jet:
    """A sparse random jet with rational coefficients."""
    top = order if max_degree is None else min(order, max_degree)
    terms: dict[Exponent, Any] = {}
    if top < min_degree:
        return Jet.zero(field, order)
    for _ in range(n_terms):
        degree = rng.randint(min_degree, top)
        exps = [0] * DIM
        for _ in range(degree):
            exps[rng.randrange(DIM)] += 1
        terms[tuple(exps)] = random_scalar(rng, field, max_abs)
    return Jet(field, order, terms)


def random_unit_jet(rng: random.Random, field: Any, order: int, n_terms: int = 5) -> Jet:
    """Random jet with constant term 1."""
    tail = random_jet(rng, field, order, n_terms=n_terms, min_degree=1)
    return tail + Jet.constant(field, order, 1)
