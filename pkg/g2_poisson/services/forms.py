"""Differential forms on R^7 with jet coefficients."""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .errors import FormDegreeError, InsufficientOrderError, OrderMismatchError
from .jets import DIM, Exponent, Jet, random_jet, unify_fields

logger = logging.getLogger(__name__)

MultiIndex = tuple[int, ...]

TOP_INDEX: MultiIndex = tuple(range(1, DIM + 1))


def canonical_index(indices: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sort an index tuple, returning the permutation sign (0 on repeats)."""
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


def complement(indices: MultiIndex) -> MultiIndex:
    return tuple(i for i in TOP_INDEX if i not in indices)


def complement_sign(indices: MultiIndex) -> int:
    """Sign of e^I ^ e^(complement of I) against e^1234567."""
    sign, _ = canonical_index(indices + complement(indices))
    return sign


def all_indices(degree: int) -> list[MultiIndex]:
    return list(combinations(TOP_INDEX, degree))


class Projection(str, Enum):
    """Which part of a Taylor split to return."""

    KEEP_LOW_JETS = "keep-low-jets"
    KILL_LOW_JETS = "kill-low-jets"


class Form:
    """Degree-m form with jet coefficients on strictly increasing multi-indices.

    Degree-0 forms wrap a single jet under the empty multi-index.
    `effective` is the form-level effective order, at most the effective
    order of every stored component.
    """

    __slots__ = ("field", "degree", "order", "terms", "effective")

    def __init__(
        self,
        field: Any,
        degree: int,
        order: int,
        terms: Optional[dict[MultiIndex, Jet]] = None,
        effective: Optional[int] = None,
    ):
        if not 0 <= degree <= DIM:
            raise FormDegreeError(f"form degree must lie in 0..7, got {degree}")
        self.field = field
        self.degree = degree
        self.order = order
        clean: dict[MultiIndex, Jet] = {}
        eff = order if effective is None else effective
        for index, jet in (terms or {}).items():
            if len(index) != degree:
                raise FormDegreeError(f"index {index} does not fit a {degree}-form")
            if jet.order != order:
                raise OrderMismatchError(f"component order {jet.order} differs from form order {order}")
            eff = min(eff, jet.effective)
            if jet.terms:
                clean[index] = jet
        self.terms = clean
        self.effective = max(-1, min(eff, order))

    # construction

    @classmethod
    def zero(cls, field: Any, degree: int, order: int, effective: Optional[int] = None) -> "Form":
        return cls(field, degree, order, {}, effective)

    @classmethod
    def basis(cls, field: Any, order: int, indices: Sequence[int], coeff: Any = 1) -> "Form":
        """coeff * e^{indices}, canonicalized."""
        sign, index = canonical_index(indices)
        if sign == 0:
            return cls.zero(field, len(indices), order)
        return cls(field, len(indices), order, {index: Jet.constant(field, order, coeff).scale(sign)})

    @classmethod
    def function(cls, jet: Jet) -> "Form":
        return cls(jet.field, 0, jet.order, {(): jet}, jet.effective)

    @classmethod
    def from_components(
        cls, field: Any, degree: int, order: int, components: Iterable[tuple[Sequence[int], Jet]]
    ) -> "Form":
        """Sum of jet * e^I over possibly unsorted index tuples."""
        acc: dict[MultiIndex, Jet] = {}
        for indices, jet in components:
            sign, index = canonical_index(indices)
            if sign == 0:
                continue
            term = jet if sign > 0 else -jet
            acc[index] = acc[index] + term if index in acc else term
        return cls(field, degree, order, acc)

    # inspection

    def __iter__(self) -> Iterator[tuple[MultiIndex, Jet]]:
        return iter(self.terms.items())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Form):
            return NotImplemented
        return (self.degree, self.order, self.terms) == (other.degree, other.order, other.terms)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        parts = [f"{jet!r}*e^{''.join(map(str, index))}" for index, jet in sorted(self.terms.items())]
        return f"Form[{self.degree}]({' + '.join(parts) or '0'}; order={self.order}, eff={self.effective})"

    def component(self, indices: Sequence[int]) -> Jet:
        sign, index = canonical_index(indices)
        jet = self.terms.get(index)
        if sign == 0 or jet is None:
            return Jet.zero(self.field, self.order)
        return jet if sign > 0 else -jet

    def at_origin(self) -> dict[MultiIndex, Any]:
        values = {}
        for index, jet in self.terms.items():
            value = jet.eval0()
            if not self.field.is_zero(value):
                values[index] = value
        return values

    def valuation(self) -> int:
        return min((jet.valuation() for jet in self.terms.values()), default=self.order + 1)

    def known_valuation(self) -> int:
        return min(self.valuation(), self.effective + 1)

    # linear structure

    def _align(self, other: "Form") -> tuple["Form", "Form"]:
        if self.degree != other.degree:
            raise FormDegreeError(f"cannot add a {self.degree}-form and a {other.degree}-form")
        if self.order != other.order:
            raise OrderMismatchError(f"form orders differ: {self.order} vs {other.order}")
        field = unify_fields(self.field, other.field)
        return self.promote(field), other.promote(field)

    def promote(self, field: Any) -> "Form":
        if field == self.field:
            return self
        return Form(field, self.degree, self.order, {i: j.promote(field) for i, j in self.terms.items()}, self.effective)

    def __add__(self, other: "Form") -> "Form":
        a, b = self._align(other)
        out = dict(a.terms)
        for index, jet in b.terms.items():
            out[index] = out[index] + jet if index in out else jet
        return Form(a.field, a.degree, a.order, out, min(a.effective, b.effective))

    def __neg__(self) -> "Form":
        return Form(self.field, self.degree, self.order, {i: -j for i, j in self.terms.items()}, self.effective)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, value: Any) -> "Form":
        """Multiply by a scalar or by a jet (a function)."""
        if isinstance(value, Jet):
            if value.order != self.order:
                raise OrderMismatchError("function and form orders differ")
            terms = {i: j * value for i, j in self.terms.items()}
            effective = min(self.effective + value.known_valuation(), value.effective + self.known_valuation())
            field = unify_fields(self.field, value.field)
            return Form(field, self.degree, self.order, terms, effective)
        terms = {i: j.scale(value) for i, j in self.terms.items()}
        field = next(iter(terms.values())).field if terms else self.field
        return Form(field, self.degree, self.order, terms, self.effective)

    def map_jets(self, fn: Callable[[Jet], Jet], field: Optional[Any] = None, effective: Optional[int] = None) -> "Form":
        terms = {i: fn(j) for i, j in self.terms.items()}
        return Form(field or self.field, self.degree, self.order, terms, self.effective if effective is None else effective)

    def truncate_jets(self, n: int) -> "Form":
        return self.map_jets(lambda j: j.truncate(n), effective=self.order if n <= self.effective else self.effective)

    def extend(self, order: int) -> "Form":
        return Form(
            self.field, self.degree, order, {i: j.extend(order) for i, j in self.terms.items()}, self.effective
        )

    def exact_extend(self, order: int) -> "Form":
        if self.effective < self.order:
            raise InsufficientOrderError("only forms known to their full order are exact polynomials")
        return Form(self.field, self.degree, order, {i: j.exact_extend(order) for i, j in self.terms.items()}, order)

    def restrict(self, order: int) -> "Form":
        return Form(
            self.field,
            self.degree,
            order,
            {i: j.restrict(order) for i, j in self.terms.items()},
            min(self.effective, order),
        )

    # comparisons to effective order

    def require_effective(self, n: int, what: str = "form") -> None:
        if n > self.effective:
            raise InsufficientOrderError(
                f"{what} is only known to order {self.effective}, identity demanded at {n}; "
                "rerun with a larger --order",
            )

    def vanishes_through(self, n: Optional[int] = None) -> bool:
        n = self.effective if n is None else n
        self.require_effective(n)
        return all(jet.valuation() > n for jet in self.terms.values())

    def equal_to_order(self, other: "Form", n: Optional[int] = None) -> bool:
        return (self - other).vanishes_through(n)

    def is_closed(self) -> bool:
        if self.degree == DIM:
            return True
        return exterior_derivative(self).vanishes_through()

    # exterior algebra

    def wedge(self, other: "Form") -> "Form":
        return wedge(self, other)

    def d(self) -> "Form":
        return exterior_derivative(self)

    def dilate(self, s: Any) -> "Form":
        return dilate(self, s)

    def linear_substitution(self, mu: Any) -> "Form":
        """Pullback by x -> mu * x."""
        mu = self.field.coerce(mu)
        factor = self.field.one
        for _ in range(self.degree):
            factor = factor * mu
        return self.map_jets(lambda j: j.linear_substitution(mu).scale(factor))


@dataclass(frozen=True)
class VectorFieldJet:
    """Vector field sum_i X_i e_i with jet components."""

    components: tuple[Jet, ...]

    def __post_init__(self) -> None:
        if len(self.components) != DIM:
            raise FormDegreeError(f"vector fields need {DIM} components, got {len(self.components)}")
        if len({c.order for c in self.components}) != 1:
            raise OrderMismatchError("vector field components must share a truncation order")

    @classmethod
    def zero(cls, field: Any, order: int) -> "VectorFieldJet":
        return cls(tuple(Jet.zero(field, order) for _ in range(DIM)))

    @classmethod
    def coordinate(cls, field: Any, order: int, axis: int) -> "VectorFieldJet":
        """The constant field e_axis."""
        return cls(
            tuple(Jet.constant(field, order, 1) if i == axis else Jet.zero(field, order) for i in range(1, DIM + 1))
        )

    @classmethod
    def radial(cls, field: Any, order: int) -> "VectorFieldJet":
        return cls(tuple(Jet.variable(field, order, i) for i in range(1, DIM + 1)))

    @property
    def order(self) -> int:
        return self.components[0].order

    @property
    def field(self) -> Any:
        return self.components[0].field

    def __getitem__(self, axis: int) -> Jet:
        return self.components[axis - 1]

    def __add__(self, other: "VectorFieldJet") -> "VectorFieldJet":
        return VectorFieldJet(tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorFieldJet":
        return VectorFieldJet(tuple(-a for a in self.components))

    def __sub__(self, other: "VectorFieldJet") -> "VectorFieldJet":
        return self + (-other)

    def scale(self, value: Any) -> "VectorFieldJet":
        return VectorFieldJet(tuple(c.scale(value) for c in self.components))

    def valuation(self) -> int:
        return min(c.valuation() for c in self.components)

    def known_valuation(self) -> int:
        return min(c.known_valuation() for c in self.components)

    @property
    def effective(self) -> int:
        return min(c.effective for c in self.components)

    def map_jets(self, fn: Callable[[Jet], Jet]) -> "VectorFieldJet":
        return VectorFieldJet(tuple(fn(c) for c in self.components))

    def is_zero(self) -> bool:
        return not any(c.terms for c in self.components)


# Named operations


def wedge(a: Form, b: Form) -> Form:
    """Graded-commutative exterior product."""
    if a.degree + b.degree > DIM:
        raise FormDegreeError(f"wedge of degrees {a.degree} and {b.degree} exceeds {DIM}")
    if a.order != b.order:
        raise OrderMismatchError(f"form orders differ: {a.order} vs {b.order}")
    field = unify_fields(a.field, b.field)
    acc: dict[MultiIndex, Jet] = {}
    for index_a, jet_a in a.terms.items():
        for index_b, jet_b in b.terms.items():
            sign, index = canonical_index(index_a + index_b)
            if sign == 0:
                continue
            term = jet_a * jet_b
            if sign < 0:
                term = -term
            acc[index] = acc[index] + term if index in acc else term
    effective = min(a.effective + b.known_valuation(), b.effective + a.known_valuation())
    return Form(field, a.degree + b.degree, a.order, acc, effective)


def interior(X: VectorFieldJet, a: Form) -> Form:
    """Contraction X _| a in the first slot."""
    if a.degree == 0:
        raise FormDegreeError("interior product of a 0-form")
    if X.order != a.order:
        raise OrderMismatchError("vector field and form orders differ")
    field = unify_fields(X.field, a.field)
    acc: dict[MultiIndex, Jet] = {}
    for index, jet in a.terms.items():
        for pos, axis in enumerate(index):
            component = X[axis]
            if not component.terms:
                continue
            term = component * jet
            if pos % 2:
                term = -term
            rest = index[:pos] + index[pos + 1:]
            acc[rest] = acc[rest] + term if rest in acc else term
    effective = min(a.effective + X.known_valuation(), X.effective + a.known_valuation())
    return Form(field, a.degree - 1, a.order, acc, effective)


def exterior_derivative(a: Form) -> Form:
    """d, componentwise from formal partials; loses one effective order."""
    if a.degree >= DIM:
        raise FormDegreeError("exterior derivative of a top-degree form")
    acc: dict[MultiIndex, Jet] = {}
    for index, jet in a.terms.items():
        for axis in TOP_INDEX:
            if axis in index:
                continue
            partial = jet.partial(axis)
            if not partial.terms:
                continue
            sign, target = canonical_index((axis,) + index)
            term = partial if sign > 0 else -partial
            acc[target] = acc[target] + term if target in acc else term
    return Form(a.field, a.degree + 1, a.order, acc, a.effective - 1)


def taylor_project(a: Form, n: int, mode: Projection = Projection.KILL_LOW_JETS) -> Form:
    """P_n(a) (keep-low-jets) or a - P_n(a) (kill-low-jets)."""
    a.require_effective(n, "Taylor projection input")
    low = a.truncate_jets(n)
    if Projection(mode) is Projection.KEEP_LOW_JETS:
        return low
    return a - low


def dilate(a: Form, s: Any) -> Form:
    """Component substitution x_i -> x_i / s."""
    return a.map_jets(lambda j: j.dilate(s))


def radial_homotopy(b: Form) -> Form:
    """Radial Poincare homotopy h with d h + h d = id on forms of degree >= 1.

    On a term x^a e^I with |a| = p and deg I = m the operator returns
    (p + m)^-1 * (R _| x^a e^I) where R is the radial field.
    """
    if b.degree == 0:
        raise FormDegreeError("radial homotopy of a 0-form")
    field, order, m = b.field, b.order, b.degree
    acc: dict[MultiIndex, dict[Exponent, Any]] = {}
    for index, jet in b.terms.items():
        for exps, coeff in jet.terms.items():
            p = sum(exps)
            if p + 1 > order:
                continue
            weight = coeff * field.coerce(Fraction(1, p + m))
            for pos, axis in enumerate(index):
                rest = index[:pos] + index[pos + 1:]
                raised = exps[: axis - 1] + (exps[axis - 1] + 1,) + exps[axis:]
                bucket = acc.setdefault(rest, {})
                value = -weight if pos % 2 else weight
                bucket[raised] = bucket[raised] + value if raised in bucket else value
    effective = min(order, b.effective + 1)
    terms = {index: Jet(field, order, bucket, effective) for index, bucket in acc.items()}
    return Form(field, m - 1, order, terms, effective)


def euclidean_laplacian_jet(jet: Jet) -> Jet:
    """-sum_i d^2/dx_i^2 on a single coefficient."""
    acc = Jet.zero(jet.field, jet.order).with_effective(jet.effective - 2)
    for axis in TOP_INDEX:
        acc = acc - jet.partial(axis).partial(axis)
    return acc


# Random generation for property suites


def random_form(
    rng: random.Random,
    field: Any,
    order: int,
    degree: int,
    n_components: int = 4,
    n_terms: int = 4,
    min_degree: int = 0,
    max_degree: Optional[int] = None,
) -> Form:
    indices = all_indices(degree)
    chosen = rng.sample(indices, min(n_components, len(indices)))
    terms = {
        index: random_jet(rng, field, order, n_terms=n_terms, min_degree=min_degree, max_degree=max_degree)
        for index in chosen
    }
    return Form(field, degree, order, terms)


def random_closed_form(
    rng: random.Random,
    field: Any,
    order: int,
    degree: int,
    min_valuation: int = 0,
    n_components: int = 4,
    n_terms: int = 4,
) -> Form:
    """d of a random exact polynomial (degree-1)-form, known to the full order."""
    if degree == 0:
        return Form.function(Jet.constant(field, order, rng.randint(-5, 5)))
    primitive = random_form(
        rng, field, order + 1, degree - 1, n_components=n_components, n_terms=n_terms, min_degree=min_valuation + 1
    )
    return exterior_derivative(primitive).restrict(order)
