"""G2-specific machinery: canonical form, positivity, induced metric, Hodge star and Laplacians."""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Optional

from .errors import FormDegreeError, NonClosedFormError, OrderMismatchError, PositivityError, ScalarDomainError
from .forms import (
    TOP_INDEX,
    Form,
    MultiIndex,
    all_indices,
    complement,
    complement_sign,
    euclidean_laplacian_jet,
    exterior_derivative,
)
from .jets import DIM, Jet, JetMatrix, identity_matrix, jet_det, jet_inverse, matrix_at_origin, unify_fields
from .scalars import RATIONAL

logger = logging.getLogger(__name__)

# Multiplication pattern of the canonical structure.
INDEX_PLUS: tuple[MultiIndex, ...] = ((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6))
INDEX_MINUS: tuple[MultiIndex, ...] = ((2, 5, 7), (3, 4, 7), (3, 5, 6))

# B_ij = 6 g_ij sqrt(det g), hence det B = 6^7 (det g)^(9/2).
B_NORMALIZATION = 6
METRIC_ROOT = Fraction(1, 9)


def canonical_sign(index: MultiIndex) -> int:
    if index in INDEX_PLUS:
        return 1
    if index in INDEX_MINUS:
        return -1
    return 0


def sigma_can(field: Any = RATIONAL, order: int = 0) -> Form:
    """The constant 3-form sum over I+ of e^ijk minus sum over I- of e^ijk."""
    terms = {index: Jet.constant(field, order, canonical_sign(index)) for index in INDEX_PLUS + INDEX_MINUS}
    return Form(field, 3, order, terms)


def theta_form(sign: int = 1, kappa: Any = 1, field: Any = RATIONAL, order: int = 2) -> Form:
    """sum of +-(1 - sign*kappa*(x_i^2 + x_j^2 + x_k^2)) e^ijk over the canonical pattern.

    kappa = 1 is the quadratic point-solution form; the squares flip sign for
    negative right-hand sides.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    weight = field.coerce(kappa) * field.coerce(sign)
    terms = {}
    for index in INDEX_PLUS + INDEX_MINUS:
        squares = Jet.zero(field, order)
        for axis in index:
            exps = [0] * DIM
            exps[axis - 1] = 2
            squares = squares + Jet.monomial(field, order, exps, 1)
        jet = Jet.constant(field, order, 1) - squares.scale(weight)
        terms[index] = jet.scale(canonical_sign(index))
    return Form(field, 3, order, terms)


# B-matrix and positivity


def _top_coefficient(a: Form, b: Form) -> Jet:
    """Coefficient of e^1234567 in a ^ b, without building the wedge."""
    field = unify_fields(a.field, b.field)
    acc = Jet.zero(field, a.order).with_effective(min(a.effective, b.effective))
    for index, jet in a.terms.items():
        partner = b.terms.get(complement(index))
        if partner is None:
            continue
        term = jet * partner
        acc = acc + term if complement_sign(index) > 0 else acc - term
    return acc


def _contract_axis(phi: Form, axis: int) -> Form:
    """e_axis _| phi for the constant coordinate field."""
    terms = {}
    for index, jet in phi.terms.items():
        if axis in index:
            pos = index.index(axis)
            rest = index[:pos] + index[pos + 1:]
            terms[rest] = -jet if pos % 2 else jet
    return Form(phi.field, phi.degree - 1, phi.order, terms, phi.effective)


def b_matrix(phi: Form) -> JetMatrix:
    """B_ij read off (e_i _| phi) ^ (e_j _| phi) ^ phi = B_ij e^1234567."""
    if phi.degree != 3:
        raise FormDegreeError(f"B-matrix needs a 3-form, got degree {phi.degree}")
    contracted = [_contract_axis(phi, axis) for axis in TOP_INDEX]
    with_phi = [c.wedge(phi) for c in contracted]
    matrix: JetMatrix = [[None] * DIM for _ in range(DIM)]  # type: ignore[list-item]
    for i in range(DIM):
        for j in range(i, DIM):
            entry = _top_coefficient(contracted[i], with_phi[j])
            matrix[i][j] = entry
            matrix[j][i] = entry
    return matrix


class Positivity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEITHER = "neither"


def _elimination_pivots(matrix: list[list[Any]], field: Any) -> Optional[list[Any]]:
    """Pivots of unpivoted elimination; None once a leading minor vanishes."""
    n = len(matrix)
    a = [list(row) for row in matrix]
    pivots = []
    for col in range(n):
        pivot = a[col][col]
        if field.is_zero(pivot):
            return None
        pivots.append(pivot)
        inv = field.one / pivot
        for r in range(col + 1, n):
            factor = a[r][col] * inv
            if field.is_zero(factor):
                continue
            a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return pivots


def classify_b(matrix: JetMatrix) -> Positivity:
    field = matrix[0][0].field
    pivots = _elimination_pivots(matrix_at_origin(matrix), field)
    if pivots is None:
        return Positivity.NEITHER
    signs = {field.sign(p) for p in pivots}
    if signs == {1}:
        return Positivity.POSITIVE
    if signs == {-1}:
        return Positivity.NEGATIVE
    return Positivity.NEITHER


def positivity_check(phi: Form) -> Positivity:
    """Definiteness of B(0)."""
    return classify_b(b_matrix(phi))


# Metrics


class MetricJet:
    """Symmetric jet metric with its inverse and volume density sqrt(det g).

    Minors of the inverse are cached per instance; they drive the Hodge star.
    """

    def __init__(
        self,
        entries: JetMatrix,
        density: Jet,
        inverse: Optional[JetMatrix] = None,
        is_euclidean: bool = False,
    ):
        for i in range(DIM):
            for j in range(i + 1, DIM):
                if entries[i][j] != entries[j][i]:
                    raise ScalarDomainError(f"metric is not symmetric at ({i + 1}, {j + 1})")
        self.entries = entries
        self.density = density
        self.is_euclidean = is_euclidean
        self._inverse = inverse
        self._minors: dict[tuple[MultiIndex, MultiIndex], Jet] = {}
        # derived quantities (connection) computed by other services
        self.derived: dict[str, Any] = {}

    @classmethod
    def euclidean(cls, field: Any = RATIONAL, order: int = 0) -> "MetricJet":
        return cls(
            identity_matrix(field, order),
            Jet.constant(field, order, 1),
            identity_matrix(field, order),
            is_euclidean=True,
        )

    @property
    def field(self) -> Any:
        return self.density.field

    @property
    def order(self) -> int:
        return self.density.order

    @property
    def effective(self) -> int:
        return min([self.density.effective] + [e.effective for row in self.entries for e in row])

    @property
    def inverse(self) -> JetMatrix:
        if self._inverse is None:
            self._inverse = jet_inverse(self.entries)
        return self._inverse

    def __getitem__(self, ij: tuple[int, int]) -> Jet:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def at_origin(self) -> list[list[Any]]:
        return matrix_at_origin(self.entries)

    def is_diagonal_through(self, n: int) -> bool:
        return all(
            self.entries[i][j].vanishes_through(n) for i in range(DIM) for j in range(DIM) if i != j
        )

    def equal_to_order(self, other: "MetricJet", n: Optional[int] = None) -> bool:
        return all(
            self.entries[i][j].equal_to_order(other.entries[i][j], n) for i in range(DIM) for j in range(DIM)
        )

    def inverse_minor(self, rows: MultiIndex, cols: MultiIndex) -> Jet:
        """det of g^-1 restricted to rows x cols, by Laplace expansion on the first row."""
        key = (rows, cols)
        cached = self._minors.get(key)
        if cached is not None:
            return cached
        if not rows:
            result = Jet.constant(self.field, self.order, 1)
        else:
            first, rest = rows[0], rows[1:]
            result = Jet.zero(self.field, self.order).with_effective(self.effective)
            for pos, col in enumerate(cols):
                entry = self.inverse[first - 1][col - 1]
                if not entry:
                    continue
                sub = self.inverse_minor(rest, cols[:pos] + cols[pos + 1:])
                if not sub:
                    continue
                term = entry * sub
                result = result - term if pos % 2 else result + term
        self._minors[key] = result
        return result

    def volume_form(self) -> Form:
        return Form(self.field, DIM, self.order, {TOP_INDEX: self.density})


def metric_from_b(b: JetMatrix) -> MetricJet:
    """g = B (det B / 6^7)^(-1/9) / 6 for positive definite B(0)."""
    field = b[0][0].field
    u = jet_det(b).scale(Fraction(1, B_NORMALIZATION**DIM))
    try:
        density = u.unit_power(METRIC_ROOT)
    except ScalarDomainError as e:
        raise ScalarDomainError(
            f"{e}; the metric needs (det B)(0)^(1/9), use a radical:d:r or bigfloat backend",
            witness=e.witness,
        ) from e
    factor = density.inverse().scale(Fraction(1, B_NORMALIZATION))
    entries = [[entry * factor for entry in row] for row in b]
    logger.debug(f"Metric built over {field.tag} at order {u.order}, density effective {density.effective}")
    return MetricJet(entries, density)


def metric_from_form(phi: Form) -> MetricJet:
    b = b_matrix(phi)
    positivity = classify_b(b)
    if positivity is not Positivity.POSITIVE:
        raise PositivityError(
            f"metric_from_form needs a positive 3-form, got {positivity.value}; pass -phi for negative forms",
            witness=repr(phi.at_origin()),
        )
    return metric_from_b(b)


# Star, codifferential, Laplacians


def hodge_star(g: MetricJet, a: Form) -> Form:
    """<a, b>_g vol_g = a ^ *b through cached minors of g^-1."""
    if a.order != g.order:
        raise OrderMismatchError(f"metric order {g.order} differs from form order {a.order}")
    k = a.degree
    if g.is_euclidean:
        terms = {complement(index): jet.scale(complement_sign(index)) for index, jet in a.terms.items()}
        return Form(a.field, DIM - k, a.order, terms, a.effective)
    field = unify_fields(a.field, g.field)
    acc: dict[MultiIndex, Jet] = {}
    targets = all_indices(k)
    for index, jet in a.terms.items():
        for target in targets:
            minor = g.inverse_minor(index, target)
            if not minor:
                continue
            term = jet * minor
            if complement_sign(target) < 0:
                term = -term
            slot = complement(target)
            acc[slot] = acc[slot] + term if slot in acc else term
    effective = min(a.effective, g.effective + a.known_valuation())
    return Form(field, DIM - k, a.order, acc, effective).scale(g.density)


def codifferential(g: MetricJet, a: Form) -> Form:
    """delta = (-1)^k * d * on k-forms in dimension 7."""
    if a.degree == 0:
        raise FormDegreeError("codifferential of a 0-form")
    result = hodge_star(g, exterior_derivative(hodge_star(g, a)))
    return -result if a.degree % 2 else result


def hodge_laplacian(g: MetricJet, a: Form) -> Form:
    """d delta + delta d; consumes two effective orders."""
    if g.is_euclidean:
        return laplacian_euclid(a)
    parts = []
    if a.degree > 0:
        parts.append(exterior_derivative(codifferential(g, a)))
    if a.degree < DIM:
        parts.append(codifferential(g, exterior_derivative(a)))
    result = parts[0]
    for part in parts[1:]:
        result = result + part
    return result


def laplacian_euclid(a: Form) -> Form:
    """Flat Laplacian, -sum d^2/dx_i^2 on every component."""
    terms = {index: euclidean_laplacian_jet(jet) for index, jet in a.terms.items()}
    return Form(a.field, a.degree, a.order, terms, a.effective - 2)


@dataclass(frozen=True, eq=False)
class G2Structure:
    """A definite 3-form with its B-matrix, metric and volume form.

    Negative forms keep sign = -1 and build the metric from -phi.
    """

    phi: Form
    sign: int
    b_matrix: JetMatrix
    metric: MetricJet
    volume: Form

    @classmethod
    def from_form(cls, phi: Form, require_closed: bool = False) -> "G2Structure":
        if require_closed and not phi.is_closed():
            raise NonClosedFormError("G2-structure form is not closed", witness=repr(exterior_derivative(phi)))
        b = b_matrix(phi)
        positivity = classify_b(b)
        if positivity is Positivity.NEITHER:
            raise PositivityError("3-form is neither positive nor negative at the origin", witness=repr(phi.at_origin()))
        sign = 1 if positivity is Positivity.POSITIVE else -1
        metric = metric_from_b(b if sign > 0 else [[-e for e in row] for row in b])
        return cls(phi=phi, sign=sign, b_matrix=b, metric=metric, volume=metric.volume_form())

    @classmethod
    def closed(cls, phi: Form) -> "G2Structure":
        return cls.from_form(phi, require_closed=True)

    @property
    def order(self) -> int:
        return self.phi.order

    @property
    def field(self) -> Any:
        return self.phi.field

    @cached_property
    def laplacian(self) -> Form:
        """Delta_phi phi."""
        return hodge_laplacian(self.metric, self.phi)

    def star(self, a: Form) -> Form:
        return hodge_star(self.metric, a)

    def laplacian_of(self, a: Form) -> Form:
        return hodge_laplacian(self.metric, a)
