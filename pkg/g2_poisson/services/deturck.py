"""Gauge machinery: connections, the DeTurck field, Lie derivatives, flows and linearizations."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .errors import FlowDivergenceError, NonClosedFormError, OrderMismatchError, PositivityError
from .forms import Form, VectorFieldJet, exterior_derivative, interior
from .g2 import G2Structure, MetricJet
from .jets import DIM, Jet
from .scalars import DualField

logger = logging.getLogger(__name__)

# Coefficients of the gauge field in terms of the connection difference.
TRACE_WEIGHT = Fraction(15, 28)
DIVERGENCE_WEIGHT = Fraction(1, 4)

Symbols = tuple[tuple[tuple[Jet, ...], ...], ...]

GaugeField = VectorFieldJet


@dataclass(frozen=True)
class ConnectionJet:
    """Christoffel symbols stored as symbols[k][i][j] for Gamma^k_ij (0-based)."""

    symbols: Symbols

    def __getitem__(self, kij: tuple[int, int, int]) -> Jet:
        k, i, j = kij
        return self.symbols[k - 1][i - 1][j - 1]

    def is_symmetric(self) -> bool:
        return all(
            self.symbols[k][i][j] == self.symbols[k][j][i]
            for k in range(DIM)
            for i in range(DIM)
            for j in range(i + 1, DIM)
        )

    def is_zero(self) -> bool:
        return not any(entry for plane in self.symbols for row in plane for entry in row)

    def __sub__(self, other: "ConnectionJet") -> "TorsionDiff":
        return TorsionDiff(
            tuple(
                tuple(tuple(a - b for a, b in zip(row_a, row_b)) for row_a, row_b in zip(plane_a, plane_b))
                for plane_a, plane_b in zip(self.symbols, other.symbols)
            )
        )


@dataclass(frozen=True)
class TorsionDiff:
    """T^k_ij = Gamma(zeta)^k_ij - Gamma(phi)^k_ij, stored like ConnectionJet."""

    entries: Symbols

    def __getitem__(self, kij: tuple[int, int, int]) -> Jet:
        k, i, j = kij
        return self.entries[k - 1][i - 1][j - 1]

    def is_zero(self) -> bool:
        return not any(entry for plane in self.entries for row in plane for entry in row)

    def scale(self, value: Any) -> "TorsionDiff":
        return TorsionDiff(tuple(tuple(tuple(e.scale(value) for e in row) for row in plane) for plane in self.entries))


def christoffels(g: MetricJet) -> ConnectionJet:
    """Levi-Civita symbols, memoized on the metric."""
    cached = g.derived.get("christoffels")
    if cached is not None:
        return cached
    field, order = g.field, g.order
    if g.is_euclidean:
        zero = Jet.zero(field, order)
        connection = ConnectionJet(tuple(tuple(tuple(zero for _ in range(DIM)) for _ in range(DIM)) for _ in range(DIM)))
        g.derived["christoffels"] = connection
        return connection
    # dg[l][i][j] = d_l g_ij
    dg = [[[g.entries[i][j].partial(l + 1) for j in range(DIM)] for i in range(DIM)] for l in range(DIM)]
    half = Fraction(1, 2)
    first_kind = [[[None] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for l in range(DIM):
        for i in range(DIM):
            for j in range(i, DIM):
                value = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]).scale(half)
                first_kind[l][i][j] = value
                first_kind[l][j][i] = value
    inverse = g.inverse
    symbols = []
    for k in range(DIM):
        plane = [[None] * DIM for _ in range(DIM)]
        for i in range(DIM):
            for j in range(i, DIM):
                acc = Jet.zero(field, order).with_effective(g.effective - 1)
                for l in range(DIM):
                    if inverse[k][l] and first_kind[l][i][j]:
                        acc = acc + inverse[k][l] * first_kind[l][i][j]
                plane[i][j] = acc
                plane[j][i] = acc
        symbols.append(tuple(tuple(row) for row in plane))
    connection = ConnectionJet(tuple(symbols))
    g.derived["christoffels"] = connection
    return connection


def torsion_difference(zeta: G2Structure, phi: G2Structure) -> TorsionDiff:
    return christoffels(zeta.metric) - christoffels(phi.metric)


def gauge_from_torsion(torsion: TorsionDiff, g: MetricJet, sign: int) -> GaugeField:
    """sign * (15/28 g^ij T^k_ij + 1/4 g^ik T^j_ji) e_k."""
    inverse = g.inverse
    field = unify_torsion_field(torsion, g)
    order = g.order
    effective = torsion.entries[0][0][0].effective
    divergence = []
    for i in range(DIM):
        acc = Jet.zero(field, order).with_effective(effective)
        for j in range(DIM):
            acc = acc + torsion.entries[j][j][i]
        divergence.append(acc)
    components = []
    for k in range(DIM):
        trace = Jet.zero(field, order).with_effective(effective)
        for i in range(DIM):
            for j in range(DIM):
                entry = torsion.entries[k][i][j]
                if entry and inverse[i][j]:
                    trace = trace + inverse[i][j] * entry
        contracted = Jet.zero(field, order).with_effective(effective)
        for i in range(DIM):
            if inverse[i][k] and divergence[i]:
                contracted = contracted + inverse[i][k] * divergence[i]
        value = trace.scale(TRACE_WEIGHT) + contracted.scale(DIVERGENCE_WEIGHT)
        components.append(value.scale(sign))
    return VectorFieldJet(tuple(components))


def unify_torsion_field(torsion: TorsionDiff, g: MetricJet) -> Any:
    fields = {entry.field for plane in torsion.entries for row in plane for entry in row}
    fields.add(g.field)
    duals = [f for f in fields if isinstance(f, DualField)]
    return duals[0] if duals else g.field


def deturck_field(zeta: G2Structure, phi: G2Structure, sign: int) -> GaugeField:
    """V(zeta, phi) built from the connection difference and the metric of phi."""
    if zeta.sign != 1 or phi.sign != 1:
        raise PositivityError("the gauge field needs two positive structures")
    if zeta.order != phi.order:
        raise OrderMismatchError(f"structure orders differ: {zeta.order} vs {phi.order}")
    torsion = torsion_difference(zeta, phi)
    return gauge_from_torsion(torsion, phi.metric, sign)


def lie_derivative(V: VectorFieldJet, a: Form) -> Form:
    """Cartan: d(V _| a) + V _| da."""
    if V.is_zero():
        return Form.zero(a.field, a.degree, a.order, a.effective)
    parts = []
    if a.degree > 0:
        parts.append(exterior_derivative(interior(V, a)))
    if a.degree < DIM:
        parts.append(interior(V, exterior_derivative(a)))
    result = parts[0]
    for part in parts[1:]:
        result = result + part
    return result


def flow_pullback(V: VectorFieldJet, a: Form, tolerance: Optional[Any] = None, max_terms: int = 200) -> Form:
    """Pullback by the time-1 flow of V as the Lie series sum L_V^n a / n!.

    Fields of valuation >= 2 make the series terminate on jets. A valuation-1
    field is accepted only over a big-float backend with an explicit
    tolerance, where the series is summed until its terms drop below it.
    """
    if V.is_zero():
        return a
    valuation = _real_valuation(V)
    approximate = False
    if valuation < 2:
        if valuation == 1 and tolerance is not None and not a.field.exact:
            approximate = True
            logger.warning(f"Summing a truncated flow series for a valuation-1 field with tolerance {tolerance}")
        else:
            raise FlowDivergenceError(
                f"flow series of a field with valuation {valuation} does not terminate on jets",
                witness=repr(V.components),
            )
    total = a
    term = a
    limit = max_terms if approximate else a.order + 2
    for n in range(1, limit + 1):
        term = lie_derivative(V, term).scale(Fraction(1, n))
        total = total + term
        if not term or (approximate and _max_abs(term) < tolerance):
            return total
    if approximate:
        raise FlowDivergenceError(f"flow series did not reach tolerance {tolerance} in {max_terms} terms")
    return total


def _real_valuation(V: VectorFieldJet) -> int:
    """Valuation of the real part; a purely infinitesimal field (eps * W) has a two-term series."""
    if not isinstance(V.field, DualField):
        return V.valuation()
    field = V.field
    real = [c.map_coefficients(field.real_part, field.base) for c in V.components]
    if not any(c.terms for c in real):
        return V.order + 1
    return min(c.valuation() for c in real)


def _max_abs(a: Form) -> Any:
    return max((abs(c) for jet in a.terms.values() for c in jet.terms.values()), default=0)


# Dual-number linearizations


def eps_part_jet(jet: Jet, base: Any) -> Jet:
    if not isinstance(jet.field, DualField):
        return Jet.zero(base, jet.order).with_effective(jet.effective)
    return jet.map_coefficients(jet.field.eps_part, jet.field.base)


def eps_part(a: Form) -> Form:
    """Coefficient of epsilon in a form over a dual backend."""
    base = a.field.base if isinstance(a.field, DualField) else a.field
    return Form(base, a.degree, a.order, {i: eps_part_jet(j, base) for i, j in a.terms.items()}, a.effective)


def real_part(a: Form) -> Form:
    if not isinstance(a.field, DualField):
        return a
    field = a.field
    return a.map_jets(lambda j: j.map_coefficients(field.real_part, field.base), field=field.base)


def perturb(phi: Form, psi: Form) -> Form:
    """phi + epsilon * psi over the dual backend of phi."""
    dual = phi.field if isinstance(phi.field, DualField) else DualField(phi.field)
    return phi.promote(dual) + psi.promote(dual).scale(dual.epsilon)


def _require_closed(psi: Form) -> None:
    if not psi.is_closed():
        raise NonClosedFormError("the linearization direction must be closed", witness=repr(exterior_derivative(psi)))


def linearize_V(zeta: G2Structure, phi: G2Structure, psi: Form, sign: int) -> VectorFieldJet:
    """V'_{zeta,phi}(psi) = d/dt V(zeta, phi + t psi) at t = 0."""
    _require_closed(psi)
    moved = G2Structure.from_form(perturb(phi.phi, psi))
    V = deturck_field(zeta, moved, sign)
    base = phi.field
    return V.map_jets(lambda j: eps_part_jet(j, base))


def linearized_laplacian(phi: G2Structure, psi: Form) -> Form:
    """d/dt Delta_{phi + t psi}(phi + t psi) at t = 0."""
    _require_closed(psi)
    moved = G2Structure.from_form(perturb(phi.phi, psi))
    return eps_part(moved.laplacian)


def psi_map(zeta: G2Structure, phi: G2Structure, psi: Form, sign: int) -> Form:
    """Psi(psi) = linearized Laplacian + Delta_phi psi - sign d(V'(psi) _| phi)."""
    linear = linearized_laplacian(phi, psi)
    gauge = linearize_V(zeta, phi, psi, sign)
    gauge_term = exterior_derivative(interior(gauge, phi.phi))
    return linear + phi.laplacian_of(psi) - gauge_term.scale(sign)


def psi_total(zeta: G2Structure, phi: G2Structure, psi: Form, sign: int) -> Form:
    """Psi(psi) + sign d(V'(psi) _| phi); the same for every zeta."""
    gauge = linearize_V(zeta, phi, psi, sign)
    return psi_map(zeta, phi, psi, sign) + exterior_derivative(interior(gauge, phi.phi)).scale(sign)
