"""Suite checking the first-order correction sigma_1 on randomized admissible right-hand sides."""

import logging
import random
from fractions import Fraction
from typing import Any

from ..services.errors import PointSolveError
from ..services.first_order import build_sigma1, printed_weights
from ..services.forms import Form, random_closed_form
from ..services.g2 import sigma_can
from ..services.point_model import build_sigma0
from ..services.reports import Claim, ClaimRecorder
from ..services.scalars import RATIONAL
from .base import BaseSuite

logger = logging.getLogger(__name__)

# scales whose cube roots stay rational
SCALES = (Fraction(1), Fraction(8))

CONDITIONS = {
    "value": "(Delta sigma_1 sigma_1 - eta)(p) = 0",
    "gradient": "nabla(Delta sigma_1 sigma_1 - eta)(p) = 0",
    "origin": "sigma_1(p) = eta(p)",
}


def admissible_eta(rng: random.Random, order: int, c: Fraction = Fraction(1)) -> Form:
    """c * sigma_can plus a random closed 3-form vanishing at the origin."""
    tail = random_closed_form(rng, RATIONAL, order, 3, min_valuation=1, n_components=3, n_terms=3)
    return sigma_can(order=order).scale(c) + tail


class FirstOrderSuite(BaseSuite):
    """Builds sigma_1 for seeded random eta and checks the conditions at the origin."""

    def __init__(self):
        super().__init__(
            name="h3",
            description="First-order correction: value, gradient and origin conditions of sigma_1.",
            default_order=5,
        )

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        """
        Runs the first-order checks.

        Args:
            seed: Seed for the random right-hand sides
            order: Working order of sigma_0 (at least 4)
            backend: Unused; eta is drawn over the rationals
            **kwargs: cases (number of random eta, default 5)

        Returns:
            Three claims per case, the negative-sign obstruction and the printed-weights audit
        """
        rng = random.Random(seed)
        order = max(order, 4)
        cases = int(kwargs.get("cases", 5))
        recorder = ClaimRecorder()
        last_eta = None
        for case in range(cases):
            c = SCALES[case % len(SCALES)]
            eta = admissible_eta(rng, order, c)
            last_eta = eta
            with recorder.timed(f"case-{case}"):
                outcome = self._first_order(eta, c, order)
            for name, anchor in CONDITIONS.items():
                recorder.check(f"sigma1-{name}[{case}]", anchor, lambda name=name: outcome.get(name, (False, "")))

        def negative() -> tuple[bool, str]:
            try:
                build_sigma0(1, -1, order)
            except PointSolveError as e:
                return True, str(e)
            return False, "negative eta admitted a local model"

        recorder.check("sigma1-negative-sign", "sigma_1(p) = eta(p)", negative)

        if last_eta is not None:

            def printed() -> tuple[bool, str]:
                point = build_sigma0(SCALES[(cases - 1) % len(SCALES)], 1, order)
                result = build_sigma1(point.sigma0, last_eta, 1, weights=printed_weights, strict=False)
                return result.satisfied, f"checks {dict(sorted(result.checks.items()))}"

            recorder.check(
                "tau-star-printed-weights",
                "2/(1+3 delta_k^l)",
                printed,
                informational=True,
            )
        return recorder.claims

    def _first_order(self, eta: Form, c: Fraction, order: int) -> dict[str, tuple[bool, str]]:
        try:
            point = build_sigma0(c, 1, order)
            result = build_sigma1(point.sigma0, eta, 1, strict=False)
        except PointSolveError as e:
            logger.warning(f"First-order case failed: {e}")
            return {name: (False, str(e)) for name in CONDITIONS}
        witness = f"residual valuation {result.residual_valuation}"
        return {name: (ok, witness) for name, ok in result.checks.items()}


# Create a single, global instance of the suite
h3_suite = FirstOrderSuite()
