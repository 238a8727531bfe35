"""Suite checking the quadratic point solution and the local model that replaces it."""

import logging
from typing import Any

from ..services.errors import PointSolveError
from ..services.g2 import sigma_can
from ..services.point_model import build_sigma0, describe_values, values_match, verify_pointsolve
from ..services.reports import Claim, ClaimRecorder
from .base import BaseSuite

logger = logging.getLogger(__name__)


class PointSolveSuite(BaseSuite):
    """Runs the point-solution computations exactly over the rationals."""

    def __init__(self):
        super().__init__(
            name="pointsolve",
            description="Quadratic point solution at the origin: metric, star and Laplacian expansions.",
            default_order=2,
        )

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        """
        Runs the point-solution checks.

        Args:
            seed: Unused; the suite is not randomized
            order: Truncation order of theta (at least 2)
            backend: Unused; the computations are exact rationals
            **kwargs: Additional suite-specific parameters

        Returns:
            Claims for every displayed expansion plus the corrected local model
        """
        order = max(order, 2)
        claims = verify_pointsolve(order)
        recorder = ClaimRecorder()

        def local_model() -> tuple[bool, str]:
            point = build_sigma0(1, 1, order)
            values = point.sigma0.laplacian.at_origin()
            expected = sigma_can(point.field).at_origin()
            return values_match(values, expected, point.field), describe_values(values, point.field)

        recorder.check(
            "local-model-at-origin = sigma_can",
            "Rescaling theta will give us sigma_0",
            local_model,
        )

        def negative_rhs() -> tuple[bool, str]:
            try:
                build_sigma0(1, -1, order)
            except PointSolveError as e:
                return True, str(e)
            return False, "a local model was found for a negative right-hand side"

        recorder.check(
            "negative-rhs-obstruction",
            "with the signs reversed at x_i^2, x_j^2 and x_k^2",
            negative_rhs,
            informational=True,
        )
        logger.info(f"Point-solve suite finished with {len(claims) + len(recorder.claims)} claims")
        return claims + recorder.claims


# Create a single, global instance of the suite
pointsolve_suite = PointSolveSuite()
