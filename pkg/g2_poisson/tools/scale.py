"""Suite auditing the homogeneity of sigma -> Delta_sigma sigma and the printed scale constants."""

import logging
from typing import Any

from ..services.reports import Claim, ClaimRecorder
from ..services.scale_audit import determine_scale
from .base import BaseSuite

logger = logging.getLogger(__name__)


class ScaleSuite(BaseSuite):
    """Derives the scaling exponents by sampling and reports the printed constants against them."""

    def __init__(self):
        super().__init__(
            name="scale",
            description="Scale audit: exponent of Delta under sigma -> lambda sigma, metric law, model scales.",
            default_order=2,
        )

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        sign = int(kwargs.get("sign", 1))
        c = kwargs.get("c", 1)
        recorder = ClaimRecorder()
        with recorder.timed("audit"):
            audit = determine_scale(sign, c)
        symbolic = audit.symbolic

        recorder.check(
            "laplacian-exponent",
            "Delta_{sigma_0} sigma_0(p) = 12^{-1/3} Delta_theta theta(p)",
            lambda: (audit.exponent == symbolic["laplacian"], f"sampled {audit.exponent}"),
        )
        recorder.check(
            "metric-law = lambda^(2/3)",
            "g_{lambda sigma} = lambda^{2/3} g_sigma",
            lambda: (audit.metric_exponent == symbolic["metric"], f"sampled {audit.metric_exponent}"),
        )
        recorder.check(
            "b-law = lambda^3",
            "(e_i _| sigma) ^ (e_j _| sigma) ^ sigma = B_ij vol",
            lambda: (audit.b_exponent == symbolic["b"], f"sampled {audit.b_exponent}"),
        )
        recorder.check(
            "non-cube-sample",
            "g_{lambda sigma} = lambda^{2/3} g_sigma",
            lambda: (audit.radical_checked, f"lambda = 2 over radical:3:2: {audit.radical_sample}"),
        )
        recorder.check(
            "scale-pair",
            "Rescaling theta will give us sigma_0",
            lambda: (audit.cross_checked and audit.lam is not None, "; ".join(audit.notes) or None),
        )
        recorder.check(
            "printed-constants-consistent",
            "sigma_0 = 12^{2/3} theta",
            lambda: (audit.printed_consistent, f"printed {audit.printed_exponent}, derived {audit.exponent}"),
            informational=True,
        )
        logger.info(f"Scale suite: exponent {audit.exponent}, lambda {audit.lam}, backend {audit.backend}")
        return recorder.claims


# Create a single, global instance of the suite
scale_suite = ScaleSuite()
