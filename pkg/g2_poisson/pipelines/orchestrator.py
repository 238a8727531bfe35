"""Orchestrator routing verify, solve and util requests to suites and services."""

import logging
import os
import time
from typing import Any, Optional

from ..services.errors import FormDegreeError
from ..services.form_file import FormFile, read_form_file, write_form_file, write_text_atomic
from ..services.forms import Form
from ..services.g2 import G2Structure, MetricJet, hodge_star, laplacian_euclid
from ..services.normalizer import normalize_besteffort
from ..services.reports import Claim, ClaimRecorder, Report, inputs_digest
from ..services.scalars import RATIONAL, field_from_tag
from ..services.solver import JetSolution, solver_service
from ..tools.h3 import h3_suite
from ..tools.identities import identities_suite
from ..tools.pointsolve import pointsolve_suite
from ..tools.scale import scale_suite

logger = logging.getLogger(__name__)

UTIL_OPERATIONS = ("star", "metric", "laplacian", "dilate")

SOLVE_OUTPUTS = {
    "sigma": "sigma.json",
    "gauge": "gauge.json",
    "residual": "residual.json",
    "report": "report.json",
}


class CommandOrchestrator:
    """Routes each CLI verb to the suites or services that answer it."""

    def __init__(self):
        """Initialize orchestrator with available suites."""
        self.suites = {
            "pointsolve": pointsolve_suite,
            "h3": h3_suite,
            "identities": identities_suite,
            "scale": scale_suite,
        }
        self.default_seed = int(os.getenv("G2_DEFAULT_SEED", "0"))

    @property
    def suite_names(self) -> list[str]:
        return list(self.suites) + ["all"]

    def verify(
        self,
        suite: str,
        seed: Optional[int] = None,
        order: Optional[int] = None,
        backend: Optional[str] = None,
        **kwargs: Any,
    ) -> Report:
        """
        Run one suite, or every suite in a fixed order for "all".

        Args:
            suite: Suite name or "all"
            seed: Seed for randomized suites
            order: Truncation order, each suite's default when omitted
            backend: Scalar backend tag for the randomized suites
            **kwargs: Passed through to every suite

        Returns:
            Report with the claims of the selected suites
        """
        if suite not in self.suite_names:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(self.suite_names)}")
        seed = self.default_seed if seed is None else seed
        field = field_from_tag(backend) if backend else RATIONAL
        selected = list(self.suites.values()) if suite == "all" else [self.suites[suite]]
        claims: list[Claim] = []
        timings: dict[str, float] = {}
        for tool in selected:
            started = time.perf_counter()
            logger.info(f"Running suite {tool.name} with seed {seed}")
            claims.extend(tool.run(seed, order or tool.default_order, field, **kwargs))
            timings[tool.name] = time.perf_counter() - started
        digest = inputs_digest(suite, seed, order, field.tag, sorted(kwargs.items()))
        report = Report(f"verify {suite}", field.tag, digest, claims, timings=timings)
        logger.info(f"verify {suite}: {len(report.failed_claims)} failed of {len(claims)} claims")
        return report

    def solve(
        self,
        eta_path: str,
        out_dir: Optional[str] = None,
        order: Optional[int] = None,
        sign: Optional[int] = None,
        backend: Optional[str] = None,
        normalize: bool = False,
    ) -> Report:
        """Read eta, solve to the requested order and write sigma, gauge, residual and report."""
        source = read_form_file(eta_path)
        eta = source.form
        if backend and backend != eta.field.tag:
            eta = eta.promote(field_from_tag(backend))
        data: dict[str, Any] = {}
        if normalize:
            normalized = normalize_besteffort(eta)
            eta = normalized.eta
            data["normalization"] = normalized.to_dict()
        problem = solver_service.problem(eta, order, sign)
        solution = solver_service.solve(problem)
        report = self._solve_report(source, solution, problem.order, data)
        if out_dir:
            self._write_solution(out_dir, solution, report)
        return report

    def _solve_report(self, source: FormFile, solution: JetSolution, order: int, data: dict[str, Any]) -> Report:
        recorder = ClaimRecorder()
        recorder.check(
            "residual-valuation",
            "satisfying equation Delta_sigma sigma = eta on U",
            lambda: (solution.residual_valuation >= order - 1, f"valuation {solution.residual_valuation}"),
        )
        recorder.check("sigma-closed", "closed G2-structure sigma", lambda: solution.sigma.is_closed())
        recorder.check(
            "sigma-positive-at-origin",
            "sigma(p) is positive",
            lambda: G2Structure.from_form(solution.sigma).sign == 1,
        )
        recorder.check(
            "gauge-consistency",
            "the diffeomorphism maps solutions to solutions",
            lambda: (solution.gauge_consistent, f"gauged valuation {solution.gauged_valuation}"),
        )
        data["solution"] = solution.to_dict()
        digest = inputs_digest(source.dumps(), order, solution.field.tag)
        return Report("solve", solution.field.tag, digest, recorder.claims, data, recorder.timings)

    def _write_solution(self, out_dir: str, solution: JetSolution, report: Report) -> None:
        os.makedirs(out_dir, exist_ok=True)
        write_form_file(os.path.join(out_dir, SOLVE_OUTPUTS["sigma"]), solution.sigma)
        write_form_file(os.path.join(out_dir, SOLVE_OUTPUTS["gauge"]), solution.gauge)
        write_form_file(os.path.join(out_dir, SOLVE_OUTPUTS["residual"]), solution.residual)
        write_text_atomic(os.path.join(out_dir, SOLVE_OUTPUTS["report"]), report.to_json())
        logger.info(f"Solution written to {out_dir}")

    def util(
        self,
        operation: str,
        path: str,
        euclid: bool = False,
        s: Optional[str] = None,
        backend: Optional[str] = None,
    ) -> FormFile:
        """Apply star, metric, laplacian or dilate to the form in path."""
        if operation not in UTIL_OPERATIONS:
            raise ValueError(f"unknown util operation {operation!r}; choose from {', '.join(UTIL_OPERATIONS)}")
        a = read_form_file(path).form
        if backend and backend != a.field.tag:
            a = a.promote(field_from_tag(backend))
        if operation == "dilate":
            if s is None:
                raise ValueError("util dilate needs --s")
            return FormFile(a.dilate(a.field.parse(s)))
        if operation == "metric":
            return FormFile.from_metric(self._structure(a).metric)
        if euclid:
            metric = MetricJet.euclidean(a.field, a.order)
            result = hodge_star(metric, a) if operation == "star" else laplacian_euclid(a)
            return FormFile(result)
        structure = self._structure(a)
        return FormFile(structure.star(a) if operation == "star" else structure.laplacian)

    @staticmethod
    def _structure(a: Form) -> G2Structure:
        if a.degree != 3:
            raise FormDegreeError(f"the induced metric needs a 3-form, got degree {a.degree}; pass --euclid")
        return G2Structure.from_form(a)

    def write(self, value: FormFile, out_path: Optional[str]) -> str:
        """Write to out_path atomically, or return the text for stdout."""
        text = value.dumps()
        if out_path:
            write_form_file(out_path, value)
        return text


# Global orchestrator instance
orchestrator = CommandOrchestrator()
