"""Claim records and structured reports shared by verification suites and the solver."""

import hashlib
import json
import logging
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

from .. import __version__
from .errors import G2PoissonError

logger = logging.getLogger(__name__)


@dataclass
class Claim:
    """One checked statement with a stable id and the quote it is anchored to."""
    claim_id: str
    anchor: str
    passed: bool
    witness: Optional[str] = None
    informational: bool = False

    @property
    def status(self) -> str:
        if self.informational:
            return "info"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        data = {
            "id": self.claim_id,
            "anchor": self.anchor,
            "status": self.status,
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass
class Report:
    """Result document of a CLI command."""
    command: str
    backend: str
    inputs_digest: str
    claims: list[Claim] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims if not c.informational)

    @property
    def failed_claims(self) -> list[Claim]:
        return [c for c in self.claims if not c.informational and not c.passed]

    def extend(self, claims: list[Claim]) -> None:
        self.claims.extend(claims)

    def to_dict(self) -> dict[str, Any]:
        data = {
            "command": self.command,
            "backend": self.backend,
            "inputs_digest": self.inputs_digest,
            "claims": [c.to_dict() for c in self.claims],
            "passed": self.passed,
            "version": self.version,
        }
        if self.data:
            data["data"] = self.data
        if self.timings and timings_enabled():
            data["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def render_text(self) -> str:
        lines = [f"{self.command} [{self.backend}] g2_poisson {self.version}"]
        for claim in self.claims:
            lines.append(f"  {claim.status.upper():4}  {claim.claim_id}")
            if claim.witness and not claim.passed:
                lines.append(f"        witness: {claim.witness}")
        for key in sorted(self.data):
            lines.append(f"  {key}: {self.data[key]}")
        lines.append("PASSED" if self.passed else f"FAILED ({len(self.failed_claims)} claims)")
        return "\n".join(lines) + "\n"


def timings_enabled() -> bool:
    return os.getenv("G2_REPORT_TIMINGS", "").lower() in ("1", "true", "yes", "on")


def inputs_digest(*parts: Any) -> str:
    """sha256 over the textual form of the inputs."""
    digest = hashlib.sha256()
    for part in parts:
        digest.update(str(part).encode("utf-8"))
        digest.update(b"\0")
    return digest.hexdigest()


class ClaimRecorder:
    """Collects claims; a raised package error becomes a failing claim."""

    def __init__(self) -> None:
        self.claims: list[Claim] = []
        self.timings: dict[str, float] = {}

    def check(
        self,
        claim_id: str,
        anchor: str,
        fn: Callable[[], Any],
        informational: bool = False,
    ) -> Claim:
        """
        Evaluate one claim.

        Args:
            claim_id: Stable identifier of the claim
            anchor: Quote the claim refers to
            fn: Returns a bool, or a (bool, witness) pair
            informational: Record without affecting the verdict

        Returns:
            The recorded claim
        """
        started = time.perf_counter()
        try:
            outcome = fn()
            if isinstance(outcome, tuple):
                passed, witness = outcome
            else:
                passed, witness = bool(outcome), None
        except G2PoissonError as e:
            logger.warning(f"Claim {claim_id} raised {type(e).__name__}: {e}")
            passed, witness = False, f"{type(e).__name__}: {e}" + (f" [{e.witness}]" if e.witness else "")
        self.timings[claim_id] = time.perf_counter() - started
        claim = Claim(claim_id, anchor, bool(passed), None if passed and not informational else witness, informational)
        level = logging.INFO if passed or informational else logging.WARNING
        logger.log(level, f"Claim {claim_id}: {claim.status}")
        return self.add(claim)

    def add(self, claim: Claim) -> Claim:
        self.claims.append(claim)
        return claim

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        started = time.perf_counter()
        yield
        self.timings[stage] = time.perf_counter() - started
