"""Base suite interface for verification runs."""

from typing import Any, Protocol

from ..services.reports import Claim


class Suite(Protocol):
    """Protocol defining the interface for all verification suites."""

    name: str
    description: str

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        """
        Run the suite.

        Args:
            seed: Seed of the random.Random driving randomized cases
            order: Truncation order the suite works at
            backend: Scalar field of the computation
            **kwargs: Additional suite-specific parameters

        Returns:
            Claims in a deterministic order
        """
        ...


class BaseSuite:
    """Base implementation for verification suites."""

    def __init__(self, name: str, description: str, default_order: int):
        self.name = name
        self.description = description
        self.default_order = default_order

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        """Default implementation raises NotImplementedError."""
        raise NotImplementedError(f"Suite {self.name} must implement run method")
