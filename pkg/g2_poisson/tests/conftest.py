"""Test configuration and fixtures for g2_poisson tests."""

import random
from fractions import Fraction

import pytest

from g2_poisson.services.forms import Form
from g2_poisson.services.g2 import G2Structure, sigma_can
from g2_poisson.services.jets import Jet
from g2_poisson.services.scalars import RATIONAL


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow end-to-end tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: order-6 solves and other long exact runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded generator for randomized cases."""
    return random.Random(20240607)


@pytest.fixture
def field():
    """Exact rational backend."""
    return RATIONAL


@pytest.fixture
def canonical_form():
    """sigma_can stored at order 4."""
    return sigma_can(RATIONAL, 4)


@pytest.fixture
def canonical_structure(canonical_form):
    """The flat G2-structure."""
    return G2Structure.closed(canonical_form)


@pytest.fixture
def sample_three_form():
    """e^{123} + 1/2 x_1 e^{145} at order 3."""
    x1 = Jet.variable(RATIONAL, 3, 1).scale(Fraction(1, 2))
    return Form.basis(RATIONAL, 3, (1, 2, 3)) + Form.from_components(RATIONAL, 3, 3, [((1, 4, 5), x1)])
