# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Fixtures for the lab tests."""

import numpy as np
import pytest


def pytest_addoption(parser):
    """Parse additional pytest options.

    Args:
        parser: Pytest parser.
    """
    parser.addoption(
        "--acceptance",
        action="store_true",
        default=False,
        help="Also run the property suites at acceptance scale. Takes several minutes.",
    )


def pytest_collection_modifyitems(config, items):
    """Skip the slow tests unless acceptance runs were requested.

    Args:
        config: Pytest config.
        items: Collected tests.
    """
    if config.getoption("--acceptance"):
        return
    skip_slow = pytest.mark.skip(reason="needs --acceptance")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(name="rng")
def rng_fixture():
    """Return a seeded random generator."""
    return np.random.default_rng(20250219)
