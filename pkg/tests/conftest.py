"""
Shared pytest configuration.

Tests marked `slow` run experiment-scale checks (long simulations, training
runs, timing fits) and are skipped unless GVNN_RUN_SLOW=1.
"""

import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.getenv("GVNN_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set GVNN_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
