"""Pytest configuration and fixtures."""

import random
import tempfile
from pathlib import Path

import pytest

from graphforms.graphs import w3_rim, wheel
from graphforms.storage import Cache


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def cache(temp_dir):
    """Create a cache instance in a temporary directory."""
    return Cache(base_path=temp_dir)


@pytest.fixture
def initialized_cache(cache):
    """Create and initialize a cache instance."""
    cache.init()
    return cache


@pytest.fixture
def w3():
    """Three-spoke wheel with spokes first."""
    return wheel(3)


@pytest.fixture
def w3_worked():
    """Three-spoke wheel with rim edges first, as in the worked Laplacian example."""
    return w3_rim()


@pytest.fixture
def rng():
    """Seeded random source for exact point checks."""
    return random.Random(0)
