import os
import sys
from pathlib import Path

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core.models.graded_coordinate import CoordinateSystem
from core.models.symplectic import BVLaplacian, ConstantSymplectic

THEORIES = Path(ROOT) / "theories"


@pytest.fixture
def theories_dir():
    return THEORIES


@pytest.fixture
def mixed_system():
    """Two even and two odd coordinates."""
    return CoordinateSystem.from_specs([("x", 0), ("y", 0), ("xi", 1), ("eta", 1)])


@pytest.fixture
def bv_system():
    """A small odd cotangent bundle: fields x, c and their antifields."""
    return CoordinateSystem.from_specs([("x", 0), ("c", 1), ("xs", -1), ("cs", -2)])


@pytest.fixture
def bv_omega(bv_system):
    return ConstantSymplectic.from_darboux_pairs(bv_system, -1, [("x", "xs"), ("c", "cs")])


@pytest.fixture
def laplacian(bv_omega):
    return BVLaplacian(bv_omega)



def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long symbolic sweeps, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
