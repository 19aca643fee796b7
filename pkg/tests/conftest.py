import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from greenvol.geometry import build_builtin_domain
from greenvol.volume import SourceData, build_operator


@pytest.fixture(scope="session")
def disk_mesh_n10():
    return build_builtin_domain("disk", 10, 1)


@pytest.fixture(scope="session")
def disk_mesh_n16():
    return build_builtin_domain("disk", 16, 1)


@pytest.fixture(scope="session")
def disk_operator_n0(disk_mesh_n10):
    return build_operator(disk_mesh_n10, 0.0, 0)


@pytest.fixture(scope="session")
def disk_operator_n2(disk_mesh_n10):
    return build_operator(disk_mesh_n10, 0.0, 2)


@pytest.fixture(scope="session")
def unit_source(disk_mesh_n10):
    return SourceData.from_function(disk_mesh_n10, lambda x, y: np.ones_like(x), 0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
