from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plopen import validate_complex, build_plmap
from plopen.generators import GenSpec, generate


@pytest.fixture(scope="session")
def identity_square():
    complex_ = validate_complex(
        [[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2], [0, 2, 3]], 2
    )
    return build_plmap(complex_, [[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture(scope="session")
def fold1d():
    return generate(GenSpec("fold1d", 1)).plmap


@pytest.fixture(scope="session")
def interior_fold1d():
    return generate(GenSpec("interior_fold1d", 1))


@pytest.fixture(scope="session")
def doubling2d():
    return generate(GenSpec("doubling2d", 2))
