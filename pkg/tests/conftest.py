import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from k3cert.quartic_surface import QuarticSurface


@pytest.fixture(scope="session")
def fermat():
    return QuarticSurface.fermat()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
