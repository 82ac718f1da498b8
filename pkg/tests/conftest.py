import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_admissible(n, ell, ubar, rng, amplitude=0.3):
    """Random smooth-ish field with its mean pinned exactly to ubar."""
    vals = rng.uniform(-amplitude, amplitude, n**3)
    vals += ubar - vals.mean()
    from okdrop.grid import Field3

    return Field3(n, ell, vals)


def zero_mean_direction(n, ell, rng):
    vals = rng.standard_normal(n**3)
    vals -= vals.mean()
    from okdrop.grid import Field3

    return Field3(n, ell, vals)
