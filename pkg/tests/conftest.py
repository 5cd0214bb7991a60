import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modekit import emd  # noqa: E402
from modekit.experiments import two_tone_reference  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # load (or compile) the numba kernels once, outside any timed section
    emd(np.sin(np.linspace(0, 20, 64)))


@pytest.fixture(scope="session")
def two_tone():
    """(signal, 5 Hz component, 40 Hz component), 2048 samples at 400 Hz."""
    return two_tone_reference()


def sine(freq=5.0, fs=400.0, n=1024, offset=0.0):
    return np.sin(2 * np.pi * freq * np.arange(n) / fs) + offset
