import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from secisac.prob_core import Alphabet, LabeledJoint  # noqa: E402


def make_joint(mass, names=None):
    mass = np.asarray(mass, dtype=float)
    names = names or [f"A{i}" for i in range(mass.ndim)]
    axes = [Alphabet(n, range(k)) for n, k in zip(names, mass.shape)]
    return LabeledJoint(axes, mass / mass.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
