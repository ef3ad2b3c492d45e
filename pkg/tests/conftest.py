import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from lattice import LatticeSpec  # noqa: E402
from models import ModelKind, ModelSpec  # noqa: E402
from scaling import sweep  # noqa: E402


@pytest.fixture
def chain8():
    return LatticeSpec.chain(8)


@pytest.fixture
def chain10():
    return LatticeSpec.chain(10)


@pytest.fixture(scope="session")
def chain100():
    return LatticeSpec.chain(100)


@pytest.fixture(scope="session")
def chain400():
    return LatticeSpec.chain(400)


@pytest.fixture(scope="session")
def square61():
    return LatticeSpec.square(61)


@pytest.fixture(scope="session")
def local_curve_400(chain400):
    return sweep(ModelSpec(ModelKind.LOCAL_HOPPING), chain400, range(1, 201))


@pytest.fixture(scope="session")
def compact_cos_curves_400(chain400):
    """CompactCos S(L) for L = 1..200 at the alphas of the crossover family."""
    return {alpha: sweep(ModelSpec(ModelKind.COMPACT_COS, alpha=alpha), chain400, range(1, 201))
            for alpha in (10.0, 30.0, 50.0)}


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config dict to a JSON file and return its path."""
    def write(data, name="experiment.cfg"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
