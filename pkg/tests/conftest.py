import numpy as np
import pytest
from hypothesis import settings

from levydual.characteristics import FiniteAtoms, LevyTriplet, Truncation
from levydual.models.blackscholes import BlackScholesModel
from levydual.models.gh import GHModel
from levydual.models.merton import MertonModel, MertonParams

settings.register_profile("suite", deadline=None, max_examples=50,
                          derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def bs_margrabe():
    return BlackScholesModel([0.3, 0.2], [[1.0, 0.5], [0.5, 1.0]])


@pytest.fixture(scope="session")
def merton2():
    return MertonModel(MertonParams(sigma=[0.2, 0.3],
                                    corr=[[1.0, 0.5], [0.5, 1.0]],
                                    lam=[1.0, 1.0], tau=[1.0, 0.5]))


@pytest.fixture(scope="session")
def nig_model():
    return GHModel.martingale(-0.5, 5.0, [0.2, -0.1], 0.5, np.eye(2))


@pytest.fixture(scope="session")
def vg_model():
    return GHModel.martingale(1.2, 6.0, [0.3, -0.2], 0.0, np.eye(2))


@pytest.fixture(scope="session")
def bs3():
    return BlackScholesModel([0.2, 0.3, 0.3], np.eye(3))


@pytest.fixture(scope="session")
def merton3():
    return MertonModel(MertonParams(sigma=[0.2, 0.25, 0.3],
                                    corr=np.eye(3),
                                    lam=[1.1, 1.0, 0.9],
                                    tau=[0.25, 0.3, 0.35]))


@pytest.fixture(scope="session")
def atoms_triplet():
    """Two-asset compound Poisson with drift chosen to kill both e_i gaps."""
    jumps = FiniteAtoms(2, [[0.3, -0.1], [-0.2, 0.4]], [0.7, 0.5])
    drift = [-(0.7 * np.expm1(0.3) + 0.5 * np.expm1(-0.2)),
             -(0.7 * np.expm1(-0.1) + 0.5 * np.expm1(0.4))]
    return LevyTriplet(2, drift, np.zeros((2, 2)), jumps, Truncation.ZERO)
