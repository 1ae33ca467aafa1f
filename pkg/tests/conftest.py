import numpy as np
import pytest

from rabi2p.model import EVEN_PLUS, ModelParams
from rabi2p.oracle import eigenvalues


@pytest.fixture(scope="session")
def fig_params():
    """The parameter point used throughout the cross-backend checks."""
    return ModelParams(omega=2.5, delta=0.7)


@pytest.fixture(scope="session")
def oracle_even_plus(fig_params):
    rep = eigenvalues(fig_params, EVEN_PLUS, e_cut=26.0)
    assert rep.converged
    return np.array(rep.energies)
