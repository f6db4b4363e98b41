import numpy as np
import pytest

from retbeam.kernels import make_kernel_set
from retbeam.presets import make_preset
from retbeam.solver import SolverOptions, sweep_rho

EXAMPLE_RHOS = tuple(np.geomspace(0.1, 10.0, 10))


@pytest.fixture(params=[0, 1, 2, 3], ids=lambda j: f"j{j}")
def ks(request):
    return make_kernel_set(request.param)


@pytest.fixture(scope="session")
def example41():
    return make_preset("example41")


@pytest.fixture(scope="session")
def example41_sweep(example41):
    return sweep_rho(example41, EXAMPLE_RHOS, SolverOptions())
