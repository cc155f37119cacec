import numpy as np
import pytest

from pltelm import kernels
from pltelm.harness import FIXTURES

BACKENDS = [kernels.numpy_backend]
if kernels.numba_backend is not None:
    BACKENDS.append(kernels.numba_backend)


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit("_", 1)[-1])
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def random_well_conditioned(rng, n):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    s = np.geomspace(1.0, 1e3, n)
    return (q * s) @ q.T + rng.normal(scale=1e-3, size=(n, n))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
