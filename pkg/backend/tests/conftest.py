"""
Shared fixtures: one service graph per session, built from explicit settings.
"""
from pathlib import Path

import numpy as np
import pytest

from src.config import CliSettings
from src.models.exponent import CauchyExponent, GaussianExponent, LaplaceExponent
from src.models.spectrum import GroupSpectrum
from src.services.command_service import CommandService

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def settings():
    return CliSettings()


@pytest.fixture(scope="session")
def services(settings):
    return CommandService(settings)


@pytest.fixture(scope="session")
def spectrum_service(services):
    return services.spectrum_service


@pytest.fixture(scope="session")
def exponent_service(services):
    return services.exponent_service


@pytest.fixture(scope="session")
def series_service(services):
    return services.series_service


@pytest.fixture(scope="session")
def measure_service(services):
    return services.measure_service


@pytest.fixture(scope="session")
def kernel_service(services):
    return services.kernel_service


@pytest.fixture(scope="session")
def operator_service(services):
    return services.operator_service


@pytest.fixture(scope="session")
def asymptotics_service(services):
    return services.asymptotics_service


@pytest.fixture(scope="session")
def selfcheck_service(services):
    return services.selfcheck_service


@pytest.fixture
def su2():
    return GroupSpectrum.su2()


@pytest.fixture
def so3():
    return GroupSpectrum.so3()


@pytest.fixture
def circle():
    return GroupSpectrum.torus(1)


@pytest.fixture
def cauchy():
    return CauchyExponent(sigma=1.0)


@pytest.fixture
def heat():
    return GaussianExponent(variance=1.0)


@pytest.fixture
def laplace():
    return LaplaceExponent(beta=1.0)


@pytest.fixture
def su3_path():
    return str(FIXTURES / "su3.csv")


@pytest.fixture
def su3(spectrum_service, su3_path):
    return spectrum_service.load_spectrum_file(su3_path)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
