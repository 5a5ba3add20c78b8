import numpy as np
import pytest

from swarm_app.core.env import Environment, build_chain, load_environment, load_overlay
from swarm_app.core.spectral import decompose
from swarm_app.utils.resources import get_resource_path


def line_modes(n):
    """Analytic right eigenvectors of the line chain, L1-normalized, ordered like decompose()"""
    stationary = np.ones(n)
    stationary[[0, -1]] = 0.5
    j = np.arange(n)
    modes = []
    for k in range(n):
        value = 0.2 + 0.8 * np.cos(k * np.pi / (n - 1))
        vector = stationary * np.cos(k * np.pi * j / (n - 1))
        modes.append((value, vector / np.abs(vector).sum()))
    modes.sort(key=lambda pair: (-round(abs(pair[0]), 12), -round(pair[0], 12)))
    return modes


@pytest.fixture(scope='session')
def line5():
    return Environment.line(5)


@pytest.fixture(scope='session')
def line5_chain(line5):
    return build_chain(line5)


@pytest.fixture(scope='session')
def line5_basis(line5_chain):
    return decompose(line5_chain)


@pytest.fixture(scope='session')
def line20():
    return Environment.line(20)


@pytest.fixture(scope='session')
def line20_chain(line20):
    return build_chain(line20)


@pytest.fixture(scope='session')
def line20_basis(line20_chain):
    return decompose(line20_chain)


@pytest.fixture(scope='session')
def arrow_env():
    return load_environment(get_resource_path('maps/arrow_env.txt'))


@pytest.fixture(scope='session')
def arrow_chain(arrow_env):
    return build_chain(arrow_env)


@pytest.fixture(scope='session')
def arrow_basis(arrow_chain):
    return decompose(arrow_chain)


@pytest.fixture(scope='session')
def arrow_mask(arrow_env):
    return load_overlay(get_resource_path('maps/arrow_shape.txt'), arrow_env)


@pytest.fixture(scope='session')
def open_env():
    return load_environment(get_resource_path('maps/open_env.txt'))


@pytest.fixture(scope='session')
def annulus_mask(open_env):
    return load_overlay(get_resource_path('maps/annulus_shape.txt'), open_env)
