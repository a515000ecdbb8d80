import numpy as np
import pytest

import gaugedrift as gd


@pytest.fixture(scope="session")
def z2():
    return gd.make_cyclic(2)


@pytest.fixture(scope="session")
def d3():
    return gd.make_dihedral(3)


@pytest.fixture(scope="session")
def z2_model(z2):
    return gd.two_link_plaquette(z2)


@pytest.fixture(scope="session")
def d3_model(d3):
    return gd.two_link_plaquette(d3)


@pytest.fixture(scope="session")
def z2_projector(z2_model):
    return gd.build_projector(z2_model)


@pytest.fixture(scope="session")
def d3_projector(d3_model):
    return gd.build_projector(d3_model)


@pytest.fixture(scope="session")
def z2_states():
    """The four named Z2 two-link states in the |00>,|01>,|10>,|11> basis."""
    s = 1.0 / np.sqrt(2.0)
    return {
        "0+": np.array([s, 0, 0, s], dtype=complex),
        "1+": np.array([0, s, s, 0], dtype=complex),
        "0-": np.array([s, 0, 0, -s], dtype=complex),
        "1-": np.array([0, s, -s, 0], dtype=complex),
    }
