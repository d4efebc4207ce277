# tests/conftest.py
import random

import pytest

from denjoy_invariants.data_loader import build_action, load_action_spec


@pytest.fixture(scope="session")
def d2_action():
    return build_action(load_action_spec("denjoy_d2.json"))


@pytest.fixture(scope="session")
def d1_action():
    return build_action(load_action_spec("denjoy_d1.json"))


@pytest.fixture(scope="session")
def two_orbit_action():
    return build_action(load_action_spec("denjoy_d2_two_orbits.json"))


@pytest.fixture(scope="session")
def minimal_action():
    return build_action(load_action_spec("minimal_d2.json"))


@pytest.fixture(scope="session")
def finite_action():
    return build_action(load_action_spec("finite_orbit.json"))


@pytest.fixture
def rng():
    return random.Random(20240607)
