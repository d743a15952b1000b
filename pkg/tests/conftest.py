"""Shared instances and helpers for the test suite."""

import json

import pytest

from cvrptw_gas.instance import parse_instance, six_customer_example


def make_instance(doc: dict):
    return parse_instance(json.dumps(doc))


@pytest.fixture(scope="session")
def example6():
    return six_customer_example()


@pytest.fixture(scope="session")
def cap_bound3():
    """n=3, capacity binds (two demands of 2 against capacity 3), no windows."""
    return make_instance(
        {
            "n": 3,
            "c_max": 3,
            "distance": [[0, 3, 4, 5], [3, 0, 2, 4], [4, 2, 0, 3], [5, 4, 3, 0]],
            "demands": [2, 2, 1],
        }
    )


@pytest.fixture(scope="session")
def window_bound3():
    """n=3, loose capacity but binding delivery windows."""
    return make_instance(
        {
            "n": 3,
            "c_max": 7,
            "distance": [[0, 3, 5, 2], [3, 0, 2, 4], [5, 2, 0, 3], [2, 4, 3, 0]],
            "demands": [1, 1, 1],
            "windows": [[0, 6], [4, 9], [0, 12]],
        }
    )


@pytest.fixture(scope="session")
def mixed4():
    """n=4 with both capacity and windows binding."""
    return make_instance(
        {
            "n": 4,
            "c_max": 4,
            "distance": [
                [0, 5, 7, 3, 9],
                [5, 0, 4, 6, 2],
                [7, 4, 0, 8, 5],
                [3, 6, 8, 0, 4],
                [9, 2, 5, 4, 0],
            ],
            "demands": [2, 1, 3, 2],
            "windows": [[0, 20], [3, 10], [0, 25], [5, 18]],
        }
    )


@pytest.fixture(scope="session")
def vacuous3():
    """n=3 with every constraint slack: all 3! * 2^2 well-formed assignments feasible."""
    return make_instance(
        {
            "n": 3,
            "c_max": 7,
            "distance": [[0, 3, 4, 5], [3, 0, 2, 4], [4, 2, 0, 3], [5, 4, 3, 0]],
            "demands": [2, 1, 2],
        }
    )


def random_instance(rng, n, with_windows):
    """A small random instance; always keeps single-customer routes feasible."""
    side = n + 1
    D = [[0 if i == j else rng.randint(1, 9) for j in range(side)] for i in range(side)]
    c_max = rng.randint(3, 6)
    demands = [rng.randint(1, c_max) for _ in range(n)]
    doc = {"n": n, "c_max": c_max, "distance": D, "demands": demands}
    if with_windows:
        windows = []
        for i in range(1, side):
            earliest = max(0, D[0][i] - rng.randint(0, 3))
            windows.append([earliest, D[0][i] + rng.randint(2, 25)])
        doc["windows"] = windows
    return make_instance(doc)
