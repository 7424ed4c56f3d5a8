"""Session fixtures: expensive builds are made once and timed.

The timing dict lets acceptance tests assert runtime budgets that include
the build cost of whatever they were first to request.
"""

import json
import os
import time

import pytest

from icopack.icosa import standard_cluster
from icopack.msm import build_scheme, generate_msm
from icopack.qfield import GN
from icopack.strip import generate_strip
from icopack.superspace import build_superspace

RADIUS_25 = GN(25)


@pytest.fixture(scope="session")
def timings():
    return {}


@pytest.fixture(scope="session")
def goldens():
    path = os.environ.get("ICOSA_MCMS_SEEDED_GOLDENS") or os.path.join(
        os.path.dirname(__file__), "goldens.json"
    )
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture(scope="session")
def data6(timings):
    t0 = time.monotonic()
    data = build_superspace(standard_cluster(6))
    timings["data6_build"] = time.monotonic() - t0
    return data


@pytest.fixture(scope="session")
def data16(timings):
    t0 = time.monotonic()
    data = build_superspace(standard_cluster(16))
    timings["data16_build"] = time.monotonic() - t0
    return data


@pytest.fixture(scope="session")
def data31(timings):
    t0 = time.monotonic()
    data = build_superspace(standard_cluster(31))
    timings["data31_build"] = time.monotonic() - t0
    return data


@pytest.fixture(scope="session")
def scheme6(data6, timings):
    t0 = time.monotonic()
    scheme = build_scheme(data6)
    timings["scheme6_build"] = time.monotonic() - t0
    return scheme


@pytest.fixture(scope="session")
def scheme16(data16, timings):
    t0 = time.monotonic()
    scheme = build_scheme(data16)
    timings["scheme16_build"] = time.monotonic() - t0
    return scheme


def _timed(timings, key, fn):
    t0 = time.monotonic()
    result = fn()
    timings[key] = time.monotonic() - t0
    return result


@pytest.fixture(scope="session")
def strip6_r25(data6, timings):
    return _timed(
        timings, "strip6_r25",
        lambda: generate_strip(data6, RADIUS_25, mode="exhaustive"),
    )


@pytest.fixture(scope="session")
def bfs6_r25(data6, timings):
    return _timed(
        timings, "bfs6_r25", lambda: generate_strip(data6, RADIUS_25, mode="bfs")
    )


@pytest.fixture(scope="session")
def msm6_r25(scheme6, timings):
    return _timed(
        timings, "msm6_r25", lambda: generate_msm(scheme6, RADIUS_25)
    )


@pytest.fixture(scope="session")
def strip16_r25(data16, timings):
    return _timed(
        timings, "strip16_r25",
        lambda: generate_strip(data16, RADIUS_25, mode="exhaustive"),
    )


@pytest.fixture(scope="session")
def bfs16_r25(data16, timings):
    return _timed(
        timings, "bfs16_r25",
        lambda: generate_strip(data16, RADIUS_25, mode="bfs"),
    )


@pytest.fixture(scope="session")
def msm16_r25(scheme16, timings):
    return _timed(
        timings, "msm16_r25", lambda: generate_msm(scheme16, RADIUS_25)
    )
