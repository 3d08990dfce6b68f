import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wbgrp import BurgersModel
from wbgrp.bfe import BFEModel, Constant, TubeLaw, VesselProfile, gravity_profile, taper

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LENGTH = 10.0
S1 = dict(A0=0.24, h0=0.05, Ee=3.6e6, Ec=9e8)


def s1_profile(gravity=None, law: TubeLaw | None = None, **kw) -> VesselProfile:
    g = Constant(981.0) if gravity is None else gravity
    return VesselProfile(LENGTH, Constant(S1["A0"]), Constant(S1["h0"]), Constant(S1["Ee"]),
                         Constant(S1["Ec"]), Constant(0.0), g, law=law or TubeLaw(), **kw)


def tapered_profile(gravity) -> VesselProfile:
    return VesselProfile(LENGTH, taper(S1["A0"], LENGTH), taper(S1["h0"], LENGTH),
                         taper(S1["Ee"], LENGTH), taper(S1["Ec"], LENGTH), Constant(0.0), gravity)


def polyline_gravity():
    xs = np.linspace(0.0, LENGTH, 13)
    return gravity_profile("polyline", (xs, 981.0 * np.sin(np.arange(13) * np.pi / 4)), LENGTH)


@pytest.fixture(scope="session")
def burgers():
    return BurgersModel()


@pytest.fixture(scope="session")
def s1():
    return BFEModel(s1_profile())


@pytest.fixture(scope="session", params=["constant", "smooth", "polyline"])
def bfe_any_gravity(request):
    kind = request.param
    if kind == "constant":
        return BFEModel(s1_profile())
    if kind == "smooth":
        return BFEModel(tapered_profile(gravity_profile("smooth", 981.0, LENGTH)))
    return BFEModel(tapered_profile(polyline_gravity()))


def rest_state(model: BFEModel, x: float, area_ratio: float = 1.0, q: float = 0.0, psi: float = 0.0):
    Q = np.zeros(8)
    Q[3:] = model.parameters_at([x])[0]
    Q[0] = area_ratio * Q[3]
    Q[1] = q
    Q[2] = psi
    return Q


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
