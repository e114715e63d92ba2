import time
from dataclasses import replace

import pytest

from udwghost.kinematics import Detector, Inertial, ModelConfig, Rindler
from udwghost.quadrature import QuadratureSpec
from udwghost.runner import evaluate, evaluate_sweep, row_from_evaluation
from udwghost.scenario import load_scenario
from udwghost.spdc import SpdcConfig

# cheap rule for algebraic checks where both sides share the quadrature
COARSE = QuadratureSpec(radial_nodes=32, angular_nodes=16, error_estimate=False)


@pytest.fixture(scope="session")
def cfg():
    return ModelConfig()


@pytest.fixture(scope="session")
def spdc():
    return SpdcConfig()


@pytest.fixture(scope="session")
def pair():
    return (Detector(worldline=Inertial((1.0, 0.0, 0.0))), Detector(worldline=Inertial((-1.0, 0.0, 0.0))))


@pytest.fixture(scope="session")
def triple():
    return (
        Detector(lam=0.7, omega=1.3, worldline=Inertial((1.0, 0.2, 0.0))),
        Detector(lam=1.1, omega=0.4, worldline=Inertial((-1.0, 0.0, 0.3))),
        Detector(lam=0.9, omega=2.0, worldline=Rindler(1.5, (0.1, 0.0))),
    )


@pytest.fixture(scope="session")
def presets():
    return {name: load_scenario(name) for name in ("table1", "table2", "table3")}


@pytest.fixture(scope="session")
def evaluations(presets):
    """Default-rule evaluation of every preset at its register tau, with wall time."""
    out = {}
    for name, s in presets.items():
        t0 = time.perf_counter()
        ev = evaluate(s)
        row = row_from_evaluation(s, ev)
        out[name] = (ev, row, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def table3_sweep(presets):
    """The default table3 sweep: (evaluations, rows, wall time)."""
    s = presets["table3"]
    t0 = time.perf_counter()
    evs = evaluate_sweep(s)
    rows = [row_from_evaluation(s, ev) for ev in evs]
    return evs, rows, time.perf_counter() - t0


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def refined(s):
    return replace(s, quadrature=replace(s.quadrature.refined(), error_estimate=False))
