from __future__ import annotations

import numpy as np
import pytest

from twolevel.model import Matrix2, build_matrix, params_at
from twolevel.sweep import fig1_presets


@pytest.fixture(scope="session")
def presets():
    return fig1_presets()


@pytest.fixture(scope="session")
def left(presets):
    return presets[0]


@pytest.fixture(scope="session")
def right(presets):
    return presets[1]


def matrix_at(traj, a: float) -> Matrix2:
    return build_matrix(params_at(traj, a))


def random_symmetric(rng: np.random.Generator, scale: float = 1.0) -> Matrix2:
    z = scale * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
    return Matrix2(z[0], z[1], z[1], z[2])


def random_general(rng: np.random.Generator, scale: float = 1.0) -> Matrix2:
    z = scale * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    return Matrix2(*z)


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    detail = dict(report.user_properties).get("summary", "")
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in sorted(_ACCEPTANCE.items(), key=lambda kv: int(kv[0].split("_")[2])):
        terminalreporter.write_line(f"{status}  {name}: {detail}")
