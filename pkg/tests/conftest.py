import os

import numpy as np
import pytest

from laurent_mtr.dataset import load_csv

ENERGY_ENV = "LAURENT_MTR_ENERGY_CSV"
ENERGY_DEFAULT = os.path.join(os.path.dirname(__file__), os.pardir, "data", "ENB2012_data.csv")

_criteria = {}


def energy_path():
    return os.environ.get(ENERGY_ENV) or os.path.normpath(ENERGY_DEFAULT)


@pytest.fixture(scope="session")
def energy_csv():
    path = energy_path()
    if not os.path.exists(path):
        pytest.fail(f"Energy Efficiency data not found at {path}; set {ENERGY_ENV} or run "
                    "scripts/prepare_energy.py", pytrace=False)
    load_csv(path, ["Y1", "Y2"])
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = rep.failed or (rep.when == "call" and rep.outcome != "passed")
    prev = _criteria.get(number, (title, True))
    if rep.when == "call" or failed:
        _criteria[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
