import json
import math
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

HERE = os.path.dirname(__file__)


@pytest.fixture(scope="session")
def oracle():
    with open(os.path.join(HERE, "oracle", "oracle.json")) as fh:
        return json.load(fh)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sweep_alphas(x0, steps=30, alpha_max=5.0):
    """steps alpha values strictly above the threshold ln2/x0, ending at alpha_max."""
    import numpy as np
    return [float(a) for a in np.linspace(math.log(2.0) / x0, alpha_max, steps + 1)[1:]]


@pytest.fixture(scope="session")
def sweep_points():
    """(eta_ng, eta_nc) over x0 in {1,2,3} at sweep-grade tolerance."""
    from dmorse import cli
    from dmorse.specfun import SpecFunOptions
    from dmorse.wigner import NU_TOL_FAST
    s = cli.Settings(SpecFunOptions(), NU_TOL_FAST, 64)
    pts = [(x0, a) for x0 in (1.0, 2.0, 3.0) for a in sweep_alphas(x0)]
    rows = cli.evaluate(cli.nc_vs_ng_row, pts, s)
    return [(r["eta_ng"], r["eta_nc"]) for r in rows if r["converged"]]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
