import sys

import pytest

from jacobiharm.specfun import JacobiParams
from jacobiharm.transform import default_corpus, default_plan

_PLANS = {}
_CORPORA = {}


def shared_plan(alpha, beta):
    """One plan per parameter pair for the whole session (plans memoize Jacobi values)."""
    key = (alpha, beta)
    if key not in _PLANS:
        _PLANS[key] = default_plan(JacobiParams(alpha, beta))
    return _PLANS[key]


def shared_corpus(alpha, beta):
    key = (alpha, beta)
    if key not in _CORPORA:
        _CORPORA[key] = default_corpus(shared_plan(alpha, beta))
    return _CORPORA[key]


@pytest.fixture(scope="session")
def plan_10():
    return shared_plan(1.0, 0.0)


@pytest.fixture(scope="session")
def plan_2h():
    return shared_plan(2.0, 0.5)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = [] if module is None else [module.RESULTS[name] for name, _ in module.CRITERIA if name in module.RESULTS]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
