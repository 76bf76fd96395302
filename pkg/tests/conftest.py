import os

import pytest
from hypothesis import HealthCheck, settings

from uhog.config import configure, restore
from uhog.dsl import bundled, load_grammar

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("UHOG_HYPOTHESIS", "default"))


@pytest.fixture(scope="session")
def core():
    return load_grammar(bundled("english-core"))


@pytest.fixture(scope="session")
def ctxg():
    return load_grammar(bundled("english-context"))


@pytest.fixture
def engine():
    """Temporarily reconfigure the engine inside one test."""
    saved = []

    def set_(**kw):
        saved.append(configure(**kw))

    yield set_
    if saved:
        restore(saved[0])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
