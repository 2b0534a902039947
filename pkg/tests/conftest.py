import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# filled by tests/test_acceptance.py: criterion -> (status, detail)
ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def karate():
    from entropic import datasets

    return datasets.karate()


@pytest.fixture(scope="session")
def karate_model(karate):
    from entropic.centrality import model_for

    return model_for(karate[0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"[{status}] {name}: {detail}")
