import pytest

from quartileloc.geometry import paper_scenario
from quartileloc.propagation import GenerationSpec, LogNormalParams, generate_dataset


@pytest.fixture(scope="session")
def scenario():
    return paper_scenario()


@pytest.fixture(scope="session")
def noiseless(scenario):
    params = LogNormalParams(shadowing_sigma=0.0)
    train = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=1))
    test = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=2))
    return train, test


@pytest.fixture(scope="session")
def noisy(scenario):
    params = LogNormalParams(shadowing_sigma=3.0)
    train = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=11))
    test = generate_dataset(GenerationSpec(scenario, params, 20, 10, seed=12))
    return train, test


# acceptance criteria register their outcome here; printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
