import pytest

from synth import make_fixture

ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture(scope="session")
def synthetic_fixture(tmp_path_factory):
    root = tmp_path_factory.mktemp("synthetic")
    return make_fixture(root)


def record_criterion(name: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS[name] = "PASS" if passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{ACCEPTANCE_RESULTS[name]}  {name}")
