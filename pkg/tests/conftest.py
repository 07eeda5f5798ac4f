import pytest

from sisfront.model import constant_example, reference_example

#: filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def reference_spec():
    return reference_example()


@pytest.fixture
def const_spec():
    return constant_example()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
