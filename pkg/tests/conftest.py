import json
import pathlib

import pytest

GOLDEN_PATH = pathlib.Path(__file__).with_name("golden_values.json")


@pytest.fixture(scope="session")
def golden():
    """mpmath reference values, regenerated by tests/oracles/generate_golden.py."""
    return json.loads(GOLDEN_PATH.read_text())


def rel_err(got, want):
    return abs(got - want) / max(abs(want), 1e-300)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
