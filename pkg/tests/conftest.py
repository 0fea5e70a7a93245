import pytest

# criterion number -> (passed, label, detail), filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, label, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{number}] {status}  {label}: {detail}")
