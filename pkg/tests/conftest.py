import pytest

ACCEPTANCE = []


def record(number, name, passed, detail=""):
    ACCEPTANCE.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE):
        tag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{tag}] {number:>2}. {name} {detail}".rstrip())


@pytest.fixture
def f7():
    from crgc.gf import PrimeField
    return PrimeField(7)
