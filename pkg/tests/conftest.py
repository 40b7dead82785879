import contextlib

import pytest

# criterion number -> (title, passed, detail); filled by the acceptance tests
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def record(number, title):
        info = {"detail": ""}
        try:
            yield info
        except BaseException:
            ACCEPTANCE[number] = (title, False, info["detail"])
            raise
        ACCEPTANCE[number] = (title, True, info["detail"])

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}" + (f"  [{detail}]" if detail else ""))
