import contextlib

import pytest

_ACCEPTANCE: dict = {}


class _Record:
    def __init__(self):
        self.detail = ""


@pytest.fixture
def criterion():
    """Context manager recording PASS/FAIL for one acceptance criterion."""

    @contextlib.contextmanager
    def run(n: int, title: str):
        rec = _Record()
        try:
            yield rec
        except BaseException as exc:
            _ACCEPTANCE[n] = (title, False, rec.detail or f"{type(exc).__name__}: {exc}".splitlines()[0])
            print(f"criterion {n} ({title}): FAIL {rec.detail}")
            raise
        _ACCEPTANCE[n] = (title, True, rec.detail)
        print(f"criterion {n} ({title}): PASS {rec.detail}")

    return run


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'}  {detail}")
