from __future__ import annotations

import math

import pytest

from fourier_gap import dual, explicit


@pytest.fixture(scope="session")
def zeros():
    return explicit.load_zeros()


@pytest.fixture(scope="session")
def psi_series():
    return dual.fourier_coeffs(dual.default_profile(), 2000)


@pytest.fixture(scope="session")
def psi_witness(psi_series):
    return dual.build_psi(series=psi_series)


@pytest.fixture(scope="session")
def psi_example_witness():
    return dual.build_psi_example()


# ---------------------------------------------------------------- acceptance log

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion as PASS/FAIL, then assert it."""

    def record(number: int, title: str, checks: dict[str, bool], detail: str = "") -> None:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {number:2d}: {title}"
        if detail:
            line += f" | {detail}"
        if failed:
            line += f" | failed: {', '.join(failed)}"
        _LINES[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
    passed = sum(1 for v in _LINES.values() if v.startswith("[PASS]"))
    terminalreporter.write_line(f"{passed}/{len(_LINES)} criteria pass")


