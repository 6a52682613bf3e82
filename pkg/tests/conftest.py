from functools import lru_cache

import pytest

from nilgrowth.recop import example_gallery


@lru_cache(maxsize=None)
def _indices(name: str, N: int):
    return tuple(example_gallery(name).nilpotence_indices(N))


@pytest.fixture(scope="session")
def nil_indices():
    """``nil_indices(name, N)``: cached ``N_T(y^n)`` for a gallery operator, ``n <= N``."""
    return _indices


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """``acceptance(number, passed, detail)``: record one criterion line for the summary."""
    def record(number, passed, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if passed is True else 'FAIL' if passed is False else passed} {detail}"
        _ACCEPTANCE[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
