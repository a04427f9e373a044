import numpy as np
import pytest

from ququart_mub.mub import family_build


@pytest.fixture(scope="session")
def fam1():
    return family_build(1)


@pytest.fixture(scope="session")
def fam2():
    return family_build(2)


def hs_dist(a, b):
    d = np.asarray(a) - np.asarray(b)
    return float(np.sqrt(np.einsum("ij,ji->", d, d.conj().T).real))


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
