import math

import pytest

from atomchip.domain import RB87, RHO_AU_300K, ConductivityTensor, WireGeometry

MU_K = 1.380649e-23 * 1e-6


@pytest.fixture
def gold():
    return ConductivityTensor.isotropic(1 / RHO_AU_300K)


@pytest.fixture
def rb87():
    return RB87


@pytest.fixture
def nanowire():
    return WireGeometry(50e-9, 50e-9, 1e-3)


def rel(a, b):
    return abs(a - b) / abs(b)


def loglog_slope(x, y):
    import numpy as np

    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion at the end of the run

ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def criterion():
    """``criterion(number, part, ok, detail)`` records one checked part of an acceptance criterion."""

    def record(number: int, part: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE.setdefault(number, []).append((part, bool(ok), detail))
        print(f"criterion {number} [{part}]: {'PASS' if ok else 'FAIL'} ({detail})")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAILED'}, {text}" for name, good, text in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
