import math

import numpy as np
import pytest

from kitwpa import tline

TAU = 2 * math.pi
F_PUMP = 8e9
BASE = tline.UnitCell(100e-12, 40e-15, i_star=1e-3)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def base_cell():
    return BASE


@pytest.fixture(scope="session")
def design_unbiased():
    return tline.design_loading(TAU * F_PUMP, BASE, tline.DesignConstraints())


@pytest.fixture(scope="session")
def design_biased():
    return tline.design_loading(TAU * F_PUMP, BASE, tline.DesignConstraints(dc_bias=0.3e-3))


@pytest.fixture(scope="session")
def biased_dispersion(design_biased):
    spec = design_biased.spec
    return tline.bloch_dispersion(spec, np.linspace(0.005, 3.5, 20000) * TAU * F_PUMP)


@pytest.fixture
def acceptance():
    """Record and print one pass/fail line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
