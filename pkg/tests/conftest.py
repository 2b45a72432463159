import cmath
import math
import random

import pytest
from hypothesis import strategies as st

from cyclichyp.context import UnityContext


def rel(a, b) -> float:
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def polar(r, theta) -> complex:
    return r * cmath.exp(1j * theta)


# |z| log-uniform in [0.1, 3], any angle
moduli = st.floats(min_value=math.log(0.1), max_value=math.log(3.0)).map(math.exp)
angles = st.floats(min_value=0.0, max_value=2 * math.pi, exclude_max=True)
complexes = st.builds(polar, moduli, angles)
small_N = st.integers(min_value=2, max_value=7)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=[2, 3, 4, 5, 6, 7])
def ctx(request):
    return UnityContext(request.param)


# one line per acceptance criterion, echoed live and repeated at the end of the run
ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def accept(capsys):
    def record(number: int, ok: bool, detail: str):
        line = f"acceptance {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
