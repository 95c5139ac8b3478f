import numpy as np
import pytest

from qdct_rdh.block_model import Macroblock

# Fig. 2 vectors of the worked example and their marked form after '110'
FIG2 = [
    [19, 0, 0, 8, 8, 4, 0, 0, 0, 0, 0, 0, 0, -1, 0, 1],
    [-7, 0, 0, 0, 0, 3, 0, 0, 0, -1, 1, 0, 1, -1, 0, 0],
    [1, 0, -1, 0, 1, 0, 0, -1, 0, -1, 1, 0, 0, 0, 0, 0],
    [-7, 0, 1, 1, 1, -2, 0, 0, -1, 0, -1, 0, -1, 0, 0, 0],
]
FIG5 = [
    [19, 0, 0, 8, 8, 4, 0, 0, 0, 0, 0, 0, 0, -1, 0, 2],
    [-7, 0, 0, 0, 0, 3, 0, 0, 0, -1, 1, 0, 1, -1, 0, 1],
    [1, 0, -1, 0, 1, 0, 0, -1, 0, -1, 1, 0, 0, 0, 0, -1],
    [-7, 0, 1, 1, 1, -2, 0, 0, -1, 0, -1, 0, -1, 0, 0, 0],
]

# Seven zero AC15 candidates and one nonzero AC15 among eight coded blocks;
# the other eight blocks of the macroblock are all-zero.
FIG4_AC15 = [0, 0, 3, 0, 0, 0, 0, 0]


def fig4_vectors():
    rows = []
    for k, ac in enumerate(FIG4_AC15):
        v = [0] * 16
        v[0] = 10 + k
        v[3] = (-1) ** k
        v[15] = ac
        rows.append(v)
    return rows


@pytest.fixture
def fig2_mb():
    return Macroblock.from_vectors(FIG2)


@pytest.fixture
def fig5_mb():
    return Macroblock.from_vectors(FIG5)


@pytest.fixture
def fig4_mb():
    return Macroblock.from_vectors(fig4_vectors())


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
