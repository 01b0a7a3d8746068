import os

# in-process broker/backend so the worker and API import without Redis
os.environ.setdefault("PROJCOUNT_BROKER_URL", "memory://")
os.environ.setdefault("PROJCOUNT_RESULT_BACKEND", "cache+memory://")

import pytest  # noqa: E402

from models.formula import parse_dimacs  # noqa: E402

# x1, x2, x3 -> 1, 2, 3 and y1, y2, y3 -> 4, 5, 6
EXAMPLE_CLAUSES = [
    [1, 2],
    [-2, 3],
    [-1, -2, -4],
    [1, -3, 4],
    [2, -3, 5],
    [1, -3, -5],
    [6, 2],
    [-6, -2, -3],
    [-6, 1],
    [-6, -5, 3],
    [6, 5, 2],
]

X1, X2, X3, Y1, Y2, Y3 = 1, 2, 3, 4, 5, 6


def example_dimacs(show=(1, 2, 3)) -> str:
    lines = ["c running example"]
    if show is not None:
        lines.append("c p show %s 0" % " ".join(map(str, show)))
    lines.append("p cnf 6 %d" % len(EXAMPLE_CLAUSES))
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in EXAMPLE_CLAUSES)
    return "\n".join(lines) + "\n"


@pytest.fixture
def example_text():
    return example_dimacs()


@pytest.fixture
def example():
    """Running example with X = {y1, y2, y3}."""
    return parse_dimacs(example_dimacs())


@pytest.fixture
def example_unprojected():
    return parse_dimacs(example_dimacs(show=None))


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.cnf"
    path.write_text(example_dimacs())
    return path
