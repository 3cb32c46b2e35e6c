import pytest

from latsched import LatencyConstraint, TaskGraph

LADDER_EDGES = [
    ("t1", "t2"), ("t2", "t3"), ("t3", "t4"), ("t4", "t5"), ("t5", "t6"), ("t6", "t7"),
    ("t1", "t8"), ("t8", "t9"), ("t9", "t4"), ("t5", "t10"), ("t10", "t7"),
    ("t2", "t11"), ("t11", "t4"), ("t11", "t6"),
]

LADDER_PATHS = [
    ("t1", "t2", "t3", "t4", "t5", "t6", "t7"),
    ("t1", "t8", "t9", "t4", "t5", "t6", "t7"),
    ("t1", "t2", "t3", "t4", "t5", "t10", "t7"),
    ("t1", "t8", "t9", "t4", "t5", "t10", "t7"),
    ("t1", "t2", "t11", "t4", "t5", "t6", "t7"),
    ("t1", "t2", "t11", "t4", "t5", "t10", "t7"),
    ("t1", "t2", "t11", "t6", "t7"),
]

# two diamond-like constraint regions linked in both directions
CROSS_EDGES = [
    ("t1", "t2"), ("t2", "t3"), ("t3", "t4"), ("t1", "t5"), ("t5", "t6"), ("t6", "t4"),
    ("t9", "t10"), ("t10", "t11"), ("t9", "t7"), ("t7", "t8"), ("t8", "t11"),
    ("t2", "t10"), ("t7", "t3"),
]


@pytest.fixture
def ladder():
    return TaskGraph.from_edges(LADDER_EDGES)


@pytest.fixture
def ladder_constraint():
    return LatencyConstraint("t1", "t7", 9)


@pytest.fixture
def cross():
    g = TaskGraph.from_edges(CROSS_EDGES)
    return g, LatencyConstraint("t1", "t4", 10), LatencyConstraint("t9", "t11", 10)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    """Keep one verdict line per acceptance criterion for the session summary."""
    line = f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
