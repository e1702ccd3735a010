import json
from pathlib import Path

import pytest
from hypothesis import settings

from aqcknap.knapcore import KnapsackInstance, validate_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"

# greedy-vs-optimum example with 7 items
P7 = (6, 5, 8, 9, 6, 7, 3)
W7 = (2, 3, 6, 7, 5, 8, 4)
C7 = 9
# small instance used for the 12-qubit unary sweep
P5 = (8, 3, 5, 6, 9)
W5 = (1, 2, 1, 3, 2)
C5 = 7


@pytest.fixture
def inst7() -> KnapsackInstance:
    return validate_instance(P7, W7, C7)


@pytest.fixture
def inst5() -> KnapsackInstance:
    return validate_instance(P5, W5, C5)


def random_instance(rng, n_max=8, c_max=20, n_min=2):
    """Draw a valid instance by rejection."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        c = int(rng.integers(2, c_max + 1))
        w = rng.integers(1, c + 1, size=n)
        if w.sum() <= c:
            continue
        p = rng.integers(1, 12, size=n)
        return validate_instance(p.tolist(), w.tolist(), c)


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


# one (number, passed, detail) entry per acceptance criterion, echoed at the end of the run
ACCEPTANCE: list[tuple[int, bool, str]] = []


def record(number: int, passed: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE.append((number, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
