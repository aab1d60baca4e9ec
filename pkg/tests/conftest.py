import re
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lcilimit import Instance, Word

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# worked instances with known exact answers
X_LIMITED = (["3/8", "3/8", "1/4"], ["1/2", "3/8", "1/8"])           # CaseA, 3/8, I={1,2}
BOTH_TIGHT_EQUAL = (["1/3", "1/3", "2/9", "1/9"], ["1/3", "1/3", "1/9", "2/9"])  # CaseB1, 1/3
BOTH_TIGHT_SPLIT = (["2/3", "1/6", "1/6"], ["1/6", "2/3", "1/6"])    # CaseB2, 4/15, s=t=2/15
BLOCK_GAUSSIAN = (["1/3", "2/3"], ["1/4", "3/4"])                      # alpha=(1,2): CaseA, I={2}


def inst(pair):
    return Instance.from_lists(*pair)


@pytest.fixture
def x_limited():
    return inst(X_LIMITED)


@pytest.fixture
def both_tight_equal():
    return inst(BOTH_TIGHT_EQUAL)


@pytest.fixture
def both_tight_split():
    return inst(BOTH_TIGHT_SPLIT)


def random_word(rng, m, n):
    return Word(rng.integers(1, m + 1, size=n), m)


def random_rational_pmf(rng, m, denom=None):
    """Strictly positive rational pmf with a common denominator."""
    denom = denom or int(rng.integers(m + 1, 60))
    cuts = np.sort(rng.choice(np.arange(1, denom), size=m - 1, replace=False))
    parts = np.diff(np.concatenate([[0], cuts, [denom]]))
    return [F(int(k), denom) for k in parts]


def random_instance(rng, m, denom=None):
    return Instance.from_lists(random_rational_pmf(rng, m, denom), random_rational_pmf(rng, m, denom))


# acceptance verdicts, echoed at the end of the run whatever the capture mode
ACCEPTANCE_LINES: list = []


def record_acceptance(label: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_order):
            terminalreporter.write_line(line)


def _criterion_order(line: str):
    num = re.search(r"criterion (\d+)", line)
    return (int(num.group(1)) if num else 99, line.split(":")[0].endswith(")"))
