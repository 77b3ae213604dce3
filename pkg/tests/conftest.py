import itertools

import numpy as np
import pytest

from mlinterp.forms import Kernel
from mlinterp.spaces import make_space


def random_kernel(rng, dims, weights=(0.5, 2.0), complex_=True):
    spaces = [make_space(rng.uniform(*weights, n), id=f"s{i}") for i, n in enumerate(dims)]
    vals = rng.standard_normal(dims)
    if complex_:
        vals = vals + 1j * rng.standard_normal(dims)
    return Kernel(tuple(spaces), vals)


def nonempty_subsets(n):
    for r in range(1, n + 1):
        yield from itertools.combinations(range(n), r)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
