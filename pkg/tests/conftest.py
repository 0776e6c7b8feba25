import functools

import numpy as np
import pytest

from labyrinth.algebra import RingSpec
from labyrinth.functors import build

Z2 = RingSpec.zmod(2)
Z4 = RingSpec.zmod(4)
F2 = RingSpec.fp(2)
F3 = RingSpec.fp(3)

# (descriptor, source ring, target field) for every built-in used below
BUILTINS = [
    ("U", Z2, F2),
    ("U", Z4, F2),
    ("RedU", Z2, F2),
    ("T2", F2, F2),
    ("T2", F3, F3),
    ("S2", F3, F3),
    ("L2", F3, F3),
    ("T3", F3, F3),
    ("Zero", F3, F3),
    ("T1", F3, F3),
    ("Sum(T2,T1)", F3, F3),
]


@functools.lru_cache(maxsize=None)
def functor(spec, ring, field):
    return build(spec, ring, field)


def builtin_id(entry):
    spec, ring, field = entry
    return f"{spec}-{ring}-{field}".replace(":", "")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
