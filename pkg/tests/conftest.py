import numpy as np
import pytest
from hypothesis import settings

from vsparse.sbm import sample, sim_params

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def model():
    return sim_params()


@pytest.fixture
def small_graph(model):
    return sample(model, 60, seed=11)


def random_adjacency(rng, n, p=0.3):
    A = np.triu(rng.random((n, n)) < p, k=1).astype(float)
    return A + A.T


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion and echo it.

    ``passed=None`` records a skipped criterion.
    """
    def put(number, passed, detail):
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        line = f"criterion {number:>2}: {status}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return passed
    return put


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
