import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wceop import FiniteMeasureSpace, SigmaSubalgebra, WceOperator

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_op(masses, blocks, u, w, p=2.0):
    space = FiniteMeasureSpace(np.asarray(masses, dtype=float))
    algebra = SigmaSubalgebra(tuple(tuple(b) for b in blocks), len(masses))
    return WceOperator(space, algebra, np.asarray(u, dtype=complex), np.asarray(w, dtype=complex), p)


@pytest.fixture
def running():
    """Four atoms, masses (1, 1, 2, 1), blocks {0, 1} and {2, 3}."""
    return make_op([1, 1, 2, 1], [[0, 1], [2, 3]], [1, 2, 1, 0], [1, 1, 3, 1])


@pytest.fixture
def nilpotent():
    """``u = (1, -1)``, ``w = (1, 1)`` on one block: ``E(uw) = 0`` and ``T^2 = 0``."""
    return make_op([1, 1], [[0, 1]], [1, -1], [1, 1])


@pytest.fixture
def projection():
    """``u = w = 1`` on one block of two unit atoms: the averaging projection."""
    return make_op([1, 1], [[0, 1]], [1, 1], [1, 1])


@pytest.fixture
def half():
    """``u = (1, 1)``, ``w = (1/2, 1/2)``: ``E(uw) = 1/2`` and ``(I - T)^-1 = I + 2T``."""
    return make_op([1, 1], [[0, 1]], [1, 1], [0.5, 0.5])


# -- hypothesis strategies ---------------------------------------------------

def _entry():
    modulus = st.one_of(st.just(0.0), st.floats(0.25, 2.0))
    phase = st.floats(0.0, 2 * np.pi)
    return st.builds(lambda r, t: complex(r * np.cos(t), r * np.sin(t)), modulus, phase)


@st.composite
def spaces(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    masses = draw(st.lists(st.floats(0.1, 10.0), min_size=n, max_size=n))
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return FiniteMeasureSpace(np.array(masses)), SigmaSubalgebra.from_labels(labels)


@st.composite
def functions(draw, n):
    return np.array(draw(st.lists(_entry(), min_size=n, max_size=n)), dtype=complex)


@st.composite
def operators(draw, max_n=6, p=2.0):
    space, algebra = draw(spaces(max_n))
    u = draw(functions(space.n))
    w = draw(functions(space.n))
    return WceOperator(space, algebra, u, w, p)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
