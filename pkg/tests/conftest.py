import pytest

from eucdyn.partition import generator, refine
from eucdyn.qfield import make_context


@pytest.fixture(scope="session")
def ctx5():
    return make_context(5)


@pytest.fixture(scope="session")
def ctx2():
    return make_context(2)


@pytest.fixture(scope="session")
def ctx3():
    return make_context(3)


@pytest.fixture(scope="session")
def ctx13():
    return make_context(13)


def _chain(ctx, n):
    parts = [generator(ctx)]
    for _ in range(n):
        parts.append(refine(parts[-1]))
    return parts


@pytest.fixture(scope="session")
def parts5(ctx5):
    """Partitions of the D=5 torus, levels 0..3."""
    return _chain(ctx5, 3)


@pytest.fixture(scope="session")
def parts2(ctx2):
    return _chain(ctx2, 2)


@pytest.fixture(scope="session")
def parts3(ctx3):
    return _chain(ctx3, 2)


@pytest.fixture(scope="session")
def parts13(ctx13):
    return _chain(ctx13, 2)
