import pytest

from src.graphs import Graph, builtin_graph
from src.tensor_core import seeded_generator


@pytest.fixture
def k3():
    return builtin_graph('complete', 3)


@pytest.fixture
def p3():
    return builtin_graph('path', 3)


@pytest.fixture
def square_edge_graph():
    return Graph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))


@pytest.fixture
def rng():
    return seeded_generator(20240611)
