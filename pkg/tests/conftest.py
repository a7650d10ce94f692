import numpy as np
import pytest

from dicutcut.graph import DirectedGraph

FOOTNOTE = DirectedGraph(5, ((1, 2), (3, 4), (5, 5)))
SINGLE_EDGE = DirectedGraph(2, ((1, 2),))
TRIANGLE = DirectedGraph(3, ((1, 2), (2, 3), (3, 1)))
K33 = DirectedGraph(
    6,
    tuple((u, v) for u in (1, 2, 3) for v in (4, 5, 6)),
)

SUITE_SEED = 20240901


def random_graph(rng: np.random.Generator) -> DirectedGraph:
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 15))
    edges = tuple(
        (int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))) for _ in range(m)
    )
    return DirectedGraph(n, edges)


def desk_suite() -> list[DirectedGraph]:
    """200 seeded random digraphs (n in [2,8], m in [1,14]) plus the four
    named instances; the fixed seed keeps every run identical."""
    rng = np.random.default_rng(SUITE_SEED)
    graphs = [random_graph(rng) for _ in range(200)]
    graphs.extend([FOOTNOTE, SINGLE_EDGE, TRIANGLE, K33])
    return graphs


@pytest.fixture(scope="session")
def suite_graphs():
    return desk_suite()
