import numpy as np
import pytest

from jointalign import Assignment, QueryGraph, SimplePlusMinus, build_query_graph


def complete_graph(n, k=2, answers=None):
    u, v = np.triu_indices(n, 1)
    y = np.zeros(u.size, dtype=np.int64) if answers is None else answers
    return QueryGraph(n, k, u, v, y)


def graph_from_edges(n, k, edges):
    """``edges`` as ``(u, v, y)`` triples, ``y`` read in the given orientation."""
    u, v, y = zip(*edges)
    return QueryGraph(n, k, u, v, y)


@pytest.fixture
def noisy_graph():
    truth = Assignment.random(150, 3, 11)
    g = build_query_graph(150, 3, truth, SimplePlusMinus(0.2), 3000, 11)
    return truth, g
