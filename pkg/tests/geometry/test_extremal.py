import math
from fractions import Fraction

import pytest

from string_threshold.data_structures import DenseGraph, GenerationError
from string_threshold.extremal import (
    edge_budget,
    extremal_four_part_graph,
    four_parts,
    inter_probability,
    measure_biclique_growth,
    parts_graph,
)


@pytest.mark.parametrize(
    "n, sizes",
    [(4, [1, 1, 1, 1]), (10, [3, 3, 2, 2]), (13, [4, 3, 3, 3])],
)
def test_four_parts(n, sizes):
    parts = four_parts(n)
    assert [len(part) for part in parts] == sizes
    assert [v for part in parts for v in part] == list(range(n))


def test_four_parts_error():
    with pytest.raises(ValueError) as error:
        four_parts(3)
    assert str(error.value) == "n must be at least 4, got 3"


def test_edge_budget():
    assert edge_budget(8, 0) == 8
    assert edge_budget(10, "1/20") == 15


def test_inter_probability():
    assert inter_probability(100, "1/20") == Fraction(2, 25)
    assert inter_probability(8, 0) == Fraction(1, 6)
    with pytest.raises(ValueError) as error:
        inter_probability(8, "-1/4")
    assert str(error.value) == "eps=-1/4 leaves no room for the four cliques: 4 > 0"


def test_extremal_four_part_graph():
    graph = extremal_four_part_graph(16, "1/10", seed=0)
    assert graph.edge_count <= edge_budget(16, "1/10")
    for part in four_parts(16):
        assert all(graph.has_edge(u, v) for u in part for v in part if u < v)
    assert graph == extremal_four_part_graph(16, "1/10", seed=0)


def test_extremal_four_part_graph_gives_up():
    with pytest.raises(GenerationError) as error:
        extremal_four_part_graph(8, 0, seed=0, probability=1, resample_limit=3)
    assert str(error.value) == "no draw within 8 edges after 3 attempts"


def test_parts_graph():
    graph = parts_graph([2, 3], [(0, 2)])
    assert graph == DenseGraph(5, [(0, 1), (2, 3), (2, 4), (3, 4), (0, 2)])


def test_measure_biclique_growth():
    rows = measure_biclique_growth([12], "1/10", [0, 1])
    assert [(row["n"], row["seed"]) for row in rows] == [(12, 0), (12, 1)]
    assert all(row["exact"] for row in rows)
    assert all(row["log2n"] == 3.584963 for row in rows)
    assert all(0 < row["biclique"] <= 6 for row in rows)
    greedy = measure_biclique_growth([12], "1/10", [0], capacity=8)
    assert not greedy[0]["exact"]


@pytest.mark.parametrize(
    "n",
    [16, 20, pytest.param(24, marks=pytest.mark.slow), pytest.param(28, marks=pytest.mark.slow)],
)
def test_biclique_growth_stays_logarithmic(n):
    rows = measure_biclique_growth([n], "1/10", range(5))
    assert all(row["exact"] for row in rows)
    assert all(row["biclique"] <= 4 * math.log2(n) for row in rows)
