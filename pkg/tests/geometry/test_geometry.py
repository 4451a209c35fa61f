from fractions import Fraction

import networkx as nx
import pytest

from string_threshold.data_structures import (
    BicliquePair,
    DenseGraph,
    GeneralPositionError,
    GenerationError,
)
from string_threshold.geometry import (
    CurveArrangement,
    Polyline,
    component_sizes,
    crossing_point,
    crossings_bruteforce,
    find_crossings,
    intersection_graph,
    pack_components,
    planar_separator,
    planarize,
    random_curves,
    segment_contact,
    separator_biclique,
)
from string_threshold.subdivision import contains_induced_weak_subdivision

GRID = [
    [(0, 1), (3, 1)],
    [(0, 2), (3, 2)],
    [(1, 0), (1, 3)],
    [(2, 0), (2, 3)],
]


@pytest.mark.parametrize(
    "p, q, r, s, contact",
    [
        ((0, 0), (2, 2), (0, 2), (2, 0), "cross"),
        ((0, 0), (2, 0), (1, 0), (1, 1), "touch"),
        ((0, 0), (2, 0), (1, 0), (3, 0), "touch"),
        ((0, 0), (1, 0), (2, 0), (3, 0), None),
        ((0, 0), (1, 1), (0, 1), (1, 2), None),
    ],
)
def test_segment_contact(p, q, r, s, contact):
    assert segment_contact(p, q, r, s) == contact


def test_crossing_point():
    point = crossing_point((0, 0), (2, 2), (0, 2), (2, 0))
    assert point == (Fraction(1), Fraction(1))
    assert crossing_point((0, 0), (3, 0), (1, 1), (2, -1)) == (Fraction(3, 2), Fraction(0))


@pytest.mark.parametrize(
    "points, message",
    [
        ([(0, 0)], "a polyline needs at least 2 points"),
        ([(0, 0), (1, 1), (1, 1)], "consecutive points must be distinct"),
    ],
)
def test_polyline_error(points, message):
    with pytest.raises(ValueError) as error:
        Polyline(points)
    assert str(error.value) == message


def test_polyline():
    line = Polyline([(0, "1/2"), (1, 1)])
    assert line.points == ((Fraction(0), Fraction(1, 2)), (Fraction(1), Fraction(1)))
    assert line == Polyline([(0, Fraction(1, 2)), (1, 1)])
    with pytest.raises(TypeError) as error:
        line == 1
    assert str(error.value) == "1 must be a Polyline"


@pytest.mark.parametrize(
    "curves, message",
    [
        ([[(0, 0), (2, 0), (1, 0)]], "curve 0 folds back on itself at segment 1"),
        ([[(0, 0), (2, 0), (2, 2), (1, -1)]], "curve 0 meets itself at segments 0 and 2"),
        ([[(0, 0), (2, 0)], [(1, 0), (1, 1)]], "curves 0 and 1 touch at segments 0 and 0"),
        (
            [[(0, 0), (2, 2)], [(0, 2), (2, 0)], [(1, 0), (1, 2)]],
            "curves (0, 1) and (0, 2) cross at the same point",
        ),
    ],
)
def test_general_position_error(curves, message):
    with pytest.raises(GeneralPositionError) as error:
        CurveArrangement(curves)
    assert str(error.value) == message
    with pytest.raises(GeneralPositionError) as error:
        crossings_bruteforce([Polyline(c) for c in curves])
    assert str(error.value) == message


def test_intersection_graph():
    arrangement = CurveArrangement(GRID)
    assert len(arrangement.crossings) == 4
    assert intersection_graph(arrangement) == DenseGraph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


def test_planarize():
    p = planarize(CurveArrangement(GRID))
    assert p.graph.number_of_nodes() == 12
    assert p.graph.number_of_edges() == 12
    assert nx.is_connected(p.graph)
    assert p.curves_at(("end", 2, 0)) == (2,)
    assert sorted(p.curves_at(("cross", 0))) == [0, 2]


@pytest.mark.parametrize("seed", range(3))
def test_find_crossings_matches_bruteforce(seed):
    curves = list(random_curves(15, 4, (60, 60), seed=seed).curves)
    assert find_crossings(curves) == crossings_bruteforce(curves)


def test_random_curves_are_seeded():
    assert random_curves(8, 3, (40, 40), seed=5) == random_curves(8, 3, (40, 40), seed=5)


@pytest.mark.parametrize(
    "n, segments, bbox, retries, message",
    [
        (0, 3, (10, 10), None, "n and segments_per_curve must be positive"),
        (3, 0, (10, 10), None, "n and segments_per_curve must be positive"),
        (3, 3, (0, 10), None, "bbox must be positive, got (0, 10)"),
    ],
)
def test_random_curves_error(n, segments, bbox, retries, message):
    with pytest.raises(ValueError) as error:
        random_curves(n, segments, bbox, retries=retries)
    assert str(error.value) == message


def test_random_curves_gives_up():
    with pytest.raises(GenerationError) as error:
        random_curves(2, 3, (10, 10), seed=0, retries=0)
    assert str(error.value) == "could not place curve 0 in general position after 0 attempts"


def test_planar_separator():
    grid = nx.grid_2d_graph(5, 5)
    separator = planar_separator(grid)
    assert separator
    assert max(component_sizes(grid, separator)) <= 2 * 25 / 3
    assert planar_separator(DenseGraph.path(7)) == frozenset({3})
    assert planar_separator(nx.empty_graph(6)) == frozenset()


def test_component_sizes():
    assert component_sizes(nx.path_graph(5), [2]) == [2, 2]
    assert component_sizes(nx.path_graph(5), []) == [5]


def test_pack_components():
    pair = pack_components([[0, 1, 2], [3], [4, 5]])
    assert pair == BicliquePair([0, 1, 2], [3, 4, 5])
    assert pack_components([[0, 1, 2, 3]]).size == 0


def test_separator_biclique():
    arrangement = random_curves(30, 4, (100, 100), seed=2)
    result = separator_biclique(arrangement)
    graph = intersection_graph(arrangement)
    assert not any(graph.has_edge(a, b) for a in result.pair.A for b in result.pair.B)
    assert not (result.pair.A | result.pair.B) & result.curves
    assert result.crossings == len(arrangement.crossings)
    assert result.constant >= 0


def test_separator_biclique_without_crossings():
    parallel = CurveArrangement([[(0, y), (1, y)] for y in range(6)])
    result = separator_biclique(parallel)
    assert result.pair.size == 3
    assert result.constant == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_planarize_arcs_per_curve(seed):
    arrangement = random_curves(12, 4, (80, 80), seed=seed)
    p = planarize(arrangement)
    per_curve = [0] * arrangement.n
    for crossing in arrangement.crossings:
        per_curve[crossing.first] += 1
        per_curve[crossing.second] += 1
    assert p.graph.number_of_edges() == sum(count + 1 for count in per_curve)


@pytest.mark.parametrize("seed", range(5))
def test_string_graphs_avoid_weak_subdivisions_of_k5(seed):
    graph = intersection_graph(random_curves(12, 4, (60, 60), seed=seed))
    verdict = contains_induced_weak_subdivision(graph, 5)
    assert verdict.conclusive
    assert not verdict.holds


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_larger_string_graphs_avoid_weak_subdivisions_of_k5(seed):
    graph = intersection_graph(random_curves(18, 5, (100, 100), seed=seed))
    verdict = contains_induced_weak_subdivision(graph, 5)
    assert not (verdict.conclusive and verdict.holds)


def crossing_grid(k):
    horizontal = [[(0, y), (k + 1, y)] for y in range(1, k + 1)]
    vertical = [[(x, 0), (x, k + 1)] for x in range(1, k + 1)]
    return CurveArrangement(horizontal + vertical)


@pytest.mark.parametrize("k", [6, 12, 24])
def test_separator_biclique_component_bound(k):
    arrangement = crossing_grid(k)
    p = planarize(arrangement)
    result = separator_biclique(arrangement)
    assert result.crossings == k * k
    assert result.nodes
    assert max(component_sizes(p.graph, result.nodes)) <= 2 * p.graph.number_of_nodes() / 3


def test_separator_constant_is_stable():
    constants = [separator_biclique(crossing_grid(k)).constant for k in (6, 12, 24)]
    assert min(constants) > 0
    assert max(constants) / min(constants) <= 4


def test_separator_biclique_on_sparse_curves():
    n = 200
    arrangement = random_curves(n, 2, (4000, 4000), seed=0, step=40)
    assert len(arrangement.crossings) <= 2 * n
    result = separator_biclique(arrangement)
    graph = intersection_graph(arrangement).to_networkx()
    assert result.pair.size >= n // 8
    assert max(component_sizes(graph, result.curves), default=0) <= 2 * n / 3
    assert not any(graph.has_edge(a, b) for a in result.pair.A for b in result.pair.B)
