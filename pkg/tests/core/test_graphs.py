from fractions import Fraction

import numpy as np
import pytest

from string_threshold.data_structures import CapacityError, DenseGraph, EmptyGraphError
from string_threshold.graphs import (
    adjacency_matrix,
    density,
    from_adjacency_matrix,
    is_alpha_beta_dense,
    is_delta_full,
    max_balanced_empty_pair,
    pair_density,
)

MATCHING = DenseGraph(6, [(0, 1), (2, 3), (4, 5)])


def test_adjacency_matrix():
    matrix = adjacency_matrix(DenseGraph.path(3))
    assert matrix.tolist() == [[False, True, False], [True, False, True], [False, True, False]]
    graph = DenseGraph.cycle(11)
    assert from_adjacency_matrix(adjacency_matrix(graph)) == graph


def test_from_adjacency_matrix():
    matrix = np.ones((4, 4), dtype=bool)
    np.fill_diagonal(matrix, False)
    assert from_adjacency_matrix(matrix) == DenseGraph.complete(4)


@pytest.mark.parametrize(
    "graph, expected",
    [
        (DenseGraph.complete(5), Fraction(2, 5)),
        (DenseGraph.empty(3), Fraction(0)),
        (DenseGraph.cycle(4), Fraction(1, 4)),
    ],
)
def test_density(graph, expected):
    assert density(graph) == expected


def test_density_error():
    with pytest.raises(EmptyGraphError) as error:
        density(DenseGraph(0))
    assert str(error.value) == "density of the empty graph is undefined"


def test_pair_density():
    assert pair_density(DenseGraph.path(3), [0], [1, 2]) == Fraction(1, 2)


@pytest.mark.parametrize(
    "A, B, message",
    [
        ([], [1], "A and B must be nonempty"),
        ([0, 1], [1, 2], "A and B must be disjoint"),
    ],
)
def test_pair_density_error(A, B, message):
    with pytest.raises(ValueError) as error:
        pair_density(DenseGraph.path(3), A, B)
    assert str(error.value) == message


@pytest.mark.parametrize(
    "graph, size",
    [
        (MATCHING, 2),
        (DenseGraph.empty(5), 2),
        (DenseGraph.complete(5), 0),
        (DenseGraph.cycle(6), 2),
        (DenseGraph.complete(3).disjoint_union(DenseGraph.complete(3)), 3),
    ],
)
def test_max_balanced_empty_pair(graph, size):
    pair = max_balanced_empty_pair(graph)
    assert pair.size == size
    assert not any(graph.has_edge(a, b) for a in pair.A for b in pair.B)


def test_greedy_empty_pair_is_a_lower_bound():
    for graph in (MATCHING, DenseGraph.cycle(8), DenseGraph.path(7)):
        greedy = max_balanced_empty_pair(graph, "greedy")
        assert greedy.size <= max_balanced_empty_pair(graph).size
        assert not any(graph.has_edge(a, b) for a in greedy.A for b in greedy.B)


def test_max_balanced_empty_pair_error():
    with pytest.raises(CapacityError) as error:
        max_balanced_empty_pair(DenseGraph.empty(4), capacity=3)
    assert str(error.value) == "exact search supports at most 3 vertices, got 4"
    with pytest.raises(ValueError) as error:
        max_balanced_empty_pair(DenseGraph.empty(4), "fast")
    assert str(error.value) == "unknown mode 'fast'"


def test_is_delta_full():
    assert is_delta_full(DenseGraph.complete(4), "1/2")
    verdict = is_delta_full(DenseGraph.empty(4), "1/2")
    assert not verdict and verdict.conclusive
    assert verdict.witness.size == 2
    assert is_delta_full(MATCHING, "1/2")
    assert not is_delta_full(MATCHING, "1/3")


def test_is_delta_full_greedy_is_inconclusive():
    verdict = is_delta_full(DenseGraph.complete(6), "1/3", mode="greedy")
    assert verdict.holds and not verdict.conclusive


@pytest.mark.parametrize("delta", ["3/4", 0])
def test_is_delta_full_error(delta):
    with pytest.raises(ValueError) as error:
        is_delta_full(DenseGraph.complete(4), delta)
    assert str(error.value) == f"delta must lie in (0, 1/2], got {Fraction(delta)}"


@pytest.mark.parametrize(
    "graph, alpha, beta, holds",
    [
        (DenseGraph.complete(4), "1/2", "1/4", True),
        (DenseGraph.complete(4), 1, "1/2", False),
        (DenseGraph.empty(3), 1, 0, True),
        (DenseGraph.cycle(5), "1/2", "1/5", False),
    ],
)
def test_is_alpha_beta_dense(graph, alpha, beta, holds):
    assert bool(is_alpha_beta_dense(graph, alpha, beta)) is holds


def test_is_alpha_beta_dense_witness():
    verdict = is_alpha_beta_dense(DenseGraph.empty(3), 1, "1/10")
    assert verdict.witness == frozenset({0, 1, 2})


def test_is_alpha_beta_dense_sampled():
    graph = DenseGraph.complete(8)
    verdict = is_alpha_beta_dense(graph, "1/2", "1/4", mode="sampled", samples=20, seed=0)
    assert verdict.holds and not verdict.conclusive
    refuted = is_alpha_beta_dense(DenseGraph.empty(8), "1/2", "1/4", mode="sampled", samples=5, seed=0)
    assert not refuted and len(refuted.witness) == 4


@pytest.mark.parametrize(
    "alpha, beta, message",
    [
        (0, 0, "alpha must lie in (0, 1], got 0"),
        (1, 2, "beta must lie in [0, 1], got 2"),
    ],
)
def test_is_alpha_beta_dense_error(alpha, beta, message):
    with pytest.raises(ValueError) as error:
        is_alpha_beta_dense(DenseGraph.complete(3), alpha, beta)
    assert str(error.value) == message
