from fractions import Fraction

import pytest

from string_threshold.admissibility import is_H_admissible
from string_threshold.data_structures import CapacityError, DenseGraph
from string_threshold.enumeration import certificate
from string_threshold.verification import (
    VerificationReport,
    admissible_free_graphs,
    block_form_matches,
    clique_union,
    default_family,
    four_number_gaps,
    has_cycle_of_length,
    has_neighbouring_and_disjoint_edges,
    integer_partitions,
    is_cycle_or_path,
    pair_configuration,
    uniform_towards,
    verify_claim_s8,
    verify_clique_partition_bound,
    verify_observations,
    verify_prop_quarter,
    verify_ramsey_three,
)


def test_default_family():
    family = default_family(5, 6)
    assert [graph.n for graph in family] == [5, 6]
    assert family[0] == DenseGraph.complete(5)


@pytest.mark.parametrize("s, count", [(1, 1), (2, 2), (3, 4), (4, 11)])
def test_verify_prop_quarter(s, count):
    report = verify_prop_quarter(s)
    assert report.passed
    assert report.graph_count == report.admissible_free_count == count
    assert report.min_phi == Fraction(1, s)
    assert report.details["reversed_count"] == count


@pytest.mark.parametrize(
    "s, count, minimum",
    [(5, 34, Fraction(5, 17)), (6, 156, Fraction(2, 7)), pytest.param(7, 1044, Fraction(7, 24), marks=pytest.mark.slow)],
)
def test_verify_prop_quarter_above_a_quarter(s, count, minimum):
    report = verify_prop_quarter(s, workers=1)
    assert report.passed
    assert report.violations == []
    assert report.graph_count == count
    assert report.min_phi == minimum
    assert report.min_phi >= Fraction(1, 4)


def test_verify_prop_quarter_extremal_graph():
    report = verify_prop_quarter(4)
    assert report.min_phi == Fraction(1, 4)
    assert report.extremal_graphs == ["C?"]
    assert report.scope == "quarter s=4"


def test_verify_prop_quarter_error():
    with pytest.raises(CapacityError) as error:
        verify_prop_quarter(8)
    assert str(error.value) == "exhaustive sweep supports s <= 7, got 8"
    with pytest.raises(ValueError) as error:
        verify_prop_quarter(0)
    assert str(error.value) == "s must be positive, got 0"


def test_admissible_free_graphs_hereditary_matches_direct():
    family = default_family(5, 6)
    hereditary = admissible_free_graphs(5, family)
    direct = admissible_free_graphs(5, family, hereditary=False, workers=1)
    certificates = {certificate(graph) for graph in direct}
    assert {certificate(graph) for graph in hereditary} == certificates
    assert certificate(DenseGraph.cycle(5)) in certificates
    assert certificate(DenseGraph.complete(5)) not in certificates


@pytest.mark.slow
def test_verify_claim_s8():
    report = verify_claim_s8(workers=1)
    assert report.passed
    assert report.admissible_free_count == 0


def test_verification_report_merge():
    left = VerificationReport("a", 2, 1, Fraction(1, 3), ["B?"])
    right = VerificationReport("b", 3, 0, Fraction(1, 3), ["Bo"], ["bad"])
    merged = left.merge(right)
    assert merged.scope == "a+b"
    assert (merged.graph_count, merged.admissible_free_count) == (5, 1)
    assert merged.extremal_graphs == ["B?", "Bo"]
    assert not merged.passed
    assert left.merge(VerificationReport("a")).min_phi == Fraction(1, 3)


@pytest.mark.parametrize(
    "graph, expected",
    [
        (DenseGraph.path(4), True),
        (DenseGraph.complete(3), False),
        (DenseGraph(4, [(0, 1), (2, 3)]), False),
    ],
)
def test_has_neighbouring_and_disjoint_edges(graph, expected):
    assert has_neighbouring_and_disjoint_edges(graph, range(graph.n)) is expected


@pytest.mark.parametrize("graph6", ["D@[", "DB[", "DN{"])
def test_k5_admissible_despite_both_edge_kinds(graph6):
    graph = DenseGraph.from_graph6(graph6)
    assert has_neighbouring_and_disjoint_edges(graph, range(5))
    assert is_H_admissible(graph, DenseGraph.complete(5)) is not None


@pytest.mark.parametrize(
    "graph, configuration",
    [
        (DenseGraph.empty(5), 1),
        (DenseGraph(5, [(1, 2), (1, 3), (1, 4)]), 2),
        (DenseGraph.complete(5), 3),
        (DenseGraph.path(5), None),
    ],
)
def test_pair_configuration(graph, configuration):
    assert pair_configuration(graph, 0, 1, [2, 3, 4]) == configuration


def test_uniform_towards():
    assert uniform_towards(DenseGraph.complete(3), 0, [1, 2])
    assert uniform_towards(DenseGraph.empty(3), 0, [1, 2])
    assert not uniform_towards(DenseGraph(3, [(0, 1)]), 0, [1, 2])


def test_is_cycle_or_path():
    assert is_cycle_or_path(DenseGraph.cycle(4), range(4))
    assert is_cycle_or_path(DenseGraph.path(4), range(4))
    assert not is_cycle_or_path(DenseGraph.complete(4), range(4))


@pytest.mark.parametrize(
    "graph, length, expected",
    [
        (DenseGraph.cycle(6), 6, True),
        (DenseGraph.cycle(6), 5, False),
        (DenseGraph.complete(4), 3, True),
        (DenseGraph.complete(4), 4, True),
        (DenseGraph.path(7), 3, False),
    ],
)
def test_has_cycle_of_length(graph, length, expected):
    assert has_cycle_of_length(graph, length) is expected


def test_four_number_gaps():
    assert four_number_gaps(*map(Fraction, (0, 1, 2, 3))) == (1, 3)


def test_verify_observations_inequality():
    report = verify_observations(["inequality"])
    assert report.passed
    assert report.scope == "observations"
    assert report.details["inequality"] == {"checked": 10626, "violations": 0}
    assert report.details["second_gap_factor"] == "(c-b)(d-a)"


def test_verify_observations_edge_pairs():
    report = verify_observations(["edge-pairs"])
    assert report.passed
    assert report.graph_count == 34


def test_verify_observations_error():
    with pytest.raises(ValueError) as error:
        verify_observations(["edge-pairs", "sideways"])
    assert str(error.value) == "unknown scopes ['sideways']"


@pytest.mark.slow
def test_verify_observations():
    assert verify_observations(workers=1).passed


def test_integer_partitions():
    assert list(integer_partitions(4, 2)) == [(4,), (3, 1), (2, 2)]
    assert len(list(integer_partitions(6, 6))) == 11


def test_clique_union():
    graph, blocks = clique_union([3, 1])
    assert blocks == [[0, 1, 2], [3]]
    assert graph == DenseGraph.complete(3).disjoint_union(DenseGraph(1))
    assert block_form_matches(graph, blocks)
    assert not block_form_matches(DenseGraph.path(4), [[0, 1, 2], [3]])


def test_verify_clique_partition_bound():
    report = verify_clique_partition_bound(3, 4)
    assert report.passed
    assert report.graph_count == 3
    assert report.min_phi == Fraction(3, 8)
    assert report.details["bound"] == "3/8"


@pytest.mark.parametrize(
    "t, s, message",
    [(6, 4, "t must lie in [3, 5], got 6"), (3, 11, "s must lie in [1, 10], got 11")],
)
def test_verify_clique_partition_bound_error(t, s, message):
    with pytest.raises(ValueError) as error:
        verify_clique_partition_bound(t, s)
    assert str(error.value) == message


def test_verify_ramsey_three():
    report = verify_ramsey_three()
    assert report.passed
    assert report.graph_count == 156
