from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from string_threshold.data_structures import DenseGraph, VertexWeightedGraph, WeightedCompleteGraph
from string_threshold.turan import (
    ReductionStep,
    ReductionTrace,
    collapse_weights,
    complete_ize,
    dangerous_triples,
    normalize_partition,
    phi_weight,
    quotient,
    reduce_weights,
    symmetric_value_set,
    weight_one_classes,
)
from string_threshold.verification import default_family

HALF = Fraction(1, 2)


def random_weighting(k, seed):
    rng = np.random.default_rng(seed)
    numerators = rng.integers(0, 11, size=k * (k - 1) // 2)
    return WeightedCompleteGraph(
        k, {pair: Fraction(int(n), 10) for pair, n in zip(combinations(range(k), 2), numerators)}
    )


def test_dangerous_triples():
    R = WeightedCompleteGraph(3, {(0, 1): 0, (0, 2): "1/2", (1, 2): "1/2"})
    assert dangerous_triples(R) == {(0, 1, 2)}
    assert dangerous_triples(WeightedCompleteGraph.uniform(3, "1/2")) == frozenset()


def test_symmetric_value_set():
    R = WeightedCompleteGraph(3, {(0, 1): "3/10", (0, 2): "1/2", (1, 2): 1})
    assert symmetric_value_set(R) == {Fraction(3, 10), Fraction(7, 10)}


def test_collapse_weights_single():
    R, trace = collapse_weights(WeightedCompleteGraph.uniform(3, "3/10"))
    assert R == WeightedCompleteGraph.uniform(3, 0)
    assert [step.kind for step in trace.steps] == ["collapse-single"]

    R, trace = collapse_weights(WeightedCompleteGraph(3, {(0, 1): "4/5", (0, 2): 0, (1, 2): 0}))
    assert R.weight(0, 1) == HALF
    assert trace.steps[0].weight_before == Fraction(4, 5)
    assert trace.steps[0].weight_after == HALF


def test_collapse_weights_paired():
    R, trace = collapse_weights(
        WeightedCompleteGraph(3, {(0, 1): "3/10", (0, 2): "7/10", (1, 2): 1})
    )
    assert R == WeightedCompleteGraph(3, {(0, 1): HALF, (0, 2): HALF, (1, 2): 1})
    assert [step.kind for step in trace.steps] == ["collapse-paired"]
    assert trace.steps[0].weight_before == trace.steps[0].weight_after == 2
    assert trace.violations() == []


def test_collapse_weights_shrinks_the_value_set():
    R = WeightedCompleteGraph(
        4,
        {(0, 1): "1/10", (0, 2): "9/10", (0, 3): "3/10", (1, 2): "2/5", (1, 3): "3/5", (2, 3): "7/10"},
    )
    collapsed, trace = collapse_weights(R)
    assert collapsed.value_set() == frozenset()
    sizes = [len(symmetric_value_set(state)) for state in trace.replay()]
    assert all(later < earlier for earlier, later in zip(sizes, sizes[1:]))
    assert trace.violations() == []
    assert collapsed.total_weight() <= R.total_weight()


def test_normalize_partition():
    R = WeightedCompleteGraph.uniform(4, "1/2").replace({(0, 1): 1, (2, 3): 1})
    partition, normalized, trace = normalize_partition(R)
    assert partition == [[0, 1], [2, 3]]
    assert normalized == R
    assert len(trace) == 0


def test_normalize_partition_repair_copy():
    R = WeightedCompleteGraph(3, {(0, 1): 1, (1, 2): 1, (0, 2): 0})
    partition, normalized, trace = normalize_partition(R)
    assert [step.kind for step in trace.steps] == ["repair-copy"]
    assert partition == [[0, 1], [2]]
    assert normalized == WeightedCompleteGraph(3, {(0, 1): 1, (0, 2): 0, (1, 2): 0})
    assert trace.steps[0].dangerous_before == {(0, 2, 1)}
    assert trace.steps[0].dangerous_after == {(0, 2, 1), (1, 2, 0)}
    assert trace.violations() == []


def test_normalize_partition_error():
    with pytest.raises(ValueError) as error:
        normalize_partition(WeightedCompleteGraph.uniform(3, "3/10"))
    assert str(error.value) == "weight 3/10 of (0, 1) is not in {0, 1/2, 1}"


def test_weight_one_classes():
    R = WeightedCompleteGraph.uniform(5, 0).replace({(0, 3): 1, (1, 4): 1})
    assert weight_one_classes(R) == [[0, 3], [1, 4], [2]]


def test_reduce_weights():
    R = WeightedCompleteGraph(
        4,
        {(0, 1): "3/10", (0, 2): "7/10", (0, 3): 1, (1, 2): "1/5", (1, 3): "9/10", (2, 3): "1/2"},
    )
    partition, reduced, trace = reduce_weights(R)
    assert reduced.value_set() == frozenset()
    assert trace.violations() == []
    assert trace.final() == reduced
    assert reduced.total_weight() <= R.total_weight()
    Q = quotient(partition, reduced)
    assert sum(Q.phi) == 1


def test_reduce_weights_repair_trades_dangerous_triples():
    R = WeightedCompleteGraph(
        4, {(0, 1): 0, (0, 2): 0, (0, 3): 0, (1, 2): 0, (1, 3): 1, (2, 3): 1}
    )
    partition, reduced, trace = reduce_weights(R)
    assert [step.kind for step in trace.steps] == ["repair-copy"]
    step = trace.steps[0]
    assert step.dangerous_before - step.dangerous_after == {(0, 2, 3), (0, 3, 2)}
    assert trace.violations() == []
    assert trace.violations(default_family()) == []
    assert partition == [[0], [1, 3], [2]]
    assert quotient(partition, reduced).phi == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))


@pytest.mark.parametrize("seed", range(40))
def test_reduce_weights_random(seed):
    k = 3 + seed % 6
    R = random_weighting(k, seed)
    partition, reduced, trace = reduce_weights(R)
    assert reduced.value_set() == frozenset()
    assert trace.final() == reduced
    assert trace.violations() == []
    assert reduced.total_weight() <= R.total_weight()
    Q = quotient(partition, reduced)
    assert Fraction(k * k, 2) * (phi_weight(Q) - Fraction(1, k)) == reduced.total_weight()


@pytest.mark.parametrize("seed", range(12))
def test_reduction_keeps_admissible_free_weightings_free(seed):
    _, _, trace = reduce_weights(random_weighting(5 + seed % 3, seed))
    assert trace.violations(default_family()) == []


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_reduction_keeps_admissible_free_weightings_free_large(seed):
    _, _, trace = reduce_weights(random_weighting(8, 1000 + seed))
    assert trace.violations(default_family()) == []


def test_phi_weight():
    Q = VertexWeightedGraph(DenseGraph(2, [(0, 1)]), ["1/2", "1/2"])
    assert phi_weight(Q) == Fraction(3, 4)
    assert phi_weight(VertexWeightedGraph.uniform(DenseGraph.empty(4))) == Fraction(1, 4)


def test_quotient():
    R = WeightedCompleteGraph.uniform(4, "1/2").replace({(0, 1): 1, (2, 3): 1})
    Q = quotient([[0, 1], [2, 3]], R)
    assert Q == VertexWeightedGraph(DenseGraph(2, [(0, 1)]), ["1/2", "1/2"])
    lopsided = quotient(
        [[0, 1], [2]], WeightedCompleteGraph(3, {(0, 1): 1, (0, 2): 0, (1, 2): 0})
    )
    assert lopsided.phi == (Fraction(2, 3), Fraction(1, 3))
    assert lopsided.graph.edge_count == 0


@pytest.mark.parametrize(
    "partition, R, message",
    [
        ([[0], [1]], WeightedCompleteGraph.uniform(3, 1), "partition must cover every vertex exactly once"),
        ([[0, 1], [2]], WeightedCompleteGraph.uniform(3, "1/2"), "block 0 has a pair of weight other than 1"),
        ([[0], [1], [2]], WeightedCompleteGraph.uniform(3, 1), "weights are not uniform between blocks 0 and 1"),
    ],
)
def test_quotient_error(partition, R, message):
    with pytest.raises(ValueError) as error:
        quotient(partition, R)
    assert str(error.value) == message


def test_complete_ize():
    assert complete_ize(3, {(0, 1): "1/20", (0, 2): "1/2"}, "1/10") == WeightedCompleteGraph(
        3, {(0, 1): 0, (0, 2): "3/5", (1, 2): 1}
    )
    assert complete_ize(2, {(1, 0): "19/20"}, "1/10").weight(0, 1) == 1
    with pytest.raises(ValueError) as error:
        complete_ize(2, {}, 1)
    assert str(error.value) == "eps must lie in (0, 1), got 1"


def test_trace_violations():
    start = WeightedCompleteGraph.uniform(2, 0)
    raised = ReductionStep(
        "tampered",
        (((0, 1), Fraction(1)),),
        Fraction(0),
        Fraction(1),
        frozenset(),
        frozenset(),
    )
    assert ReductionTrace(start, [raised]).violations() == ["step 0: total weight increased"]
    misrecorded = ReductionStep(
        "tampered",
        (((0, 1), Fraction(0)),),
        Fraction(1),
        Fraction(0),
        frozenset(),
        frozenset(),
    )
    assert ReductionTrace(start, [misrecorded]).violations() == [
        "step 0: stored weight_before differs"
    ]
