"""Weight reduction of complete weighted graphs down to the block-uniform
structure, and the vertex-weighted quotient.

``collapse_weights`` rounds every weight into {0, 1/2, 1} one value class at
a time; ``normalize_partition`` then makes the weight-1 relation an
equivalence by local repair moves and copies one row over each class.
Every move is recorded as a ``ReductionStep`` so traces can be replayed and
their invariants re-checked.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from string_threshold.admissibility import find_admissible_subgraph
from string_threshold.data_structures import (
    DenseGraph,
    Edge,
    VertexWeightedGraph,
    WeightedCompleteGraph,
    as_fraction,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

HALF = Fraction(1, 2)
Triple = Tuple[int, int, int]


def dangerous_triples(R: WeightedCompleteGraph) -> FrozenSet[Triple]:
    """``(x, y, z)`` with ``x < y``, ``w(xy) = 0`` and ``w(xz) + w(yz) >= 1``

    :examples:
        >>> R = WeightedCompleteGraph(3, {(0, 1): 0, (0, 2): "1/2", (1, 2): "1/2"})
        >>> sorted(dangerous_triples(R))
        [(0, 1, 2)]
    """
    triples = set()
    for x, y in R.pairs_with(Fraction(0)):
        for z in range(R.k):
            if z not in (x, y) and R.weight(x, z) + R.weight(y, z) >= 1:
                triples.add((x, y, z))
    return frozenset(triples)


@dataclass(frozen=True)
class ReductionStep:
    kind: str
    changes: Tuple[Tuple[Edge, Fraction], ...]
    weight_before: Fraction
    weight_after: Fraction
    dangerous_before: FrozenSet[Triple]
    dangerous_after: FrozenSet[Triple]


@dataclass
class ReductionTrace:
    start: WeightedCompleteGraph
    steps: List[ReductionStep] = field(default_factory=list)

    def record(
        self, kind: str, before: WeightedCompleteGraph, changes: Mapping[Edge, Fraction]
    ) -> WeightedCompleteGraph:
        after = before.replace(changes)
        self.steps.append(
            ReductionStep(
                kind,
                tuple(sorted((pair, as_fraction(w)) for pair, w in changes.items())),
                before.total_weight(),
                after.total_weight(),
                dangerous_triples(before),
                dangerous_triples(after),
            )
        )
        return after

    def __len__(self) -> int:
        return len(self.steps)

    def final(self) -> WeightedCompleteGraph:
        return self.replay()[-1]

    def replay(self) -> List[WeightedCompleteGraph]:
        """the weighted graph before the first and after every step"""
        states = [self.start]
        for step in self.steps:
            states.append(states[-1].replace(dict(step.changes)))
        return states

    def violations(self, family: Optional[Sequence[DenseGraph]] = None) -> List[str]:
        """Invariant breaches found by replaying the changes from ``start``.

        Every step: stored totals and dangerous sets match the replay and the
        total weight does not grow. Collapse steps also keep every dangerous
        triple and shrink the symmetrised value set. With a ``family``, no
        step may turn an admissible-free weighting (at ``eps = 0``) into one
        with an admissible subgraph; this is the only guarantee for the
        normalization steps, which may trade dangerous triples for others.
        """
        problems = []
        states = self.replay()
        for index, (step, before, after) in enumerate(
            zip(self.steps, states, states[1:])
        ):
            if before.total_weight() != step.weight_before:
                problems.append(f"step {index}: stored weight_before differs")
            if after.total_weight() != step.weight_after:
                problems.append(f"step {index}: stored weight_after differs")
            if step.weight_after > step.weight_before:
                problems.append(f"step {index}: total weight increased")
            if dangerous_triples(after) != step.dangerous_after:
                problems.append(f"step {index}: stored dangerous set differs")
            if step.kind.startswith("collapse"):
                if not step.dangerous_before <= step.dangerous_after:
                    problems.append(f"step {index}: dangerous triples were lost")
                if not symmetric_value_set(after) < symmetric_value_set(before):
                    problems.append(f"step {index}: value set did not shrink")
        if family is not None:
            problems.extend(self._admissibility_problems(states, list(family)))
        return problems

    def _admissibility_problems(
        self, states: Sequence[WeightedCompleteGraph], family: List[DenseGraph]
    ) -> List[str]:
        problems = []
        free = [find_admissible_subgraph(state, family) is None for state in states]
        for index, step in enumerate(self.steps):
            if free[index] and not free[index + 1]:
                problems.append(f"step {index}: {step.kind} created an admissible subgraph")
        return problems


def _lower_target(r: Fraction, values: FrozenSet[Fraction]) -> Fraction:
    """the next value below ``r`` among ``values`` and their complements,
    not crossing 1/2; 0 or 1/2 when there is none"""
    symmetric = values | {1 - v for v in values}
    if r < HALF:
        return max((v for v in symmetric if v < r), default=Fraction(0))
    return max((v for v in symmetric if HALF <= v < r), default=HALF)


def symmetric_value_set(R: WeightedCompleteGraph) -> FrozenSet[Fraction]:
    values = R.value_set()
    return values | {1 - v for v in values}


def collapse_weights(
    R: WeightedCompleteGraph,
) -> Tuple[WeightedCompleteGraph, ReductionTrace]:
    """Round all weights into {0, 1/2, 1} without raising the total weight or
    losing a dangerous triple.

    Each step takes ``r``, the largest weight outside {0, 1/2, 1}. When
    ``1 - r`` is not a weight, the class of ``r`` moves down to the next value
    (``"collapse-single"``). Otherwise the larger of the two classes (``r`` on
    ties) moves down to its next value ``q`` and the other moves to ``1 - q``
    (``"collapse-paired"``).

    :examples:
        >>> R, trace = collapse_weights(WeightedCompleteGraph.uniform(3, "3/10"))
        >>> R.total_weight(), len(trace)
        (Fraction(0, 1), 1)
    """
    trace = ReductionTrace(R)
    while R.value_set():
        values = R.value_set()
        r = max(values)
        if 1 - r not in values:
            q = _lower_target(r, values)
            changes = {pair: q for pair in R.pairs_with(r)}
            R = trace.record("collapse-single", R, changes)
            continue
        if len(R.pairs_with(1 - r)) > len(R.pairs_with(r)):
            r = 1 - r
        q = _lower_target(r, values)
        changes = {pair: q for pair in R.pairs_with(r)}
        changes.update({pair: 1 - q for pair in R.pairs_with(1 - r)})
        R = trace.record("collapse-paired", R, changes)
    return R, trace


def _check_half_integral(R: WeightedCompleteGraph) -> None:
    for (x, y), w in R.items():
        if w not in (0, HALF, 1):
            raise ValueError(f"weight {w} of ({x}, {y}) is not in {{0, 1/2, 1}}")


def _copy_row(
    R: WeightedCompleteGraph, source: int, targets: Sequence[int], skip: Sequence[int]
) -> Dict[Edge, Fraction]:
    """changes giving every target the weights of ``source`` towards the
    vertices outside ``skip``"""
    changes = {}
    for y in targets:
        for u in range(R.k):
            if u not in skip and u != y:
                changes[min(y, u), max(y, u)] = R.weight(source, u)
    return changes


def _broken_triples(R: WeightedCompleteGraph) -> List[Triple]:
    """``(x, y, z)``, ``x < z``, with ``w(xy) = w(yz) = 1`` but ``w(xz) != 1``"""
    triples = []
    for y in range(R.k):
        heavy = [u for u in range(R.k) if u != y and R.weight(u, y) == 1]
        for x, z in combinations(heavy, 2):
            if R.weight(x, z) != 1:
                triples.append((x, y, z))
    return sorted(triples)


def _repair(R: WeightedCompleteGraph, trace: ReductionTrace) -> WeightedCompleteGraph:
    while True:
        broken = _broken_triples(R)
        if not broken:
            return R
        degree = [R.degree(v) for v in range(R.k)]
        for x, y, z in broken:
            source = x if degree[y] > degree[x] else z if degree[y] > degree[z] else None
            if source is not None:
                changes = _copy_row(R, source, [y], [source])
                R = trace.record("repair-copy", R, changes)
                break
        else:
            x, y, z = broken[0]
            changes = _copy_row(R, y, [x, z], [x, y, z])
            for u, v in ((x, y), (y, z), (x, z)):
                changes[min(u, v), max(u, v)] = Fraction(1)
            R = trace.record("repair-merge", R, changes)


def weight_one_classes(R: WeightedCompleteGraph) -> List[List[int]]:
    """classes of the relation ``w(xy) = 1`` (assumed an equivalence), by
    smallest member"""
    classes: List[List[int]] = []
    seen = set()
    for v in range(R.k):
        if v in seen:
            continue
        block = [v] + [u for u in range(v + 1, R.k) if R.weight(u, v) == 1]
        seen.update(block)
        classes.append(block)
    return classes


def normalize_partition(
    R: WeightedCompleteGraph,
) -> Tuple[List[List[int]], WeightedCompleteGraph, ReductionTrace]:
    """The partition ``X_1..X_s`` and a block-uniform weighting: weight 1
    inside every block and one weight, 0 or 1/2, between two blocks. The total
    weight never grows.

    Repair moves: for ``w(xy) = w(yz) = 1 != w(xz)``, copy the row of ``x``
    (or ``z``) onto ``y`` when ``y`` has the larger weighted degree
    (``"repair-copy"``); otherwise give ``x`` and ``z`` the row of ``y``
    (``"repair-merge"``). Then every block takes the row of its member of
    least degree (``"class-copy"``, lowest index on ties).
    """
    _check_half_integral(R)
    trace = ReductionTrace(R)
    R = _repair(R, trace)
    partition = weight_one_classes(R)
    for block in partition:
        degree = {v: R.degree(v) for v in block}
        source = min(block, key=lambda v: (degree[v], v))
        changes = {
            pair: w
            for pair, w in _copy_row(R, source, block, block).items()
            if R.weight(*pair) != w
        }
        if changes:
            R = trace.record("class-copy", R, changes)
    return partition, R, trace


def reduce_weights(
    R: WeightedCompleteGraph,
) -> Tuple[List[List[int]], WeightedCompleteGraph, ReductionTrace]:
    """``collapse_weights`` followed by ``normalize_partition``, one trace"""
    collapsed, trace = collapse_weights(R)
    partition, normalized, repairs = normalize_partition(collapsed)
    trace.steps.extend(repairs.steps)
    return partition, normalized, trace


def phi_weight(Q: VertexWeightedGraph) -> Fraction:
    """
    :examples:
        >>> phi_weight(VertexWeightedGraph(DenseGraph(2, [(0, 1)]), ["1/2", "1/2"]))
        Fraction(3, 4)
    """
    phi = Q.phi
    value = sum((p * p for p in phi), Fraction(0))
    return value + sum((phi[a] * phi[b] for a, b in Q.graph.edges()), Fraction(0))


def quotient(partition: Sequence[Sequence[int]], R: WeightedCompleteGraph) -> VertexWeightedGraph:
    """Vertex ``a`` of ``Q`` is block ``X_a`` with ``phi(a) = |X_a| / k``;
    ``ab`` is an edge when the weight between the blocks is 1/2. Checks
    ``w(R) = (k^2 / 2)(phi(Q) - 1/k)`` exactly."""
    blocks = [list(block) for block in partition]
    if sorted(v for block in blocks for v in block) != list(range(R.k)):
        raise ValueError("partition must cover every vertex exactly once")
    for a, block in enumerate(blocks):
        if any(R.weight(x, y) != 1 for x, y in combinations(block, 2)):
            raise ValueError(f"block {a} has a pair of weight other than 1")
    edges = []
    for a, b in combinations(range(len(blocks)), 2):
        between = {R.weight(x, y) for x in blocks[a] for y in blocks[b]}
        if len(between) != 1 or between & {Fraction(1)} or not between <= {0, HALF}:
            raise ValueError(f"weights are not uniform between blocks {a} and {b}")
        if between == {HALF}:
            edges.append((a, b))
    Q = VertexWeightedGraph(
        DenseGraph(len(blocks), edges), [Fraction(len(block), R.k) for block in blocks]
    )
    expected = Fraction(R.k ** 2, 2) * (phi_weight(Q) - Fraction(1, R.k))
    if expected != R.total_weight():
        raise ArithmeticError(f"quotient weight {expected} != {R.total_weight()}")
    return Q


def complete_ize(
    k: int, weights: Mapping[Edge, Any], eps: Any
) -> WeightedCompleteGraph:
    """Complete a reduced graph: missing pairs get 1, weights at most ``eps``
    get 0 and the rest are raised by ``eps`` (capped at 1).

    :examples:
        >>> complete_ize(3, {(0, 1): "1/20", (0, 2): "1/2"}, "1/10")
        WeightedCompleteGraph(k=3, {01: 0, 02: 3/5, 12: 1})
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    table = {(min(x, y), max(x, y)): as_fraction(w) for (x, y), w in weights.items()}
    completed = {}
    for pair in combinations(range(k), 2):
        w: Optional[Fraction] = table.get(pair)
        if w is None:
            completed[pair] = Fraction(1)
        elif w <= eps:
            completed[pair] = Fraction(0)
        else:
            completed[pair] = min(w + eps, Fraction(1))
    return WeightedCompleteGraph(k, completed)
