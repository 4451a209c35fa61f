"""Density and fullness predicates and balanced empty pairs on dense graphs."""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, List, Optional, Tuple

import numpy as np

from string_threshold.config import SETTINGS
from string_threshold.data_structures import (
    BicliquePair,
    CapacityError,
    DenseGraph,
    EmptyGraphError,
    Verdict,
    as_fraction,
    iter_bits,
    to_mask,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def adjacency_matrix(graph: DenseGraph) -> np.ndarray:
    """boolean ``n x n`` adjacency matrix"""
    n = graph.n
    width = max(1, (n + 7) // 8)
    buffer = b"".join(row.to_bytes(width, "little") for row in graph.rows)
    bits = np.unpackbits(np.frombuffer(buffer, dtype=np.uint8), bitorder="little")
    return bits.reshape(n, width * 8)[:, :n].astype(bool)


def from_adjacency_matrix(matrix: np.ndarray) -> DenseGraph:
    matrix = np.asarray(matrix, dtype=bool)
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return DenseGraph.from_rows(
        (int.from_bytes(row.tobytes(), "little") for row in packed), check=False
    )


def density(graph: DenseGraph) -> Fraction:
    """
    :examples:
        >>> density(DenseGraph.complete(5))
        Fraction(2, 5)
    """
    if graph.n == 0:
        raise EmptyGraphError("density of the empty graph is undefined")
    return Fraction(graph.edge_count, graph.n ** 2)


def pair_density(graph: DenseGraph, A: Iterable[int], B: Iterable[int]) -> Fraction:
    A, B = set(A), set(B)
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    if A & B:
        raise ValueError("A and B must be disjoint")
    return Fraction(graph.edges_between(to_mask(A), to_mask(B)), len(A) * len(B))


def _non_neighbourhoods(graph: DenseGraph) -> List[int]:
    full = graph.vertex_mask
    return [full & ~row & ~(1 << v) for v, row in enumerate(graph.rows)]


def _balanced(a_mask: int, b_mask: int, size: int) -> BicliquePair:
    return BicliquePair(
        list(iter_bits(a_mask))[:size], list(iter_bits(b_mask))[:size]
    )


def _exact_empty_pair(graph: DenseGraph, target: Optional[int] = None) -> BicliquePair:
    """branch and bound over the side ``A``; ``common`` holds the vertices with
    no neighbour in ``A``, the candidates for ``B``"""
    non = _non_neighbourhoods(graph)
    limit = graph.n // 2 if target is None else target
    best: List[int] = [0, 0, 0]
    nodes = 0

    def extend(a_mask: int, size: int, candidates: int, common: int) -> bool:
        nonlocal nodes
        nodes += 1
        k = min(size, common.bit_count())
        if k > best[0]:
            best[:] = [k, a_mask, common]
            if k >= limit:
                return True
        for v in iter_bits(candidates):
            candidates &= ~(1 << v)
            kept = common & non[v]
            if min(size + 1 + candidates.bit_count(), kept.bit_count()) <= best[0]:
                continue
            if extend(a_mask | 1 << v, size + 1, candidates, kept):
                return True
        return False

    extend(0, 0, graph.vertex_mask, graph.vertex_mask)
    logger.debug("exact empty-pair search on %d vertices: %d nodes", graph.n, nodes)
    size, a_mask, b_mask = best
    return _balanced(a_mask, b_mask, size) if size else BicliquePair.empty()


def _greedy_empty_pair(graph: DenseGraph) -> BicliquePair:
    """peel vertices into ``A``, each time the one that keeps the opposing
    pool largest (lowest index on ties)"""
    non = _non_neighbourhoods(graph)
    a_mask, common, remaining = 0, graph.vertex_mask, graph.vertex_mask
    best: Tuple[int, int, int] = (0, 0, 0)
    size = 0
    while remaining and size < common.bit_count():
        chosen, kept = -1, -1
        for v in iter_bits(remaining):
            count = (common & non[v]).bit_count()
            if count > kept:
                chosen, kept = v, count
        a_mask |= 1 << chosen
        remaining &= ~(1 << chosen)
        common &= non[chosen]
        size += 1
        k = min(size, common.bit_count())
        if k > best[0]:
            best = (k, a_mask, common)
    k, a_mask, b_mask = best
    return _balanced(a_mask, b_mask, k) if k else BicliquePair.empty()


def max_balanced_empty_pair(
    graph: DenseGraph, mode: str = "exact", capacity: Optional[int] = None
) -> BicliquePair:
    """The largest pair ``(A, B)``, ``|A| = |B|``, with no edge of ``graph``
    between ``A`` and ``B``; a bi-clique of the complement.

    :examples:
        >>> max_balanced_empty_pair(DenseGraph(6, [(0, 1), (2, 3), (4, 5)])).size
        2
    """
    if mode == "greedy":
        return _greedy_empty_pair(graph)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    capacity = SETTINGS.exact_pair_capacity if capacity is None else capacity
    if graph.n > capacity:
        raise CapacityError(
            f"exact search supports at most {capacity} vertices, got {graph.n}"
        )
    return _exact_empty_pair(graph)


def is_delta_full(
    graph: DenseGraph,
    delta: Any,
    mode: str = "exact",
    capacity: Optional[int] = None,
) -> Verdict:
    """Every two sets of at least ``ceil(delta * n)`` vertices are joined by an
    edge. A failing verdict carries the empty pair; the greedy mode can only
    refute, so its positive verdicts are inconclusive."""
    delta = as_fraction(delta)
    if not 0 < delta <= Fraction(1, 2):
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    threshold = math.ceil(delta * graph.n)
    if mode == "greedy":
        pair = _greedy_empty_pair(graph)
        conclusive = False
    elif mode == "exact":
        capacity = SETTINGS.exact_pair_capacity if capacity is None else capacity
        if graph.n > capacity:
            raise CapacityError(
                f"exact search supports at most {capacity} vertices, got {graph.n}"
            )
        pair = _exact_empty_pair(graph, target=threshold)
        conclusive = True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if pair.size >= threshold:
        witness = BicliquePair(
            sorted(pair.A)[:threshold], sorted(pair.B)[:threshold]
        )
        return Verdict(False, witness)
    return Verdict(True, conclusive=conclusive)


def _sparsest_subset(graph: DenseGraph, size: int) -> Tuple[int, Tuple[int, ...]]:
    best_edges, best_subset = None, ()
    for subset in combinations(range(graph.n), size):
        edges = graph.edges_within(to_mask(subset))
        if best_edges is None or edges < best_edges:
            best_edges, best_subset = edges, subset
            if edges == 0:
                break
    return best_edges or 0, best_subset


def is_alpha_beta_dense(
    graph: DenseGraph,
    alpha: Any,
    beta: Any,
    mode: str = "exact",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    capacity: Optional[int] = None,
) -> Verdict:
    """Every induced subgraph on at least ``alpha * n`` vertices has density
    ``|E| / m**2`` at least ``beta``.

    The exact mode returns, for the smallest violating size, the sparsest
    subset (first in lexicographic order). The sampled mode draws ``samples``
    uniform subsets per size and flags its positive verdicts inconclusive.
    """
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if graph.n == 0:
        raise EmptyGraphError("density of the empty graph is undefined")
    sizes = range(max(1, math.ceil(alpha * graph.n)), graph.n + 1)

    if mode == "exact":
        capacity = SETTINGS.exact_density_capacity if capacity is None else capacity
        if graph.n > capacity:
            raise CapacityError(
                f"exact search supports at most {capacity} vertices, got {graph.n}"
            )
        for size in sizes:
            edges, subset = _sparsest_subset(graph, size)
            if Fraction(edges, size ** 2) < beta:
                return Verdict(False, frozenset(subset))
        return Verdict(True)

    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    samples = SETTINGS.density_samples if samples is None else samples
    rng = np.random.default_rng(seed)
    matrix = adjacency_matrix(graph)
    for size in sizes:
        for _ in range(samples):
            subset = np.sort(rng.choice(graph.n, size=size, replace=False))
            edges = int(matrix[np.ix_(subset, subset)].sum()) // 2
            if Fraction(edges, size ** 2) < beta:
                return Verdict(False, frozenset(int(v) for v in subset))
    logger.info("no sparse subset among %d samples per size", samples)
    return Verdict(True, conclusive=False)
