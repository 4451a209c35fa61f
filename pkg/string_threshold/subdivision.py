"""Partial subdivisions of K_t and (induced) weak subdivisions.

Vertex layout of ``realize(pattern)``: branch vertices ``0..t-1``, then the
side vertices of each edge ``(i, j)``, ``i < j`` in lexicographic order, listed
along the path from ``i`` to ``j``. ``subdivide`` uses the same layout for an
arbitrary graph: original vertices first, then ``k`` side vertices per edge in
sorted edge order.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from string_threshold.config import SETTINGS
from string_threshold.data_structures import (
    DenseGraph,
    Edge,
    SubdivisionPattern,
    Verdict,
    WeakSubdivisionWitness,
    as_fraction,
    iter_bits,
    kt_edges,
    to_mask,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def realize(pattern: SubdivisionPattern) -> DenseGraph:
    """
    :examples:
        >>> realize(SubdivisionPattern(3, {(0, 1): 1, (0, 2): 1, (1, 2): 1}))
        DenseGraph(n=6, edges=[(0, 3), (0, 4), (1, 3), (1, 5), (2, 4), (2, 5)])
    """
    edges: List[Edge] = []
    for (i, j), path in pattern_paths(pattern).items():
        chain = [i, *path, j]
        edges.extend(zip(chain, chain[1:]))
    return DenseGraph(pattern.vertex_count, edges)


def pattern_paths(pattern: SubdivisionPattern) -> Dict[Edge, List[int]]:
    """side-vertex labels of every ``K_t`` edge in the layout of ``realize``"""
    label = pattern.t
    paths = {}
    for pair, count in pattern.k.items():
        paths[pair] = list(range(label, label + count))
        label += count
    return paths


def weak_extra_pairs(pattern: SubdivisionPattern) -> List[Edge]:
    """label pairs that a weak subdivision may join: side vertices of two
    distinct ``K_t`` edges sharing an endpoint"""
    paths = pattern_paths(pattern)
    pairs = []
    for e, f in combinations(kt_edges(pattern.t), 2):
        if set(e) & set(f):
            pairs.extend((min(a, b), max(a, b)) for a in paths[e] for b in paths[f])
    return sorted(pairs)


def realize_weak(
    pattern: SubdivisionPattern, extra_edges: Sequence[Edge] = ()
) -> DenseGraph:
    allowed = set(weak_extra_pairs(pattern))
    for u, v in extra_edges:
        if (min(u, v), max(u, v)) not in allowed:
            raise ValueError(f"({u}, {v}) does not join neighbouring side vertices")
    base = realize(pattern)
    return DenseGraph(base.n, base.edges() + list(extra_edges))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def _canonical_counts(t: int, counts: Tuple[int, ...]) -> Tuple[int, ...]:
    edges = kt_edges(t)
    index = {pair: position for position, pair in enumerate(edges)}
    best = counts
    for perm in permutations(range(t)):
        image = [0] * len(edges)
        for (i, j), count in zip(edges, counts):
            a, b = perm[i], perm[j]
            image[index[min(a, b), max(a, b)]] = count
        best = max(best, tuple(image))
    return best


def partial_subdivisions(t: int, max_vertices: int) -> List[SubdivisionPattern]:
    """One pattern per isomorphism class of partial subdivisions of ``K_t``
    with at most ``max_vertices`` vertices, classes being orbits of the
    side-path lengths under the permutations of the branch vertices.

    :examples:
        >>> [p.vertex_count for p in partial_subdivisions(5, 7)]
        [5, 6, 7, 7, 7]
    """
    if t < 3:
        raise ValueError(f"t must be at least 3, got {t}")
    if max_vertices < t:
        raise ValueError(f"max_vertices must be at least {t}, got {max_vertices}")
    classes: Set[Tuple[int, ...]] = set()
    for total in range(max_vertices - t + 1):
        for counts in _compositions(total, len(kt_edges(t))):
            classes.add(_canonical_counts(t, counts))
    ordered = sorted(classes, key=lambda counts: (sum(counts), [-c for c in counts]))
    return [SubdivisionPattern.from_counts(t, counts) for counts in ordered]


def subdivision_layout(graph: DenseGraph, k: int) -> Dict[Edge, List[int]]:
    label = graph.n
    layout = {}
    for edge in graph.edges():
        layout[edge] = list(range(label, label + k))
        label += k
    return layout


def allowed_extra_pairs(graph: DenseGraph, k: int) -> List[Edge]:
    layout = subdivision_layout(graph, k)
    pairs = []
    for e, f in combinations(sorted(layout), 2):
        if set(e) & set(f):
            pairs.extend((min(a, b), max(a, b)) for a in layout[e] for b in layout[f])
    return sorted(pairs)


def subdivide(graph: DenseGraph, k: int, extra_edges: Sequence[Edge] = ()) -> DenseGraph:
    """replace every edge by a path through ``k`` new vertices, then add
    ``extra_edges`` (which must join side vertices of neighbouring edges)"""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    layout = subdivision_layout(graph, k)
    edges: List[Edge] = []
    for (u, v), sides in layout.items():
        chain = [u, *sides, v]
        edges.extend(zip(chain, chain[1:]))
    allowed = set(allowed_extra_pairs(graph, k)) if extra_edges else set()
    for u, v in extra_edges:
        if (min(u, v), max(u, v)) not in allowed:
            raise ValueError(f"({u}, {v}) does not join neighbouring side vertices")
        edges.append((u, v))
    return DenseGraph(graph.n + k * graph.edge_count, edges)


def random_weak_subdivision(
    graph: DenseGraph,
    k: int = 2,
    seed: Optional[int] = None,
    probability: Any = Fraction(1, 2),
) -> Tuple[DenseGraph, List[Edge]]:
    """a weak ``k``-subdivision keeping each allowed extra edge independently"""
    rng = np.random.default_rng(seed)
    pairs = allowed_extra_pairs(graph, k)
    keep = rng.random(len(pairs)) < float(as_fraction(probability))
    extra = [pair for pair, kept in zip(pairs, keep) if kept]
    return subdivide(graph, k, extra), extra


def weak_two_subdivision(
    pattern: SubdivisionPattern,
    seed: Optional[int] = None,
    probability: Any = Fraction(1, 2),
) -> DenseGraph:
    return random_weak_subdivision(realize(pattern), 2, seed, probability)[0]


class SearchBudgetExhausted(Exception):
    pass


class _WeakSubdivisionSearch:
    """Backtracking search for a weak subdivision of ``K_t`` induced on a
    subset of ``pool``. Branch images are chosen first, then the side paths
    are grown depth first, edge by edge. With ``exact`` the subset must be the
    whole pool."""

    def __init__(
        self,
        graph: DenseGraph,
        t: int,
        pool: int,
        exact: bool,
        budget: Optional[int],
    ) -> None:
        self.graph = graph
        self.rows = graph.rows
        self.t = t
        self.pool = pool
        self.exact = exact
        self.budget = budget
        self.nodes = 0
        self.edges = kt_edges(t)
        self.disjoint = [
            [g for g, other in enumerate(self.edges) if not set(edge) & set(other)]
            for edge in self.edges
        ]

    def _tick(self) -> None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise SearchBudgetExhausted(self.nodes)

    def run(self) -> Optional[WeakSubdivisionWitness]:
        t, rows, pool = self.t, self.rows, self.pool
        if pool.bit_count() < t + len(self.edges):
            return None
        if self.exact:
            candidates = [v for v in iter_bits(pool) if (rows[v] & pool).bit_count() == t - 1]
        else:
            candidates = [v for v in iter_bits(pool) if (rows[v] & pool).bit_count() >= t - 1]
        for branches in self._branch_sets(candidates, [], 0):
            self.branch = branches
            self.branch_mask = to_mask(branches)
            self.side_masks = [0] * len(self.edges)
            self.paths: List[List[int]] = [[] for _ in self.edges]
            if self._grow(0, self.branch_mask):
                return self._witness()
        return None

    def _branch_sets(
        self, candidates: List[int], chosen: List[int], start: int
    ) -> Iterator[List[int]]:
        if len(chosen) == self.t:
            yield list(chosen)
            return
        for position in range(start, len(candidates)):
            if len(candidates) - position < self.t - len(chosen):
                return
            v = candidates[position]
            if any(self.rows[v] >> u & 1 for u in chosen):
                continue
            self._tick()
            chosen.append(v)
            yield from self._branch_sets(candidates, chosen, position + 1)
            chosen.pop()

    def _grow(self, index: int, used: int) -> bool:
        if index == len(self.edges):
            return not self.exact or used == self.pool
        if self.exact and (self.pool & ~used).bit_count() < len(self.edges) - index:
            return False
        return self._extend(index, used, [])

    def _extend(self, index: int, used: int, path: List[int]) -> bool:
        i, j = self.edges[index]
        b_i, b_j = self.branch[i], self.branch[j]
        rows = self.rows
        forbidden = 0
        for other in self.disjoint[index]:
            forbidden |= self.side_masks[other]
        anchor = path[-1] if path else b_i
        earlier = to_mask(path[:-1])
        others = self.branch_mask & ~(1 << b_i | 1 << b_j)
        for v in iter_bits(rows[anchor] & self.pool & ~used):
            self._tick()
            row = rows[v]
            if row & (others | forbidden | earlier):
                continue
            if path and row >> b_i & 1:
                continue
            path.append(v)
            self.side_masks[index] |= 1 << v
            if row >> b_j & 1:
                self.paths[index] = list(path)
                if self._grow(index + 1, used | 1 << v):
                    return True
            elif self._extend(index, used | 1 << v, path):
                return True
            path.pop()
            self.side_masks[index] &= ~(1 << v)
        return False

    def _witness(self) -> WeakSubdivisionWitness:
        pattern = SubdivisionPattern.from_counts(self.t, [len(p) for p in self.paths])
        mapping = {label: v for label, v in enumerate(self.branch)}
        label = self.t
        for path in self.paths:
            for v in path:
                mapping[label] = v
                label += 1
        return _with_extra_edges(self.graph, pattern, mapping)


def _subdivision_edges(pattern: SubdivisionPattern, mapping: Dict[int, int]) -> Set[Edge]:
    return {
        (min(mapping[a], mapping[b]), max(mapping[a], mapping[b]))
        for a, b in realize(pattern).edges()
    }


def _with_extra_edges(
    graph: DenseGraph, pattern: SubdivisionPattern, mapping: Dict[int, int]
) -> WeakSubdivisionWitness:
    required = _subdivision_edges(pattern, mapping)
    vertices = sorted(mapping.values())
    extra = [
        (u, v)
        for u, v in combinations(vertices, 2)
        if graph.has_edge(u, v) and (u, v) not in required
    ]
    return WeakSubdivisionWitness(pattern, mapping, extra)


def validate_weak_subdivision(
    graph: DenseGraph, witness: WeakSubdivisionWitness
) -> List[str]:
    """Problems with ``witness`` as an induced weak subdivision of ``K_t`` in
    ``graph``; empty when it is one."""
    pattern, mapping = witness.pattern, witness.mapping
    problems = []
    if not pattern.is_full:
        problems.append("every edge of K_t must be subdivided")
    required = _subdivision_edges(pattern, mapping)
    allowed = {
        (min(mapping[a], mapping[b]), max(mapping[a], mapping[b]))
        for a, b in weak_extra_pairs(pattern)
    }
    for u, v in combinations(sorted(mapping.values()), 2):
        present = graph.has_edge(u, v)
        if (u, v) in required and not present:
            problems.append(f"missing edge ({u}, {v})")
        elif (u, v) not in required and present and (u, v) not in allowed:
            problems.append(f"forbidden edge ({u}, {v})")
    return problems


def is_weak_subdivision(
    graph: DenseGraph, t: int, budget: Optional[int] = None
) -> Optional[WeakSubdivisionWitness]:
    """A witness that ``graph`` itself, on all of its vertices, is a weak
    subdivision of ``K_t``, or None.

    :examples:
        >>> is_weak_subdivision(DenseGraph.cycle(6), 3).pattern
        SubdivisionPattern(t=3, k={(0, 1): 1, (0, 2): 1, (1, 2): 1})
    """
    search = _WeakSubdivisionSearch(graph, t, graph.vertex_mask, True, budget)
    return search.run()


def contains_induced_weak_subdivision(
    graph: DenseGraph, t: int, budget: Optional[int] = None
) -> Verdict:
    """Search for a vertex subset inducing a weak subdivision of ``K_t``.

    The verdict's witness is ``(subset, WeakSubdivisionWitness)``. Running out
    of ``budget`` search nodes gives a negative verdict flagged inconclusive.
    """
    if graph.n < t + len(kt_edges(t)):
        return Verdict(False)
    budget = SETTINGS.containment_budget if budget is None else budget
    search = _WeakSubdivisionSearch(graph, t, graph.vertex_mask, False, budget)
    try:
        witness = search.run()
    except SearchBudgetExhausted:
        logger.info("containment search for K_%d ran out of budget %d", t, budget)
        return Verdict(False, conclusive=False)
    if witness is None:
        return Verdict(False)
    return Verdict(True, (witness.vertices, witness))


def _portions(pattern: SubdivisionPattern, base: DenseGraph) -> Dict[Edge, List[int]]:
    """for every ``K_t`` edge, the host vertices of its stretch of a
    2-subdivision of ``base = realize(pattern)``"""
    layout = subdivision_layout(base, 2)
    portions = {}
    for (i, j), path in pattern_paths(pattern).items():
        chain = [i, *path, j]
        vertices = list(chain)
        for u, v in zip(chain, chain[1:]):
            vertices.extend(layout[min(u, v), max(u, v)])
        portions[i, j] = vertices
    return portions


def extract_weak_subdivision(
    pattern: SubdivisionPattern, host: DenseGraph
) -> WeakSubdivisionWitness:
    """``host`` is a weak 2-subdivision of ``realize(pattern)`` in the layout
    of ``subdivide``; keep the branch vertices and, for every ``K_t`` edge, a
    shortest path through its stretch of the host."""
    base = realize(pattern)
    nx_host = host.to_networkx()
    mapping = {i: i for i in range(pattern.t)}
    counts = []
    label = pattern.t
    for (i, j), vertices in _portions(pattern, base).items():
        path = nx_host.subgraph(vertices).copy()
        interior = nx.shortest_path(path, i, j)[1:-1]
        counts.append(len(interior))
        for v in interior:
            mapping[label] = v
            label += 1
    extracted = SubdivisionPattern.from_counts(pattern.t, counts)
    return _with_extra_edges(host, extracted, mapping)


def weak_contains_weak(pattern: SubdivisionPattern, host: DenseGraph) -> FrozenSet[int]:
    """the vertices of an induced weak subdivision of ``K_t`` inside a weak
    2-subdivision of the partial subdivision ``pattern``"""
    return extract_weak_subdivision(pattern, host).vertices
