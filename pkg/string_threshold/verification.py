"""Exhaustive verification of the finite statements behind the 1/4 bound.

Every sweep returns a ``VerificationReport``; violations carry the graph6
string of the counterexample. Admissible-freeness is hereditary, so the
admissible-free graphs on ``s + 1`` vertices are found among the one-vertex
extensions of those on ``s`` vertices, checking only subsets through the new
vertex.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from itertools import combinations, permutations, product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from string_threshold.admissibility import find_admissible_subgraph, is_H_admissible
from string_threshold.config import SETTINGS
from string_threshold.data_structures import CapacityError, DenseGraph, iter_bits, to_mask
from string_threshold.enumeration import (
    certificate,
    check_graph_counts,
    enumerate_graphs,
    one_vertex_extensions,
)
from string_threshold.simplex import minimize_phi
from string_threshold.subdivision import partial_subdivisions, realize

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

QUARTER = Fraction(1, 4)
OBSERVATIONS = (
    "edge-pairs",
    "pair-configurations",
    "uniform-neighbours",
    "complement-degree",
    "inequality",
    "long-cycles",
)


@dataclass
class VerificationReport:
    scope: str
    graph_count: int = 0
    admissible_free_count: int = 0
    min_phi: Optional[Fraction] = None
    extremal_graphs: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: VerificationReport) -> VerificationReport:
        if self.min_phi is None or (
            other.min_phi is not None and other.min_phi < self.min_phi
        ):
            min_phi, extremal = other.min_phi, list(other.extremal_graphs)
        elif other.min_phi == self.min_phi:
            min_phi = self.min_phi
            extremal = sorted(set(self.extremal_graphs) | set(other.extremal_graphs))
        else:
            min_phi, extremal = self.min_phi, list(self.extremal_graphs)
        scope = self.scope if self.scope == other.scope else f"{self.scope}+{other.scope}"
        return VerificationReport(
            scope,
            self.graph_count + other.graph_count,
            self.admissible_free_count + other.admissible_free_count,
            min_phi,
            extremal,
            self.violations + other.violations,
            {**self.details, **other.details},
        )


def default_family(t: int = 5, max_vertices: int = 8) -> Tuple[DenseGraph, ...]:
    """the partial subdivisions of ``K_t`` on at most ``max_vertices``
    vertices, smallest first"""
    return tuple(realize(p) for p in partial_subdivisions(t, max_vertices))


def _parallel_map(function: Callable, items: Sequence, workers: int) -> List:
    if workers <= 1 or len(items) < 2:
        return [function(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items, chunksize=max(1, len(items) // (4 * workers))))


def _is_free(family: Tuple[DenseGraph, ...], graph: DenseGraph) -> bool:
    return find_admissible_subgraph(graph, list(family)) is None


def _extension_is_free(family: Tuple[DenseGraph, ...], graph: DenseGraph, new: int) -> bool:
    return find_admissible_subgraph(graph, list(family), must_include=new) is None


@lru_cache(maxsize=None)
def admissible_free_levels(
    s: int, family: Tuple[DenseGraph, ...]
) -> Tuple[Tuple[DenseGraph, ...], ...]:
    """the admissible-free graphs on ``0..s`` vertices, level by level"""
    levels = [(DenseGraph(0),)]
    for size in range(1, s + 1):
        accept = partial(_extension_is_free, family)
        levels.append(tuple(one_vertex_extensions(levels[-1], accept=accept)))
        logger.info("%d admissible-free graphs on %d vertices", len(levels[-1]), size)
    return tuple(levels)


def admissible_free_graphs(
    s: int,
    family: Optional[Sequence[DenseGraph]] = None,
    hereditary: bool = True,
    workers: Optional[int] = None,
) -> List[DenseGraph]:
    family = default_family() if family is None else tuple(family)
    if hereditary:
        return list(admissible_free_levels(s, family)[s])
    workers = SETTINGS.workers if workers is None else workers
    graphs = enumerate_graphs(s)
    free = _parallel_map(partial(_is_free, family), graphs, workers)
    return [graph for graph, kept in zip(graphs, free) if kept]


def _phi_report(scope: str, graphs: Iterable[DenseGraph], workers: int) -> VerificationReport:
    graphs = list(graphs)
    report = VerificationReport(scope, admissible_free_count=len(graphs))
    values = _parallel_map(_phi_value, graphs, workers)
    for graph, value in zip(graphs, values):
        if value < QUARTER:
            report.violations.append(f"phi {value} < 1/4 for {graph.to_graph6()}")
        if report.min_phi is None or value < report.min_phi:
            report.min_phi, report.extremal_graphs = value, [graph.to_graph6()]
        elif value == report.min_phi:
            report.extremal_graphs.append(graph.to_graph6())
    return report


def _phi_value(graph: DenseGraph) -> Fraction:
    return minimize_phi(graph).value


def verify_prop_quarter(
    s: int,
    family: Optional[Sequence[DenseGraph]] = None,
    workers: Optional[int] = None,
) -> VerificationReport:
    """Every admissible-free graph on ``s`` vertices has ``min phi >= 1/4``.

    All graphs on ``s`` vertices are filtered directly; the admissible-free
    ones are cross-checked against the hereditary construction, and the graph
    count against the reversed enumeration order and the stored counts.
    """
    if s < 1:
        raise ValueError(f"s must be positive, got {s}")
    if s > 7:
        raise CapacityError(f"exhaustive sweep supports s <= 7, got {s}")
    family = default_family() if family is None else tuple(family)
    workers = SETTINGS.workers if workers is None else workers
    graphs = enumerate_graphs(s)
    free = admissible_free_graphs(s, family, hereditary=False, workers=workers)
    report = _phi_report(f"quarter s={s}", free, workers)
    report.graph_count = len(graphs)

    hereditary = {certificate(graph) for graph in admissible_free_graphs(s, family)}
    if hereditary != {certificate(graph) for graph in free}:
        report.violations.append("hereditary and direct admissible-free sets differ")
    reversed_count = len(enumerate_graphs(s, reverse=True))
    if reversed_count != len(graphs):
        report.violations.append(
            f"enumeration orders disagree: {len(graphs)} != {reversed_count}"
        )
    mismatches = check_graph_counts(s)
    if s in mismatches:
        report.violations.append(f"graph count {mismatches[s]} differs from golden")
    report.details["reversed_count"] = reversed_count
    return report


def verify_claim_s8(
    family: Optional[Sequence[DenseGraph]] = None,
    exhaustive: bool = False,
    workers: Optional[int] = None,
) -> VerificationReport:
    """No graph on 8 vertices is admissible-free.

    By default only the one-vertex extensions of the admissible-free graphs on
    7 vertices are checked (``graph_count`` counts those classes);
    ``exhaustive`` checks all 12346 graphs on 8 vertices.
    """
    family = default_family() if family is None else tuple(family)
    workers = SETTINGS.workers if workers is None else workers
    if exhaustive:
        candidates = enumerate_graphs(8)
        check = partial(_is_free, family)
        free_flags = _parallel_map(check, candidates, workers)
    else:
        candidates = one_vertex_extensions(admissible_free_levels(7, family)[7])
        free_flags = _parallel_map(partial(_is_free, family), candidates, workers)
    report = VerificationReport("s8", graph_count=len(candidates))
    for graph, free in zip(candidates, free_flags):
        if free:
            report.admissible_free_count += 1
            report.violations.append(f"admissible-free graph {graph.to_graph6()}")
    return report


# reusable configurations


def has_neighbouring_and_disjoint_edges(graph: DenseGraph, subset: Iterable[int]) -> bool:
    """``graph[subset]`` has two edges sharing a vertex and two disjoint edges"""
    local = graph.induced(sorted(subset))
    edges = local.edges()
    pairs = list(combinations(edges, 2))
    neighbouring = any(set(e) & set(f) for e, f in pairs)
    disjoint = any(not set(e) & set(f) for e, f in pairs)
    return neighbouring and disjoint


def pair_configuration(graph: DenseGraph, a: int, b: int, A: Sequence[int]) -> Optional[int]:
    """Which forbidden ``(a, b, A)`` configuration holds, if any:

    1. no edges between ``{a, b}`` and ``A``;
    2. no edges between ``a`` and ``A`` while ``b`` is joined to all of ``A``;
    3. ``ab`` is an edge and both are joined to all of ``A``.
    """
    mask = to_mask(A)
    to_a = (graph.rows[a] & mask).bit_count()
    to_b = (graph.rows[b] & mask).bit_count()
    if to_a == 0 and to_b == 0:
        return 1
    if to_a == 0 and to_b == len(A):
        return 2
    if graph.has_edge(a, b) and to_a == len(A) and to_b == len(A):
        return 3
    return None


def uniform_towards(graph: DenseGraph, v: int, A: Sequence[int]) -> bool:
    """``v`` is joined to every vertex of ``A`` or to none"""
    count = (graph.rows[v] & to_mask(A)).bit_count()
    return count in (0, len(A))


def is_cycle_or_path(graph: DenseGraph, A: Sequence[int]) -> bool:
    local = certificate(graph.induced(sorted(A)))
    return local in (certificate(DenseGraph.cycle(4)), certificate(DenseGraph.path(4)))


def has_cycle_of_length(graph: DenseGraph, length: int) -> bool:
    """a (not necessarily induced) cycle through exactly ``length`` vertices,
    by dynamic programming over paths rooted at their smallest vertex"""
    rows = graph.rows
    for start in range(graph.n):
        allowed = graph.vertex_mask & ~((1 << (start + 1)) - 1)
        frontier = {(1 << start, start)}
        for _ in range(length - 1):
            frontier = {
                (mask | 1 << u, u)
                for mask, v in frontier
                for u in iter_bits(rows[v] & allowed & ~mask)
            }
        if any(rows[v] >> start & 1 for _, v in frontier):
            return True
    return False


def _edge_pairs() -> VerificationReport:
    K5 = DenseGraph.complete(5)
    report = VerificationReport("edge-pairs")
    for graph in enumerate_graphs(5):
        report.graph_count += 1
        if not has_neighbouring_and_disjoint_edges(graph, range(5)):
            if is_H_admissible(graph, K5) is None:
                report.violations.append(f"edge-pairs: {graph.to_graph6()}")
    return report


def _pair_configurations(levels: Sequence[Sequence[DenseGraph]]) -> VerificationReport:
    K5 = DenseGraph.complete(5)
    report = VerificationReport("pair-configurations")
    for graph in enumerate_graphs(5):
        for a, b in permutations(range(5), 2):
            A = [v for v in range(5) if v not in (a, b)]
            if pair_configuration(graph, a, b, A) is None:
                continue
            report.graph_count += 1
            if is_H_admissible(graph, K5) is None:
                report.violations.append(f"pair-configurations direct: {graph.to_graph6()}")
            break
    for graph in (g for level in levels for g in level if g.n >= 5):
        for a, b in permutations(range(graph.n), 2):
            rest = [v for v in range(graph.n) if v not in (a, b)]
            for A in combinations(rest, 3):
                found = pair_configuration(graph, a, b, A)
                if found is not None:
                    report.violations.append(
                        f"pair-configuration {found} in {graph.to_graph6()}"
                    )
    return report


def _uniform_neighbours(levels: Sequence[Sequence[DenseGraph]]) -> VerificationReport:
    report = VerificationReport("uniform-neighbours")
    for graph in (g for level in levels for g in level if g.n >= 5):
        report.graph_count += 1
        for v in range(graph.n):
            rest = [u for u in range(graph.n) if u != v]
            for A in combinations(rest, 4):
                if uniform_towards(graph, v, A) and not is_cycle_or_path(graph, A):
                    report.violations.append(f"uniform-neighbours: {graph.to_graph6()} at {v}")
    return report


def _complement_degree(levels: Sequence[Sequence[DenseGraph]]) -> VerificationReport:
    report = VerificationReport("complement-degree")
    for graph in (g for level in levels for g in level if g.n >= 7):
        report.graph_count += 1
        complement = graph.complement()
        if max(complement.degree(v) for v in range(graph.n)) > 4:
            report.violations.append(f"complement-degree: {graph.to_graph6()}")
    return report


def four_number_gaps(a: Fraction, b: Fraction, c: Fraction, d: Fraction) -> Tuple[Fraction, Fraction]:
    """``(ac + bd) - (ad + bc)`` and ``(ab + cd) - (ac + bd)``"""
    return a * c + b * d - a * d - b * c, a * b + c * d - a * c - b * d


def _inequality(denominator: int = 20) -> VerificationReport:
    report = VerificationReport("inequality")
    grid = [Fraction(i, denominator) for i in range(denominator + 1)]
    for a, b, c, d in combinations_with_order(grid):
        report.graph_count += 1
        low, high = four_number_gaps(a, b, c, d)
        if low < 0 or high < 0:
            report.violations.append(f"inequality fails at {(a, b, c, d)}")
    # both gaps are multilinear, so agreeing on {0, 1, 2}^4 is an identity
    for a, b, c, d in product(range(3), repeat=4):
        low, high = four_number_gaps(*map(Fraction, (a, b, c, d)))
        if low != (b - a) * (d - c):
            report.violations.append("first factorisation is not an identity")
        if high != (c - b) * (d - a):
            report.violations.append("second factorisation is not an identity")
    report.details["second_gap_factor"] = "(c-b)(d-a)"
    return report


def combinations_with_order(grid: Sequence[Fraction]) -> Iterable[Tuple[Fraction, ...]]:
    """all ``a <= b <= c <= d`` drawn from ``grid``"""
    for i in range(len(grid)):
        for j in range(i, len(grid)):
            for k in range(j, len(grid)):
                for m in range(k, len(grid)):
                    yield grid[i], grid[j], grid[k], grid[m]


def _long_cycles(workers: int) -> VerificationReport:
    cyclic = [
        graph
        for graph in enumerate_graphs(7)
        if has_cycle_of_length(graph, 6) or has_cycle_of_length(graph, 7)
    ]
    report = _phi_report("long-cycles", cyclic, workers)
    report.graph_count, report.admissible_free_count = len(cyclic), 0
    return report


def verify_observations(
    scopes: Sequence[str] = OBSERVATIONS,
    family: Optional[Sequence[DenseGraph]] = None,
    workers: Optional[int] = None,
) -> VerificationReport:
    """Check the structural observations behind the 1/4 bound, each in its
    finite scope, and merge the reports (``details`` keeps one summary per
    scope)."""
    unknown = set(scopes) - set(OBSERVATIONS)
    if unknown:
        raise ValueError(f"unknown scopes {sorted(unknown)}")
    family = default_family() if family is None else tuple(family)
    workers = SETTINGS.workers if workers is None else workers
    levels: Sequence[Sequence[DenseGraph]] = ()
    if {"pair-configurations", "uniform-neighbours", "complement-degree"} & set(scopes):
        levels = admissible_free_levels(8, family)
    checks = {
        "edge-pairs": _edge_pairs,
        "pair-configurations": lambda: _pair_configurations(levels),
        "uniform-neighbours": lambda: _uniform_neighbours(levels),
        "complement-degree": lambda: _complement_degree(levels),
        "inequality": _inequality,
        "long-cycles": lambda: _long_cycles(workers),
    }
    merged: Optional[VerificationReport] = None
    for scope in scopes:
        report = checks[scope]()
        report.details[scope] = {
            "checked": report.graph_count,
            "violations": len(report.violations),
        }
        logger.info("%s: %d checked, %d violations", scope, report.graph_count, len(report.violations))
        merged = report if merged is None else merged.merge(report)
    assert merged is not None
    merged.scope = "observations"
    return merged


def integer_partitions(total: int, parts: int, largest: Optional[int] = None) -> Iterable[Tuple[int, ...]]:
    """partitions of ``total`` into at most ``parts`` positive parts,
    non-increasing"""
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    if parts == 0:
        return
    for first in range(min(total, largest), 0, -1):
        for rest in integer_partitions(total - first, parts - 1, first):
            yield (first, *rest)


def clique_union(sizes: Sequence[int]) -> Tuple[DenseGraph, List[List[int]]]:
    blocks, label = [], 0
    for size in sizes:
        blocks.append(list(range(label, label + size)))
        label += size
    edges = [pair for block in blocks for pair in combinations(block, 2)]
    return DenseGraph(label, edges), blocks


def block_form_matches(graph: DenseGraph, blocks: Sequence[Sequence[int]]) -> bool:
    """``I + A/2 == I/2 + B/2`` entrywise, ``B`` the same-block indicator:
    the quadratic identity ``phi(Q) = (sum phi^2 + sum block_sum^2) / 2``"""
    block_of = {v: index for index, block in enumerate(blocks) for v in block}
    half = Fraction(1, 2)
    for a, b in product(range(graph.n), repeat=2):
        form = 1 if a == b else half * graph.has_edge(a, b)
        split = half * (a == b) + half * (block_of[a] == block_of[b])
        if form != split:
            return False
    return True


def verify_clique_partition_bound(t: int, s: int) -> VerificationReport:
    """For every disjoint union of at most ``t - 1`` cliques on ``s``
    vertices: the block identity of ``phi``, ``min phi >= 1/(2s) + 1/(2(t-1))``
    and no independent set of size ``t``."""
    if not 3 <= t <= 5:
        raise ValueError(f"t must lie in [3, 5], got {t}")
    if not 1 <= s <= 10:
        raise ValueError(f"s must lie in [1, 10], got {s}")
    bound = Fraction(1, 2 * s) + Fraction(1, 2 * (t - 1))
    report = VerificationReport(f"clique-bound t={t} s={s}")
    for sizes in integer_partitions(s, t - 1):
        graph, blocks = clique_union(sizes)
        report.graph_count += 1
        if not block_form_matches(graph, blocks):
            report.violations.append(f"block identity fails for {sizes}")
        value = minimize_phi(graph).value
        if value < bound:
            report.violations.append(f"phi {value} < {bound} for {sizes}")
        if report.min_phi is None or value < report.min_phi:
            report.min_phi, report.extremal_graphs = value, [graph.to_graph6()]
        independent = any(
            graph.edges_within(to_mask(subset)) == 0
            for subset in combinations(range(s), t)
        )
        if independent:
            report.violations.append(f"independent {t}-set in {sizes}")
    report.details["bound"] = str(bound)
    return report


def verify_ramsey_three() -> VerificationReport:
    """every graph on six vertices has a ``K_3``-admissible triple, and every
    triangle and independent triple is one"""
    K3 = DenseGraph.complete(3)
    report = VerificationReport("ramsey t=3")
    for graph in enumerate_graphs(6):
        report.graph_count += 1
        if find_admissible_subgraph(graph, [K3]) is None:
            report.violations.append(f"no K3-admissible triple in {graph.to_graph6()}")
    for graph in (DenseGraph.complete(3), DenseGraph.empty(3)):
        if is_H_admissible(graph, K3) is None:
            report.violations.append(f"{graph.to_graph6()} is not K3-admissible")
    return report
