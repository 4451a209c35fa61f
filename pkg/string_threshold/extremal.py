"""Dense graphs whose complements have only small bi-cliques.

Four cliques of (nearly) equal size with sparse random edges between them
have about ``n**2 / 8`` edges, yet every balanced empty pair stays of
logarithmic size.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from string_threshold.config import SETTINGS
from string_threshold.data_structures import DenseGraph, GenerationError, as_fraction
from string_threshold.graphs import max_balanced_empty_pair

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def four_parts(n: int) -> List[List[int]]:
    """
    :examples:
        >>> four_parts(10)
        [[0, 1, 2], [3, 4, 5], [6, 7], [8, 9]]
    """
    if n < 4:
        raise ValueError(f"n must be at least 4, got {n}")
    sizes = [n // 4 + (i < n % 4) for i in range(4)]
    starts = np.cumsum([0, *sizes]).tolist()
    return [list(range(a, b)) for a, b in zip(starts, starts[1:])]


def edge_budget(n: int, eps: Any) -> Fraction:
    """``(1/4 + eps) n**2 / 2``"""
    return (Fraction(1, 4) + as_fraction(eps)) * n * n / 2


def inter_probability(n: int, eps: Any) -> Fraction:
    """the probability that puts the expected edge count on the budget

    :examples:
        >>> inter_probability(100, "1/20")
        Fraction(2, 25)
    """
    parts = four_parts(n)
    intra = sum(math.comb(len(part), 2) for part in parts)
    budget = edge_budget(n, eps)
    if intra > budget:
        raise ValueError(
            f"eps={as_fraction(eps)} leaves no room for the four cliques: {intra} > {budget}"
        )
    inter = math.comb(n, 2) - intra
    return min(Fraction(1), (budget - intra) / inter)


def extremal_four_part_graph(
    n: int,
    eps: Any,
    seed: Optional[int] = None,
    probability: Optional[Any] = None,
    resample_limit: Optional[int] = None,
) -> DenseGraph:
    """Four cliques joined by independent random edges of ``probability``
    (``inter_probability`` by default); a draw above the edge budget is
    redrawn."""
    p = inter_probability(n, eps) if probability is None else as_fraction(probability)
    budget = edge_budget(n, eps)
    resample_limit = SETTINGS.resample_limit if resample_limit is None else resample_limit
    parts = four_parts(n)
    part_of = np.repeat(np.arange(4), [len(part) for part in parts])
    same = part_of[:, None] == part_of[None, :]
    rng = np.random.default_rng(seed)
    for attempt in range(resample_limit):
        draw = np.triu(rng.random((n, n)) < float(p), k=1)
        matrix = np.where(same, True, draw | draw.T)
        np.fill_diagonal(matrix, False)
        edges = int(matrix.sum()) // 2
        if edges <= budget:
            logger.debug("four-part graph on %d vertices after %d draws", n, attempt + 1)
            rows, cols = np.nonzero(np.triu(matrix, k=1))
            return DenseGraph(n, zip(rows.tolist(), cols.tolist()))
    raise GenerationError(f"no draw within {budget} edges after {resample_limit} attempts")


def parts_graph(sizes: Sequence[int], inter_edges: Iterable[Tuple[int, int]] = ()) -> DenseGraph:
    """disjoint cliques of the given sizes plus ``inter_edges``"""
    starts = np.cumsum([0, *sizes]).tolist()
    edges = [e for a, b in zip(starts, starts[1:]) for e in combinations(range(a, b), 2)]
    return DenseGraph(starts[-1], [*edges, *inter_edges])


def measure_biclique_growth(
    ns: Sequence[int],
    eps: Any,
    seeds: Sequence[int],
    capacity: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """One row per ``(n, seed)``: the largest balanced empty pair of the
    four-part graph, exact up to ``capacity`` vertices and greedy (flagged)
    above, next to ``log2 n``. Sizes are reported, not compared."""
    capacity = SETTINGS.exact_pair_capacity if capacity is None else capacity
    rows = []
    for n in ns:
        for seed in seeds:
            graph = extremal_four_part_graph(n, eps, seed)
            exact = n <= capacity
            pair = max_balanced_empty_pair(graph, "exact" if exact else "greedy", capacity)
            rows.append(
                {
                    "n": n,
                    "seed": seed,
                    "edges": graph.edge_count,
                    "biclique": pair.size,
                    "exact": exact,
                    "log2n": round(math.log2(n), 6),
                }
            )
    return rows
