"""Canonical labelling, vertex orbits and isomorph-free graph enumeration.

Canonical forms come from equitable partition refinement followed by
individualisation; the canonical labelling is the leaf of the search tree
with the largest adjacency code. A cell whose vertices are pairwise twins is
individualised at a single vertex only, since swapping twins is an
automorphism.
"""
from __future__ import annotations

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from string_threshold.data_structures import DenseGraph, to_mask

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

Certificate = Tuple[int, int]
Cells = List[List[int]]

GOLDEN_FILE = Path(__file__).with_name("golden.json")


def _refine(rows: Sequence[int], cells: Cells) -> Cells:
    while True:
        masks = [to_mask(cell) for cell in cells]
        refined: Cells = []
        for cell in cells:
            if len(cell) == 1:
                refined.append(cell)
                continue
            groups: Dict[Tuple[int, ...], List[int]] = {}
            for v in cell:
                signature = tuple((rows[v] & mask).bit_count() for mask in masks)
                groups.setdefault(signature, []).append(v)
            refined.extend(groups[signature] for signature in sorted(groups))
        if len(refined) == len(cells):
            return refined
        cells = refined


def _are_twins(rows: Sequence[int], cell: List[int]) -> bool:
    first = cell[0]
    for v in cell[1:]:
        ignore = ~(1 << first | 1 << v)
        if rows[first] & ignore != rows[v] & ignore:
            return False
    return True


def _leaves(rows: Sequence[int], cells: Cells) -> Iterator[List[int]]:
    cells = _refine(rows, cells)
    target = next((i for i, cell in enumerate(cells) if len(cell) > 1), None)
    if target is None:
        yield [cell[0] for cell in cells]
        return
    cell = cells[target]
    for v in cell[:1] if _are_twins(rows, cell) else cell:
        rest = [u for u in cell if u != v]
        yield from _leaves(rows, cells[:target] + [[v], rest] + cells[target + 1 :])


def _code(rows: Sequence[int], order: Sequence[int]) -> int:
    code = 0
    for i, u in enumerate(order):
        row = rows[u]
        for v in order[i + 1 :]:
            code = code << 1 | (row >> v & 1)
    return code


def _best_leaf(rows: Sequence[int], cells: Cells) -> Tuple[int, List[int]]:
    best_code, best_order = -1, []
    for order in _leaves(rows, cells):
        code = _code(rows, order)
        if code > best_code:
            best_code, best_order = code, order
    return best_code, best_order


def canonical_form(graph: DenseGraph) -> Tuple[Certificate, List[int]]:
    """The certificate ``(n, code)`` shared exactly by the graphs isomorphic to
    ``graph``, and the canonical order (position -> vertex).

    :examples:
        >>> path = DenseGraph(3, [(0, 1), (1, 2)])
        >>> canonical_form(path)[0] == canonical_form(DenseGraph(3, [(0, 2), (2, 1)]))[0]
        True
    """
    if graph.n == 0:
        return (0, 0), []
    code, order = _best_leaf(graph.rows, [list(range(graph.n))])
    return (graph.n, code), order


def certificate(graph: DenseGraph) -> Certificate:
    return canonical_form(graph)[0]


def canonical_graph(graph: DenseGraph) -> DenseGraph:
    _, order = canonical_form(graph)
    position = [0] * graph.n
    for i, v in enumerate(order):
        position[v] = i
    return graph.relabel(position)


def are_isomorphic(left: DenseGraph, right: DenseGraph) -> bool:
    return certificate(left) == certificate(right)


@lru_cache(maxsize=4096)
def _orbits(rows: Tuple[int, ...], fixed: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
    free = [v for v in range(len(rows)) if v not in fixed]
    pinned = [[f] for f in fixed]
    groups: Dict[int, List[int]] = {}
    for v in free:
        rest = [u for u in free if u != v]
        cells = pinned + [[v]] + ([rest] if rest else [])
        code, _ = _best_leaf(rows, cells)
        groups.setdefault(code, []).append(v)
    return tuple(sorted(tuple(group) for group in groups.values()))


def vertex_orbits(
    graph: DenseGraph, fixed: Iterable[int] = ()
) -> List[Tuple[int, ...]]:
    """Orbits of the automorphisms of ``graph`` that fix ``fixed`` pointwise,
    each sorted, ordered by smallest member; fixed vertices are left out.

    :examples:
        >>> vertex_orbits(DenseGraph(4, [(0, 1), (1, 2), (2, 3)]))
        [(0, 3), (1, 2)]
    """
    return list(_orbits(graph.rows, tuple(fixed)))


def orbit_representatives(graph: DenseGraph, fixed: Iterable[int] = ()) -> List[int]:
    return [orbit[0] for orbit in vertex_orbits(graph, fixed)]


def one_vertex_extensions(
    graphs: Iterable[DenseGraph],
    accept: Optional[Callable[[DenseGraph, int], bool]] = None,
    reverse: bool = False,
) -> List[DenseGraph]:
    """Canonical representatives of the graphs obtained by joining a new vertex
    to any subset of a parent's vertices, one per isomorphism class.

    ``accept(graph, new_vertex)`` filters the classes; it must be
    isomorphism invariant on the classes it is asked about, since each class is
    decided once, at its first occurrence.
    """
    decided: Dict[Certificate, Optional[DenseGraph]] = {}
    for parent in graphs:
        new = parent.n
        masks: Iterable[int] = range(1 << new)
        if reverse:
            masks = reversed(range(1 << new))
        for mask in masks:
            rows = [row | (1 << new if mask >> u & 1 else 0) for u, row in enumerate(parent.rows)]
            graph = DenseGraph.from_rows(rows + [mask], check=False)
            (size, code), order = canonical_form(graph)
            if (size, code) in decided:
                continue
            if accept is None or accept(graph, new):
                position = [0] * graph.n
                for i, v in enumerate(order):
                    position[v] = i
                decided[size, code] = graph.relabel(position)
            else:
                decided[size, code] = None
    return [graph for _, graph in sorted(decided.items()) if graph is not None]


def enumerate_graphs(n: int, reverse: bool = False) -> List[DenseGraph]:
    """All graphs on ``n`` vertices up to isomorphism, as canonical
    representatives ordered by certificate.

    :examples:
        >>> [len(enumerate_graphs(n)) for n in range(5)]
        [1, 1, 2, 4, 11]
    """
    if n < 0:
        raise ValueError(f"{n} must be a non-negative integer")
    level = [DenseGraph(0)]
    for size in range(n):
        level = one_vertex_extensions(level, reverse=reverse)
        logger.info("%d graphs on %d vertices", len(level), size + 1)
    return level


def golden_values() -> Dict[str, Dict[str, int]]:
    return json.loads(GOLDEN_FILE.read_text())


def check_graph_counts(n_max: int) -> Dict[int, Tuple[int, int]]:
    """``{n: (enumerated, golden)}`` for every ``n <= n_max`` where they differ"""
    golden = golden_values()["graph_counts"]
    mismatches = {}
    for n in range(n_max + 1):
        count = len(enumerate_graphs(n))
        if count != golden[str(n)]:
            mismatches[n] = (count, golden[str(n)])
    return mismatches
