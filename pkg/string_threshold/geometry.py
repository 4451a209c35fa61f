"""String graphs from polyline arrangements and the separator route to an
empty balanced pair.

Coordinates are exact rationals and every predicate is an exact orientation
test. Arrangements must be in general position: curves are simple, distinct
curves meet only in proper crossings of two segment interiors, and no point
is shared by more than one crossing. Touching is rejected, never repaired;
only ``random_curves`` re-draws.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from multipledispatch import dispatch

from string_threshold.config import SETTINGS
from string_threshold.data_structures import (
    BicliquePair,
    DenseGraph,
    GeneralPositionError,
    GenerationError,
    Immutable,
    as_fraction,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

Point = Tuple[Fraction, Fraction]


def orientation(a: Point, b: Point, c: Point) -> int:
    """sign of the turn ``a -> b -> c``: 1 counter-clockwise, -1 clockwise

    :examples:
        >>> orientation((0, 0), (1, 0), (0, 1)), orientation((0, 0), (1, 1), (2, 2))
        (1, 0)
    """
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (area > 0) - (area < 0)


def _on_closed_segment(p: Point, q: Point, r: Point) -> bool:
    """``r`` lies on the segment ``pq``, given that the three are collinear"""
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(
        p[1], q[1]
    )


def segment_contact(p: Point, q: Point, r: Point, s: Point) -> Optional[str]:
    """``"cross"`` for a proper crossing of the two interiors, ``"touch"`` for
    any other common point, None when the closed segments are disjoint"""
    o1, o2 = orientation(p, q, r), orientation(p, q, s)
    o3, o4 = orientation(r, s, p), orientation(r, s, q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return "cross"
    if (
        (o1 == 0 and _on_closed_segment(p, q, r))
        or (o2 == 0 and _on_closed_segment(p, q, s))
        or (o3 == 0 and _on_closed_segment(r, s, p))
        or (o4 == 0 and _on_closed_segment(r, s, q))
    ):
        return "touch"
    return None


def crossing_point(p: Point, q: Point, r: Point, s: Point) -> Point:
    """the common point of two properly crossing segments"""
    dx, dy = q[0] - p[0], q[1] - p[1]
    ex, ey = s[0] - r[0], s[1] - r[1]
    t = ((r[0] - p[0]) * ey - (r[1] - p[1]) * ex) / (dx * ey - dy * ex)
    return p[0] + t * dx, p[1] + t * dy


class Polyline(Immutable):
    """
    :examples:
        >>> Polyline([(0, 0), (0, 0)])
        Traceback (most recent call last):
            ...
        ValueError: consecutive points must be distinct
    """

    def __init__(self, points: Iterable[Sequence[Any]]) -> None:
        points = tuple((as_fraction(x), as_fraction(y)) for x, y in points)
        if len(points) < 2:
            raise ValueError("a polyline needs at least 2 points")
        if any(a == b for a, b in zip(points, points[1:])):
            raise ValueError("consecutive points must be distinct")
        self._set(points=points)

    @property
    def segments(self) -> List[Tuple[Point, Point]]:
        return list(zip(self.points, self.points[1:]))

    def __repr__(self) -> str:
        return "Polyline([" + ", ".join(f"({x}, {y})" for x, y in self.points) + "])"

    def __hash__(self) -> int:
        return hash(self.points)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Polyline):
            raise TypeError(f"{other} must be a Polyline")
        return self.points == other.points


@dataclass(frozen=True)
class Crossing:
    """curve ``first`` (segment ``segments[0]``) crosses curve ``second``
    (segment ``segments[1]``) at ``point``; ``first < second``"""

    first: int
    second: int
    point: Point
    segments: Tuple[int, int]


Segment = Tuple[int, int, Point, Point]


def _segments(curves: Sequence[Polyline]) -> List[Segment]:
    return [
        (i, k, p, q) for i, curve in enumerate(curves) for k, (p, q) in enumerate(curve.segments)
    ]


def _self_problem(i: int, curve: Polyline) -> Optional[str]:
    segments = curve.segments
    for k in range(len(segments) - 1):
        (p, q), (_, r) = segments[k], segments[k + 1]
        backwards = (q[0] - p[0]) * (r[0] - q[0]) + (q[1] - p[1]) * (r[1] - q[1]) < 0
        if orientation(p, q, r) == 0 and backwards:
            return f"curve {i} folds back on itself at segment {k + 1}"
    for k, l in combinations(range(len(segments)), 2):
        if l > k + 1 and segment_contact(*segments[k], *segments[l]):
            return f"curve {i} meets itself at segments {k} and {l}"
    return None


def _pair_crossing(a: Segment, b: Segment) -> Optional[Crossing]:
    i, k, p, q = a
    j, l, r, s = b
    contact = segment_contact(p, q, r, s)
    if contact is None:
        return None
    if contact == "touch":
        raise GeneralPositionError(
            f"curves {i} and {j} touch at segments {k} and {l}"
        )
    return Crossing(i, j, crossing_point(p, q, r, s), (k, l))


def _check_concurrency(crossings: Sequence[Crossing]) -> None:
    seen: Dict[Point, Crossing] = {}
    for crossing in crossings:
        other = seen.setdefault(crossing.point, crossing)
        if other is not crossing:
            raise GeneralPositionError(
                f"curves ({other.first}, {other.second}) and "
                f"({crossing.first}, {crossing.second}) cross at the same point"
            )


def crossings_bruteforce(curves: Sequence[Polyline]) -> List[Crossing]:
    """every pair of segments of distinct curves, tested exactly"""
    for i, curve in enumerate(curves):
        problem = _self_problem(i, curve)
        if problem:
            raise GeneralPositionError(problem)
    found = []
    for a, b in combinations(_segments(curves), 2):
        if a[0] != b[0]:
            crossing = _pair_crossing(a, b)
            if crossing is not None:
                found.append(crossing)
    found.sort(key=lambda c: (c.first, c.second, c.segments, c.point))
    _check_concurrency(found)
    return found


def _integer_boxes(segments: Sequence[Segment]) -> Optional[np.ndarray]:
    """``(xmin, xmax, ymin, ymax)`` per segment on a common integer scale,
    None when the scale overflows 64 bits"""
    coordinates = [c for _, _, p, q in segments for c in (*p, *q)]
    scale = reduce(math.lcm, (c.denominator for c in coordinates), 1)
    largest = max((abs(c.numerator) * (scale // c.denominator) for c in coordinates), default=0)
    if largest >= 2 ** 62:
        return None
    scaled = np.array(
        [c.numerator * (scale // c.denominator) for c in coordinates], dtype=np.int64
    ).reshape(-1, 4)
    return np.stack(
        [
            np.minimum(scaled[:, 0], scaled[:, 2]),
            np.maximum(scaled[:, 0], scaled[:, 2]),
            np.minimum(scaled[:, 1], scaled[:, 3]),
            np.maximum(scaled[:, 1], scaled[:, 3]),
        ],
        axis=1,
    )


def _candidate_pairs(segments: Sequence[Segment], chunk: int = 1024) -> Iterable[Tuple[int, int]]:
    boxes = _integer_boxes(segments)
    if boxes is None:
        yield from combinations(range(len(segments)), 2)
        return
    owner = np.array([s[0] for s in segments])
    for start in range(0, len(segments), chunk):
        rows = boxes[start : start + chunk]
        overlap = (
            (rows[:, None, 0] <= boxes[None, :, 1])
            & (boxes[None, :, 0] <= rows[:, None, 1])
            & (rows[:, None, 2] <= boxes[None, :, 3])
            & (boxes[None, :, 2] <= rows[:, None, 3])
        )
        index = np.arange(start, start + len(rows))
        overlap &= index[:, None] < np.arange(len(segments))[None, :]
        overlap &= owner[index][:, None] != owner[None, :]
        for a, b in zip(*np.nonzero(overlap)):
            yield start + int(a), int(b)


def find_crossings(curves: Sequence[Polyline]) -> List[Crossing]:
    """``crossings_bruteforce`` with a bounding-box prefilter on an integer
    scale; both agree on every input"""
    for i, curve in enumerate(curves):
        problem = _self_problem(i, curve)
        if problem:
            raise GeneralPositionError(problem)
    segments = _segments(curves)
    found = []
    for a, b in _candidate_pairs(segments):
        crossing = _pair_crossing(segments[a], segments[b])
        if crossing is not None:
            found.append(crossing)
    found.sort(key=lambda c: (c.first, c.second, c.segments, c.point))
    _check_concurrency(found)
    return found


class CurveArrangement(Immutable):
    """Curves in general position with their crossings.

    :examples:
        >>> X = CurveArrangement([[(0, 0), (1, 1)], [(0, 1), (1, 0)]])
        >>> X.crossings[0].point
        (Fraction(1, 2), Fraction(1, 2))
    """

    def __init__(self, curves: Iterable[Any]) -> None:
        curves = tuple(c if isinstance(c, Polyline) else Polyline(c) for c in curves)
        self._set(curves=curves, crossings=tuple(find_crossings(curves)))

    @property
    def n(self) -> int:
        return len(self.curves)

    def __repr__(self) -> str:
        return f"CurveArrangement(n={self.n}, crossings={len(self.crossings)})"

    def __hash__(self) -> int:
        return hash(self.curves)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CurveArrangement):
            raise TypeError(f"{other} must be a CurveArrangement")
        return self.curves == other.curves


def crossings(arrangement: CurveArrangement) -> List[Crossing]:
    return list(arrangement.crossings)


def intersection_graph(arrangement: CurveArrangement) -> DenseGraph:
    """
    :examples:
        >>> intersection_graph(CurveArrangement([[(0, 0), (1, 1)], [(0, 1), (1, 0)]]))
        DenseGraph(n=2, edges=[(0, 1)])
    """
    return DenseGraph(arrangement.n, {(c.first, c.second) for c in arrangement.crossings})


@dataclass(frozen=True)
class Planarization:
    """Nodes ``("end", i, 0 | 1)`` and ``("cross", c)``; every edge carries
    the index of its curve under the key ``"curve"``."""

    graph: nx.MultiGraph
    arrangement: CurveArrangement

    def curves_at(self, node: Hashable) -> Tuple[int, ...]:
        if node[0] == "end":
            return (node[1],)
        crossing = self.arrangement.crossings[node[1]]
        return crossing.first, crossing.second


def _position(curve: Polyline, segment: int, point: Point) -> Tuple[int, Fraction]:
    p, q = curve.segments[segment]
    return segment, (point[0] - p[0]) * (q[0] - p[0]) + (point[1] - p[1]) * (q[1] - p[1])


def planarize(arrangement: CurveArrangement) -> Planarization:
    """
    :examples:
        >>> p = planarize(CurveArrangement([[(0, 0), (1, 1)], [(0, 1), (1, 0)]]))
        >>> p.graph.number_of_nodes(), p.graph.number_of_edges()
        (5, 4)
    """
    events: Dict[int, List[Tuple[Tuple[int, Fraction], Hashable]]] = {
        i: [] for i in range(arrangement.n)
    }
    for index, crossing in enumerate(arrangement.crossings):
        for curve, segment in zip((crossing.first, crossing.second), crossing.segments):
            key = _position(arrangement.curves[curve], segment, crossing.point)
            events[curve].append((key, ("cross", index)))
    graph = nx.MultiGraph()
    for i in range(arrangement.n):
        chain = [("end", i, 0), *(node for _, node in sorted(events[i])), ("end", i, 1)]
        graph.add_nodes_from(chain)
        for u, v in zip(chain, chain[1:]):
            graph.add_edge(u, v, curve=i)
    expected = arrangement.n + 2 * len(arrangement.crossings)
    if graph.number_of_edges() != expected:
        raise ArithmeticError(
            f"planarization has {graph.number_of_edges()} arcs, expected {expected}"
        )
    return Planarization(graph, arrangement)


def _pseudo_peripheral(graph: nx.Graph, start: Hashable) -> Hashable:
    root, eccentricity = start, -1
    while True:
        lengths = nx.single_source_shortest_path_length(graph, root)
        far = max(lengths, key=lambda v: (lengths[v], str(v)))
        if lengths[far] <= eccentricity:
            return root
        root, eccentricity = far, lengths[far]


def component_sizes(graph: nx.Graph, removed: Iterable[Hashable]) -> List[int]:
    rest = graph.subgraph(set(graph) - set(removed))
    return sorted((len(c) for c in nx.connected_components(rest)), reverse=True)


def _level_candidates(levels: List[List[Hashable]], total: int) -> Tuple[int, float, Tuple[int, ...]]:
    """the best separator made of one or two BFS levels, as ``(size, largest
    piece, level indices)``; pieces are counted between the removed levels"""
    bound = 2 * total / 3
    sizes = [len(level) for level in levels]
    before = [0, *np.cumsum(sizes).tolist()]
    r = len(levels)
    best: Tuple[int, float, Tuple[int, ...]] = (total + 1, math.inf, ())
    for l in range(r):
        piece = max(before[l], before[r] - before[l + 1])
        if piece <= bound:
            best = min(best, (sizes[l], piece, (l,)))
    budget = 2 * math.sqrt(total)
    small = [l for l in range(r) if sizes[l] <= budget]
    for a, b in combinations(small, 2):
        piece = max(before[a], before[b] - before[a + 1], before[r] - before[b + 1])
        if piece <= bound:
            best = min(best, (sizes[a] + sizes[b], piece, (a, b)))
    return best


def _cycle_candidates(
    graph: nx.Graph, tree: Dict[Hashable, Hashable], limit: int
) -> Iterable[List[Hashable]]:
    """fundamental cycles of the BFS tree, as vertex lists"""

    def to_root(v: Hashable) -> List[Hashable]:
        path = [v]
        while path[-1] in tree:
            path.append(tree[path[-1]])
        return path

    seen = 0
    for u, v in graph.edges():
        if tree.get(u) == v or tree.get(v) == u or u == v:
            continue
        left, right = to_root(u), to_root(v)
        shared = set(left) & set(right)
        cycle = [x for x in left if x not in shared] + [x for x in right if x not in shared]
        top = next(x for x in left if x in shared)
        yield cycle + [top]
        seen += 1
        if seen >= limit:
            return


@dispatch(nx.Graph)
def planar_separator(graph, cycles=None):  # type: ignore
    """A vertex set whose removal leaves components of at most two thirds of
    the vertices: the smallest of the single BFS levels, the pairs of small
    levels, and the fundamental cycles of the BFS tree, grown from a
    pseudo-peripheral root of the largest component.

    :examples:
        >>> sorted(planar_separator(nx.path_graph(7)))
        [3]
    """
    cycles = SETTINGS.fundamental_cycles if cycles is None else cycles
    total = graph.number_of_nodes()
    bound = 2 * total / 3
    if total == 0:
        return frozenset()
    components = sorted(nx.connected_components(graph), key=len, reverse=True)
    if len(components[0]) <= bound:
        return frozenset()
    big = graph.subgraph(components[0])
    root = _pseudo_peripheral(big, min(big, key=str))
    lengths = nx.single_source_shortest_path_length(big, root)
    levels: List[List[Hashable]] = [[] for _ in range(max(lengths.values()) + 1)]
    for v, d in lengths.items():
        levels[d].append(v)
    tree = {v: u for u, v in nx.bfs_edges(big, root)}
    size, _, chosen = _level_candidates(levels, total)
    best = [v for l in chosen for v in levels[l]]
    for cycle in _cycle_candidates(big, tree, cycles):
        if len(cycle) < size and max(component_sizes(graph, cycle), default=0) <= bound:
            best, size = cycle, len(cycle)
    logger.debug("separator of %d vertices in a graph of %d", len(best), total)
    return frozenset(best)


@dispatch(Planarization)  # type: ignore
def planar_separator(p, cycles=None):  # noqa: F811
    return planar_separator(p.graph, cycles=cycles)


@dispatch(DenseGraph)  # type: ignore
def planar_separator(graph, cycles=None):  # noqa: F811
    return planar_separator(graph.to_networkx(), cycles=cycles)


@dataclass(frozen=True)
class SeparatorPipeline:
    """``curves`` owns the planar separator ``nodes``; ``pair`` has no
    crossing between its sides."""

    nodes: FrozenSet[Hashable]
    curves: FrozenSet[int]
    pair: BicliquePair
    planar_vertices: int
    crossings: int

    @property
    def constant(self) -> float:
        """measured ``|S| / sqrt(crossings)``"""
        return len(self.nodes) / math.sqrt(self.crossings) if self.crossings else 0.0


def pack_components(components: Sequence[Sequence[int]]) -> BicliquePair:
    """largest first into the lighter of two groups, then both cut to the
    smaller size"""
    groups: Tuple[List[int], List[int]] = ([], [])
    for component in sorted(components, key=lambda c: (-len(c), min(c))):
        lighter = min(groups, key=len)
        lighter.extend(sorted(component))
    size = min(len(g) for g in groups)
    return BicliquePair(groups[0][:size], groups[1][:size])


def separator_biclique(arrangement: CurveArrangement, cycles: Optional[int] = None) -> SeparatorPipeline:
    """Separate the planarization, lift the separator to the curves that own
    its vertices and split the remaining curves into two sides without a
    crossing between them.

    :examples:
        >>> parallel = CurveArrangement([[(0, y), (1, y)] for y in range(4)])
        >>> separator_biclique(parallel).pair
        BicliquePair(A=[0, 2], B=[1, 3])
    """
    p = planarize(arrangement)
    nodes = planar_separator(p, cycles=cycles)
    owners = frozenset(c for node in nodes for c in p.curves_at(node))
    graph = intersection_graph(arrangement)
    remaining = [v for v in range(arrangement.n) if v not in owners]
    rest = graph.to_networkx().subgraph(remaining)
    pair = pack_components([list(c) for c in nx.connected_components(rest)])
    if any(graph.has_edge(a, b) for a in pair.A for b in pair.B):
        raise RuntimeError("separator pipeline produced a crossing between the sides")
    logger.info(
        "separator: %d planar vertices, %d curves removed, pair of size %d",
        len(nodes),
        len(owners),
        pair.size,
    )
    return SeparatorPipeline(
        nodes, owners, pair, p.graph.number_of_nodes(), len(arrangement.crossings)
    )


def _random_curve(rng: np.random.Generator, segments: int, width: int, height: int, step: int) -> Polyline:
    x = int(rng.integers(0, max(1, width - segments * step)))
    y = int(rng.integers(0, height))
    points = [(x, y)]
    for _ in range(segments):
        x += int(rng.integers(1, step + 1))
        y = int(np.clip(y + rng.integers(-step, step + 1), 0, height))
        points.append((x, y))
    return Polyline(points)


def _fits(curve: Polyline, placed: Sequence[Polyline], points: set) -> Optional[List[Point]]:
    """the new crossing points when ``curve`` keeps general position"""
    if _self_problem(len(placed), curve) is not None:
        return None
    new = []
    for p, q in curve.segments:
        xs, ys = sorted((p[0], q[0])), sorted((p[1], q[1]))
        for other in placed:
            for r, s in other.segments:
                if max(r[0], s[0]) < xs[0] or min(r[0], s[0]) > xs[1]:
                    continue
                if max(r[1], s[1]) < ys[0] or min(r[1], s[1]) > ys[1]:
                    continue
                contact = segment_contact(p, q, r, s)
                if contact == "touch":
                    return None
                if contact == "cross":
                    point = crossing_point(p, q, r, s)
                    if point in points or point in new:
                        return None
                    new.append(point)
    return new


def random_curves(
    n: int,
    segments_per_curve: int,
    bbox: Tuple[int, int],
    seed: Optional[int] = None,
    step: Optional[int] = None,
    retries: Optional[int] = None,
) -> CurveArrangement:
    """Seeded x-monotone polylines with integer vertices in
    ``[0, width] x [0, height]``; ``step`` bounds every coordinate change
    along a curve. A curve that breaks general position is re-drawn.

    :examples:
        >>> random_curves(1, 3, (50, 50), seed=0).crossings
        ()
    """
    if n < 1 or segments_per_curve < 1:
        raise ValueError("n and segments_per_curve must be positive")
    width, height = bbox
    if width < 1 or height < 1:
        raise ValueError(f"bbox must be positive, got {bbox}")
    step = max(1, width // segments_per_curve) if step is None else step
    retries = SETTINGS.perturbation_retries if retries is None else retries
    rng = np.random.default_rng(seed)
    placed: List[Polyline] = []
    points: set = set()
    for i in range(n):
        for _ in range(retries):
            curve = _random_curve(rng, segments_per_curve, width, height, step)
            new = _fits(curve, placed, points)
            if new is not None:
                placed.append(curve)
                points.update(new)
                break
        else:
            raise GenerationError(
                f"could not place curve {i} in general position after {retries} attempts"
            )
    return CurveArrangement(placed)
