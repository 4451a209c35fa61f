from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx

Edge = Tuple[int, int]


class EmptyGraphError(ValueError):
    pass


class CapacityError(ValueError):
    pass


class GeneralPositionError(ValueError):
    pass


class CurveFileError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


def iter_bits(mask: int) -> Iterator[int]:
    """
    :examples:
        >>> list(iter_bits(0b10110))
        [1, 2, 4]
    """
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def as_fraction(value: Any) -> Fraction:
    """exact conversion; floats go through their shortest repr so 0.1 == 1/10

    :examples:
        >>> as_fraction("3/10"), as_fraction(0.1), as_fraction([1, 4])
        (Fraction(3, 10), Fraction(1, 10), Fraction(1, 4))
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"{value} must be a rational number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    raise TypeError(f"{value} must be a rational number")


class Immutable:
    def __setattr__(self, name: str, value: Any) -> None:
        raise TypeError("object is immutable")

    def __delattr__(self, name: str) -> None:
        raise TypeError("object is immutable")

    def _set(self, **attributes: Any) -> None:
        for name, value in attributes.items():
            object.__setattr__(self, name, value)


class DenseGraph(Immutable):
    """A simple undirected graph on the vertices ``0..n-1`` stored as one
    adjacency bitmask per vertex.

    :examples:
        >>> DenseGraph(3, [(0, 1), (1, 2)])
        DenseGraph(n=3, edges=[(0, 1), (1, 2)])

        >>> DenseGraph(2, [(1, 1)])
        Traceback (most recent call last):
            ...
        ValueError: self-loop at 1
    """

    def __init__(self, n: int, edges: Iterable[Edge] = ()) -> None:
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ValueError(f"{n} must be a non-negative integer")
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        self._set(n=n, rows=tuple(rows))

    @classmethod
    def from_rows(cls, rows: Iterable[int], check: bool = True) -> DenseGraph:
        graph = cls.__new__(cls)
        rows = tuple(rows)
        for u, row in enumerate(rows if check else ()):
            if row >> u & 1:
                raise ValueError(f"self-loop at {u}")
            for v in iter_bits(row):
                if v >= len(rows) or not rows[v] >> u & 1:
                    raise ValueError(f"adjacency is not symmetric at ({u}, {v})")
        graph._set(n=len(rows), rows=rows)
        return graph

    @classmethod
    def complete(cls, n: int) -> DenseGraph:
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> DenseGraph:
        return cls(n)

    @classmethod
    def cycle(cls, n: int) -> DenseGraph:
        if n < 3:
            raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> DenseGraph:
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> DenseGraph:
        index = {node: i for i, node in enumerate(sorted(graph.nodes))}
        return cls(len(index), ((index[u], index[v]) for u, v in graph.edges))

    @classmethod
    def from_graph6(cls, text: str) -> DenseGraph:
        data = text.strip().encode("ascii")
        return cls.from_networkx(nx.from_graph6_bytes(data))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def to_graph6(self) -> str:
        return nx.to_graph6_bytes(self.to_networkx(), header=False).decode().strip()

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        if self.n <= 12:
            return f"DenseGraph(n={self.n}, edges={self.edges()})"
        return f"DenseGraph(n={self.n}, edge_count={self.edge_count})"

    def __hash__(self) -> int:
        return hash(self.rows)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, DenseGraph):
            raise TypeError(f"{other} must be a DenseGraph")
        return self.rows == other.rows

    def __reduce__(self):
        return DenseGraph.from_rows, (self.rows,)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edges(self) -> List[Edge]:
        return [
            (u, v) for u, row in enumerate(self.rows) for v in iter_bits(row) if u < v
        ]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbours(self, v: int) -> List[int]:
        return list(iter_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def edges_within(self, mask: int) -> int:
        return sum((self.rows[v] & mask).bit_count() for v in iter_bits(mask)) // 2

    def edges_between(self, left: int, right: int) -> int:
        return sum((self.rows[v] & right).bit_count() for v in iter_bits(left))

    def complement(self) -> DenseGraph:
        full = self.vertex_mask
        return DenseGraph.from_rows(
            [full & ~row & ~(1 << v) for v, row in enumerate(self.rows)]
        )

    def induced(self, vertices: Sequence[int]) -> DenseGraph:
        """the subgraph induced by ``vertices``, relabelled in the given order"""
        vertices = list(vertices)
        position = {v: i for i, v in enumerate(vertices)}
        if len(position) != len(vertices):
            raise ValueError("vertices must be distinct")
        rows = []
        for v in vertices:
            row = 0
            for u in iter_bits(self.rows[v]):
                if u in position:
                    row |= 1 << position[u]
            rows.append(row)
        return DenseGraph.from_rows(rows)

    def relabel(self, permutation: Sequence[int]) -> DenseGraph:
        """vertex ``v`` becomes ``permutation[v]``"""
        if sorted(permutation) != list(range(self.n)):
            raise ValueError(f"{list(permutation)} must be a permutation")
        rows = [0] * self.n
        for u, v in self.edges():
            a, b = permutation[u], permutation[v]
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        return DenseGraph.from_rows(rows)

    def disjoint_union(self, other: DenseGraph) -> DenseGraph:
        shift = self.n
        return DenseGraph.from_rows(
            list(self.rows) + [row << shift for row in other.rows]
        )


class BicliquePair(Immutable):
    """Two disjoint vertex sets of equal size.

    :examples:
        >>> BicliquePair([0, 1], [1, 2])
        Traceback (most recent call last):
            ...
        ValueError: A and B must be disjoint
    """

    def __init__(self, A: Iterable[int], B: Iterable[int]) -> None:
        A, B = frozenset(A), frozenset(B)
        if A & B:
            raise ValueError("A and B must be disjoint")
        if len(A) != len(B):
            raise ValueError("A and B must have equal size")
        self._set(A=A, B=B)

    @classmethod
    def empty(cls) -> BicliquePair:
        return cls((), ())

    @property
    def size(self) -> int:
        return len(self.A)

    def __repr__(self) -> str:
        return f"BicliquePair(A={sorted(self.A)}, B={sorted(self.B)})"

    def __hash__(self) -> int:
        return hash(frozenset((self.A, self.B)))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, BicliquePair):
            raise TypeError(f"{other} must be a BicliquePair")
        return {self.A, self.B} == {other.A, other.B}


class WeightedCompleteGraph(Immutable):
    """A complete graph on ``0..k-1`` with an exact rational weight in [0, 1]
    on every pair.

    :examples:
        >>> R = WeightedCompleteGraph(3, {(0, 1): "1/2", (0, 2): 0, (1, 2): 1})
        >>> R.total_weight(), R.degree(1)
        (Fraction(3, 2), Fraction(3, 2))
    """

    def __init__(self, k: int, weights: Mapping[Edge, Any]) -> None:
        if isinstance(k, bool) or not isinstance(k, int) or k < 0:
            raise ValueError(f"{k} must be a non-negative integer")
        table: Dict[Edge, Fraction] = {}
        for (x, y), value in weights.items():
            if x == y or not (0 <= x < k and 0 <= y < k):
                raise ValueError(f"({x}, {y}) is not a pair of vertices")
            weight = as_fraction(value)
            if not 0 <= weight <= 1:
                raise ValueError(f"weight {weight} of ({x}, {y}) is outside [0, 1]")
            table[min(x, y), max(x, y)] = weight
        missing = [pair for pair in combinations(range(k), 2) if pair not in table]
        if missing:
            raise ValueError(f"missing weights for {missing}")
        self._set(k=k, _weights=table)

    @classmethod
    def uniform(cls, k: int, weight: Any) -> WeightedCompleteGraph:
        return cls(k, {pair: weight for pair in combinations(range(k), 2)})

    @classmethod
    def from_graph(
        cls, graph: DenseGraph, edge: Any = Fraction(1, 2), non_edge: Any = 0
    ) -> WeightedCompleteGraph:
        return cls(
            graph.n,
            {
                (x, y): edge if graph.has_edge(x, y) else non_edge
                for x, y in combinations(range(graph.n), 2)
            },
        )

    def __repr__(self) -> str:
        body = ", ".join(f"{x}{y}: {w}" for (x, y), w in sorted(self._weights.items()))
        return f"WeightedCompleteGraph(k={self.k}, {{{body}}})"

    def __hash__(self) -> int:
        return hash((self.k, tuple(sorted(self._weights.items()))))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, WeightedCompleteGraph):
            raise TypeError(f"{other} must be a WeightedCompleteGraph")
        return self.k == other.k and self._weights == other._weights

    def __reduce__(self):
        return WeightedCompleteGraph, (self.k, dict(self._weights))

    def weight(self, x: int, y: int) -> Fraction:
        return self._weights[min(x, y), max(x, y)]

    def pairs(self) -> List[Edge]:
        return sorted(self._weights)

    def items(self) -> List[Tuple[Edge, Fraction]]:
        return sorted(self._weights.items())

    def total_weight(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def degree(self, x: int) -> Fraction:
        return sum((self.weight(x, y) for y in range(self.k) if y != x), Fraction(0))

    def values(self) -> FrozenSet[Fraction]:
        return frozenset(self._weights.values())

    def value_set(self) -> FrozenSet[Fraction]:
        """the weights outside {0, 1/2, 1}"""
        return frozenset(
            w for w in self._weights.values() if w not in (0, Fraction(1, 2), 1)
        )

    def pairs_with(self, value: Fraction) -> List[Edge]:
        return [pair for pair, w in sorted(self._weights.items()) if w == value]

    def replace(self, changes: Mapping[Edge, Any]) -> WeightedCompleteGraph:
        weights: Dict[Edge, Any] = dict(self._weights)
        for (x, y), value in changes.items():
            weights[min(x, y), max(x, y)] = value
        return WeightedCompleteGraph(self.k, weights)

    def restrict(self, vertices: Sequence[int]) -> WeightedCompleteGraph:
        vertices = list(vertices)
        return WeightedCompleteGraph(
            len(vertices),
            {
                (i, j): self.weight(vertices[i], vertices[j])
                for i, j in combinations(range(len(vertices)), 2)
            },
        )

    def relabel(self, permutation: Sequence[int]) -> WeightedCompleteGraph:
        return WeightedCompleteGraph(
            self.k,
            {(permutation[x], permutation[y]): w for (x, y), w in self._weights.items()},
        )


class VertexWeightedGraph(Immutable):
    """A graph ``Q`` with rational vertex weights ``phi`` summing to one."""

    def __init__(self, graph: DenseGraph, phi: Sequence[Any]) -> None:
        if not isinstance(graph, DenseGraph):
            raise TypeError(f"{graph} must be a DenseGraph")
        weights = tuple(as_fraction(value) for value in phi)
        if len(weights) != graph.n:
            raise ValueError(f"expected {graph.n} vertex weights, got {len(weights)}")
        if any(value < 0 for value in weights):
            raise ValueError("phi must be non-negative")
        if sum(weights) != 1:
            raise ValueError("phi must sum to 1")
        self._set(graph=graph, phi=weights)

    @classmethod
    def uniform(cls, graph: DenseGraph) -> VertexWeightedGraph:
        return cls(graph, [Fraction(1, graph.n)] * graph.n)

    def __repr__(self) -> str:
        return f"VertexWeightedGraph({self.graph!r}, phi={list(map(str, self.phi))})"

    def __hash__(self) -> int:
        return hash((self.graph, self.phi))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, VertexWeightedGraph):
            raise TypeError(f"{other} must be a VertexWeightedGraph")
        return self.graph == other.graph and self.phi == other.phi


def kt_edges(t: int) -> List[Edge]:
    return list(combinations(range(t), 2))


class SubdivisionPattern(Immutable):
    """A partial subdivision of ``K_t``: edge ``{i, j}`` is replaced by a path
    with ``k[i, j]`` side vertices (0 keeps the edge).

    :examples:
        >>> SubdivisionPattern(3, {(0, 1): 1, (2, 1): 2})
        SubdivisionPattern(t=3, k={(0, 1): 1, (1, 2): 2})

        >>> SubdivisionPattern(3, {(0, 1): 1}).vertex_count
        4
    """

    def __init__(self, t: int, k: Optional[Mapping[Edge, int]] = None) -> None:
        if isinstance(t, bool) or not isinstance(t, int) or t < 1:
            raise ValueError(f"{t} must be a positive integer")
        counts = dict.fromkeys(kt_edges(t), 0)
        for (i, j), value in (k or {}).items():
            pair = (min(i, j), max(i, j))
            if pair not in counts:
                raise ValueError(f"({i}, {j}) is not an edge of K_{t}")
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"side-path length {value} must be a natural number")
            counts[pair] = value
        self._set(t=t, counts=tuple(counts[pair] for pair in kt_edges(t)))

    @classmethod
    def from_counts(cls, t: int, counts: Sequence[int]) -> SubdivisionPattern:
        return cls(t, dict(zip(kt_edges(t), counts)))

    @property
    def k(self) -> Dict[Edge, int]:
        return dict(zip(kt_edges(self.t), self.counts))

    @property
    def vertex_count(self) -> int:
        return self.t + sum(self.counts)

    @property
    def is_full(self) -> bool:
        """every edge subdivided at least once"""
        return all(self.counts)

    def side_count(self, i: int, j: int) -> int:
        return self.k[min(i, j), max(i, j)]

    def permute(self, permutation: Sequence[int]) -> SubdivisionPattern:
        return SubdivisionPattern(
            self.t,
            {(permutation[i], permutation[j]): c for (i, j), c in self.k.items()},
        )

    def __repr__(self) -> str:
        nonzero = {pair: c for pair, c in self.k.items() if c}
        return f"SubdivisionPattern(t={self.t}, k={nonzero})"

    def __hash__(self) -> int:
        return hash((self.t, self.counts))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, SubdivisionPattern):
            raise TypeError(f"{other} must be a SubdivisionPattern")
        return (self.t, self.counts) == (other.t, other.counts)


class WeakSubdivisionWitness(Immutable):
    """``mapping`` sends the labels of ``realize(pattern)`` (branch vertices
    ``0..t-1`` first, then side vertices edge by edge) to host vertices;
    ``extra_edges`` are host edges outside the subdivision."""

    def __init__(
        self,
        pattern: SubdivisionPattern,
        mapping: Mapping[int, int],
        extra_edges: Iterable[Edge] = (),
    ) -> None:
        if len(mapping) != pattern.vertex_count:
            raise ValueError(
                f"mapping has {len(mapping)} labels, pattern needs "
                f"{pattern.vertex_count}"
            )
        if len(set(mapping.values())) != len(mapping):
            raise ValueError("mapping must be injective")
        extra = tuple(sorted((min(u, v), max(u, v)) for u, v in extra_edges))
        self._set(pattern=pattern, mapping=dict(sorted(mapping.items())), extra_edges=extra)

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(self.mapping.values())

    @property
    def branches(self) -> List[int]:
        return [self.mapping[i] for i in range(self.pattern.t)]

    def paths(self) -> Dict[Edge, List[int]]:
        """host side vertices of each ``K_t`` edge, ordered from ``i`` to ``j``"""
        label = self.pattern.t
        out = {}
        for pair, count in self.pattern.k.items():
            out[pair] = [self.mapping[label + step] for step in range(count)]
            label += count
        return out

    def __repr__(self) -> str:
        return (
            f"WeakSubdivisionWitness(t={self.pattern.t}, "
            f"vertices={sorted(self.vertices)}, extra_edges={list(self.extra_edges)})"
        )

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, WeakSubdivisionWitness):
            raise TypeError(f"{other} must be a WeakSubdivisionWitness")
        return (self.pattern, self.mapping, self.extra_edges) == (
            other.pattern,
            other.mapping,
            other.extra_edges,
        )

    def __hash__(self) -> int:
        return hash((self.pattern, tuple(self.mapping.items()), self.extra_edges))


class AdmissibilityWitness(Immutable):
    """A bijection ``mapping`` from the vertices of ``H`` onto the candidate
    vertices together with the total order ``order`` of the vertices of ``H``.

    :examples:
        >>> AdmissibilityWitness([1, 0], {0: 7, 1: 3}).images
        [3, 7]
    """

    def __init__(self, order: Sequence[int], mapping: Mapping[int, int]) -> None:
        order = tuple(order)
        if sorted(order) != sorted(mapping):
            raise ValueError("order must list every vertex of H exactly once")
        if len(set(mapping.values())) != len(mapping):
            raise ValueError("mapping must be injective")
        self._set(order=order, mapping=dict(sorted(mapping.items())))

    @property
    def images(self) -> List[int]:
        """candidate vertices in the order of ``order``"""
        return [self.mapping[x] for x in self.order]

    @property
    def subset(self) -> FrozenSet[int]:
        return frozenset(self.mapping.values())

    def __repr__(self) -> str:
        return f"AdmissibilityWitness(order={list(self.order)}, mapping={self.mapping})"

    def __hash__(self) -> int:
        return hash((self.order, tuple(self.mapping.items())))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, AdmissibilityWitness):
            raise TypeError(f"{other} must be an AdmissibilityWitness")
        return self.order == other.order and self.mapping == other.mapping


@dataclass(frozen=True)
class Verdict:
    """``holds`` is only a proof when ``conclusive``; ``witness`` backs a
    negative (or, for searches, positive) answer."""

    holds: bool
    witness: Any = None
    conclusive: bool = True

    def __bool__(self) -> bool:
        return self.holds
