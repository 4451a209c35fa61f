"""Admissibility of vertex sets with respect to a graph ``H``.

A candidate set ``S`` is admissible when some bijection ``b: V(H) -> S`` and
total order of ``V(H)`` avoid the forbidden configuration: an ``H``-edge
``xy``, ``x`` before ``y``, whose image is thin, together with a vertex ``z``
after ``x`` whose images ``b(x)b(z)`` and ``b(y)b(z)`` together are too heavy.

* weighted hosts: thin means ``w <= eps``, too heavy means
  ``w(b(x)b(z)) + w(b(y)b(z)) >= 1 - eps``; no pair of ``S`` may be fat
  (``w >= 1 - eps``);
* graphs: thin means non-adjacent, too heavy means both adjacent.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from multipledispatch import dispatch

from string_threshold.data_structures import (
    AdmissibilityWitness,
    DenseGraph,
    WeightedCompleteGraph,
    as_fraction,
)
from string_threshold.enumeration import orbit_representatives

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

Found = Tuple[frozenset, DenseGraph, AdmissibilityWitness]


class _OrderSearch:
    """Builds the order of ``V(H)`` from the front, choosing the image of each
    new vertex as it is placed and checking every constraint whose vertices
    are all placed.

    ``load[i][j]`` and ``limit`` define "too heavy" on local host indices,
    ``thin[i][j]`` the thin pairs."""

    def __init__(
        self,
        H: DenseGraph,
        thin: List[List[bool]],
        load: List[List[Any]],
        limit: Any,
        first_hosts: Optional[Sequence[int]] = None,
    ) -> None:
        self.H = H
        self.h = H.n
        self.thin = thin
        self.load = load
        self.limit = limit
        self.first_h = orbit_representatives(H)
        self.first_hosts = list(range(self.h)) if first_hosts is None else list(first_hosts)
        self.order: List[int] = []
        self.images: List[int] = []
        self.thin_edges: List[Tuple[int, int]] = []
        self.nodes = 0

    def run(self) -> Optional[Tuple[List[int], List[int]]]:
        if self._place(0, 0, 0):
            return list(self.order), list(self.images)
        return None

    def _place(self, position: int, used_h: int, used_s: int) -> bool:
        if position == self.h:
            return True
        h_choices = self.first_h if position == 0 else range(self.h)
        s_choices = self.first_hosts if position == 0 else range(self.h)
        for x in h_choices:
            if used_h >> x & 1:
                continue
            for v in s_choices:
                if used_s >> v & 1:
                    continue
                self.nodes += 1
                added = self._admit(x, v)
                if added is None:
                    continue
                self.order.append(x)
                self.images.append(v)
                self.thin_edges.extend(added)
                if self._place(position + 1, used_h | 1 << x, used_s | 1 << v):
                    return True
                del self.thin_edges[len(self.thin_edges) - len(added) :]
                self.order.pop()
                self.images.pop()
        return False

    def _admit(self, x: int, v: int) -> Optional[List[Tuple[int, int]]]:
        """the thin edges created by placing ``x`` at ``v``, or None when
        placing it completes a forbidden configuration"""
        load, limit, images = self.load, self.limit, self.images
        row = self.H.rows[x]
        position = len(images)
        added = []
        for p in range(position):
            if not (row >> self.order[p] & 1 and self.thin[images[p]][v]):
                continue
            bx = images[p]
            for q in range(p + 1, position):
                z = images[q]
                if load[bx][z] + load[v][z] >= limit:
                    return None
            added.append((p, position))
        for p, q in self.thin_edges:
            if load[images[p]][v] + load[images[q]][v] >= limit:
                return None
        return added


def _check_size(candidates: Sequence[int], H: DenseGraph) -> None:
    if len(candidates) != H.n:
        raise ValueError(
            f"candidate set has {len(candidates)} vertices, H has {H.n}"
        )


def _witness(
    candidates: Sequence[int], result: Optional[Tuple[List[int], List[int]]]
) -> Optional[AdmissibilityWitness]:
    if result is None:
        return None
    order, images = result
    return AdmissibilityWitness(
        order, {x: candidates[v] for x, v in zip(order, images)}
    )


def is_eps_admissible(
    R: WeightedCompleteGraph,
    H: DenseGraph,
    eps: Any,
    subset: Optional[Iterable[int]] = None,
) -> Optional[AdmissibilityWitness]:
    """
    :examples:
        >>> R = WeightedCompleteGraph.uniform(5, "1/2")
        >>> is_eps_admissible(R, DenseGraph.complete(5), "1/4") is not None
        True
        >>> R = WeightedCompleteGraph.uniform(5, 1)
        >>> is_eps_admissible(R, DenseGraph.complete(5), "1/4") is None
        True
    """
    eps = as_fraction(eps)
    candidates = sorted(range(R.k) if subset is None else set(subset))
    _check_size(candidates, H)
    weights = [[R.weight(u, v) if u != v else Fraction(0) for v in candidates] for u in candidates]
    if any(weights[i][j] >= 1 - eps for i, j in combinations(range(H.n), 2)):
        return None
    thin = [[i != j and weights[i][j] <= eps for j in range(H.n)] for i in range(H.n)]
    search = _OrderSearch(H, thin, weights, 1 - eps)
    return _witness(candidates, search.run())


def is_zero_admissible(
    R: WeightedCompleteGraph, H: DenseGraph, subset: Optional[Iterable[int]] = None
) -> Optional[AdmissibilityWitness]:
    return is_eps_admissible(R, H, 0, subset)


def is_H_admissible(
    Q: DenseGraph,
    H: DenseGraph,
    subset: Optional[Iterable[int]] = None,
    symmetry: bool = True,
) -> Optional[AdmissibilityWitness]:
    """
    :examples:
        >>> is_H_admissible(DenseGraph.cycle(5), DenseGraph.complete(5)) is None
        True
        >>> star = DenseGraph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
        >>> is_H_admissible(star, DenseGraph.complete(5)).images[0]
        0
    """
    candidates = sorted(range(Q.n) if subset is None else set(subset))
    _check_size(candidates, H)
    local = Q.induced(candidates)
    adjacency = [[local.has_edge(i, j) for j in range(H.n)] for i in range(H.n)]
    thin = [[i != j and not adjacency[i][j] for j in range(H.n)] for i in range(H.n)]
    load = [[int(value) for value in row] for row in adjacency]
    first = orbit_representatives(local) if symmetry else None
    search = _OrderSearch(H, thin, load, 2, first)
    return _witness(candidates, search.run())


def _triples(H: DenseGraph, witness: AdmissibilityWitness) -> Iterable[Tuple[int, int, int]]:
    """``(x, y, z)`` over H-edges ``xy`` with ``x`` before ``y`` and ``z``
    after ``x``"""
    position = {x: i for i, x in enumerate(witness.order)}
    for x, y in H.edges():
        if position[x] > position[y]:
            x, y = y, x
        for z in witness.order[position[x] + 1 :]:
            if z != y:
                yield x, y, z


@dispatch(DenseGraph, DenseGraph, AdmissibilityWitness)
def validate_witness(Q, H, witness):  # type: ignore
    """Problems with ``witness`` against the definition, empty when valid."""
    b = witness.mapping
    problems = []
    for x, y, z in _triples(H, witness):
        if Q.has_edge(b[x], b[y]):
            continue
        if Q.has_edge(b[x], b[z]) and Q.has_edge(b[y], b[z]):
            problems.append(f"thin edge ({x}, {y}) blocked by {z}")
    return problems


@dispatch(WeightedCompleteGraph, DenseGraph, AdmissibilityWitness, object)  # type: ignore
def validate_witness(R, H, witness, eps):  # noqa: F811
    eps = as_fraction(eps)
    b = witness.mapping
    problems = []
    for u, v in combinations(sorted(witness.subset), 2):
        if R.weight(u, v) >= 1 - eps:
            problems.append(f"fat pair ({u}, {v})")
    for x, y, z in _triples(H, witness):
        if R.weight(b[x], b[y]) > eps:
            continue
        if R.weight(b[x], b[z]) + R.weight(b[y], b[z]) >= 1 - eps:
            problems.append(f"thin edge ({x}, {y}) blocked by {z}")
    return problems


def _subsets(n: int, h: int, must_include: Optional[int]) -> Iterable[Tuple[int, ...]]:
    if must_include is None:
        yield from combinations(range(n), h)
        return
    others = [v for v in range(n) if v != must_include]
    for rest in combinations(others, h - 1):
        yield tuple(sorted((must_include, *rest)))


@dispatch(DenseGraph, (list, tuple))
def find_admissible_subgraph(Q, family, must_include=None):  # type: ignore
    """The first ``(subset, H, witness)`` over the family (in order) and the
    vertex subsets (lexicographically), or None when ``Q`` is
    admissible-free. ``must_include`` restricts the subsets to those holding
    that vertex.

    :examples:
        >>> find_admissible_subgraph(DenseGraph.empty(4), [DenseGraph.complete(5)])
    """
    if not family:
        raise ValueError("family must be nonempty")
    for H in family:
        if H.n > Q.n:
            continue
        for subset in _subsets(Q.n, H.n, must_include):
            witness = is_H_admissible(Q, H, subset, symmetry=False)
            if witness is not None:
                return frozenset(subset), H, witness
    return None


@dispatch(WeightedCompleteGraph, (list, tuple))  # type: ignore
def find_admissible_subgraph(R, family, eps=0, must_include=None):  # noqa: F811
    if not family:
        raise ValueError("family must be nonempty")
    for H in family:
        if H.n > R.k:
            continue
        for subset in _subsets(R.k, H.n, must_include):
            witness = is_eps_admissible(R, H, eps, subset)
            if witness is not None:
                return frozenset(subset), H, witness
    return None


def is_admissible_free(Q: DenseGraph, family: Sequence[DenseGraph]) -> bool:
    return find_admissible_subgraph(Q, list(family)) is None
