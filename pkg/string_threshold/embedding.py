"""Embedding an induced weak 2-subdivision of ``H`` into a block-model graph.

The blocks stand in for a regular partition; the reduced graph ``R`` gives the
cross densities. Given an admissibility witness for ``H`` in ``R``, branch
vertices are placed first, one per block in the witness order, then the two
side vertices of every ``H``-edge. Every placement shrinks the candidate sets
``U_1..U_h`` so that placed vertices have no neighbours left in the candidate
sets of the other indices still waiting for vertices.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from string_threshold.config import SETTINGS
from string_threshold.data_structures import (
    AdmissibilityWitness,
    DenseGraph,
    Edge,
    WeightedCompleteGraph,
    as_fraction,
    iter_bits,
    to_mask,
)
from string_threshold.graphs import adjacency_matrix, from_adjacency_matrix
from string_threshold.subdivision import is_weak_subdivision, subdivide, subdivision_layout

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

EMPTY = "empty-candidate-set"
NOT_AVERAGE = "no-average-vertex"
NO_CROSS_EDGE = "no-cross-edge"


@dataclass(frozen=True)
class RegularPartitionModel:
    """``reduced.k`` blocks of ``block_size`` vertices; block ``i`` holds
    ``i * block_size .. (i + 1) * block_size - 1``."""

    reduced: WeightedCompleteGraph
    block_size: int
    intra_density: Fraction = SETTINGS.intra_density
    seed: Optional[int] = None

    @property
    def partition(self) -> List[List[int]]:
        N = self.block_size
        return [list(range(i * N, (i + 1) * N)) for i in range(self.reduced.k)]


def sample_block_model(model: RegularPartitionModel) -> Tuple[DenseGraph, List[List[int]]]:
    """Cross pairs of blocks ``i, j`` are joined with probability ``w(ij)``,
    pairs inside a block with ``intra_density``.

    :examples:
        >>> model = RegularPartitionModel(WeightedCompleteGraph.uniform(2, 1), 3, 1, 0)
        >>> sample_block_model(model)[0].edge_count
        15
    """
    N, k = model.block_size, model.reduced.k
    if N < 1:
        raise ValueError(f"block size must be positive, got {N}")
    rng = np.random.default_rng(model.seed)
    matrix = np.zeros((k * N, k * N), dtype=bool)
    for i in range(k):
        for j in range(i, k):
            p = model.intra_density if i == j else model.reduced.weight(i, j)
            draw = rng.random((N, N)) < float(p)
            matrix[i * N : (i + 1) * N, j * N : (j + 1) * N] = draw
    matrix = np.triu(matrix, k=1)
    return from_adjacency_matrix(matrix | matrix.T), model.partition


def check_regularity_sampled(
    graph: DenseGraph,
    partition: Sequence[Sequence[int]],
    lam: Any,
    trials: int,
    seed: Optional[int] = None,
) -> float:
    """Largest ``|d(A', B') - d(V_i, V_j)|`` over ``trials`` random subset
    pairs per block pair with ``|A'| >= lam |V_i|`` and ``|B'| >= lam |V_j|``.
    A sample, not a certificate."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    lam = float(as_fraction(lam))
    rng = np.random.default_rng(seed)
    matrix = adjacency_matrix(graph)
    worst = 0.0
    for left, right in combinations([np.asarray(block) for block in partition], 2):
        full = matrix[np.ix_(left, right)].mean()
        for _ in range(trials):
            sizes = [
                int(rng.integers(max(1, math.ceil(lam * len(block))), len(block) + 1))
                for block in (left, right)
            ]
            A = rng.choice(left, size=sizes[0], replace=False)
            B = rng.choice(right, size=sizes[1], replace=False)
            worst = max(worst, abs(matrix[np.ix_(A, B)].mean() - full))
    return float(worst)


def _is_average(
    row: int, U: Mapping[int, int], weights: Mapping[int, float], lam: float
) -> bool:
    for j, mask in U.items():
        if abs((row & mask).bit_count() / mask.bit_count() - weights[j]) >= lam:
            return False
    return True


def average_vertices(
    graph: DenseGraph,
    candidates: Iterable[int],
    U: Mapping[int, int],
    weights: Mapping[int, Any],
    lam: Any,
) -> Iterable[int]:
    """the candidates, in order, whose share of neighbours in every ``U[j]``
    is within ``lam`` of ``weights[j]``; the ``U[j]`` are vertex masks"""
    for j, mask in U.items():
        if not mask:
            raise ValueError(f"U_{j} is empty")
    floats = {j: float(as_fraction(w)) for j, w in weights.items()}
    lam = float(as_fraction(lam))
    for v in candidates:
        if _is_average(graph.rows[v], U, floats, lam):
            yield v


def find_average_vertex(
    graph: DenseGraph,
    candidates: Iterable[int],
    U: Mapping[int, int],
    weights: Mapping[int, Any],
    lam: Any,
) -> Optional[int]:
    return next(iter(average_vertices(graph, candidates, U, weights, lam)), None)


@dataclass(frozen=True)
class EmbeddingParameters:
    eps: Fraction = SETTINGS.epsilon
    lam: Fraction = SETTINGS.regularity
    beta: Fraction = SETTINGS.beta
    delta: Fraction = SETTINGS.delta


@dataclass
class EmbeddingState:
    """``U[i]`` is the candidate mask of the ``i``-th vertex of the witness
    order; ``sizes`` records every ``|U_i|`` after each step."""

    U: List[int]
    branch: Dict[int, int] = field(default_factory=dict)
    side: Dict[Edge, int] = field(default_factory=dict)
    step: int = 0
    sizes: List[List[int]] = field(default_factory=list)

    def close_step(self) -> None:
        self.step += 1
        self.sizes.append([mask.bit_count() for mask in self.U])


@dataclass(frozen=True)
class FailureReport:
    step: int
    cause: str
    detail: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Embedding:
    """``branch[x]`` is the image of the ``H``-vertex ``x``; ``side[x, y]``
    the image of the side vertex next to ``x`` on the edge ``xy``, placed in
    the block of ``x``."""

    branch: Dict[int, int]
    side: Dict[Edge, int]
    blocks: Dict[int, int]
    cases: Dict[Edge, int]
    sizes: List[List[int]]

    @property
    def vertices(self) -> List[int]:
        return sorted([*self.branch.values(), *self.side.values()])


class _Embedder:
    def __init__(
        self,
        graph: DenseGraph,
        partition: Sequence[Sequence[int]],
        R: WeightedCompleteGraph,
        H: DenseGraph,
        witness: AdmissibilityWitness,
        parameters: EmbeddingParameters,
    ) -> None:
        self.graph = graph
        self.rows = graph.rows
        self.H = H
        self.order = list(witness.order)
        self.position = {x: i for i, x in enumerate(self.order)}
        self.blocks = [witness.mapping[x] for x in self.order]
        self.h = len(self.order)
        self.w = [
            [R.weight(self.blocks[i], self.blocks[j]) if i != j else Fraction(0) for j in range(self.h)]
            for i in range(self.h)
        ]
        self.eps = as_fraction(parameters.eps)
        self.lam = as_fraction(parameters.lam)
        self.beta = as_fraction(parameters.beta)
        self.delta = as_fraction(parameters.delta)
        self.edges = sorted(
            tuple(sorted((self.position[x], self.position[y]))) for x, y in H.edges()
        )
        self.state = EmbeddingState([to_mask(partition[b]) for b in self.blocks])
        self.cases: Dict[Edge, int] = {}

    def _active(self, edge_index: int) -> List[int]:
        if edge_index < 0:
            return list(range(self.h))
        return sorted({i for edge in self.edges[edge_index:] for i in edge})

    def _reference(self, i: int, active: Sequence[int], U: Sequence[int]) -> Dict[int, int]:
        return {j: U[j] for j in active if j != i}

    def _average(self, i: int, candidates: int, active: Sequence[int], U: Sequence[int]) -> Iterable[int]:
        reference = self._reference(i, active, U)
        weights = {j: self.w[i][j] for j in reference}
        return average_vertices(self.graph, iter_bits(candidates), reference, weights, self.lam)

    def _fail(self, cause: str, detail: str = "") -> FailureReport:
        step = self.state.step + 1
        logger.debug("embedding failed at step %d: %s %s", step, cause, detail)
        return FailureReport(step, cause, detail)

    def run(self) -> Union[Embedding, FailureReport]:
        for s in range(self.h):
            failure = self._branch_step(s)
            if failure is not None:
                return failure
        for index, (a, b) in enumerate(self.edges):
            if self.w[a][b] >= self.eps:
                failure = self._dense_edge_step(index, a, b)
            else:
                failure = self._sparse_edge_step(index, a, b)
            if failure is not None:
                return failure
        state = self.state
        return Embedding(
            {self.order[i]: v for i, v in state.branch.items()},
            {(self.order[i], self.order[j]): v for (i, j), v in state.side.items()},
            {self.order[i]: self.blocks[i] for i in range(self.h)},
            {(self.order[a], self.order[b]): case for (a, b), case in self.cases.items()},
            state.sizes,
        )

    def _empty(self, indices: Iterable[int]) -> Optional[FailureReport]:
        for i in indices:
            if not self.state.U[i]:
                return self._fail(EMPTY, f"U_{i}")
        return None

    def _branch_step(self, s: int) -> Optional[FailureReport]:
        U, rows = self.state.U, self.rows
        failure = self._empty(range(self.h))
        if failure is not None:
            return failure
        size = U[s].bit_count()
        dense = [v for v in iter_bits(U[s]) if (rows[v] & U[s]).bit_count() >= self.beta * size]
        if not dense:
            return self._fail(EMPTY, f"no vertex of high degree in U_{s}")
        chosen = next(iter(self._average(s, to_mask(dense), self._active(-1), U)), None)
        if chosen is None:
            return self._fail(NOT_AVERAGE, f"branch {s}")
        for i in range(self.h):
            U[i] = U[i] & rows[chosen] if i == s else U[i] & ~rows[chosen]
        self.state.branch[s] = chosen
        self.state.close_step()
        return None

    def _dense_edge_step(self, index: int, a: int, b: int) -> Optional[FailureReport]:
        U, rows = self.state.U, self.rows
        active = self._active(index)
        failure = self._empty(active)
        if failure is not None:
            return failure
        u = next(iter(self._average(a, U[a], active, U)), None)
        if u is None:
            return self._fail(NOT_AVERAGE, f"side ({a}, {b})")
        shrunk = [mask if i == a else mask & ~rows[u] for i, mask in enumerate(U)]
        W = U[b] & rows[u]
        if not W:
            return self._fail(EMPTY, f"no neighbour of {u} in U_{b}")
        if any(not shrunk[i] for i in active if i != b):
            return self._fail(EMPTY, f"after placing {u}")
        w = next(iter(self._average(b, W, active, shrunk)), None)
        if w is None:
            return self._fail(NOT_AVERAGE, f"side ({b}, {a})")
        for i in range(self.h):
            U[i] = shrunk[i] if i == b else shrunk[i] & ~rows[w]
        self.state.side[a, b], self.state.side[b, a] = u, w
        self.cases[a, b] = 1
        self.state.close_step()
        return None

    def _sparse_edge_step(self, index: int, a: int, b: int) -> Optional[FailureReport]:
        U, rows = self.state.U, self.rows
        active = self._active(index)
        failure = self._empty(active)
        if failure is not None:
            return failure
        W_a = to_mask(self._average(a, U[a], active, U))
        W_b = to_mask(self._average(b, U[b], active, U))
        needed = math.ceil(self.delta * self.graph.n)
        if min(W_a.bit_count(), W_b.bit_count()) < needed:
            return self._fail(EMPTY, f"average sets below {needed} for ({a}, {b})")
        pair = next(
            ((x, (rows[x] & W_b) & -(rows[x] & W_b)) for x in iter_bits(W_a) if rows[x] & W_b),
            None,
        )
        if pair is None:
            return self._fail(NO_CROSS_EDGE, f"({a}, {b})")
        w_a, low_bit = pair
        w_b = low_bit.bit_length() - 1
        for i in range(a + 1, self.h):
            if i != b:
                U[i] &= ~(rows[w_a] | rows[w_b])
        U[a] &= ~rows[w_b]
        U[b] &= ~rows[w_a]
        self.state.side[a, b], self.state.side[b, a] = w_a, w_b
        self.cases[a, b] = 2
        self.state.close_step()
        return None


def embed_weak_2_subdivision(
    graph: DenseGraph,
    partition: Sequence[Sequence[int]],
    R: WeightedCompleteGraph,
    H: DenseGraph,
    witness: AdmissibilityWitness,
    parameters: Optional[EmbeddingParameters] = None,
) -> Union[Embedding, FailureReport]:
    """Place the ``h`` branch and ``2|E(H)|`` side vertices, or report the
    first step that found no candidate. ``witness`` shows that the blocks
    ``witness.mapping`` of ``R`` are ``(H, eps)``-admissible.

    A dense edge (``w(ab) >= eps``) takes an average ``u`` in ``U_a`` and an
    average neighbour of ``u`` in ``U_b``; a sparse edge takes the first edge
    between the average vertices of ``U_a`` and ``U_b``.
    """
    parameters = EmbeddingParameters() if parameters is None else parameters
    if len(witness.order) != H.n:
        raise ValueError(f"witness has {len(witness.order)} vertices, H has {H.n}")
    return _Embedder(graph, partition, R, H, witness, parameters).run()


def subdivision_map(H: DenseGraph, embedding: Embedding) -> Dict[int, int]:
    """labels of ``subdivide(H, 2)`` to graph vertices"""
    mapping = dict(embedding.branch)
    for (x, y), (near_x, near_y) in subdivision_layout(H, 2).items():
        mapping[near_x] = embedding.side[x, y]
        mapping[near_y] = embedding.side[y, x]
    return mapping


def verify_embedding(
    graph: DenseGraph,
    H: DenseGraph,
    embedding: Embedding,
    partition: Optional[Sequence[Sequence[int]]] = None,
) -> Tuple[bool, List[str]]:
    """Check the embedding against the 2-subdivision of ``H``: subdivision
    edges present, every other pair absent except two sides next to the same
    branch vertex, images in their blocks. For complete ``H`` the induced
    subgraph must also pass ``is_weak_subdivision``."""
    problems: List[str] = []
    mapping = subdivision_map(H, embedding)
    if len(set(mapping.values())) != len(mapping):
        problems.append("images are not distinct")
    skeleton = subdivide(H, 2)
    owner = {}
    for (x, y), (near_x, near_y) in subdivision_layout(H, 2).items():
        owner[near_x], owner[near_y] = x, y
    for p, q in combinations(sorted(mapping), 2):
        u, v = mapping[p], mapping[q]
        required = skeleton.has_edge(p, q)
        present = graph.has_edge(u, v)
        if required and not present:
            problems.append(f"missing edge ({u}, {v})")
        elif present and not required:
            if p in owner and q in owner and owner[p] == owner[q]:
                continue
            problems.append(f"unexpected edge ({u}, {v})")
    if partition is not None:
        block_of = {v: index for index, block in enumerate(partition) for v in block}
        for x, v in embedding.branch.items():
            if block_of.get(v) != embedding.blocks[x]:
                problems.append(f"branch {x} outside its block")
        for (x, y), v in embedding.side.items():
            if block_of.get(v) != embedding.blocks[x]:
                problems.append(f"side ({x}, {y}) outside its block")
    complete = H.edge_count == H.n * (H.n - 1) // 2
    if not problems and complete and H.n >= 3:
        induced = graph.induced(embedding.vertices)
        if is_weak_subdivision(induced, H.n) is None:
            problems.append(f"induced subgraph is not a weak subdivision of K_{H.n}")
    return not problems, problems


@dataclass(frozen=True)
class EmbeddingConfig:
    reduced: WeightedCompleteGraph
    H: DenseGraph
    witness: AdmissibilityWitness
    block_size: int
    intra_density: Fraction = SETTINGS.intra_density
    parameters: EmbeddingParameters = EmbeddingParameters()


def run_embedding(config: EmbeddingConfig, seed: int) -> Dict[str, Any]:
    """one seeded run as a flat record for the batch table"""
    model = RegularPartitionModel(
        config.reduced, config.block_size, config.intra_density, seed
    )
    graph, partition = sample_block_model(model)
    outcome = embed_weak_2_subdivision(
        graph, partition, config.reduced, config.H, config.witness, config.parameters
    )
    row: Dict[str, Any] = {"seed": seed, "success": bool(outcome)}
    if isinstance(outcome, FailureReport):
        row.update(failure_step=outcome.step, failure_cause=outcome.cause, verified="")
        row["min_size"] = ""
        return row
    verified, problems = verify_embedding(graph, config.H, outcome, partition)
    row.update(
        failure_step="",
        failure_cause="",
        verified=verified,
        min_size=min(min(sizes) for sizes in outcome.sizes),
    )
    if problems:
        logger.warning("seed %d: embedding failed verification: %s", seed, problems[:3])
    return row


def run_embedding_batch(config: EmbeddingConfig, seeds: Iterable[int]) -> List[Dict[str, Any]]:
    return [run_embedding(config, seed) for seed in seeds]
