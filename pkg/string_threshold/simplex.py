"""Minimum of ``phi(Q) = sum phi(a)^2 + sum_{ab in E} phi(a) phi(b)`` over the
probability simplex.

``phi(Q)`` is the quadratic form of ``M = I + A/2``. The exact minimizer
enumerates the faces of the simplex and solves the stationarity system of
each face,

    [ 2 M_S  -1 ] [ phi_S  ]   [ 0 ]
    [ 1^T     0 ] [ lambda ] = [ 1 ],

whose matrix is integral, by fraction-free elimination. A positive solution
has value ``lambda / 2``. Singular faces contribute nothing: the minimum over
such a face is also attained on one of its sub-faces.

Two floating point oracles cross-check it: projected gradient descent from
random starts, and a scan of the rational grid with denominator ``N``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np

from string_threshold.config import SETTINGS
from string_threshold.data_structures import CapacityError, DenseGraph, iter_bits
from string_threshold.graphs import adjacency_matrix

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


@dataclass(frozen=True)
class PhiMinimum:
    """``value`` is attained at ``phi``, supported on ``support``, where
    ``2 (M phi)_a = multiplier`` for every ``a`` in the support."""

    value: Fraction
    phi: Tuple[Fraction, ...]
    support: Tuple[int, ...]
    multiplier: Fraction


def _integer_system(graph: DenseGraph, support: Sequence[int]) -> List[List[int]]:
    size = len(support)
    rows = []
    for a in support:
        row = [2 if a == b else int(graph.has_edge(a, b)) for b in support]
        rows.append(row + [-1])
    rows.append([1] * size + [0])
    return rows


def solve_fraction_free(matrix: List[List[int]], rhs: Sequence[int]) -> Optional[List[Fraction]]:
    """Bareiss elimination of an integer system; None when it is singular.

    :examples:
        >>> solve_fraction_free([[2, 1], [1, 3]], [1, 2])
        [Fraction(1, 5), Fraction(3, 5)]
    """
    n = len(matrix)
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    previous = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot is None:
            return None
        a[k], a[pivot] = a[pivot], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
            a[i][k] = 0
        previous = a[k][k]
    solution = [Fraction(0)] * n
    for i in reversed(range(n)):
        rest = sum((a[i][j] * solution[j] for j in range(i + 1, n)), Fraction(0))
        solution[i] = (a[i][n] - rest) / a[i][i]
    return solution


def phi_value(graph: DenseGraph, phi: Sequence[Fraction]) -> Fraction:
    value = sum((p * p for p in phi), Fraction(0))
    return value + sum((phi[a] * phi[b] for a, b in graph.edges()), Fraction(0))


def face_minimum(graph: DenseGraph, support: Sequence[int]) -> Optional[PhiMinimum]:
    """the stationary point in the relative interior of the face, if any"""
    system = _integer_system(graph, support)
    solution = solve_fraction_free(system, [0] * len(support) + [1])
    if solution is None:
        return None
    *weights, multiplier = solution
    if any(w <= 0 for w in weights):
        return None
    phi = [Fraction(0)] * graph.n
    for a, w in zip(support, weights):
        phi[a] = w
    return PhiMinimum(multiplier / 2, tuple(phi), tuple(support), multiplier)


def minimize_phi(graph: DenseGraph, capacity: Optional[int] = None) -> PhiMinimum:
    """
    :examples:
        >>> minimize_phi(DenseGraph.empty(4)).value
        Fraction(1, 4)
        >>> minimize_phi(DenseGraph.complete(5)).value
        Fraction(3, 5)
    """
    capacity = SETTINGS.phi_capacity if capacity is None else capacity
    if graph.n > capacity:
        raise CapacityError(
            f"exact minimization supports at most {capacity} vertices, got {graph.n}"
        )
    if graph.n == 0:
        raise ValueError("the simplex of an empty graph is empty")
    best: Optional[PhiMinimum] = None
    for mask in range(1, 1 << graph.n):
        candidate = face_minimum(graph, list(iter_bits(mask)))
        if candidate is not None and (best is None or candidate.value < best.value):
            best = candidate
    assert best is not None
    return best


def certificate_problems(graph: DenseGraph, result: PhiMinimum) -> List[str]:
    """Exact re-check of feasibility, stationarity on the support and the
    claimed value."""
    problems = []
    phi = result.phi
    if any(p < 0 for p in phi) or sum(phi) != 1:
        problems.append("phi is not in the simplex")
    if {a for a, p in enumerate(phi) if p} != set(result.support):
        problems.append("support does not match phi")
    for a in result.support:
        gradient = 2 * phi[a] + sum((phi[b] for b in graph.neighbours(a)), Fraction(0))
        if gradient != result.multiplier:
            problems.append(f"not stationary at {a}")
    if phi_value(graph, phi) != result.value:
        problems.append("value does not match phi")
    return problems


def _form(graph: DenseGraph) -> np.ndarray:
    return np.eye(graph.n) + adjacency_matrix(graph).astype(float) / 2


def _project_rows(points: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row onto the probability simplex"""
    ordered = -np.sort(-points, axis=1)
    cumulative = np.cumsum(ordered, axis=1) - 1
    index = np.arange(1, points.shape[1] + 1)
    active = ordered - cumulative / index > 0
    rho = active.shape[1] - 1 - np.argmax(active[:, ::-1], axis=1)
    theta = cumulative[np.arange(points.shape[0]), rho] / (rho + 1)
    return np.maximum(points - theta[:, None], 0)


def _polish(form: np.ndarray, point: np.ndarray, tolerance: float) -> Optional[float]:
    support = np.flatnonzero(point > tolerance)
    size = len(support)
    system = np.zeros((size + 1, size + 1))
    system[:size, :size] = 2 * form[np.ix_(support, support)]
    system[:size, size] = -1
    system[size, :size] = 1
    rhs = np.zeros(size + 1)
    rhs[size] = 1
    solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    weights = solution[:size]
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1):
        return None
    return float(weights @ form[np.ix_(support, support)] @ weights)


def projected_gradient_minimum(
    graph: DenseGraph,
    restarts: Optional[int] = None,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
) -> float:
    """Floating point minimum from projected gradient descent over many
    Dirichlet starting points, polished on the best support."""
    restarts = SETTINGS.oracle_restarts if restarts is None else restarts
    iterations = SETTINGS.oracle_iterations if iterations is None else iterations
    form = _form(graph)
    step = 1 / (2 * np.abs(form).sum(axis=1).max())
    rng = np.random.default_rng(seed)
    points = rng.dirichlet(np.ones(graph.n), size=restarts)
    for _ in range(iterations):
        points = _project_rows(points - step * 2 * points @ form)
    values = np.einsum("ij,jk,ik->i", points, form, points)
    best = int(np.argmin(values))
    polished = _polish(form, points[best], SETTINGS.oracle_tolerance ** 0.5)
    if polished is None:
        return float(values[best])
    return min(float(values[best]), polished)


def grid_denominator(s: int, step: Optional[int] = None, budget: Optional[int] = None) -> int:
    """the largest ``N <= step`` whose grid on ``s`` coordinates has at most
    ``budget`` points"""
    step = SETTINGS.grid_step if step is None else step
    budget = SETTINGS.grid_budget if budget is None else budget
    N = step
    while N > 1 and comb(N + s - 1, s - 1) > budget:
        N -= 1
    return N


def grid_points(s: int, N: int) -> np.ndarray:
    """every point of the simplex with coordinates in ``(1/N) Z``, by stars
    and bars"""
    if s == 1:
        return np.ones((1, 1))
    bars = np.array(list(combinations(range(N + s - 1), s - 1)), dtype=int).reshape(
        -1, s - 1
    )
    edges = np.hstack(
        [np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), N + s - 1)]
    )
    return (np.diff(edges, axis=1) - 1) / N


def grid_minimum(
    graph: DenseGraph, step: Optional[int] = None, budget: Optional[int] = None
) -> Tuple[float, np.ndarray]:
    N = grid_denominator(graph.n, step, budget)
    points = grid_points(graph.n, N)
    values = np.einsum("ij,jk,ik->i", points, _form(graph), points)
    best = int(np.argmin(values))
    logger.debug("grid 1/%d on %d coordinates: %d points", N, graph.n, len(points))
    return float(values[best]), points[best]
