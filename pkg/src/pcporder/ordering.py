"""Axis ordering: exact branch-and-bound path search and a greedy fallback.

An axis order is an open directed path visiting every axis once; its value
is the sum of the score-matrix cells along consecutive pairs. Up to
MAX_EXACT_DIMS axes the search is exact; beyond that it switches to the
greedy heuristic automatically (an exhaustive search over 16+ axes is not
interactive).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .detectors import PropertyId
from .errors import EmptyMatrixError
from .scoring import ScoreMatrix

#: Largest axis count solved exactly; above this order_tsp falls back to greedy.
MAX_EXACT_DIMS = 15

METHOD_EXACT = "branch_and_bound"
METHOD_GREEDY = "greedy"


@dataclass(frozen=True)
class EdgeScore:
    """One consecutive pair of the chosen order with its cell score."""

    i: int
    j: int
    score: float
    breakdown: Mapping[PropertyId, float]

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "score": self.score,
            "breakdown": {p.value: v for p, v in self.breakdown.items()},
        }


@dataclass(frozen=True)
class OrderingResult:
    order: tuple[int, ...]
    total_score: float
    per_edge: tuple[EdgeScore, ...]
    method: str

    def to_json(self) -> dict:
        return {
            "order": list(self.order),
            "total_score": self.total_score,
            "per_edge": [e.to_json() for e in self.per_edge],
            "method": self.method,
        }


def cells_array(matrix: ScoreMatrix) -> np.ndarray:
    dim = matrix.dim_count
    cells = np.zeros((dim, dim), dtype=np.float64)
    for i in range(dim):
        for j in range(dim):
            v = matrix.cells[i][j]
            cells[i, j] = 0.0 if v is None else v
    return cells


def _result_for_order(
    matrix: ScoreMatrix, cells: np.ndarray, order: list[int], method: str
) -> OrderingResult:
    edges = []
    total = 0.0
    for a, b in zip(order, order[1:]):
        score = float(cells[a, b])
        total += score
        edges.append(
            EdgeScore(
                i=a,
                j=b,
                score=score,
                breakdown=dict(matrix.per_cell_breakdown[(a, b)]),
            )
        )
    return OrderingResult(
        order=tuple(order), total_score=total, per_edge=tuple(edges), method=method
    )


def order_tsp(matrix: ScoreMatrix) -> OrderingResult:
    """The open path maximizing the summed directed cell scores.

    Branch and bound over partial paths: a partial path is pruned when its
    score plus an upper bound on the remaining edges (the tail's best
    outgoing edge into the unused set, plus every unused node's best
    outgoing edge within the unused set) cannot strictly beat the incumbent.
    Nodes are explored in ascending index order and only strict improvements
    replace the incumbent, so among equal-score optima the lexicographically
    smallest order wins. Above MAX_EXACT_DIMS axes this delegates to
    order_greedy.
    """
    dim = matrix.dim_count
    if dim < 2:
        raise EmptyMatrixError(f"need at least two axes to order, got {dim}")
    if dim > MAX_EXACT_DIMS:
        return order_greedy(matrix)
    cells = cells_array(matrix)

    best_score = -np.inf
    best_order: list[int] | None = None

    def visit(path: list[int], used: set[int], score: float) -> None:
        nonlocal best_score, best_order
        if len(path) == dim:
            if score > best_score:
                best_score = score
                best_order = list(path)
            return
        unused = [u for u in range(dim) if u not in used]
        tail = path[-1]
        bound = score + float(cells[tail, unused].max())
        if len(unused) > 1:
            sub = cells[np.ix_(unused, unused)].copy()
            np.fill_diagonal(sub, -np.inf)
            bound += float(sub.max(axis=1).sum())
        if bound <= best_score:
            return
        for nxt in unused:
            path.append(nxt)
            used.add(nxt)
            visit(path, used, score + float(cells[tail, nxt]))
            used.remove(nxt)
            path.pop()

    for start in range(dim):
        visit([start], {start}, 0.0)

    assert best_order is not None
    return _result_for_order(matrix, cells, best_order, METHOD_EXACT)


def order_greedy(matrix: ScoreMatrix) -> OrderingResult:
    """Greedy path: start with the globally best directed edge, then keep
    appending the unused axis with the best edge from the current tail.

    Ties resolve to the lexicographically smallest candidate, matching the
    exact search's tie rule.
    """
    dim = matrix.dim_count
    if dim < 2:
        raise EmptyMatrixError(f"need at least two axes to order, got {dim}")
    cells = cells_array(matrix)

    best_i, best_j, best_v = 0, 1, -np.inf
    for i in range(dim):
        for j in range(dim):
            if i != j and cells[i, j] > best_v:
                best_i, best_j, best_v = i, j, float(cells[i, j])

    order = [best_i, best_j]
    used = {best_i, best_j}
    while len(order) < dim:
        tail = order[-1]
        pick, pick_v = -1, -np.inf
        for u in range(dim):
            if u not in used and cells[tail, u] > pick_v:
                pick, pick_v = u, float(cells[tail, u])
        order.append(pick)
        used.add(pick)

    return _result_for_order(matrix, cells, order, METHOD_GREEDY)


def greedy_completion(cells: np.ndarray, prefix: list[int]) -> list[int]:
    """Extend a fixed prefix to a full order by greedy chaining from its tail."""
    dim = cells.shape[0]
    order = list(prefix)
    used = set(order)
    while len(order) < dim:
        tail = order[-1]
        pick, pick_v = -1, -np.inf
        for u in range(dim):
            if u not in used and cells[tail, u] > pick_v:
                pick, pick_v = u, float(cells[tail, u])
        order.append(pick)
        used.add(pick)
    return order
