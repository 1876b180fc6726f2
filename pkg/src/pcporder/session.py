"""Interactive ordering sessions: fix axis pairs one at a time.

A session fixes a growing prefix of the axis order. The first choice fixes
two axes at once; every later choice must chain off the current tail, so
the prefix always describes one connected path. Weights can change between
steps (the candidate matrix is recomputed from cached detector values, the
prefix stays), one step can be undone, and finalize completes whatever is
left greedily.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

from .data import Dataset
from .errors import (
    AxisAlreadyUsedError,
    BrokenChainError,
    NothingToUndoError,
    UnknownAxisError,
)
from .ordering import (
    METHOD_GREEDY,
    OrderingResult,
    cells_array,
    greedy_completion,
    order_greedy,
    _result_for_order,
)
from .scoring import (
    DEFAULT_PERMUTATIONS,
    ScoreMatrix,
    ScoringEngine,
    Weights,
    WindowProfile,
    default_engine,
)
from .windows import WindowSpec


@dataclass(frozen=True)
class StepRecord:
    """One confirmed choice and the weights that ranked it."""

    pair: tuple[int, int]
    weights: Weights


@dataclass
class Session:
    id: str
    dataset: Dataset
    weights: Weights
    spec: WindowSpec
    seed: int
    permutations: int = DEFAULT_PERMUTATIONS
    prefix: list[int] = field(default_factory=list)
    step_log: list[StepRecord] = field(default_factory=list)
    engine: ScoringEngine = field(default_factory=default_engine, repr=False)

    @property
    def dim_count(self) -> int:
        return self.dataset.dim_count

    def to_json(self, dataset_id: str | None = None) -> dict:
        return {
            "id": self.id,
            "dataset_id": dataset_id if dataset_id is not None else self.dataset.name,
            "prefix": list(self.prefix),
            "weights": self.weights.to_json(),
            "window_spec": {
                "window_fraction": self.spec.window_fraction,
                "stride_fraction": self.spec.stride_fraction,
            },
            "seed": self.seed,
            "step_log": [
                {"pair": list(rec.pair), "weights": rec.weights.to_json()}
                for rec in self.step_log
            ],
        }


def _full_matrix(session: Session) -> ScoreMatrix:
    return session.engine.matrix(
        session.dataset,
        session.weights,
        session.spec,
        seed=session.seed,
        permutations=session.permutations,
    )


def candidate_matrix(session: Session) -> ScoreMatrix:
    """The matrix of currently choosable cells.

    With an empty prefix every off-diagonal cell is a valid first choice and
    the full matrix is returned. Once a prefix exists only the tail's row,
    restricted to unused axes, remains; every other cell is nulled.
    """
    full = _full_matrix(session)
    if not session.prefix:
        return full
    tail = session.prefix[-1]
    used = set(session.prefix)
    dim = full.dim_count
    cells = [[None] * dim for _ in range(dim)]
    breakdown = {}
    for j in range(dim):
        if j not in used:
            cells[tail][j] = full.cells[tail][j]
            breakdown[(tail, j)] = full.per_cell_breakdown[(tail, j)]
    return ScoreMatrix(
        dims=full.dims,
        cells=tuple(tuple(row) for row in cells),
        per_cell_breakdown=breakdown,
    )


def start_session(
    dataset: Dataset,
    weights: Weights,
    spec: WindowSpec,
    seed: int,
    *,
    permutations: int = DEFAULT_PERMUTATIONS,
    engine: ScoringEngine | None = None,
) -> tuple[Session, ScoreMatrix]:
    """Open a session and return it with the initial (full) candidate matrix."""
    weights.require_active()
    session = Session(
        id=uuid.uuid4().hex,
        dataset=dataset,
        weights=weights,
        spec=spec,
        seed=seed,
        permutations=permutations,
        engine=engine or default_engine(),
    )
    return session, candidate_matrix(session)


def choose_pair(session: Session, i: int, j: int) -> tuple[Session, ScoreMatrix]:
    """Fix the next pair: the first choice fixes [i, j], later ones append j.

    After the first step, i must equal the prefix tail (the chain may not
    break) and j must be unused.
    """
    dim = session.dim_count
    if not (0 <= i < dim and 0 <= j < dim):
        raise UnknownAxisError(f"axis pair ({i}, {j}) out of range for {dim} axes")
    if not session.prefix:
        if i == j:
            raise AxisAlreadyUsedError(f"axis {i} cannot pair with itself")
        session.prefix.extend([i, j])
    else:
        tail = session.prefix[-1]
        if i != tail:
            raise BrokenChainError(
                f"pair must start at the current tail {tail}, got {i}"
            )
        if j in session.prefix:
            raise AxisAlreadyUsedError(f"axis {j} is already fixed")
        session.prefix.append(j)
    session.step_log.append(StepRecord(pair=(i, j), weights=session.weights))
    return session, candidate_matrix(session)


def set_weights(session: Session, weights: Weights) -> tuple[Session, ScoreMatrix]:
    """Swap the active weights and recompute the candidate matrix.

    The fixed prefix is untouched; cached raw detector values make this a
    re-aggregation, not a re-detection.
    """
    weights.require_active()
    session.weights = weights
    return session, candidate_matrix(session)


def undo(session: Session) -> Session:
    """Remove the most recent choice.

    Undoing the first step clears both axes it fixed. Only single-step
    history is kept, but repeated undo keeps walking back one choice at a
    time until the prefix is empty.
    """
    if not session.prefix:
        raise NothingToUndoError("no choices to undo")
    if len(session.prefix) == 2:
        session.prefix.clear()
    else:
        session.prefix.pop()
    session.step_log.pop()
    return session


def finalize(session: Session) -> tuple[OrderingResult, list[WindowProfile]]:
    """Complete the prefix into a full order and score it.

    Unfixed axes are appended greedily, chaining from the current tail under
    the current weights (an empty prefix degenerates to the plain greedy
    ordering). Returns the ordering plus the window profile of every
    consecutive pair in the final order.
    """
    full = _full_matrix(session)
    if not session.prefix:
        result = order_greedy(full)
    else:
        cells = cells_array(full)
        order = greedy_completion(cells, session.prefix)
        result = _result_for_order(full, cells, order, METHOD_GREEDY)
    profiles = [
        session.engine.profile(
            session.dataset,
            (a, b),
            session.spec,
            seed=session.seed,
            permutations=session.permutations,
        )
        for a, b in zip(result.order, result.order[1:])
    ]
    return result, profiles
