"""Full configuration predictor and the iterative reorganization loop.

Prediction seeds from the Hungarian solution of the unary terms, then (in 2D,
when binary scores are available) refines by exhaustively scoring every
permutation within a limited Hamming distance of the seed.  At test time the
prediction is applied physically -- patches are moved to their predicted
slots -- and the process repeats until the predictor proposes the identity or
a round cap is reached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Protocol, TYPE_CHECKING

import numpy as np

from . import cost as _cost
from .assign import unary_argmin
from .cost import CostBreakdown, neg_log, total_cost, validate_binary, validate_unary
from .grid import (
    GridShape,
    all_permutations,
    as_permutation,
    enumerate_hamming_ball,
    hamming,
    is_identity,
    relation_table,
)

if TYPE_CHECKING:
    from .puzzlegen import PuzzleInstance

BRUTE_FORCE_MAX_N = 9
_CHUNK = 50_000


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the predictor and the iteration loop.

    The Hamming radius is a free hyperparameter (the ball search only says
    "limited" distance); the default of 3 covers pair and triple corrections
    at negligible per-round cost.
    """

    radius: int = 3
    max_rounds: int = 20
    use_binary: bool = True
    candidate_cap: Optional[int] = None

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.candidate_cap is not None and self.candidate_cap < 1:
            raise ValueError("candidate_cap must be >= 1 when set")


@dataclass(frozen=True)
class RoundRecord:
    prediction: np.ndarray
    cost: CostBreakdown
    hamming_to_truth: Optional[int] = None


@dataclass(frozen=True)
class SolveTrace:
    """Per-round record of one iterative solve."""

    rounds: list[RoundRecord]
    converged: bool
    solved: Optional[bool]
    final_truth: Optional[np.ndarray] = None
    binary_degraded: bool = False

    @property
    def rounds_used(self) -> int:
        return len(self.rounds)


class ScoreProvider(Protocol):
    """Anything that can turn an arranged puzzle into score tables."""

    def score(self, puzzle: "PuzzleInstance") -> tuple[np.ndarray, Optional[np.ndarray]]:
        ...


def _candidate_array(center: np.ndarray, radius: int, cap: Optional[int]) -> np.ndarray:
    n = center.size
    if radius >= n and n <= BRUTE_FORCE_MAX_N and cap is None:
        return all_permutations(n)
    gen = enumerate_hamming_ball(center, min(radius, n))
    if cap is not None:
        gen = itertools.islice(gen, cap)
    return np.array(list(gen), dtype=np.int64)


@lru_cache(maxsize=1)
def _full_sweep_flat(shape: GridShape) -> np.ndarray:
    # Flattened pair-table indices for the all-permutations sweep.  They only
    # depend on the grid, so full-enumeration calls (the brute-force oracle
    # and radius >= n refinement) share one precomputed gather index.
    n = shape.n
    idx = all_permutations(n).astype(np.intp)
    p, q = _cost._pair_indices(n)
    koff = (np.arange(len(p), dtype=np.intp) * n * n)[None, :]
    flat = ((idx * n)[:, p] + idx[:, q] + koff).astype(np.int32)
    flat.setflags(write=False)
    return flat


def _batch_costs(U, V, shape: GridShape, cands: np.ndarray) -> np.ndarray:
    """Total cost of each candidate row; bit-identical to the scalar path."""
    n = shape.n
    logu = neg_log(np.asarray(U, dtype=np.float64))
    idx = cands.astype(np.intp)
    totals = logu[np.arange(n), idx].sum(axis=1)
    if V is not None:
        logv = neg_log(np.asarray(V, dtype=np.float64))
        rel = relation_table(shape)
        p, q = _cost._pair_indices(n)
        # One flattened lookup table per ordered pair: entry (k, a*n + b) is
        # the pair-k cost of original IDs (a, b).  A single gather per chunk
        # then replaces the per-pair class lookup; the pair summation order is
        # unchanged, so results stay bit-identical to the scalar path.
        paircost = logv[p[:, None], q[:, None], rel.ravel()[None, :]]
        pc_flat = np.ascontiguousarray(paircost).ravel()
        cached = n <= BRUTE_FORCE_MAX_N and cands is all_permutations(n)
        flat_all = _full_sweep_flat(shape) if cached else None
        koff = (np.arange(len(p), dtype=np.intp) * n * n)[None, :]
        for lo in range(0, len(idx), _CHUNK):
            if cached:
                flat = flat_all[lo : lo + _CHUNK]
            else:
                chunk = idx[lo : lo + _CHUNK]
                flat = (chunk * n)[:, p] + chunk[:, q] + koff
            totals[lo : lo + _CHUNK] += pc_flat[flat].sum(axis=1)
    return totals


def _select(cands: np.ndarray, totals: np.ndarray, center: Optional[np.ndarray]) -> np.ndarray:
    # Tie key: total cost, then Hamming distance to the center (when given),
    # then lexicographic order of the assign array.  Exact float equality is
    # the tie test; genuinely tied candidates produce bit-identical sums.
    best = np.flatnonzero(totals == totals.min())
    if len(best) > 1 and center is not None:
        ham = (cands[best] != center[None, :]).sum(axis=1)
        best = best[ham == ham.min()]
    if len(best) > 1:
        rows = sorted(map(tuple, cands[best]))
        return np.array(rows[0], dtype=np.int64)
    return cands[best[0]].astype(np.int64)


def refine_with_binary(
    U,
    V,
    seed,
    shape: GridShape,
    radius: int,
    candidate_cap: Optional[int] = None,
) -> np.ndarray:
    """Best configuration in the Hamming ball around ``seed``.

    Never returns a candidate costlier than the seed (the seed is in the
    ball).  Ties break toward smaller distance from the seed, then
    lexicographically.
    """
    if shape.is_3d and V is not None:
        raise ValueError("binary refinement is not defined on 3D grids")
    center = as_permutation(seed, shape.n)
    cands = _candidate_array(center, radius, candidate_cap)
    totals = _batch_costs(U, V, shape, cands)
    return _select(cands, totals, center)


def predict(U, V, shape: GridShape, opts: SolverOptions) -> tuple[np.ndarray, CostBreakdown]:
    """Hungarian seed plus Hamming-ball refinement when binary terms apply."""
    arr = validate_unary(U, shape.n)
    use_v = opts.use_binary and V is not None and not shape.is_3d
    if use_v:
        varr = validate_binary(V, shape.n)
    seed = unary_argmin(arr).config
    if use_v and opts.radius > 0:
        config = refine_with_binary(arr, varr, seed, shape, opts.radius, opts.candidate_cap)
    else:
        config = seed
    return config, total_cost(arr, varr if use_v else None, config, shape)


def brute_force_argmin(U, V, shape: GridShape) -> np.ndarray:
    """Exhaustive minimum over all n! configurations (test oracle, n <= 9)."""
    if shape.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force refused for n > {BRUTE_FORCE_MAX_N}")
    cands = all_permutations(shape.n)
    totals = _batch_costs(U, V, shape, cands)
    # all_permutations is lexicographic, so the first minimum is the tie rule.
    return cands[int(np.argmin(totals))].astype(np.int64)


def solve_iterative(provider: ScoreProvider, puzzle: "PuzzleInstance", opts: SolverOptions) -> SolveTrace:
    """Iterate score -> predict -> reorganize until the identity is proposed.

    Each round appends a record; convergence means the predictor proposed no
    further moves.  On 3D grids binary terms are silently dropped and the
    trace carries ``binary_degraded=True``.
    """
    state = puzzle
    shape = state.shape
    rounds: list[RoundRecord] = []
    converged = False
    degraded = False
    for idx in range(opts.max_rounds):
        try:
            U, V = provider.score(state)
        except Exception as exc:
            raise RuntimeError(f"score provider failed at round {idx + 1}") from exc
        if shape.is_3d and opts.use_binary:
            degraded = True
            V = None
        pred, breakdown = predict(U, V, shape, opts)
        ham = hamming(pred, state.truth) if state.truth is not None else None
        rounds.append(RoundRecord(prediction=pred, cost=breakdown, hamming_to_truth=ham))
        if is_identity(pred):
            converged = True
            break
        state = state.apply_prediction(pred)
    solved = bool(is_identity(state.truth)) if state.truth is not None else None
    return SolveTrace(
        rounds=rounds,
        converged=converged,
        solved=solved,
        final_truth=None if state.truth is None else np.asarray(state.truth).copy(),
        binary_degraded=degraded,
    )
