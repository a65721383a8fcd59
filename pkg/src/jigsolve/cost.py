"""Configuration cost: unary + binary negative log-likelihoods.

The unary table ``U`` is row-stochastic, ``U[slot, orig]`` being the belief
that the patch currently in ``slot`` came from original position ``orig``.
The binary table ``V`` has shape ``(n, n, 9)``; ``V[p, q]`` is a distribution
over the 9 relative-position classes for the ordered slot pair ``(p, q)``.
Both are plain numpy arrays; validators below enforce the invariants.

Probabilities are clamped to ``PROB_FLOOR`` before the log so degenerate
one-hot tables still give finite costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import NUM_REL_CLASSES, GridShape, as_permutation, relation_table

PROB_FLOOR = 1e-12
ROW_SUM_TOL = 1e-9


def neg_log(p: np.ndarray) -> np.ndarray:
    """Elementwise ``-ln max(p, PROB_FLOOR)``."""
    return -np.log(np.maximum(p, PROB_FLOOR))


def row_softmax(logits) -> np.ndarray:
    """Per-row softmax with max subtraction for numerical stability."""
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError("expected a 2D logit array")
    if not np.isfinite(z).all():
        raise ValueError("logits must be finite")
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax9(logits) -> np.ndarray:
    """Softmax over a single 9-vector of relative-position logits."""
    z = np.asarray(logits, dtype=np.float64)
    if z.shape != (NUM_REL_CLASSES,):
        raise ValueError(f"expected {NUM_REL_CLASSES} logits, got shape {z.shape}")
    return row_softmax(z[None, :])[0]


def validate_unary(U, n: int | None = None) -> np.ndarray:
    """Check the row-stochastic unary-matrix invariants and return the array."""
    arr = np.asarray(U, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"unary matrix must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"unary matrix is {arr.shape[0]}x{arr.shape[0]}, expected n={n}")
    if not np.isfinite(arr).all():
        raise ValueError("unary matrix must be finite")
    if (arr < 0).any() or (arr > 1 + ROW_SUM_TOL).any():
        raise ValueError("unary entries must lie in [0, 1]")
    if not np.allclose(arr.sum(axis=1), 1.0, atol=ROW_SUM_TOL, rtol=0):
        raise ValueError("every unary row must sum to 1")
    return arr


def validate_binary(V, n: int | None = None) -> np.ndarray:
    """Check the per-pair 9-class distribution invariants and return the array.

    The diagonal ``V[p, p]`` is unused and not constrained.
    """
    arr = np.asarray(V, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != NUM_REL_CLASSES:
        raise ValueError(f"binary table must have shape (n, n, 9), got {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"binary table is for n={arr.shape[0]}, expected n={n}")
    if not np.isfinite(arr).all():
        raise ValueError("binary table must be finite")
    m = arr.shape[0]
    off = ~np.eye(m, dtype=bool)
    sums = arr.sum(axis=2)[off]
    if (arr[off] < 0).any() or not np.allclose(sums, 1.0, atol=ROW_SUM_TOL, rtol=0):
        raise ValueError("every off-diagonal 9-vector must be a distribution")
    return arr


@dataclass(frozen=True)
class CostBreakdown:
    """Unary and binary parts of the configuration cost, plus their sum."""

    unary: float
    binary: float

    @property
    def total(self) -> float:
        return self.unary + self.binary


def unary_cost(U, c) -> float:
    """``sum_s -ln U[s, c[s]]`` with the probability floor applied."""
    arr = np.asarray(U, dtype=np.float64)
    perm = as_permutation(c)
    if arr.shape != (perm.size, perm.size):
        raise ValueError(f"unary matrix {arr.shape} does not match n={perm.size}")
    return float(np.sum(neg_log(arr[np.arange(perm.size), perm])))


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.where(~np.eye(n, dtype=bool))


def binary_cost(V, c, shape: GridShape) -> float:
    """Sum over ordered slot pairs of the relative-position log-likelihoods."""
    if shape.is_3d:
        raise ValueError("binary terms are not defined on 3D grids")
    perm = as_permutation(c, shape.n)
    arr = np.asarray(V, dtype=np.float64)
    n = perm.size
    if arr.shape != (n, n, NUM_REL_CLASSES):
        raise ValueError(f"binary table {arr.shape} does not match n={n}")
    rel = relation_table(shape)
    p, q = _pair_indices(n)
    classes = rel[perm[p], perm[q]]
    return float(np.sum(neg_log(arr[p, q, classes])))


def total_cost(U, V, c, shape: GridShape) -> CostBreakdown:
    """Unary part plus (when ``V`` is given) the binary part."""
    u = unary_cost(U, c)
    b = 0.0 if V is None else binary_cost(V, c, shape)
    return CostBreakdown(unary=u, binary=b)


def column_sum_deviation(U) -> np.ndarray:
    """Per-column ``|sum - 1|``; a diagnostic, never used by the optimizer."""
    arr = validate_unary(U)
    return np.abs(arr.sum(axis=0) - 1.0)
