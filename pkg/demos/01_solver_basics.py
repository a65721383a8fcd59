"""Solver basics: configurations, cost tables, and a single prediction.

A puzzle state is a permutation: entry s is the original-position ID of the
patch currently sitting in slot s, so the solved state is the identity.
Scores come in two tables -- an n x n row-stochastic matrix of "where does
this patch belong" beliefs, and a per-pair 9-way distribution over relative
positions (top/bottom/left/right, four diagonals, or not adjacent).  The
predictor seeds with the Hungarian assignment on the unary table and then
exhaustively rescans a small Hamming ball around that seed with the pair
terms switched on.
"""

import numpy as np

from jigsolve import (
    GridShape,
    SolverOptions,
    enumerate_hamming_ball,
    hamming,
    oracle_score,
    predict,
    random_permutation,
    reorganize,
    total_cost,
    unary_argmin,
)

rng = np.random.default_rng(0)
shape = GridShape.parse("3x3")
n = shape.n

# --- a scrambled puzzle and its ground truth -------------------------------
truth = random_permutation(n, rng)
print("ground truth configuration:", truth)
print("distance from solved:      ", hamming(truth, np.arange(n)))

# --- noisy score tables ----------------------------------------------------
# The oracle mixes the truth's one-hot tables with uniform mass eps, then
# jitters the logits, standing in for an imperfect learned scorer.
U, V = oracle_score(truth, shape, eps=0.4, rng=rng)
print("\nunary belief that slot 0 holds its true patch:", U[0, truth[0]].round(3))
print("unary rows sum to one:", np.allclose(U.sum(axis=1), 1.0))

# --- stage 1: Hungarian seed (unary terms only) ----------------------------
seed = unary_argmin(U)
print("\nHungarian seed:", seed.config, " unary cost %.3f" % seed.cost)

# --- stage 2: Hamming-ball refinement with pair terms ----------------------
ball = sum(1 for _ in enumerate_hamming_ball(seed.config, 3))
print("candidates within Hamming distance 3 of the seed:", ball)

config, breakdown = predict(U, V, shape, SolverOptions(radius=3))
print("refined prediction:", config)
print(
    "cost breakdown: unary %.3f + binary %.3f = %.3f"
    % (breakdown.unary, breakdown.binary, breakdown.total)
)
print("prediction correct:", bool((config == truth).all()))

# --- what one reorganization round does ------------------------------------
# Moving each patch to its predicted slot produces a new, usually easier
# arrangement; a perfect prediction lands exactly on the identity.
new_truth = reorganize(truth, config)
print("\ntruth after applying the prediction:", new_truth)
print("distance from solved is now:", hamming(new_truth, np.arange(n)))

cost_at_truth = total_cost(U, V, truth, shape)
print("\nfor reference, the cost at the true configuration: %.3f" % cost_at_truth.total)
