"""Arbitrary-size jigsaw puzzle solving with unary + binary weak spatial cues.

The pipeline: score tables (oracle or learned linear heads) -> Hungarian
assignment on the unary part -> Hamming-ball refinement with binary terms ->
iterative reorganization until the predictor proposes the identity.
"""

from .assign import AssignmentResult, min_cost_assignment, unary_argmin
from .cost import (
    CostBreakdown,
    PROB_FLOOR,
    binary_cost,
    column_sum_deviation,
    row_softmax,
    softmax9,
    total_cost,
    unary_cost,
)
from .grid import (
    GridShape,
    RelClass,
    enumerate_hamming_ball,
    hamming,
    hamming_ball_size,
    identity_configuration,
    position_to_id,
    id_to_position,
    random_permutation,
    relative_type,
    reorganize,
)
from .puzzlegen import (
    GenOptions,
    ImageTensor,
    PuzzleInstance,
    generate_corpus,
    load_corpus,
    load_image,
    make_puzzle_2d,
    make_puzzle_3d,
    resize_bilinear,
    save_corpus,
    save_image,
    synth_image,
    synth_volume,
)
from .scorer import (
    LinearScorer,
    OracleScorer,
    TrainOptions,
    TrainResult,
    extract_features,
    linear_score,
    load_model,
    loss_and_grad,
    oracle_score,
    save_model,
    train_sgd,
)
from .search import (
    RoundRecord,
    SolveTrace,
    SolverOptions,
    brute_force_argmin,
    predict,
    refine_with_binary,
    solve_iterative,
)

__version__ = "0.1.0"
