"""Score providers: noise-controlled oracle and a trainable linear model.

The linear model replaces the heavy feature backbone with a deterministic
hand-crafted patch descriptor, keeping every algorithmic mechanism (the
order-sensitive unary head over the concatenated feature set, the pairwise
9-class binary head, cross-entropy training with iterative reorganization)
checkable at desk scale.

The oracle mixes the ground-truth one-hot tables with uniform noise.  At the
endpoints it is exact (eps=0 gives one-hots, eps=1 gives uniform tables); in
between, a seeded logit jitter with amplitude proportional to eps*(1-eps)
makes the tables genuinely noisy, so solver quality degrades smoothly with
eps instead of flipping at eps=1.  Pass ``rng=None`` (or ``jitter=0``) for
the plain deterministic mixture.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .cost import neg_log, row_softmax
from .grid import NUM_REL_CLASSES, GridShape, relation_table
from .puzzlegen import FormatError, PuzzleInstance
from .search import SolverOptions, predict

MODEL_MAGIC = b"JSW1"
MODEL_VERSION = 1

FEATURE_RECIPE_2D = 1
FEATURE_RECIPE_3D = 2

EDGE_STRIP = 2  # boundary strip width, pixels
DEFAULT_ORACLE_JITTER = 8.0


def feature_dim(recipe: int, channels: int) -> int:
    if recipe == FEATURE_RECIPE_2D:
        return 6 * channels + 16
    if recipe == FEATURE_RECIPE_3D:
        return 8 * channels + 8
    raise ValueError(f"unknown feature recipe {recipe}")


def _pooled(gray: np.ndarray, cells_per_axis: int) -> np.ndarray:
    # Block-average a (possibly non-divisible) array down to cells_per_axis
    # per spatial axis.
    out = gray
    for ax in range(gray.ndim):
        chunks = np.array_split(out, cells_per_axis, axis=ax)
        out = np.stack([c.mean(axis=ax) for c in chunks], axis=ax)
    return out


def extract_features(patch: np.ndarray) -> np.ndarray:
    """Deterministic descriptor of one patch tile.

    2D (H, W, C): per-channel mean and std, the four 2-pixel boundary strip
    means, and a 4x4 average-pooled grayscale map; d = 6C + 16.
    3D (Z, H, W, C): per-channel mean and std, the six face-strip means, and
    a 2x2x2 pooled intensity map; d = 8C + 8.
    """
    arr = np.asarray(patch, dtype=np.float64)
    if arr.ndim not in (3, 4) or arr.size == 0:
        raise ValueError("patch must be a non-empty (H,W,C) tile or (Z,H,W,C) volume")
    if not np.isfinite(arr).all():
        raise ValueError("patch values must be finite")
    s = EDGE_STRIP
    if arr.ndim == 3:
        spatial = (0, 1)
        strips = [arr[:, :s], arr[:, -s:], arr[:s, :], arr[-s:, :]]  # L, R, T, B
        pooled = _pooled(arr.mean(axis=2), 4)
    else:
        spatial = (0, 1, 2)
        strips = [
            arr[:, :, :s], arr[:, :, -s:],  # x faces
            arr[:, :s, :], arr[:, -s:, :],  # y faces
            arr[:s, :, :], arr[-s:, :, :],  # z faces
        ]
        pooled = _pooled(arr.mean(axis=3), 2)
    parts = [arr.mean(axis=spatial), arr.std(axis=spatial)]
    parts += [st.mean(axis=spatial) for st in strips]
    parts.append(pooled.ravel())
    return np.concatenate(parts)


def features_of(puzzle: PuzzleInstance) -> np.ndarray:
    """(n, d) feature rows ordered by current slot."""
    if puzzle.patches is None:
        raise ValueError("puzzle carries no pixel data")
    return np.stack([extract_features(p) for p in puzzle.patches])


# ---------------------------------------------------------------------------
# oracle


def oracle_score(
    truth,
    shape: GridShape,
    eps: float,
    rng: Optional[np.random.Generator] = None,
    jitter: float = DEFAULT_ORACLE_JITTER,
    binary_eps: Optional[float] = None,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Score tables mixing the truth's one-hots with uniform mass ``eps``.

    Returns ``(U, V)``; ``V`` is None on 3D grids.  With ``rng`` given and
    0 < eps < 1, a logit perturbation of amplitude ``jitter*eps*(1-eps)``
    is drawn per call.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1]")
    t = np.asarray(truth, dtype=np.int64)
    n = shape.n
    if binary_eps is None:
        binary_eps = eps

    def noisy(base: np.ndarray, e: float) -> np.ndarray:
        amp = jitter * e * (1.0 - e)
        if rng is None or amp == 0.0:
            return base
        z = np.log(np.maximum(base, 1e-300)) + amp * rng.standard_normal(base.shape)
        z -= z.max(axis=-1, keepdims=True)
        ez = np.exp(z)
        return ez / ez.sum(axis=-1, keepdims=True)

    U = np.full((n, n), eps / n)
    U[np.arange(n), t] += 1.0 - eps
    U = noisy(U, eps)

    if shape.is_3d:
        return U, None
    rel = relation_table(shape)
    V = np.full((n, n, NUM_REL_CLASSES), binary_eps / NUM_REL_CLASSES)
    p, q = np.where(~np.eye(n, dtype=bool))
    V[p, q, rel[t[p], t[q]]] += 1.0 - binary_eps
    V[p, q] = noisy(V[p, q], binary_eps)
    return U, V


@dataclass
class OracleScorer:
    """Test instrument: emits truth-derived tables at a chosen noise level."""

    noise: float
    rng: Optional[np.random.Generator] = None
    binary_noise: Optional[float] = None
    jitter: float = DEFAULT_ORACLE_JITTER

    def score(self, puzzle: PuzzleInstance) -> tuple[np.ndarray, Optional[np.ndarray]]:
        if puzzle.truth is None:
            raise ValueError("oracle scoring needs the ground-truth configuration")
        return oracle_score(
            puzzle.truth,
            puzzle.shape,
            self.noise,
            rng=self.rng,
            jitter=self.jitter,
            binary_eps=self.binary_noise,
        )


# ---------------------------------------------------------------------------
# linear model


@dataclass
class LinearScorer:
    """Two linear heads over hand-crafted features.

    The unary head maps the flattened (n*d) feature set to n*n logits, so it
    is sensitive to the order of the input rows.  The binary head maps each
    ordered pair concatenation (2d) to 9 relative-position logits.
    """

    shape: GridShape
    recipe: int
    d: int
    unary_w: np.ndarray  # (n^2, n*d)
    unary_b: np.ndarray  # (n^2,)
    binary_w: np.ndarray  # (9, 2d)
    binary_b: np.ndarray  # (9,)

    def __post_init__(self):
        n, d = self.shape.n, self.d
        if self.unary_w.shape != (n * n, n * d) or self.unary_b.shape != (n * n,):
            raise ValueError("unary head shape mismatch")
        if self.binary_w.shape != (NUM_REL_CLASSES, 2 * d) or self.binary_b.shape != (
            NUM_REL_CLASSES,
        ):
            raise ValueError("binary head shape mismatch")

    @property
    def unary_param_count(self) -> int:
        return self.unary_w.size + self.unary_b.size

    @property
    def binary_param_count(self) -> int:
        return self.binary_w.size + self.binary_b.size

    @classmethod
    def init_random(
        cls,
        shape: GridShape,
        d: int,
        rng: np.random.Generator,
        scale: float = 0.01,
        recipe: Optional[int] = None,
    ) -> "LinearScorer":
        if recipe is None:
            recipe = FEATURE_RECIPE_3D if shape.is_3d else FEATURE_RECIPE_2D
        n = shape.n
        return cls(
            shape=shape,
            recipe=recipe,
            d=d,
            unary_w=rng.uniform(-scale, scale, size=(n * n, n * d)),
            unary_b=rng.uniform(-scale, scale, size=n * n),
            binary_w=rng.uniform(-scale, scale, size=(NUM_REL_CLASSES, 2 * d)),
            binary_b=rng.uniform(-scale, scale, size=NUM_REL_CLASSES),
        )

    def score(self, puzzle: PuzzleInstance) -> tuple[np.ndarray, Optional[np.ndarray]]:
        return linear_score(self, features_of(puzzle))


def _pair_concat(F: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = F.shape[0]
    p, q = np.where(~np.eye(n, dtype=bool))
    return p, q, np.concatenate([F[p], F[q]], axis=1)


def linear_score(model: LinearScorer, F) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Row-softmaxed unary matrix and per-pair softmaxed binary table."""
    F = np.asarray(F, dtype=np.float64)
    n = model.shape.n
    if F.shape != (n, model.d):
        raise ValueError(f"feature set has shape {F.shape}, expected ({n}, {model.d})")
    logits = (model.unary_w @ F.ravel() + model.unary_b).reshape(n, n)
    U = row_softmax(logits)
    if model.shape.is_3d:
        return U, None
    p, q, X = _pair_concat(F)
    pl = X @ model.binary_w.T + model.binary_b
    probs = row_softmax(pl)
    V = np.full((n, n, NUM_REL_CLASSES), 1.0 / NUM_REL_CLASSES)
    V[p, q] = probs
    return U, V


@dataclass
class Grads:
    unary_w: np.ndarray
    unary_b: np.ndarray
    binary_w: np.ndarray
    binary_b: np.ndarray

    def __iadd__(self, other: "Grads") -> "Grads":
        self.unary_w += other.unary_w
        self.unary_b += other.unary_b
        self.binary_w += other.binary_w
        self.binary_b += other.binary_b
        return self

    def scaled(self, factor: float) -> "Grads":
        return Grads(
            self.unary_w * factor,
            self.unary_b * factor,
            self.binary_w * factor,
            self.binary_b * factor,
        )


def loss_and_grad(model: LinearScorer, F, truth, shape: GridShape) -> tuple[float, Grads]:
    """Cross-entropy of both heads against the true cells, with exact grads.

    Unary: mean over slots of CE(U row s, truth[s]).  Binary (2D only): mean
    over ordered pairs of CE(V[p,q], true relative class).
    """
    F = np.asarray(F, dtype=np.float64)
    t = np.asarray(truth, dtype=np.int64)
    n = shape.n
    flat = F.ravel()

    logits = (model.unary_w @ flat + model.unary_b).reshape(n, n)
    U = row_softmax(logits)
    loss_u = float(np.mean(neg_log(U[np.arange(n), t])))
    dZ = U.copy()
    dZ[np.arange(n), t] -= 1.0
    dZ /= n
    g_uw = np.outer(dZ.ravel(), flat)
    g_ub = dZ.ravel()

    if shape.is_3d:
        loss_b = 0.0
        g_bw = np.zeros_like(model.binary_w)
        g_bb = np.zeros_like(model.binary_b)
    else:
        rel = relation_table(shape)
        p, q, X = _pair_concat(F)
        probs = row_softmax(X @ model.binary_w.T + model.binary_b)
        classes = rel[t[p], t[q]]
        loss_b = float(np.mean(neg_log(probs[np.arange(len(p)), classes])))
        dP = probs.copy()
        dP[np.arange(len(p)), classes] -= 1.0
        dP /= len(p)
        g_bw = dP.T @ X
        g_bb = dP.sum(axis=0)

    return loss_u + loss_b, Grads(g_uw, g_ub, g_bw, g_bb)


# ---------------------------------------------------------------------------
# training


@dataclass(frozen=True)
class TrainOptions:
    learning_rate: float = 0.3
    batch_size: int = 32
    epochs: int = 10
    train_rounds: int = 5
    seed: int = 0
    weight_init_scale: float = 0.01

    def __post_init__(self):
        if min(self.learning_rate, self.weight_init_scale) <= 0:
            raise ValueError("learning_rate and weight_init_scale must be positive")
        if min(self.batch_size, self.epochs, self.train_rounds) < 1:
            raise ValueError("batch_size, epochs and train_rounds must be >= 1")


@dataclass
class TrainResult:
    model: LinearScorer
    epoch_losses: list[float]


def _sample_pass(
    model: LinearScorer,
    feats: np.ndarray,
    truth: np.ndarray,
    shape: GridShape,
    rounds: int,
    solver_opts: SolverOptions,
) -> tuple[float, Grads]:
    # One sample's round-averaged loss/grad under iterative reorganization:
    # score the current arrangement, step the optimizer, move the patches
    # toward the prediction, repeat.
    total_loss = 0.0
    total_grads: Optional[Grads] = None
    done = 0
    for _ in range(rounds):
        loss, grads = loss_and_grad(model, feats, truth, shape)
        total_loss += loss
        if total_grads is None:
            total_grads = grads
        else:
            total_grads += grads
        done += 1
        U, V = linear_score(model, feats)
        pred, _ = predict(U, V, shape, solver_opts)
        if (pred == np.arange(shape.n)).all():
            break
        nxt = np.empty_like(feats)
        nxt[pred] = feats
        feats = nxt
        new_truth = np.empty_like(truth)
        new_truth[pred] = truth
        truth = new_truth
    assert total_grads is not None
    return total_loss / done, total_grads.scaled(1.0 / done)


def train_sgd(
    corpus: list[PuzzleInstance],
    opts: TrainOptions = TrainOptions(),
    solver_opts: Optional[SolverOptions] = None,
) -> TrainResult:
    """Mini-batch SGD on the two-head cross-entropy with round averaging."""
    if not corpus:
        raise ValueError("training corpus is empty")
    shape = corpus[0].shape
    if any(inst.shape != shape for inst in corpus):
        raise ValueError("corpus mixes grid shapes")
    if solver_opts is None:
        solver_opts = SolverOptions()

    all_feats = [features_of(inst) for inst in corpus]
    d = all_feats[0].shape[1]
    rng = np.random.default_rng(opts.seed)
    model = LinearScorer.init_random(shape, d, rng, scale=opts.weight_init_scale)

    epoch_losses = []
    for _ in range(opts.epochs):
        order = rng.permutation(len(corpus))
        losses = []
        for lo in range(0, len(order), opts.batch_size):
            batch = order[lo : lo + opts.batch_size]
            acc: Optional[Grads] = None
            for i in batch:
                loss, grads = _sample_pass(
                    model,
                    all_feats[i],
                    corpus[i].truth,
                    shape,
                    opts.train_rounds,
                    solver_opts,
                )
                losses.append(loss)
                acc = grads if acc is None else acc.__iadd__(grads)
            assert acc is not None
            step = acc.scaled(opts.learning_rate / len(batch))
            model.unary_w -= step.unary_w
            model.unary_b -= step.unary_b
            model.binary_w -= step.binary_w
            model.binary_b -= step.binary_b
        epoch_losses.append(float(np.mean(losses)))
    return TrainResult(model=model, epoch_losses=epoch_losses)


# ---------------------------------------------------------------------------
# model file ("JSW1": little-endian, float32 payload)


def save_model(model: LinearScorer, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        ext = model.shape.extents
        fh.write(struct.pack("<II", MODEL_VERSION, len(ext)))
        fh.write(struct.pack(f"<{len(ext)}I", *ext))
        fh.write(struct.pack("<II", model.d, model.recipe))
        for arr in (model.unary_w, model.unary_b, model.binary_w, model.binary_b):
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_model(path) -> LinearScorer:
    blob = Path(path).read_bytes()
    if blob[:4] != MODEL_MAGIC:
        raise FormatError(f"{path}: bad model magic {blob[:4]!r}")
    try:
        version, rank = struct.unpack_from("<II", blob, 4)
        if version != MODEL_VERSION:
            raise FormatError(f"{path}: unsupported model version {version}")
        if rank not in (2, 3):
            raise FormatError(f"{path}: bad grid rank {rank}")
        ext = struct.unpack_from(f"<{rank}I", blob, 12)
        d, recipe = struct.unpack_from("<II", blob, 12 + 4 * rank)
        off = 20 + 4 * rank
        shape = GridShape(ext)
        n = shape.n
        sizes = [(n * n, n * d), (n * n,), (NUM_REL_CLASSES, 2 * d), (NUM_REL_CLASSES,)]
        arrays = []
        for sz in sizes:
            count = int(np.prod(sz))
            arr = np.frombuffer(blob, dtype="<f4", count=count, offset=off)
            off += 4 * count
            arrays.append(arr.astype(np.float64).reshape(sz))
    except struct.error as exc:
        raise FormatError(f"{path}: truncated model file") from exc
    except ValueError as exc:
        raise FormatError(f"{path}: malformed model file: {exc}") from exc
    return LinearScorer(
        shape=shape, recipe=int(recipe), d=int(d),
        unary_w=arrays[0], unary_b=arrays[1], binary_w=arrays[2], binary_b=arrays[3],
    )
