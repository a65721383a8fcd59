"""Puzzle instance construction: image I/O, synthetic sources, crops, corpora.

Geometry follows the 85-per-cell / 64-crop 2D protocol and the 120^3-region
3D protocol (60^3 or 40^3 cells with 48^3 / 32^3 jittered sub-crops).  Every
instance records enough metadata to be regenerated bit-exactly.

File formats owned here:
  * PGM (P5) / PPM (P6), maxval 255 only.
  * "RTEN" raw tensors: magic, version u32, rank u32, per-axis extents u32,
    channels u32, then float32 little-endian values in row-major order.
  * Corpora: one directory per instance holding a key=value manifest plus
    one RTEN file per patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .grid import GridShape, id_to_position, random_permutation, reorganize

RTEN_MAGIC = b"RTEN"
RTEN_VERSION = 1

VOLUME_REGION = 120
_3D_CROP = {2: 48, 3: 32}

SYNTH_KINDS = ("gradient", "blobs", "mixed")


class FormatError(ValueError):
    """Malformed image or tensor file."""


@dataclass(frozen=True)
class ImageTensor:
    """Pixel data in [0, 1]: shape (H, W, C) in 2D, (Z, H, W, C) in 3D."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim not in (3, 4):
            raise ValueError(f"expected (H,W,C) or (Z,H,W,C) data, got ndim={arr.ndim}")
        if not np.isfinite(arr).all():
            raise ValueError("pixel values must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def is_3d(self) -> bool:
        return self.data.ndim == 4

    @property
    def channels(self) -> int:
        return self.data.shape[-1]

    @property
    def dims(self) -> tuple[int, ...]:
        """Spatial extents as (W, H) or (W, H, Z)."""
        sp = self.data.shape[:-1]
        return tuple(reversed(sp))


@dataclass(frozen=True)
class GenOptions:
    """2D generation knobs; defaults mirror the training protocol."""

    cell: int = 85
    crop: int = 64
    jitter: bool = True
    mirror_p: float = 0.5
    mean_subtract: bool = True
    mean_scope: str = "patch"  # "patch" or "image"
    scramble: bool = True

    def __post_init__(self):
        if self.crop > self.cell:
            raise ValueError(f"crop {self.crop} exceeds cell {self.cell}")
        if self.mean_scope not in ("patch", "image"):
            raise ValueError("mean_scope must be 'patch' or 'image'")
        if not 0.0 <= self.mirror_p <= 1.0:
            raise ValueError("mirror_p must be in [0, 1]")


@dataclass(frozen=True)
class PuzzleMeta:
    """Everything needed to rebuild the instance bit-exactly."""

    source: dict
    grid: tuple[int, ...]
    opts: GenOptions
    offsets: np.ndarray  # (n, 2) or (n, 3) crop offsets, per original cell ID
    mirror: np.ndarray  # (n,) bool, per original cell ID
    truth: np.ndarray
    region_offset: tuple[int, ...] = ()  # 3D only: corner of the 120^3 region


@dataclass(frozen=True)
class PuzzleInstance:
    """Scrambled patches plus the ground-truth configuration.

    ``patches`` is (n, tile...) in current-slot order; ``patches[s]`` is the
    tile sitting in slot ``s``, and ``truth[s]`` is its original cell ID.
    Pixel-free instances (oracle workflows) carry ``patches=None``.
    """

    shape: GridShape
    truth: np.ndarray
    patches: Optional[np.ndarray] = None
    meta: Optional[PuzzleMeta] = None

    @property
    def n(self) -> int:
        return self.shape.n

    def apply_prediction(self, prediction: np.ndarray) -> "PuzzleInstance":
        """Move the patch in slot s to slot prediction[s]."""
        pred = np.asarray(prediction)
        new_truth = reorganize(self.truth, pred)
        new_patches = None
        if self.patches is not None:
            new_patches = np.empty_like(self.patches)
            new_patches[pred] = self.patches
        return PuzzleInstance(shape=self.shape, truth=new_truth, patches=new_patches, meta=self.meta)

    @classmethod
    def scrambled(cls, shape: GridShape, rng: np.random.Generator) -> "PuzzleInstance":
        """Pixel-free instance with a uniform random truth."""
        return cls(shape=shape, truth=random_permutation(shape.n, rng))


# ---------------------------------------------------------------------------
# netpbm + raw tensor I/O


def _read_pnm(blob: bytes, path: str) -> ImageTensor:
    pos = 0

    def fail(msg):
        raise FormatError(f"{path}: {msg} (byte offset {pos})")

    def token():
        nonlocal pos
        while pos < len(blob):
            ch = blob[pos : pos + 1]
            if ch == b"#":
                while pos < len(blob) and blob[pos : pos + 1] not in (b"\n", b""):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            fail("truncated header")
        return blob[start:pos]

    magic = token()
    if magic not in (b"P5", b"P6"):
        fail(f"unsupported magic {magic!r}")
    channels = 1 if magic == b"P5" else 3
    try:
        width = int(token())
        height = int(token())
        maxval = int(token())
    except ValueError:
        fail("non-integer header field")
    if width < 1 or height < 1:
        fail(f"bad dimensions {width}x{height}")
    if maxval != 255:
        fail(f"maxval must be 255, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    need = width * height * channels
    payload = blob[pos : pos + need]
    if len(payload) < need:
        pos += len(payload)
        fail(f"payload truncated, need {need} bytes")
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return ImageTensor(arr.astype(np.float32) / 255.0)


def _read_rten(blob: bytes, path: str) -> ImageTensor:
    def fail(msg, off):
        raise FormatError(f"{path}: {msg} (byte offset {off})")

    if blob[:4] != RTEN_MAGIC:
        fail(f"bad magic {blob[:4]!r}", 0)
    if len(blob) < 16:
        fail("truncated header", len(blob))
    head = np.frombuffer(blob[4:16], dtype="<u4")
    version, rank = int(head[0]), int(head[1])
    if version != RTEN_VERSION:
        fail(f"unsupported version {version}", 4)
    if rank not in (2, 3):
        fail(f"rank must be 2 or 3, got {rank}", 8)
    if len(blob) < 12 + 4 * (rank + 1):
        fail("truncated header", len(blob))
    fields = np.frombuffer(blob[12 : 12 + 4 * (rank + 1)], dtype="<u4")
    extents = tuple(int(e) for e in fields[:rank])  # (W, H[, Z])
    channels = int(fields[rank])
    off = 12 + 4 * (rank + 1)
    count = math.prod(extents) * channels
    payload = blob[off : off + 4 * count]
    if len(payload) < 4 * count:
        fail(f"payload truncated, need {4 * count} bytes", off + len(payload))
    arr = np.frombuffer(payload, dtype="<f4").reshape(*reversed(extents), channels)
    return ImageTensor(arr.copy())


def load_image(path) -> ImageTensor:
    """Read a PGM/PPM (maxval 255) or RTEN file, scaled to [0, 1]."""
    blob = Path(path).read_bytes()
    if blob[:4] == RTEN_MAGIC:
        return _read_rten(blob, str(path))
    return _read_pnm(blob, str(path))


def save_image(img: ImageTensor, path) -> None:
    """Write by extension: .pgm (1 channel), .ppm (3 channels), .rten (any)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".rten":
        save_rten(img, path)
        return
    if img.is_3d:
        raise FormatError("netpbm cannot carry volumes; use .rten")
    if suffix == ".pgm" and img.channels != 1:
        raise FormatError("PGM requires a single channel")
    if suffix == ".ppm" and img.channels != 3:
        raise FormatError("PPM requires three channels")
    if suffix not in (".pgm", ".ppm"):
        raise FormatError(f"unsupported output extension {suffix!r}")
    magic = b"P5" if suffix == ".pgm" else b"P6"
    h, w, _ = img.data.shape
    raw = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(raw.tobytes())


def save_rten(img: ImageTensor, path) -> None:
    extents = img.dims
    head = np.array([RTEN_VERSION, len(extents), *extents, img.channels], dtype="<u4")
    with open(path, "wb") as fh:
        fh.write(RTEN_MAGIC)
        fh.write(head.tobytes())
        fh.write(np.ascontiguousarray(img.data, dtype="<f4").tobytes())


# ---------------------------------------------------------------------------
# resize + synthetic sources


def _axis_weights(src: int, dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Half-pixel sample centers, edge-clamped.
    pos = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
    lo = np.clip(np.floor(pos), 0, src - 1).astype(np.intp)
    hi = np.minimum(lo + 1, src - 1)
    t = np.clip(pos - lo, 0.0, 1.0)
    return lo, hi, t


def resize_bilinear(img: ImageTensor, new_dims: tuple[int, int]) -> ImageTensor:
    """Separable bilinear resize (half-pixel centers) of a 2D image."""
    if img.is_3d:
        raise ValueError("resize_bilinear handles 2D images only")
    new_w, new_h = int(new_dims[0]), int(new_dims[1])
    if new_w < 1 or new_h < 1:
        raise ValueError("target dims must be positive")
    h, w, _ = img.data.shape
    if (w, h) == (new_w, new_h):
        return ImageTensor(img.data.copy())
    data = img.data.astype(np.float64)
    lo, hi, t = _axis_weights(w, new_w)
    data = data[:, lo, :] * (1.0 - t)[None, :, None] + data[:, hi, :] * t[None, :, None]
    lo, hi, t = _axis_weights(h, new_h)
    data = data[lo, :, :] * (1.0 - t)[:, None, None] + data[hi, :, :] * t[:, None, None]
    return ImageTensor(data.astype(np.float32))


_KIND_IDS = {"gradient": 1, "blobs": 2, "mixed": 3}


def _synth_rng(kind: str, size: int, seed: int, dims: int) -> np.random.Generator:
    return np.random.default_rng([_KIND_IDS[kind], dims, size, seed])


def _gradient_field(rng: np.random.Generator, size: int, dims: int) -> np.ndarray:
    # Coefficients wide enough that clamping saturates part of the field,
    # which leaves position-dependent texture even after mean subtraction.
    coef = rng.uniform(0.6, 1.2, size=dims)
    bias = rng.uniform(0.0, 0.3)
    axes = np.meshgrid(*[np.arange(size) / size for _ in range(dims)], indexing="ij")
    # axes are in (z, y, x) index order; coef[0] scales x, coef[1] y, coef[2] z
    val = bias + sum(c * ax for c, ax in zip(coef, reversed(axes)))
    return np.clip(val, 0.0, 1.0)


def _blob_field(rng: np.random.Generator, size: int, dims: int) -> np.ndarray:
    k = int(rng.integers(3, 7))
    grids = np.meshgrid(*[np.arange(size, dtype=np.float64) for _ in range(dims)], indexing="ij")
    val = np.zeros((size,) * dims)
    for _ in range(k):
        center = rng.uniform(0, size, size=dims)
        sigma = rng.uniform(0.08, 0.25) * size
        amp = rng.uniform(0.5, 1.0)
        d2 = sum((g - c) ** 2 for g, c in zip(grids, center))
        val += amp * np.exp(-d2 / (2.0 * sigma**2))
    return np.clip(val, 0.0, 1.0)


def _synth_field(kind: str, size: int, seed: int, dims: int) -> np.ndarray:
    if kind not in SYNTH_KINDS:
        raise ValueError(f"kind must be one of {SYNTH_KINDS}, got {kind!r}")
    if size < 16:
        raise ValueError("size must be >= 16")
    rng = _synth_rng(kind, size, seed, dims)
    if kind == "gradient":
        return _gradient_field(rng, size, dims)
    if kind == "blobs":
        return _blob_field(rng, size, dims)
    g = _gradient_field(rng, size, dims)
    b = _blob_field(rng, size, dims)
    # Gradient-heavy blend: keeps absolute-position cues dominant while the
    # blobs still provide per-image texture variation.
    return np.clip(0.65 * g + 0.35 * b, 0.0, 1.0)


def synth_image(kind: str, size: int, seed: int) -> ImageTensor:
    """Deterministic single-channel synthetic image of the given kind."""
    return ImageTensor(_synth_field(kind, size, seed, 2)[..., None].astype(np.float32))


def synth_volume(kind: str, size: int, seed: int) -> ImageTensor:
    """Deterministic single-channel synthetic volume (3D analogue)."""
    return ImageTensor(_synth_field(kind, size, seed, 3)[..., None].astype(np.float32))


# ---------------------------------------------------------------------------
# puzzle construction


def _cut_2d(
    resized: np.ndarray,
    shape: GridShape,
    opts: GenOptions,
    offsets: np.ndarray,
    mirror: np.ndarray,
    truth: np.ndarray,
) -> np.ndarray:
    W, H = shape.extents
    n = shape.n
    c = resized.shape[-1]
    tiles = np.empty((n, opts.crop, opts.crop, c), dtype=np.float32)
    if opts.mean_subtract and opts.mean_scope == "image":
        resized = resized - resized.mean(axis=(0, 1), keepdims=True)
    for pid in range(n):
        x, y = id_to_position(pid, shape)
        ox, oy = offsets[pid]
        r0 = y * opts.cell + oy
        c0 = x * opts.cell + ox
        tile = resized[r0 : r0 + opts.crop, c0 : c0 + opts.crop, :].astype(np.float32)
        if mirror[pid]:
            tile = tile[:, ::-1, :]
        if opts.mean_subtract and opts.mean_scope == "patch":
            tile = tile - tile.mean(axis=(0, 1), keepdims=True)
        tiles[pid] = tile
    patches = np.empty_like(tiles)
    patches[np.arange(n)] = tiles[truth]
    return patches


def make_puzzle_2d(
    img: ImageTensor,
    W: int,
    H: int,
    rng: np.random.Generator,
    opts: GenOptions = GenOptions(),
    source: Optional[dict] = None,
) -> PuzzleInstance:
    """Resize to (cell*W) x (cell*H), cut, jitter-crop, flip, scramble."""
    if img.is_3d:
        raise ValueError("make_puzzle_2d needs a 2D image")
    shape = GridShape((W, H))
    n = shape.n
    gap = opts.cell - opts.crop
    resized = resize_bilinear(img, (opts.cell * W, opts.cell * H)).data

    if opts.jitter:
        offsets = rng.integers(0, gap + 1, size=(n, 2)).astype(np.int64)
    else:
        offsets = np.full((n, 2), gap // 2, dtype=np.int64)
    mirror = rng.random(n) < opts.mirror_p if opts.mirror_p > 0 else np.zeros(n, dtype=bool)
    truth = random_permutation(n, rng) if opts.scramble else np.arange(n, dtype=np.int64)

    patches = _cut_2d(resized, shape, opts, offsets, mirror, truth)
    meta = PuzzleMeta(
        source=dict(source or {}),
        grid=shape.extents,
        opts=opts,
        offsets=offsets,
        mirror=np.asarray(mirror, dtype=bool),
        truth=truth,
    )
    return PuzzleInstance(shape=shape, truth=truth, patches=patches, meta=meta)


def _cut_3d(
    region: np.ndarray,
    shape: GridShape,
    cell: int,
    crop: int,
    mean_subtract: bool,
    offsets: np.ndarray,
    truth: np.ndarray,
) -> np.ndarray:
    n = shape.n
    c = region.shape[-1]
    tiles = np.empty((n, crop, crop, crop, c), dtype=np.float32)
    for pid in range(n):
        x, y, z = id_to_position(pid, shape)
        ox, oy, oz = offsets[pid]
        z0, y0, x0 = z * cell + oz, y * cell + oy, x * cell + ox
        tile = region[z0 : z0 + crop, y0 : y0 + crop, x0 : x0 + crop, :].astype(np.float32)
        if mean_subtract:
            tile = tile - tile.mean(axis=(0, 1, 2), keepdims=True)
        tiles[pid] = tile
    patches = np.empty_like(tiles)
    patches[np.arange(n)] = tiles[truth]
    return patches


def make_puzzle_3d(
    vol: ImageTensor,
    per_axis: int,
    rng: np.random.Generator,
    opts: GenOptions = GenOptions(),
    source: Optional[dict] = None,
) -> PuzzleInstance:
    """Crop a random 120^3 region, cut into per_axis^3 cells, jitter-crop."""
    if not vol.is_3d:
        raise ValueError("make_puzzle_3d needs a volume")
    if per_axis not in _3D_CROP:
        raise ValueError(f"per_axis must be one of {sorted(_3D_CROP)}, got {per_axis}")
    z_ext, y_ext, x_ext, _ = vol.data.shape
    if min(z_ext, y_ext, x_ext) < VOLUME_REGION:
        raise ValueError(f"volume must be at least {VOLUME_REGION}^3")
    shape = GridShape((per_axis,) * 3)
    n = shape.n
    cell = VOLUME_REGION // per_axis
    crop = _3D_CROP[per_axis]
    gap = cell - crop

    region_offset = tuple(
        int(rng.integers(0, ext - VOLUME_REGION + 1)) for ext in (x_ext, y_ext, z_ext)
    )
    rx, ry, rz = region_offset
    region = vol.data[rz : rz + VOLUME_REGION, ry : ry + VOLUME_REGION, rx : rx + VOLUME_REGION, :]

    if opts.jitter:
        offsets = rng.integers(0, gap + 1, size=(n, 3)).astype(np.int64)
    else:
        offsets = np.full((n, 3), gap // 2, dtype=np.int64)
    truth = random_permutation(n, rng) if opts.scramble else np.arange(n, dtype=np.int64)

    patches = _cut_3d(region, shape, cell, crop, opts.mean_subtract, offsets, truth)
    meta = PuzzleMeta(
        source=dict(source or {}),
        grid=shape.extents,
        opts=opts,
        offsets=offsets,
        mirror=np.zeros(n, dtype=bool),
        truth=truth,
        region_offset=region_offset,
    )
    return PuzzleInstance(shape=shape, truth=truth, patches=patches, meta=meta)


def regenerate(meta: PuzzleMeta) -> PuzzleInstance:
    """Rebuild an instance bit-exactly from its metadata."""
    src = meta.source
    if "kind" in src:
        maker = synth_volume if len(meta.grid) == 3 else synth_image
        img = maker(src["kind"], int(src["size"]), int(src["seed"]))
    elif "path" in src:
        img = load_image(src["path"])
    else:
        raise ValueError("meta.source names neither a synth kind nor a path")
    shape = GridShape(meta.grid)
    if len(meta.grid) == 3:
        rx, ry, rz = meta.region_offset
        region = img.data[
            rz : rz + VOLUME_REGION, ry : ry + VOLUME_REGION, rx : rx + VOLUME_REGION, :
        ]
        per_axis = meta.grid[0]
        patches = _cut_3d(
            region,
            shape,
            VOLUME_REGION // per_axis,
            _3D_CROP[per_axis],
            meta.opts.mean_subtract,
            meta.offsets,
            meta.truth,
        )
    else:
        W, H = meta.grid
        resized = resize_bilinear(img, (meta.opts.cell * W, meta.opts.cell * H)).data
        patches = _cut_2d(resized, shape, meta.opts, meta.offsets, meta.mirror, meta.truth)
    return PuzzleInstance(shape=shape, truth=meta.truth.copy(), patches=patches, meta=meta)


def generate_corpus(
    kind: str,
    shape: GridShape,
    count: int,
    seed: int,
    opts: GenOptions = GenOptions(),
) -> list[PuzzleInstance]:
    """Deterministic synthetic corpus; instance i uses the stream (seed, i)."""
    instances = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        src_seed = seed * 1_000_003 + i
        if shape.is_3d:
            vol = synth_volume(kind, VOLUME_REGION, src_seed)
            src = {"kind": kind, "size": VOLUME_REGION, "seed": src_seed}
            inst = make_puzzle_3d(vol, shape.extents[0], rng, opts, source=src)
        else:
            W, H = shape.extents
            size = max(opts.cell * W, opts.cell * H)
            img = synth_image(kind, size, src_seed)
            src = {"kind": kind, "size": size, "seed": src_seed}
            inst = make_puzzle_2d(img, W, H, rng, opts, source=src)
        instances.append(inst)
    return instances


# ---------------------------------------------------------------------------
# corpus storage


def _manifest_lines(meta: PuzzleMeta) -> list[str]:
    opts = meta.opts
    lines = [
        "format=jigsolve-corpus-v1",
        "grid=" + "x".join(str(e) for e in meta.grid),
        f"cell={opts.cell}",
        f"crop={opts.crop}",
        f"jitter={int(opts.jitter)}",
        f"mirror_p={opts.mirror_p!r}",
        f"mean_subtract={int(opts.mean_subtract)}",
        f"mean_scope={opts.mean_scope}",
        f"scramble={int(opts.scramble)}",
        "offsets=" + ";".join(":".join(str(v) for v in row) for row in meta.offsets),
        "mirror=" + ",".join(str(int(v)) for v in meta.mirror),
        "truth=" + ",".join(str(v) for v in meta.truth),
    ]
    for key, val in sorted(meta.source.items()):
        lines.append(f"source_{key}={val}")
    if meta.region_offset:
        lines.append("region_offset=" + ",".join(str(v) for v in meta.region_offset))
    return lines


def _parse_manifest(text: str, path: str) -> PuzzleMeta:
    kv: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"{path}: bad manifest line {line!r}")
        key, _, val = line.partition("=")
        kv[key] = val
    if kv.get("format") != "jigsolve-corpus-v1":
        raise FormatError(f"{path}: unknown manifest format {kv.get('format')!r}")
    grid = tuple(int(v) for v in kv["grid"].split("x"))
    opts = GenOptions(
        cell=int(kv["cell"]),
        crop=int(kv["crop"]),
        jitter=bool(int(kv["jitter"])),
        mirror_p=float(kv["mirror_p"]),
        mean_subtract=bool(int(kv["mean_subtract"])),
        mean_scope=kv["mean_scope"],
        scramble=bool(int(kv["scramble"])),
    )
    offsets = np.array(
        [[int(v) for v in row.split(":")] for row in kv["offsets"].split(";")], dtype=np.int64
    )
    mirror = np.array([bool(int(v)) for v in kv["mirror"].split(",")], dtype=bool)
    truth = np.array([int(v) for v in kv["truth"].split(",")], dtype=np.int64)
    source = {}
    for key, val in kv.items():
        if key.startswith("source_"):
            name = key[len("source_") :]
            source[name] = int(val) if name in ("size", "seed") else val
    region = tuple(int(v) for v in kv["region_offset"].split(",")) if "region_offset" in kv else ()
    return PuzzleMeta(
        source=source, grid=grid, opts=opts, offsets=offsets, mirror=mirror, truth=truth,
        region_offset=region,
    )


def save_corpus(root, instances: list[PuzzleInstance]) -> None:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for i, inst in enumerate(instances):
        if inst.meta is None or inst.patches is None:
            raise ValueError("only generated instances with metadata can be stored")
        idir = root / f"inst_{i:05d}"
        idir.mkdir(exist_ok=True)
        (idir / "manifest.txt").write_text("\n".join(_manifest_lines(inst.meta)) + "\n")
        for s in range(inst.n):
            save_rten(ImageTensor(inst.patches[s]), idir / f"patch_{s:03d}.rten")


def load_corpus(root) -> list[PuzzleInstance]:
    root = Path(root)
    dirs = sorted(d for d in root.iterdir() if d.is_dir() and d.name.startswith("inst_"))
    if not dirs:
        raise FormatError(f"{root}: no instance directories found")
    instances = []
    for idir in dirs:
        meta = _parse_manifest((idir / "manifest.txt").read_text(), str(idir / "manifest.txt"))
        shape = GridShape(meta.grid)
        patches = np.stack(
            [load_image(idir / f"patch_{s:03d}.rten").data for s in range(shape.n)]
        )
        instances.append(
            PuzzleInstance(shape=shape, truth=meta.truth, patches=patches, meta=meta)
        )
    return instances
