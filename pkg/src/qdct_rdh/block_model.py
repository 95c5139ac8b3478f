"""Value types for quantized 4x4 blocks, macroblocks and coefficient streams.

Levels are kept in zig-zag order everywhere except at the transform
boundary: index 0 is DC, index 15 is the highest-frequency AC term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# raster index visited at each zig-zag position
ZIGZAG = np.array([0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15])
# zig-zag position of each raster index
INVERSE_ZIGZAG = np.argsort(ZIGZAG)

BLOCKS_PER_MB = 16
COEFFS_PER_BLOCK = 16
LEVEL_MIN = -(1 << 15)
LEVEL_MAX = (1 << 15) - 1


def scan_blocks(grids) -> np.ndarray:
    """Zig-zag scan an array of 4x4 grids, shape (..., 4, 4) -> (..., 16)."""
    grids = np.asarray(grids)
    if grids.shape[-2:] != (4, 4):
        raise ValueError(f"expected trailing 4x4 dims, got {grids.shape}")
    flat = grids.reshape(grids.shape[:-2] + (16,))
    return flat[..., ZIGZAG]


def unscan_blocks(vectors) -> np.ndarray:
    """Inverse of :func:`scan_blocks`, shape (..., 16) -> (..., 4, 4)."""
    vectors = np.asarray(vectors)
    if vectors.shape[-1] != 16:
        raise ValueError(f"expected trailing dim 16, got {vectors.shape}")
    return vectors[..., INVERSE_ZIGZAG].reshape(vectors.shape[:-1] + (4, 4))


@dataclass(frozen=True)
class QdctBlock:
    """Sixteen quantized levels in zig-zag order."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != COEFFS_PER_BLOCK:
            raise ValueError(f"a block holds 16 levels, got {len(coeffs)}")
        for c in coeffs:
            if not LEVEL_MIN <= c <= LEVEL_MAX:
                raise ValueError(f"level {c} does not fit in 16 signed bits")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls) -> QdctBlock:
        return cls((0,) * COEFFS_PER_BLOCK)

    @property
    def ac15(self) -> int:
        return self.coeffs[15]

    @property
    def has_low_nonzero(self) -> bool:
        """True when any level at zig-zag index 0..14 (DC included) is nonzero."""
        return any(self.coeffs[:15])

    def with_ac15(self, value: int) -> QdctBlock:
        return QdctBlock(self.coeffs[:15] + (value,))

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return COEFFS_PER_BLOCK


def zigzag_scan(raster_block) -> QdctBlock:
    grid = np.asarray(raster_block)
    if grid.shape != (4, 4):
        raise ValueError(f"expected a 4x4 grid, got shape {grid.shape}")
    return QdctBlock(tuple(scan_blocks(grid).tolist()))


def inverse_zigzag(block: QdctBlock) -> np.ndarray:
    return unscan_blocks(np.array(block.coeffs, dtype=np.int64))


@dataclass(frozen=True)
class Macroblock:
    """16 luma blocks in raster order; ``embeddable`` models intra-4x4 selection."""

    blocks: tuple[QdctBlock, ...]
    embeddable: bool = True

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if len(blocks) != BLOCKS_PER_MB:
            raise ValueError(f"a macroblock holds 16 blocks, got {len(blocks)}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[int]], embeddable=True) -> Macroblock:
        """Build from up to 16 level vectors; missing trailing blocks are all-zero."""
        blocks = [QdctBlock(v) for v in vectors]
        blocks += [QdctBlock.zeros()] * (BLOCKS_PER_MB - len(blocks))
        return cls(tuple(blocks), embeddable)

    def to_array(self) -> np.ndarray:
        return np.array([b.coeffs for b in self.blocks], dtype=np.int32)

    @classmethod
    def from_array(cls, levels, embeddable=True) -> Macroblock:
        return cls(tuple(QdctBlock(tuple(row)) for row in np.asarray(levels).tolist()), embeddable)

    @property
    def ac15(self) -> list[int]:
        return [b.ac15 for b in self.blocks]


@dataclass(frozen=True, eq=False)
class CoefficientStream:
    """Frames of macroblocks plus the geometry/QP header.

    ``levels`` has shape (frames, mb_rows * mb_cols, 16, 16): frame,
    macroblock in raster order, block in raster order, zig-zag level.
    The array is stored read-only; engine operations return new streams.
    """

    mb_cols: int
    mb_rows: int
    qp: int
    levels: np.ndarray = field(repr=False)
    marked: bool = False

    def __post_init__(self):
        if self.mb_cols < 0 or self.mb_rows < 0:
            raise ValueError("negative geometry")
        if not 0 <= self.qp <= 51:
            raise ValueError(f"qp {self.qp} outside [0, 51]")
        levels = np.asarray(self.levels)
        if levels.size == 0:
            levels = levels.reshape(0, self.mb_cols * self.mb_rows, 16, 16)
        expected = (self.mb_cols * self.mb_rows, BLOCKS_PER_MB, COEFFS_PER_BLOCK)
        if levels.ndim != 4 or levels.shape[1:] != expected:
            raise ValueError(f"levels shape {levels.shape} does not match (F, {expected})")
        if levels.size and (levels.min() < LEVEL_MIN or levels.max() > LEVEL_MAX):
            raise ValueError("levels do not fit in 16 signed bits")
        levels = levels.astype(np.int32, copy=True)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def frame_count(self) -> int:
        return self.levels.shape[0]

    @property
    def mb_count(self) -> int:
        return self.mb_cols * self.mb_rows

    def macroblock(self, frame: int, index: int, embeddable=True) -> Macroblock:
        return Macroblock.from_array(self.levels[frame, index], embeddable)

    @property
    def frames(self) -> list[list[Macroblock]]:
        return [
            [self.macroblock(f, i) for i in range(self.mb_count)]
            for f in range(self.frame_count)
        ]

    @classmethod
    def from_macroblocks(cls, frames, mb_cols, mb_rows, qp, marked=False) -> CoefficientStream:
        arr = np.array(
            [[mb.to_array() for mb in frame] for frame in frames], dtype=np.int32
        ).reshape(-1, mb_cols * mb_rows, BLOCKS_PER_MB, COEFFS_PER_BLOCK)
        return cls(mb_cols, mb_rows, qp, arr, marked)

    def replace(self, levels=None, marked=None) -> CoefficientStream:
        return CoefficientStream(
            self.mb_cols,
            self.mb_rows,
            self.qp,
            self.levels if levels is None else levels,
            self.marked if marked is None else marked,
        )

    def __eq__(self, other):
        if not isinstance(other, CoefficientStream):
            return NotImplemented
        return (
            (self.mb_cols, self.mb_rows, self.qp, self.marked)
            == (other.mb_cols, other.mb_rows, other.qp, other.marked)
            and np.array_equal(self.levels, other.levels)
        )

    __hash__ = None
