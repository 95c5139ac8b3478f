"""All-intra codec model built on the H.264 4x4 integer transform.

No prediction is performed: each 4x4 luma block is transformed as its own
residual. All arithmetic is exact integer arithmetic on int64 arrays, so
every function accepts batches with arbitrary leading dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_model import BLOCKS_PER_MB, scan_blocks, unscan_blocks

CORE = np.array(
    [
        [1, 1, 1, 1],
        [2, 1, -1, -2],
        [1, -1, -1, 1],
        [1, -2, 2, -1],
    ],
    dtype=np.int64,
)

# Per qp % 6: (positions with both indices even, both odd, mixed)
_MF = np.array(
    [
        [13107, 5243, 8066],
        [11916, 4660, 7490],
        [10082, 4194, 6554],
        [9362, 3647, 5825],
        [8192, 3355, 5243],
        [7282, 2893, 4559],
    ],
    dtype=np.int64,
)
_V = np.array(
    [
        [10, 16, 13],
        [11, 18, 14],
        [13, 20, 16],
        [14, 23, 18],
        [16, 25, 20],
        [18, 29, 23],
    ],
    dtype=np.int64,
)
# Quantizer step for qp 0..5; doubles every 6 qp.
_QSTEP = (0.625, 0.6875, 0.8125, 0.875, 1.0, 1.125)


def _position_class() -> np.ndarray:
    i, j = np.indices((4, 4))
    cls = np.full((4, 4), 2)
    cls[(i % 2 == 0) & (j % 2 == 0)] = 0
    cls[(i % 2 == 1) & (j % 2 == 1)] = 1
    return cls


_POS = _position_class()


@dataclass(frozen=True)
class QuantParams:
    qp: int = 28
    intra: bool = True

    def __post_init__(self):
        if not isinstance(self.qp, (int, np.integer)) or not 0 <= self.qp <= 51:
            raise ValueError(f"qp must be an integer in [0, 51], got {self.qp!r}")

    @property
    def per(self) -> int:
        return self.qp // 6

    @property
    def rem(self) -> int:
        return self.qp % 6

    @property
    def qbits(self) -> int:
        return 15 + self.per

    @property
    def rounding(self) -> int:
        # dead-zone offset: 1/3 of a step for intra, 1/6 for inter
        return (1 << self.qbits) // (3 if self.intra else 6)

    @property
    def mf(self) -> np.ndarray:
        """Forward multiplier per raster position."""
        return _MF[self.rem][_POS]

    @property
    def v(self) -> np.ndarray:
        """Rescale factor per raster position."""
        return _V[self.rem][_POS]

    @property
    def step(self) -> float:
        return _QSTEP[self.rem] * (1 << self.per)


def _params(qp) -> QuantParams:
    return qp if isinstance(qp, QuantParams) else QuantParams(int(qp))


def forward_transform_4x4(residual) -> np.ndarray:
    """Core transform C X C^T on (..., 4, 4) integer grids."""
    x = np.asarray(residual, dtype=np.int64)
    return CORE @ x @ CORE.T


def quantize(coeffs, qp=28) -> np.ndarray:
    """Quantize raster-order transform coefficients; returns zig-zag levels (..., 16)."""
    p = _params(qp)
    w = np.asarray(coeffs, dtype=np.int64)
    mag = (np.abs(w) * p.mf + p.rounding) >> p.qbits
    return scan_blocks(np.sign(w) * mag)


def dequantize(levels, qp=28) -> np.ndarray:
    """Rescale zig-zag levels back to raster-order coefficients (..., 4, 4)."""
    p = _params(qp)
    z = unscan_blocks(np.asarray(levels, dtype=np.int64))
    return (z * p.v) << p.per


def inverse_transform_4x4(coeffs) -> np.ndarray:
    """Inverse core transform with the standard half-weight butterflies and (x + 32) >> 6."""
    d = np.asarray(coeffs, dtype=np.int64)

    def butterfly(a, axis):
        d0, d1, d2, d3 = (np.take(a, k, axis=axis) for k in range(4))
        e, f = d0 + d2, d0 - d2
        g, h = (d1 >> 1) - d3, d1 + (d3 >> 1)
        return np.stack([e + h, f + g, f - g, e - h], axis=axis)

    r = butterfly(butterfly(d, -1), -2)
    return (r + 32) >> 6


def dequantize_inverse_transform(levels, qp=28) -> np.ndarray:
    return inverse_transform_4x4(dequantize(levels, qp))


@dataclass(frozen=True)
class PixelPlane:
    """Macroblock-aligned 8-bit luma plane, stored as a (height, width) array."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2:
            raise ValueError(f"luma plane must be 2-D, got shape {s.shape}")
        h, w = s.shape
        if h % 16 or w % 16:
            raise ValueError(f"plane {w}x{h} is not macroblock aligned")
        if s.dtype != np.uint8:
            if s.size and (s.min() < 0 or s.max() > 255):
                raise ValueError("samples outside [0, 255]")
            s = s.astype(np.uint8)
        object.__setattr__(self, "samples", s)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def mb_cols(self) -> int:
        return self.width // 16

    @property
    def mb_rows(self) -> int:
        return self.height // 16

    def __eq__(self, other):
        if not isinstance(other, PixelPlane):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


def plane_to_blocks(samples: np.ndarray) -> np.ndarray:
    """(H, W) -> (MBs, 16 blocks, 4, 4), both levels in raster order."""
    h, w = samples.shape
    mr, mc = h // 16, w // 16
    t = samples.reshape(mr, 4, 4, mc, 4, 4)
    # axes: mb_row, blk_row, y, mb_col, blk_col, x
    return t.transpose(0, 3, 1, 4, 2, 5).reshape(mr * mc, BLOCKS_PER_MB, 4, 4)


def blocks_to_plane(blocks: np.ndarray, mb_cols: int, mb_rows: int) -> np.ndarray:
    t = blocks.reshape(mb_rows, mb_cols, 4, 4, 4, 4)
    return t.transpose(0, 2, 4, 1, 3, 5).reshape(mb_rows * 16, mb_cols * 16)


def encode_frame(plane: PixelPlane, qp=28) -> np.ndarray:
    """Transform and quantize every 4x4 block; returns levels (MBs, 16, 16)."""
    if not isinstance(plane, PixelPlane):
        plane = PixelPlane(np.asarray(plane))
    blocks = plane_to_blocks(plane.samples.astype(np.int64))
    return quantize(forward_transform_4x4(blocks), qp).astype(np.int32)


def decode_frame(levels, mb_cols: int, mb_rows: int, qp=28) -> PixelPlane:
    residual = dequantize_inverse_transform(levels, qp)
    samples = np.clip(blocks_to_plane(residual, mb_cols, mb_rows), 0, 255)
    return PixelPlane(samples.astype(np.uint8))


def encode_planes(planes, qp=28):
    """Encode a sequence of equally sized planes into a CoefficientStream."""
    from .block_model import CoefficientStream

    planes = list(planes)
    if not planes:
        raise ValueError("no frames to encode")
    first = planes[0]
    if any(p.samples.shape != first.samples.shape for p in planes):
        raise ValueError("frames differ in size")
    levels = np.stack([encode_frame(p, qp) for p in planes])
    return CoefficientStream(first.mb_cols, first.mb_rows, int(_params(qp).qp), levels)


def decode_stream(stream) -> list[PixelPlane]:
    return [
        decode_frame(stream.levels[f], stream.mb_cols, stream.mb_rows, stream.qp)
        for f in range(stream.frame_count)
    ]
