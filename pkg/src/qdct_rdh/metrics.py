"""Capacity structure (CP / Full / EC), PSNR and an exp-Golomb bitrate proxy.

The bitrate proxy is not CAVLC. It charges a run-level code over the
zig-zag vector, which is enough to compare marked against original
streams but says nothing about absolute kbps.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .block_model import CoefficientStream, QdctBlock
from .errors import StreamStateError
from .transform_quant import PixelPlane, decode_frame

PSNR_INF = math.inf


def ue_length(k: int) -> int:
    """Bits in the unsigned exp-Golomb code for k >= 0."""
    if k < 0:
        raise ValueError(f"ue_length needs k >= 0, got {k}")
    return 2 * ((k + 1).bit_length() - 1) + 1


def se_length(v: int) -> int:
    return ue_length(2 * abs(v) - (1 if v > 0 else 0))


def coding_cost(block) -> int:
    """Run-level proxy cost of one zig-zag block.

    UE(nonzero count) plus, for every nonzero level, SE(level) and UE of
    the zero run separating it from the previous nonzero level.
    """
    coeffs = block.coeffs if isinstance(block, QdctBlock) else tuple(int(c) for c in block)
    cost = 0
    count = 0
    run = 0
    for level in coeffs:
        if level == 0:
            run += 1
            continue
        cost += se_length(level) + ue_length(run)
        count += 1
        run = 0
    return cost + ue_length(count)


def _ue_array(k: np.ndarray) -> np.ndarray:
    # frexp exponent of k + 1 is floor(log2(k + 1)) + 1, exactly, for integers
    _, exp = np.frexp((k + 1).astype(np.float64))
    return 2 * (exp.astype(np.int64) - 1) + 1


def block_costs(levels) -> np.ndarray:
    """Vectorized :func:`coding_cost` over (..., 16) level arrays."""
    levels = np.asarray(levels, dtype=np.int64)
    nz = levels != 0
    idx = np.arange(16)
    last = np.where(nz, idx, -1)
    prev = np.maximum.accumulate(last, axis=-1)
    # index of the previous nonzero strictly before position i
    before = np.concatenate(
        [np.full(levels.shape[:-1] + (1,), -1), prev[..., :-1]], axis=-1
    )
    run = idx - before - 1
    mapped = 2 * np.abs(levels) - (levels > 0)
    per = np.where(nz, _ue_array(mapped) + _ue_array(run), 0)
    return per.sum(axis=-1) + _ue_array(nz.sum(axis=-1))


def bir(cost_original: float, cost_marked: float) -> float:
    """Bit-rate increment ratio, as a fraction (multiply by 100 for percent)."""
    if cost_original == 0:
        raise ValueError("original cost is zero")
    return (cost_marked - cost_original) / cost_original


def psnr(reference, test) -> float:
    """Luma PSNR in dB; identical inputs give ``math.inf``."""
    a = reference.samples if isinstance(reference, PixelPlane) else np.asarray(reference)
    b = test.samples if isinstance(test, PixelPlane) else np.asarray(test)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return PSNR_INF
    return 10.0 * math.log10(255.0**2 / mse)


@dataclass(frozen=True)
class CapacityMetrics:
    embeddable_blocks: int
    zero_ac15: int
    paired_zero_ac15: int
    embedded_bits: int

    @property
    def defined(self) -> bool:
        return self.embeddable_blocks > 0

    def _ratio(self, n) -> float:
        return n / self.embeddable_blocks if self.defined else math.nan

    @property
    def cp(self) -> float:
        return self._ratio(self.paired_zero_ac15)

    @property
    def full(self) -> float:
        return self._ratio(self.zero_ac15)

    @property
    def ec(self) -> float:
        return self._ratio(self.embedded_bits)


def _block_counts(stream: CoefficientStream, embeddable):
    from .rdh_engine import _encoder_view, _selection

    if stream.marked:
        raise StreamStateError("capacity metrics are taken on the unmarked stream")
    sel = _selection(stream, embeddable)
    levels = stream.levels
    _, shift, candidate = _encoder_view(levels, sel)
    pairs = candidate.sum(axis=-1) // 2
    per_frame = lambda a: a.reshape(stream.frame_count, -1).sum(axis=1)
    return per_frame(shift | candidate), per_frame(candidate), pairs.sum(axis=1)


def capacity_metrics(stream: CoefficientStream, embedded_bits=None, embeddable=None) -> CapacityMetrics:
    """Whole-stream CP / Full / EC. ``embedded_bits`` defaults to full capacity."""
    blocks, zeros, pairs = _block_counts(stream, embeddable)
    total_pairs = int(pairs.sum())
    if embedded_bits is None:
        embedded_bits = 3 * total_pairs
    if embedded_bits % 3 or embedded_bits > 3 * total_pairs or embedded_bits < 0:
        raise ValueError(f"embedded_bits {embedded_bits} is not 3 x used pairs within capacity")
    return CapacityMetrics(int(blocks.sum()), int(zeros.sum()), 2 * embedded_bits // 3, embedded_bits)


def frame_capacity_metrics(stream: CoefficientStream, embedded_bits=None, embeddable=None):
    blocks, zeros, pairs = _block_counts(stream, embeddable)
    if embedded_bits is None:
        embedded_bits = 3 * pairs
    return [
        CapacityMetrics(int(b), int(z), 2 * int(e) // 3, int(e))
        for b, z, e in zip(blocks, zeros, embedded_bits)
    ]


@dataclass(frozen=True)
class RateQualityRecord:
    psnr_db: float
    cost_original: int
    cost_marked: int

    @property
    def bir(self) -> float:
        return bir(self.cost_original, self.cost_marked) if self.cost_original else math.nan


def rate_quality(original: CoefficientStream, marked: CoefficientStream) -> list[RateQualityRecord]:
    records = []
    for f in range(original.frame_count):
        a, b = original.levels[f], marked.levels[f]
        if np.array_equal(a, b):
            q = PSNR_INF
        else:
            q = psnr(
                decode_frame(a, original.mb_cols, original.mb_rows, original.qp),
                decode_frame(b, marked.mb_cols, marked.mb_rows, marked.qp),
            )
        records.append(RateQualityRecord(q, int(block_costs(a).sum()), int(block_costs(b).sum())))
    return records


@dataclass(frozen=True)
class FrameReport:
    frame: int
    capacity_bits: int
    embedded_bits: int
    cp: float
    full: float
    ec: float
    psnr_db: float
    cost_original: int
    cost_marked: int
    bir: float  # percent

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class EmbedReport:
    capacity_bits: int
    message_bits: int
    payload_bytes: int
    frames: list[FrameReport] = field(default_factory=list)

    @property
    def embedded_bits(self) -> int:
        return sum(r.embedded_bits for r in self.frames)

    @property
    def cost_original(self) -> int:
        return sum(r.cost_original for r in self.frames)

    @property
    def cost_marked(self) -> int:
        return sum(r.cost_marked for r in self.frames)

    @property
    def bir_percent(self) -> float:
        if not self.cost_original:
            return math.nan
        return 100.0 * bir(self.cost_original, self.cost_marked)


def build_report(original, marked, result, embeddable=None) -> EmbedReport:
    caps = frame_capacity_metrics(original, result.frame_embedded_bits, embeddable)
    rq = rate_quality(original, marked)
    rows = [
        FrameReport(
            frame=f,
            capacity_bits=int(result.frame_capacity_bits[f]),
            embedded_bits=c.embedded_bits,
            cp=c.cp,
            full=c.full,
            ec=c.ec,
            psnr_db=r.psnr_db,
            cost_original=r.cost_original,
            cost_marked=r.cost_marked,
            bir=100.0 * r.bir,
        )
        for f, (c, r) in enumerate(zip(caps, rq))
    ]
    return EmbedReport(result.capacity_bits, result.message_bits, result.payload_bytes, rows)
