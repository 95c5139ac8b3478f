"""Zero AC15 coefficient-pair embedding, extraction and restoration.

Two routes implement the same rules. The per-macroblock functions work on
:class:`Macroblock` values one block at a time; the stream functions are
vectorized over whole :class:`CoefficientStream` arrays and are what the
CLI uses. Both assign bit groups to pairs in the same global order:
frame, macroblock raster index, block raster index.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .block_model import LEVEL_MAX, CoefficientStream, Macroblock, QdctBlock
from .errors import (
    CapacityExceeded,
    InvalidMarkedBlock,
    LevelOverflow,
    MalformedPrefix,
    StreamStateError,
)

PREFIX_BITS = 32
PAD_CODE = 0b100  # maps to (0, 0): leaves both coefficients untouched

# 3-bit code -> (c1, c2)
PAIR_TABLE = np.array(
    [(1, 1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0)],
    dtype=np.int32,
)
# (c1 + 1) * 3 + (c2 + 1) -> code; -1 marks (-1, -1)
_CODE_OF = np.full(9, -1, dtype=np.int64)
for _code, (_c1, _c2) in enumerate(PAIR_TABLE.tolist()):
    _CODE_OF[(_c1 + 1) * 3 + (_c2 + 1)] = _code


class Side(enum.Enum):
    ENCODER = "encoder"
    DECODER = "decoder"


class BlockClass(enum.Enum):
    SKIP_ALL_ZERO = "skip"
    ZERO_CANDIDATE = "zero_candidate"
    RECOVERY_SHIFT = "recovery_shift"
    EXTRACTING = "extracting"


def classify_block(block: QdctBlock, side: Side = Side.ENCODER) -> BlockClass:
    ac15 = block.ac15
    low = block.has_low_nonzero
    if side is Side.ENCODER:
        if ac15 != 0:
            return BlockClass.RECOVERY_SHIFT
        return BlockClass.ZERO_CANDIDATE if low else BlockClass.SKIP_ALL_ZERO
    if abs(ac15) >= 2:
        return BlockClass.RECOVERY_SHIFT
    if low:
        return BlockClass.EXTRACTING
    if ac15 != 0:
        raise InvalidMarkedBlock("AC15 = ±1 in a block with no other nonzero level")
    return BlockClass.SKIP_ALL_ZERO


def shift_nonzero(ac15: int) -> int:
    if ac15 == 0:
        raise ValueError("shift_nonzero requires a nonzero level")
    return ac15 + 1 if ac15 > 0 else ac15 - 1


def unshift(ac15: int) -> int:
    if abs(ac15) <= 1:
        raise ValueError(f"unshift requires |level| >= 2, got {ac15}")
    return ac15 - 1 if ac15 > 1 else ac15 + 1


def _code_value(bits) -> int:
    if isinstance(bits, str):
        if len(bits) != 3 or set(bits) - {"0", "1"}:
            raise ValueError(f"expected a 3-bit string, got {bits!r}")
        return int(bits, 2)
    if isinstance(bits, (tuple, list)):
        b1, b2, b3 = bits
        return (b1 << 2) | (b2 << 1) | b3
    if not 0 <= bits <= 7:
        raise ValueError(f"code {bits} outside 0..7")
    return int(bits)


def map_bits_to_pair(bits) -> tuple[int, int]:
    """Accepts '110', (1, 1, 0) or 6."""
    c1, c2 = PAIR_TABLE[_code_value(bits)]
    return int(c1), int(c2)


def map_pair_to_bits(pair) -> str:
    c1, c2 = pair
    if c1 not in (-1, 0, 1) or c2 not in (-1, 0, 1):
        raise InvalidMarkedBlock(f"pair {pair} outside {{-1, 0, 1}}")
    code = _CODE_OF[(c1 + 1) * 3 + (c2 + 1)]
    if code < 0:
        raise InvalidMarkedBlock("pair (-1, -1) is never produced by the embedder")
    return format(int(code), "03b")


def _bit_iter(bits) -> Iterator[int]:
    if isinstance(bits, str):
        bits = bits.replace(" ", "")
    for b in bits:
        b = int(b)
        if b not in (0, 1):
            raise ValueError(f"bit value {b}")
        yield b


def embed_macroblock(mb: Macroblock, bits) -> tuple[Macroblock, int]:
    """Embed into one macroblock; returns (marked macroblock, bits consumed).

    ``bits`` may be a string, a sequence or an iterator of 0/1 values; the
    iterator is advanced by exactly the number of consumed bits. If the
    source runs dry on a group boundary the remaining pairs keep (0, 0),
    which reads back as the padding code. Running dry inside a group raises.
    """
    if not mb.embeddable:
        raise ValueError("macroblock is not embeddable")
    source = bits if isinstance(bits, Iterator) else _bit_iter(bits)
    blocks = list(mb.blocks)
    candidates = []
    for i, block in enumerate(blocks):
        cls = classify_block(block, Side.ENCODER)
        if cls is BlockClass.RECOVERY_SHIFT:
            if abs(block.ac15) >= LEVEL_MAX:
                raise LevelOverflow(f"AC15 {block.ac15} cannot be shifted in 16 bits")
            blocks[i] = block.with_ac15(shift_nonzero(block.ac15))
        elif cls is BlockClass.ZERO_CANDIDATE:
            candidates.append(i)

    consumed = 0
    for k in range(0, len(candidates) - 1, 2):
        group = []
        for b in source:
            group.append(b)
            if len(group) == 3:
                break
        if not group:
            break
        if len(group) < 3:
            raise ValueError("bit source exhausted inside a 3-bit group; pad the payload first")
        c1, c2 = map_bits_to_pair(tuple(group))
        first, second = candidates[k], candidates[k + 1]
        blocks[first] = blocks[first].with_ac15(c1)
        blocks[second] = blocks[second].with_ac15(c2)
        consumed += 3
    return Macroblock(tuple(blocks), mb.embeddable), consumed


def extract_macroblock(mb: Macroblock) -> tuple[Macroblock, str]:
    """Recover the embedded bits and the original macroblock."""
    if not mb.embeddable:
        raise ValueError("macroblock is not embeddable")
    blocks = list(mb.blocks)
    extracting = []
    for i, block in enumerate(blocks):
        try:
            cls = classify_block(block, Side.DECODER)
        except InvalidMarkedBlock as exc:
            raise InvalidMarkedBlock(exc.reason, block=i) from None
        if cls is BlockClass.RECOVERY_SHIFT:
            blocks[i] = block.with_ac15(unshift(block.ac15))
        elif cls is BlockClass.EXTRACTING:
            extracting.append(i)

    out = []
    for k in range(0, len(extracting) - 1, 2):
        first, second = extracting[k], extracting[k + 1]
        pair = (blocks[first].ac15, blocks[second].ac15)
        try:
            out.append(map_pair_to_bits(pair))
        except InvalidMarkedBlock as exc:
            raise InvalidMarkedBlock(exc.reason, block=first) from None
        blocks[first] = blocks[first].with_ac15(0)
        blocks[second] = blocks[second].with_ac15(0)
    if len(extracting) % 2:
        last = extracting[-1]
        if blocks[last].ac15 != 0:
            raise InvalidMarkedBlock("unpaired extracting coefficient is nonzero", block=last)
    return Macroblock(tuple(blocks), mb.embeddable), "".join(out)


def macroblock_capacity(mb: Macroblock) -> int:
    z = sum(
        classify_block(b, Side.ENCODER) is BlockClass.ZERO_CANDIDATE for b in mb.blocks
    )
    return 3 * (z // 2) if mb.embeddable else 0


# -- payload framing ---------------------------------------------------------


@dataclass(frozen=True)
class PayloadFrame:
    """Length prefix, payload bits and padding, as 3-bit codes."""

    payload: bytes
    message_bits: int
    codes: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, payload: bytes, groups: int) -> PayloadFrame:
        """Frame ``payload`` into exactly ``groups`` 3-bit codes."""
        payload = bytes(payload)
        if len(payload) >= 1 << 32:
            raise ValueError("payload longer than the 32-bit length prefix allows")
        raw = struct.pack(">I", len(payload)) + payload
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
        message_bits = bits.size
        needed = -(-message_bits // 3)
        if needed > groups:
            raise CapacityExceeded(3 * groups, message_bits)
        bits = np.concatenate([bits, np.zeros(3 * needed - message_bits, np.uint8)])
        codes = np.full(groups, PAD_CODE, dtype=np.int64)
        if needed:
            codes[:needed] = bits.reshape(-1, 3) @ np.array([4, 2, 1])
        codes.setflags(write=False)
        return cls(payload, message_bits, codes)

    @property
    def used_groups(self) -> int:
        return -(-self.message_bits // 3)

    def bitstring(self) -> str:
        return "".join(format(int(c), "03b") for c in self.codes)


def parse_payload_bits(bits: np.ndarray) -> bytes:
    """Read the length prefix and payload from a flat 0/1 array."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size < PREFIX_BITS:
        raise MalformedPrefix(f"only {bits.size} bits extractable, prefix needs {PREFIX_BITS}")
    length = int.from_bytes(np.packbits(bits[:PREFIX_BITS]).tobytes(), "big")
    end = PREFIX_BITS + 8 * length
    if end > bits.size:
        raise MalformedPrefix(
            f"declared length {length} bytes needs {end} bits, only {bits.size} extractable"
        )
    return np.packbits(bits[PREFIX_BITS:end]).tobytes()


# -- stream level ------------------------------------------------------------


def _selection(stream: CoefficientStream, embeddable) -> np.ndarray:
    shape = (stream.frame_count, stream.mb_count)
    if embeddable is None:
        return np.ones(shape, dtype=bool)
    sel = np.asarray(embeddable, dtype=bool)
    if sel.shape != shape:
        raise ValueError(f"embeddable mask shape {sel.shape}, expected {shape}")
    return sel


def _rank_pairs(mask: np.ndarray):
    """Rank of each flagged block within its macroblock, and pairs per macroblock."""
    rank = np.cumsum(mask, axis=-1) - 1
    pairs = mask.sum(axis=-1) // 2
    paired = mask & (rank < 2 * pairs[..., None])
    return rank, pairs, paired


def _encoder_view(levels: np.ndarray, sel: np.ndarray):
    ac15 = levels[..., 15]
    low = (levels[..., :15] != 0).any(axis=-1)
    active = sel[..., None]
    shift = active & (ac15 != 0)
    candidate = active & (ac15 == 0) & low
    return ac15, shift, candidate


def pair_counts(stream: CoefficientStream, embeddable=None) -> np.ndarray:
    """Zero coefficient-pairs per macroblock, shape (frames, MBs)."""
    sel = _selection(stream, embeddable)
    _, _, candidate = _encoder_view(stream.levels, sel)
    return candidate.sum(axis=-1) // 2


def capacity(stream: CoefficientStream, embeddable=None) -> int:
    """Maximum embeddable bits: sum of 3 * floor(Z / 2) over embeddable macroblocks."""
    if stream.marked:
        raise StreamStateError("capacity is defined on unmarked streams")
    return 3 * int(pair_counts(stream, embeddable).sum())


def frame_capacity(stream: CoefficientStream, embeddable=None) -> np.ndarray:
    return 3 * pair_counts(stream, embeddable).sum(axis=1)


@dataclass
class EmbedResult:
    """Bookkeeping from one stream embedding, before metrics are attached."""

    capacity_bits: int
    message_bits: int
    payload_bytes: int
    frame_capacity_bits: np.ndarray
    frame_embedded_bits: np.ndarray


def embed_levels(stream: CoefficientStream, payload: bytes, embeddable=None):
    """Vectorized embedding; returns (marked stream, EmbedResult)."""
    if stream.marked:
        raise StreamStateError("stream is already marked")
    sel = _selection(stream, embeddable)
    levels = stream.levels.astype(np.int32)
    ac15, shift, candidate = _encoder_view(levels, sel)
    if np.any(np.abs(ac15[shift]) >= LEVEL_MAX):
        f, m, b = np.argwhere(shift & (np.abs(ac15) >= LEVEL_MAX))[0]
        raise LevelOverflow(f"AC15 at frame {f}, macroblock {m}, block {b} cannot be shifted")
    _, pairs, paired = _rank_pairs(candidate)
    total_pairs = int(pairs.sum())
    required = PREFIX_BITS + 8 * len(payload)
    if 3 * total_pairs < required:
        raise CapacityExceeded(3 * total_pairs, required)
    frame = PayloadFrame.build(payload, total_pairs)

    new_ac15 = ac15.copy()
    new_ac15[shift] += np.sign(ac15[shift])
    # C-order boolean indexing visits pairs in global order, c1 then c2
    new_ac15[paired] = PAIR_TABLE[frame.codes].reshape(-1)
    levels[..., 15] = new_ac15

    per_frame_pairs = pairs.sum(axis=1)
    start = np.concatenate([[0], np.cumsum(per_frame_pairs)[:-1]]) if per_frame_pairs.size else per_frame_pairs
    used = np.clip(frame.used_groups - start, 0, per_frame_pairs)
    result = EmbedResult(
        capacity_bits=3 * total_pairs,
        message_bits=frame.message_bits,
        payload_bytes=len(payload),
        frame_capacity_bits=3 * per_frame_pairs,
        frame_embedded_bits=3 * used,
    )
    return stream.replace(levels=levels, marked=True), result


def _first(mask: np.ndarray):
    return tuple(int(v) for v in np.argwhere(mask)[0])


def extract_levels(stream: CoefficientStream, embeddable=None):
    """Vectorized extraction; returns (restored stream, flat bit array)."""
    if not stream.marked:
        raise StreamStateError("stream is not marked")
    sel = _selection(stream, embeddable)
    levels = stream.levels.astype(np.int32)
    ac15 = levels[..., 15]
    low = (levels[..., :15] != 0).any(axis=-1)
    active = sel[..., None]
    mag = np.abs(ac15)

    orphan = active & (mag == 1) & ~low
    if orphan.any():
        raise InvalidMarkedBlock("AC15 = ±1 in a block with no other nonzero level", *_first(orphan))
    recovery = active & (mag >= 2)
    extracting = active & (mag <= 1) & low
    _, _, paired = _rank_pairs(extracting)
    leftover = extracting & ~paired & (ac15 != 0)
    if leftover.any():
        raise InvalidMarkedBlock("unpaired extracting coefficient is nonzero", *_first(leftover))

    pair_values = ac15[paired].reshape(-1, 2)
    codes = _CODE_OF[(pair_values[:, 0] + 1) * 3 + (pair_values[:, 1] + 1)]
    if (codes < 0).any():
        k = int(np.argmax(codes < 0))
        coords = np.argwhere(paired)[2 * k]
        raise InvalidMarkedBlock("pair (-1, -1) is never produced by the embedder", *map(int, coords))

    restored = ac15.copy()
    restored[recovery] -= np.sign(ac15[recovery])
    restored[paired] = 0
    levels[..., 15] = restored
    bits = ((codes[:, None] >> np.array([2, 1, 0])) & 1).astype(np.uint8).reshape(-1)
    return stream.replace(levels=levels, marked=False), bits


def extract_stream(stream: CoefficientStream, embeddable=None):
    """Returns (restored stream, payload bytes)."""
    restored, bits = extract_levels(stream, embeddable)
    return restored, parse_payload_bits(bits)


def embed_stream(stream: CoefficientStream, payload: bytes, embeddable=None, measure=True):
    """Embed ``payload`` into every selected macroblock.

    Returns (marked stream, report). With ``measure`` the report carries
    per-frame capacity metrics, PSNR and bitrate-proxy figures; otherwise
    it is the bare :class:`EmbedResult`.
    """
    marked, result = embed_levels(stream, payload, embeddable)
    if not measure:
        return marked, result
    from .metrics import build_report

    return marked, build_report(stream, marked, result, embeddable)


def embed_stream_reference(stream: CoefficientStream, payload: bytes, embeddable=None):
    """Same result as :func:`embed_levels`, computed one macroblock at a time."""
    if stream.marked:
        raise StreamStateError("stream is already marked")
    sel = _selection(stream, embeddable)
    groups = int(pair_counts(stream, sel).sum())
    frame = PayloadFrame.build(payload, groups)
    source = _bit_iter(frame.bitstring())
    frames = []
    for f in range(stream.frame_count):
        row = []
        for i in range(stream.mb_count):
            mb = stream.macroblock(f, i, embeddable=bool(sel[f, i]))
            if mb.embeddable:
                mb, _ = embed_macroblock(mb, source)
            row.append(mb)
        frames.append(row)
    return CoefficientStream.from_macroblocks(
        frames, stream.mb_cols, stream.mb_rows, stream.qp, marked=True
    )


def extract_stream_reference(stream: CoefficientStream, embeddable=None):
    if not stream.marked:
        raise StreamStateError("stream is not marked")
    sel = _selection(stream, embeddable)
    frames, bits = [], []
    for f in range(stream.frame_count):
        row = []
        for i in range(stream.mb_count):
            mb = stream.macroblock(f, i, embeddable=bool(sel[f, i]))
            if mb.embeddable:
                try:
                    mb, got = extract_macroblock(mb)
                except InvalidMarkedBlock as exc:
                    raise InvalidMarkedBlock(exc.reason, f, i, exc.block) from None
                bits.append(got)
            row.append(mb)
        frames.append(row)
    restored = CoefficientStream.from_macroblocks(
        frames, stream.mb_cols, stream.mb_rows, stream.qp, marked=False
    )
    flat = np.array([int(c) for c in "".join(bits)], dtype=np.uint8)
    return restored, parse_payload_bits(flat)
