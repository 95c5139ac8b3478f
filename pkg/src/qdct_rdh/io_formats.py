"""Y4M / raw YUV ingestion, the QDC1 coefficient sidecar and report writers.

Sidecar layout, all little-endian::

    "QDC1" | mb_cols u16 | mb_rows u16 | frame_count u16 | qp u8 | flags u8
    then per frame, per macroblock, per block: 16 x int16 levels (zig-zag)

flags bit 0 is the marked flag; the other bits are reserved and must be 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .block_model import CoefficientStream
from .errors import (
    BadMagic,
    FormatError,
    QpOutOfRange,
    SizeMismatch,
    TruncatedFrame,
    UnsupportedColorspace,
    Y4MError,
)
from .transform_quant import PixelPlane

Y4M_MAGIC = b"YUV4MPEG2"
MAX_DIMENSION = 16384
_MAX_HEADER = 4096
_CHROMA_420 = {"420", "420jpeg", "420paldv", "420mpeg2"}


@dataclass
class Video(Sequence):
    """Luma planes padded to macroblock size; ``width``/``height`` are the source geometry."""

    planes: list[PixelPlane]
    width: int
    height: int
    frame_rate: str = "25:1"
    colorspace: str = "420jpeg"

    def __getitem__(self, i):
        return self.planes[i]

    def __len__(self):
        return len(self.planes)

    def crop(self, plane: PixelPlane) -> np.ndarray:
        return plane.samples[: self.height, : self.width]


def pad_to_macroblocks(luma: np.ndarray) -> np.ndarray:
    h, w = luma.shape
    ph, pw = -h % 16, -w % 16
    if ph or pw:
        luma = np.pad(luma, ((0, ph), (0, pw)), mode="edge")
    return luma


def _chroma_bytes(width: int, height: int) -> int:
    return 2 * ((width + 1) // 2) * ((height + 1) // 2)


def _parse_dimension(token: str, name: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise Y4MError(f"bad {name} value {token!r}") from None
    if not 0 < value <= MAX_DIMENSION:
        raise Y4MError(f"{name} {value} outside 1..{MAX_DIMENSION}")
    return value


def parse_y4m(data: bytes) -> Video:
    """Parse an in-memory Y4M stream; only 8-bit 4:2:0 and mono are accepted."""
    data = bytes(data)
    end = data.find(b"\n", 0, _MAX_HEADER)
    if not data.startswith(Y4M_MAGIC):
        raise Y4MError("missing YUV4MPEG2 signature")
    if end < 0:
        raise Y4MError("stream header is not newline-terminated")
    try:
        header = data[:end].decode("ascii")
    except UnicodeDecodeError:
        raise Y4MError("stream header is not ASCII") from None
    tokens = header.split(" ")
    if tokens[0] != "YUV4MPEG2":
        raise Y4MError(f"bad signature {tokens[0]!r}")

    width = height = None
    colorspace = "420jpeg"
    frame_rate = "25:1"
    for tok in tokens[1:]:
        if not tok:
            continue
        key, value = tok[0], tok[1:]
        if key == "W":
            width = _parse_dimension(value, "width")
        elif key == "H":
            height = _parse_dimension(value, "height")
        elif key == "C":
            colorspace = value
        elif key == "F":
            frame_rate = value
    if width is None or height is None:
        raise Y4MError("header lacks W or H")
    if colorspace in _CHROMA_420:
        chroma = _chroma_bytes(width, height)
    elif colorspace == "mono":
        chroma = 0
    else:
        raise UnsupportedColorspace(f"unsupported colorspace C{colorspace}")

    luma_size = width * height
    frame_size = luma_size + chroma
    planes = []
    pos = end + 1
    while pos < len(data):
        index = len(planes)
        line_end = data.find(b"\n", pos, pos + _MAX_HEADER)
        if line_end < 0:
            raise Y4MError(f"frame {index} header is not newline-terminated")
        frame_header = data[pos:line_end]
        if frame_header != b"FRAME" and not frame_header.startswith(b"FRAME "):
            raise Y4MError(f"frame {index}: expected FRAME marker, got {frame_header[:16]!r}")
        start = line_end + 1
        payload = data[start : start + frame_size]
        if len(payload) < frame_size:
            raise TruncatedFrame(index, frame_size, len(payload))
        luma = np.frombuffer(payload, dtype=np.uint8, count=luma_size).reshape(height, width)
        planes.append(PixelPlane(pad_to_macroblocks(luma)))
        pos = start + frame_size
    return Video(planes, width, height, frame_rate, colorspace)


def read_y4m(path) -> Video:
    return parse_y4m(Path(path).read_bytes())


def write_y4m(video_or_planes, width=None, height=None, frame_rate="25:1") -> bytes:
    """Serialize luma planes as C420jpeg Y4M with mid-grey chroma."""
    planes = list(video_or_planes)
    if isinstance(video_or_planes, Video):
        width, height = video_or_planes.width, video_or_planes.height
        frame_rate = video_or_planes.frame_rate
    if planes and width is None:
        height, width = planes[0].samples.shape
    out = io.BytesIO()
    out.write(f"YUV4MPEG2 W{width} H{height} F{frame_rate} Ip A1:1 C420jpeg\n".encode())
    grey = bytes([128]) * _chroma_bytes(width, height)
    for p in planes:
        samples = p.samples if isinstance(p, PixelPlane) else np.asarray(p, dtype=np.uint8)
        out.write(b"FRAME\n")
        out.write(np.ascontiguousarray(samples[:height, :width]).tobytes())
        out.write(grey)
    return out.getvalue()


def read_raw_yuv(path, width: int, height: int) -> Video:
    """Read headerless 8-bit 4:2:0 frames, keeping only luma."""
    data = Path(path).read_bytes()
    frame_size = width * height + _chroma_bytes(width, height)
    if len(data) % frame_size:
        raise SizeMismatch(
            f"raw yuv size {len(data)} is not a multiple of the {width}x{height} "
            f"frame size {frame_size}"
        )
    planes = []
    for k in range(len(data) // frame_size):
        luma = np.frombuffer(data, np.uint8, width * height, k * frame_size)
        planes.append(PixelPlane(pad_to_macroblocks(luma.reshape(height, width))))
    return Video(planes, width, height, colorspace="420")


# -- coefficient sidecar -----------------------------------------------------

SIDECAR_MAGIC = b"QDC1"
_HEADER = struct.Struct("<4sHHHBB")
BLOCK_RECORD_BYTES = 32


def write_sidecar(stream: CoefficientStream) -> bytes:
    if max(stream.mb_cols, stream.mb_rows, stream.frame_count) > 0xFFFF:
        raise FormatError("geometry does not fit the 16-bit header fields")
    header = _HEADER.pack(
        SIDECAR_MAGIC,
        stream.mb_cols,
        stream.mb_rows,
        stream.frame_count,
        stream.qp,
        1 if stream.marked else 0,
    )
    return header + stream.levels.astype("<i2").tobytes()


def read_sidecar(data: bytes) -> CoefficientStream:
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise SizeMismatch(f"sidecar is {len(data)} bytes, header alone needs {_HEADER.size}")
    magic, mb_cols, mb_rows, frames, qp, flags = _HEADER.unpack_from(data)
    if magic != SIDECAR_MAGIC:
        raise BadMagic(f"bad sidecar magic {magic!r}")
    if qp > 51:
        raise QpOutOfRange(f"qp {qp} outside [0, 51]")
    if flags & ~1:
        raise FormatError(f"reserved flag bits set: {flags:#04x}")
    expected = _HEADER.size + frames * mb_cols * mb_rows * 16 * BLOCK_RECORD_BYTES
    if len(data) != expected:
        raise SizeMismatch(f"sidecar is {len(data)} bytes, header implies {expected}")
    levels = np.frombuffer(data, dtype="<i2", offset=_HEADER.size)
    levels = levels.reshape(frames, mb_cols * mb_rows, 16, 16)
    return CoefficientStream(mb_cols, mb_rows, qp, levels, bool(flags & 1))


def save_sidecar(path, stream: CoefficientStream) -> None:
    Path(path).write_bytes(write_sidecar(stream))


def load_sidecar(path) -> CoefficientStream:
    return read_sidecar(Path(path).read_bytes())


# -- reports -----------------------------------------------------------------

SCHEMA_VERSION = 1
REPORT_COLUMNS = (
    "frame",
    "capacity_bits",
    "embedded_bits",
    "cp",
    "full",
    "ec",
    "psnr_db",
    "cost_original",
    "cost_marked",
    "bir",
)
_FLOAT_COLUMNS = {"cp", "full", "ec", "psnr_db", "bir"}


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6f}"


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return format_value(value)
        return float(f"{value:.6f}")
    if isinstance(value, np.integer):
        return int(value)
    return value


def _as_dict(row) -> dict:
    return row if isinstance(row, dict) else row.as_dict()


@dataclass
class Report:
    """Report rows plus run metadata; written as CSV and JSON with the same values."""

    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    columns: tuple = REPORT_COLUMNS

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.meta:
            pairs = " ".join(f"{k}={v}" for k, v in self.meta.items())
            buf.write(f"# schema_version={SCHEMA_VERSION} {pairs}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            d = _as_dict(row)
            writer.writerow([format_value(d[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "meta": self.meta,
            "columns": list(self.columns),
            "rows": [
                {c: _json_value(_as_dict(row)[c]) for c in self.columns} for row in self.rows
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def parse_report_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
