"""Run configuration and the embeddable-macroblock selection it implies."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

DEFAULT_QP = 28
DEFAULT_PAYLOAD_SIZES = (250, 500, 750, 1000, 1250)


@dataclass(frozen=True)
class RunConfig:
    qp: int = DEFAULT_QP
    # every stride-th frame starting at offset carries data; stride 30 mimics
    # one intra frame per 30
    stride: int = 1
    offset: int = 0
    mask: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.qp <= 51:
            raise ValueError(f"qp must be in [0, 51], got {self.qp}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.offset < 0:
            raise ValueError(f"offset must be >= 0, got {self.offset}")

    def selection(self, frame_count: int, mb_cols: int, mb_rows: int) -> np.ndarray:
        mb_mask = np.ones(mb_cols * mb_rows, dtype=bool)
        if self.mask is not None:
            mb_mask = load_mask(self.mask, mb_cols, mb_rows)
        return embeddable_selection(frame_count, mb_mask, self.stride, self.offset)


def embeddable_selection(frame_count: int, mb_mask, stride=1, offset=0) -> np.ndarray:
    """(frames, MBs) boolean selection from a per-MB mask and a frame cadence."""
    frames = np.arange(frame_count)
    frame_on = (frames >= offset) & ((frames - offset) % stride == 0)
    return frame_on[:, None] & np.asarray(mb_mask, dtype=bool)[None, :]


def parse_mask(text: str, mb_cols: int, mb_rows: int) -> np.ndarray:
    """Whitespace-separated 0/1 tokens in macroblock raster order; '#' starts a comment."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for tok in line.split():
            if set(tok) - {"0", "1"}:
                raise ValueError(f"mask may only contain 0 and 1, got {tok!r}")
            # a row may be written as one run of digits, e.g. "01101"
            tokens.extend(tok)
    if len(tokens) != mb_cols * mb_rows:
        raise ValueError(f"mask has {len(tokens)} entries, geometry needs {mb_cols * mb_rows}")
    return np.array([t == "1" for t in tokens], dtype=bool)


def load_mask(path, mb_cols: int, mb_rows: int) -> np.ndarray:
    return parse_mask(Path(path).read_text(), mb_cols, mb_rows)
