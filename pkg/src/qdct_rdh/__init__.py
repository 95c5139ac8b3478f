"""Reversible data hiding in zero QDCT coefficient-pairs of 4x4 intra blocks."""

from .block_model import (
    ZIGZAG,
    CoefficientStream,
    Macroblock,
    QdctBlock,
    inverse_zigzag,
    zigzag_scan,
)
from .errors import (
    BadMagic,
    CapacityExceeded,
    FormatError,
    InvalidMarkedBlock,
    MalformedPrefix,
    RdhError,
    StreamStateError,
)
from .rdh_engine import (
    BlockClass,
    Side,
    capacity,
    classify_block,
    embed_macroblock,
    embed_stream,
    extract_macroblock,
    extract_stream,
    map_bits_to_pair,
    map_pair_to_bits,
    shift_nonzero,
    unshift,
)
from .transform_quant import PixelPlane, QuantParams, decode_frame, encode_frame

__version__ = "0.1.0"
