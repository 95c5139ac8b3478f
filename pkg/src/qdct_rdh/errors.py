"""Exception hierarchy shared by the engine, the file formats and the CLI."""


class RdhError(Exception):
    """Base class for every error raised by this package."""


class CapacityExceeded(RdhError):
    def __init__(self, capacity: int, required: int):
        self.capacity = capacity
        self.required = required
        super().__init__(f"capacity {capacity} bits, required {required} bits")


class InvalidMarkedBlock(RdhError):
    """A marked stream contains a coefficient state no conformant embedder produces."""

    def __init__(self, reason: str, frame=None, macroblock=None, block=None):
        self.reason = reason
        self.frame = frame
        self.macroblock = macroblock
        self.block = block
        parts = [
            f"{name} {value}"
            for name, value in (("frame", frame), ("macroblock", macroblock), ("block", block))
            if value is not None
        ]
        where = " at " + ", ".join(parts) if parts else ""
        super().__init__(f"invalid marked block{where}: {reason}")


class MalformedPrefix(RdhError):
    pass


class StreamStateError(RdhError):
    """Embedding into a marked stream, or extracting from an unmarked one."""


class LevelOverflow(RdhError):
    pass


class FormatError(RdhError, ValueError):
    """Base class for container and video parsing failures."""


class BadMagic(FormatError):
    pass


class SizeMismatch(FormatError):
    pass


class QpOutOfRange(FormatError):
    pass


class Y4MError(FormatError):
    pass


class UnsupportedColorspace(Y4MError):
    pass


class TruncatedFrame(Y4MError):
    def __init__(self, index: int, expected: int, actual: int):
        self.index = index
        super().__init__(
            f"frame {index} truncated: expected {expected} bytes, got {actual}"
        )
