"""Command-line front end: encode, embed, extract, verify, analyze.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 capacity error,
4 format or corruption error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import io_formats
from .config import DEFAULT_PAYLOAD_SIZES, DEFAULT_QP, RunConfig
from .errors import CapacityExceeded, RdhError
from .metrics import capacity_metrics, frame_capacity_metrics
from .rdh_engine import capacity, embed_stream, extract_stream
from .transform_quant import encode_planes

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_FORMAT = 4


def _qp(text: str) -> int:
    try:
        qp = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"qp must be an integer, got {text!r}") from None
    if not 0 <= qp <= 51:
        raise argparse.ArgumentTypeError(f"qp must be in [0, 51], got {qp}")
    return qp


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 176x144, got {text!r}") from None
    return w, h


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad payload size list {text!r}") from None
    if any(s < 0 for s in sizes):
        raise argparse.ArgumentTypeError("payload sizes must be non-negative")
    return sizes


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_video(path: Path, size=None):
    data = path.read_bytes()
    if data.startswith(io_formats.Y4M_MAGIC):
        return io_formats.parse_y4m(data)
    if size is None:
        raise RdhError(f"{path}: not a Y4M file; pass --size WxH for raw 4:2:0 input")
    return io_formats.read_raw_yuv(path, *size)


def load_stream(path: Path, config: RunConfig, size=None):
    """Sidecar input is used as-is; video input is encoded at ``config.qp``."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == io_formats.SIDECAR_MAGIC:
        return io_formats.load_sidecar(path)
    video = load_video(path, size)
    if not len(video):
        raise RdhError(f"{path}: no frames")
    return encode_planes(video.planes, config.qp)


def _config(args) -> RunConfig:
    return RunConfig(
        qp=getattr(args, "qp", DEFAULT_QP),
        stride=getattr(args, "stride", 1),
        offset=getattr(args, "offset", 0),
        mask=getattr(args, "mask", None),
        seed=getattr(args, "seed", 0),
    )


def write_report(path, report: io_formats.Report) -> None:
    """Write ``path`` as CSV and a JSON twin next to it."""
    path = Path(path)
    path.write_text(report.to_csv())
    json_path = path.with_suffix(".json") if path.suffix != ".json" else path.with_suffix(".report.json")
    json_path.write_text(report.to_json())


def cmd_encode(args) -> int:
    config = _config(args)
    video = load_video(Path(args.input), args.size)
    if not len(video):
        raise RdhError(f"{args.input}: no frames")
    stream = encode_planes(video.planes, config.qp)
    io_formats.save_sidecar(args.output, stream)
    print(
        f"encoded {stream.frame_count} frames, {stream.mb_cols}x{stream.mb_rows} macroblocks "
        f"({stream.mb_count} per frame), qp {stream.qp} -> {args.output}"
    )
    return EXIT_OK


def cmd_embed(args) -> int:
    config = _config(args)
    stream = io_formats.load_sidecar(args.sidecar)
    payload = Path(args.payload).read_bytes()
    sel = config.selection(stream.frame_count, stream.mb_cols, stream.mb_rows)
    marked, report = embed_stream(stream, payload, sel)
    io_formats.save_sidecar(args.out, marked)
    if args.report:
        meta = {"command": "embed", "qp": stream.qp, "payload_bytes": len(payload)}
        write_report(args.report, io_formats.Report(report.frames, meta))
    print(f"capacity {report.capacity_bits} bits, embedded {report.message_bits} bits")
    print(f"payload sha256 {sha256(payload)}")
    return EXIT_OK


def cmd_extract(args) -> int:
    config = _config(args)
    marked = io_formats.load_sidecar(args.sidecar)
    sel = config.selection(marked.frame_count, marked.mb_cols, marked.mb_rows)
    restored, payload = extract_stream(marked, sel)
    io_formats.save_sidecar(args.out, restored)
    if args.payload:
        Path(args.payload).write_bytes(payload)
    print(f"extracted {len(payload)} bytes -> restored stream {args.out}")
    print(f"payload sha256 {sha256(payload)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args)
    original_bytes = Path(args.sidecar).read_bytes()
    stream = io_formats.read_sidecar(original_bytes)
    payload = Path(args.payload).read_bytes()
    sel = config.selection(stream.frame_count, stream.mb_cols, stream.mb_rows)
    marked, report = embed_stream(stream, payload, sel, measure=False)
    marked = io_formats.read_sidecar(io_formats.write_sidecar(marked))
    restored, got = extract_stream(marked, sel)
    same_stream = io_formats.write_sidecar(restored) == original_bytes
    same_payload = got == payload
    print(f"capacity {report.capacity_bits} bits, embedded {report.message_bits} bits")
    print(f"payload {'ok' if same_payload else 'MISMATCH'}, stream {'ok' if same_stream else 'MISMATCH'}")
    return EXIT_OK if same_stream and same_payload else EXIT_FORMAT


def analyze_rows(stream, sizes, config: RunConfig):
    """One row per (payload size, frame); payload bits come from one seeded pool."""
    sel = config.selection(stream.frame_count, stream.mb_cols, stream.mb_rows)
    cap = capacity(stream, sel)
    frame_caps = frame_capacity_metrics(stream, None, sel)
    pool = np.random.default_rng(config.seed).bytes(max([0, *(-(-s // 8) for s in sizes)]))
    rows = []
    for bits in sizes:
        payload = pool[: -(-bits // 8)]
        try:
            _, report = embed_stream(stream, payload, sel)
        except CapacityExceeded:
            for f, c in enumerate(frame_caps):
                rows.append(
                    {
                        "frame": f,
                        "capacity_bits": c.embedded_bits,
                        "embedded_bits": 0,
                        "cp": math.nan,
                        "full": c.full,
                        "ec": math.nan,
                        "psnr_db": math.nan,
                        "cost_original": 0,
                        "cost_marked": 0,
                        "bir": math.nan,
                        "payload_bits": bits,
                        "status": "over_capacity",
                    }
                )
            continue
        for r in report.frames:
            rows.append(r.as_dict() | {"payload_bits": bits, "status": "ok"})
    return cap, rows


def cmd_analyze(args) -> int:
    config = _config(args)
    stream = load_stream(Path(args.input), config, args.size)
    cap, rows = analyze_rows(stream, args.sizes, config)
    meta = {
        "command": "analyze",
        "seed": config.seed,
        "qp": stream.qp,
        "stride": config.stride,
        "offset": config.offset,
        "capacity_bits": cap,
    }
    report = io_formats.Report(
        rows, meta, io_formats.REPORT_COLUMNS + ("payload_bits", "status")
    )
    if args.report:
        write_report(args.report, report)
    else:
        sys.stdout.write(report.to_csv())
    overall = capacity_metrics(stream, None, config.selection(stream.frame_count, stream.mb_cols, stream.mb_rows))
    print(
        f"capacity {cap} bits; cp {overall.cp:.4f} full {overall.full:.4f} ec {overall.ec:.4f}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdct-rdh",
        description="Reversible data hiding in zero AC15 coefficient-pairs of 4x4 intra blocks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def selection_flags(p):
        p.add_argument("--stride", type=_positive, default=1, help="embed in every N-th frame")
        p.add_argument("--offset", type=int, default=0, help="first embeddable frame")
        p.add_argument("--mask", help="macroblock mask file (0/1 per macroblock, raster order)")

    p = sub.add_parser("encode", help="encode Y4M/raw video into a coefficient sidecar")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--qp", type=_qp, default=DEFAULT_QP)
    p.add_argument("--size", type=_size, help="WxH, required for raw .yuv input")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("embed", help="hide a payload file in a sidecar")
    p.add_argument("sidecar")
    p.add_argument("--payload", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="per-frame CSV report (a .json twin is written too)")
    selection_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the payload and the original sidecar")
    p.add_argument("sidecar")
    p.add_argument("--out", required=True, help="restored sidecar path")
    p.add_argument("--payload", help="where to write the extracted payload")
    selection_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="embed, extract and compare in one pass")
    p.add_argument("sidecar")
    p.add_argument("--payload", required=True)
    selection_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="payload sweep: PSNR, proxy bitrate, BIR, CP/Full/EC")
    p.add_argument("input", help="sidecar, Y4M or raw video")
    p.add_argument("--sizes", type=_sizes, default=list(DEFAULT_PAYLOAD_SIZES), help="payload sizes in bits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qp", type=_qp, default=DEFAULT_QP, help="qp used when input is video")
    p.add_argument("--size", type=_size)
    p.add_argument("--report")
    selection_flags(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except RdhError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
