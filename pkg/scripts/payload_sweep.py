#!/usr/bin/env python3
"""PSNR and proxy BIR against payload size, aggregated over the whole clip.

    python scripts/payload_sweep.py --sizes 250,500,750,1000,1250
"""

import argparse

import numpy as np

from qdct_rdh.config import DEFAULT_PAYLOAD_SIZES
from qdct_rdh.io_formats import read_y4m
from qdct_rdh.metrics import psnr
from qdct_rdh.rdh_engine import capacity, embed_stream
from qdct_rdh.synth import clip
from qdct_rdh.transform_quant import decode_stream, encode_planes


def luma(stream):
    return np.concatenate([p.samples for p in decode_stream(stream)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input", nargs="?")
    ap.add_argument("--qp", type=int, default=28)
    ap.add_argument("--sizes", default=",".join(map(str, DEFAULT_PAYLOAD_SIZES)))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    planes = read_y4m(args.input).planes if args.input else clip(10, 176, 144, seed=args.seed)
    stream = encode_planes(planes, args.qp)
    sizes = [int(s) for s in args.sizes.split(",")]
    pool = np.random.default_rng(args.seed).bytes(-(-max(sizes) // 8))
    reference = luma(stream)
    print(f"# qp={args.qp} frames={stream.frame_count} capacity={capacity(stream)} bits seed={args.seed}")
    print("payload_bits,psnr_db,cost_original,cost_marked,bir_percent")
    for bits in sizes:
        marked, report = embed_stream(stream, pool[: -(-bits // 8)])
        q = psnr(reference, luma(marked))
        print(f"{bits},{q:.6f},{report.cost_original},{report.cost_marked},{report.bir_percent:.6f}")


if __name__ == "__main__":
    main()
