#!/usr/bin/env python3
"""Hide a 20 MB payload after the end-of-image marker of a ~2 KB BMP.

After-EOF appending has unbounded capacity because the container file simply
grows; viewers keep rendering the declared pixel data and never look past it.
The flip side, shown at the end, is that any re-encode drops the trailer.

    python scripts/demo_after_eof.py --out-dir /tmp/after_eof
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from stegolab import container
from stegolab.raster import ImageFormat, load_image, save_image
from stegolab.report import synthetic_cover


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="after_eof_demo", help="where to write the files")
    parser.add_argument("--megabytes", type=int, default=20, help="payload size (default 20)")
    parser.add_argument("--seed", type=int, default=1, help="payload RNG seed")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cover_img = synthetic_cover(args.seed, side=32)
    cover_file = save_image(cover_img, ImageFormat.BMP8_GRAY)
    payload = np.random.default_rng(args.seed).integers(
        0, 256, args.megabytes * 2**20, dtype=np.uint8
    ).tobytes()

    stego_file = container.append_payload(cover_file, payload, mode="framed")
    recovered = container.extract_payload(stego_file, mode="framed")
    decoded = load_image(stego_file, ImageFormat.BMP8_GRAY)

    (out_dir / "cover.bmp").write_bytes(cover_file)
    (out_dir / "stego.bmp").write_bytes(stego_file)

    print(f"cover:   {len(cover_file):>12,} bytes ({len(cover_file) / 1024:.2f} KB)")
    print(f"payload: {len(payload):>12,} bytes ({len(payload) / 2**20:.0f} MB)")
    print(f"stego:   {len(stego_file):>12,} bytes")
    print(f"payload recovered byte-exact: {recovered == payload}")
    print(f"decoded raster identical:     {decoded.pixels == cover_img.pixels}")

    # a single lossless re-save of the *pixels* discards the trailer entirely
    resaved = save_image(decoded, ImageFormat.BMP8_GRAY)
    try:
        container.extract_payload(resaved, mode="framed")
        survived = True
    except container.NoFrameError:
        survived = False
    print(f"payload survives a re-encode: {survived}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
