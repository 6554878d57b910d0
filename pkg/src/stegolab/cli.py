"""Command-line front end; one subcommand per module operation.

Exit status contract: 0 success, 1 I/O or format errors (including usage
errors), 2 "no frame found" / wrong key.  stdout carries data or metrics
only; diagnostics go to stderr as one-line messages.  Binary payloads pass
through files, never stdin/stdout.  Output files are written atomically
(temp file + rename) after all inputs validate, so failures never leave
partial outputs behind.
"""

from __future__ import annotations

import argparse
import functools
import os
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import container, report, steg, watermark
from .attacks import attack_series, parse_attack_series
from .errors import NoFrameError, StegolabError
from .keys import (
    DH_GENERATOR,
    DH_PRIME,
    KeyPair,
    ScrambleSpec,
    generate_keypair,
    scramble_image,
    unscramble_image,
)
from .metrics import psnr
from .raster import Image, ImageFormat, detect_format, load_image, save_image
from .steg import EmbedParams, StegKey

# Fixed help width keeps --help output identical across terminals, which the
# golden-file test relies on.
_FORMATTER = functools.partial(argparse.HelpFormatter, width=96)

_EXT_FORMATS = {
    ".pgm": ImageFormat.PGM_P5,
    ".ppm": ImageFormat.PPM_P6,
    ".bmp": None,  # picked by channel count
}


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error status is 2; here 2 means "no frame"."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _write_file(path: str, data: bytes) -> None:
    target = Path(path)
    tmp = target.with_name(target.name + f".tmp{os.getpid()}")
    tmp.write_bytes(data)
    os.replace(tmp, target)


def _load_raster(path: str) -> Image:
    data = _read_file(path)
    return load_image(data, detect_format(data))


def _save_raster(img: Image, path: str) -> None:
    ext = Path(path).suffix.lower()
    if ext not in _EXT_FORMATS:
        raise ValueError(f"cannot infer output format from {path!r} (use .pgm/.ppm/.bmp)")
    fmt = _EXT_FORMATS[ext]
    if fmt is None:
        fmt = ImageFormat.BMP8_GRAY if img.channels == 1 else ImageFormat.BMP24
    if fmt is ImageFormat.PGM_P5 and img.channels != 1:
        raise ValueError("cannot save a color image as PGM")
    if fmt is ImageFormat.PPM_P6 and img.channels != 3:
        raise ValueError("cannot save a grayscale image as PPM")
    _write_file(path, save_image(img, fmt))


def _parse_pair(text: str, what: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"{what} must be two comma-separated integers, got {text!r}")
    return int(parts[0]), int(parts[1])


def _steg_key(ns) -> StegKey:
    if ns.mode == "nks":
        return StegKey.nks()
    if ns.mode == "sks":
        if ns.key is None:
            raise ValueError("sks mode requires --key")
        return StegKey.sks(ns.key)
    if ns.private is None or ns.peer_public is None:
        raise ValueError("pks mode requires --private and --peer-public")
    own = KeyPair(ns.private, pow(DH_GENERATOR, ns.private, DH_PRIME))
    return StegKey.pks(own, ns.peer_public)


# --- subcommand handlers ---


def _cmd_embed(ns) -> int:
    cover = _load_raster(ns.infile)
    message = _read_file(ns.msg)
    params = EmbedParams(k=ns.k, key=_steg_key(ns))
    stego = steg.embed(cover, message, params)
    _save_raster(stego, ns.out)
    return 0


def _cmd_extract(ns) -> int:
    stego = _load_raster(ns.infile)
    params = EmbedParams(k=ns.k, key=_steg_key(ns))
    message = steg.extract(stego, params)
    _write_file(ns.out, message)
    return 0


def _cmd_append(ns) -> int:
    cover = _read_file(ns.infile)
    payload = _read_file(ns.payload)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        stego = container.append_payload(cover, payload, mode=ns.mode)
    if not ns.quiet:
        for note in caught:
            print(f"stegolab append: {note.message}", file=sys.stderr)
    _write_file(ns.out, stego)
    return 0


def _cmd_extract_append(ns) -> int:
    data = _read_file(ns.infile)
    payload = container.extract_payload(data, mode=ns.mode)
    _write_file(ns.out, payload)
    return 0


def _cmd_wm_embed_visible(ns) -> int:
    host = _load_raster(ns.infile)
    mark = watermark.mono_mark_from_image(_load_raster(ns.mark))
    origin = _parse_pair(ns.origin, "--origin")
    marked = watermark.embed_visible(host, mark, origin, plane=ns.plane)
    _save_raster(marked, ns.out)
    return 0


def _cmd_wm_extract_visible(ns) -> int:
    marked = _load_raster(ns.infile)
    origin = _parse_pair(ns.origin, "--origin")
    dims = _parse_pair(ns.dims, "--dims")
    mark = watermark.extract_visible(marked, origin, dims, plane=ns.plane)
    _save_raster(watermark.mono_mark_to_image(mark), ns.out)
    return 0


def _wm_key(ns) -> watermark.WmKey:
    return watermark.WmKey(seed=ns.seed, redundancy=ns.redundancy, plane=ns.plane)


def _cmd_wm_embed_invisible(ns) -> int:
    host = _load_raster(ns.infile)
    mark = watermark.gray_mark_from_image(_load_raster(ns.mark))
    marked = watermark.embed_invisible(host, mark, _wm_key(ns))
    _save_raster(marked, ns.out)
    return 0


def _cmd_wm_extract_invisible(ns) -> int:
    marked = _load_raster(ns.infile)
    dims = _parse_pair(ns.dims, "--dims")
    mark = watermark.extract_invisible(marked, _wm_key(ns), dims)
    _save_raster(watermark.gray_mark_to_image(mark), ns.out)
    return 0


def _cmd_attack(ns) -> int:
    img = _load_raster(ns.infile)
    specs = parse_attack_series(ns.spec)
    _save_raster(attack_series(img, specs), ns.out)
    return 0


def _cmd_psnr(ns) -> int:
    quality = psnr(_load_raster(ns.a), _load_raster(ns.b))
    value = "inf" if quality.psnr == float("inf") else f"{quality.psnr:.2f}"
    print(f"mse={quality.mse:.2f} psnr={value}")
    return 0


def _cmd_scramble(ns) -> int:
    img = _load_raster(ns.infile)
    if img.width != img.height:
        raise ValueError(f"scrambling needs a square image, got {img.width}x{img.height}")
    spec = ScrambleSpec(kind=ns.map, side=img.width, iterations=ns.iters, index=ns.index)
    out = unscramble_image(img, spec) if ns.inverse else scramble_image(img, spec)
    _save_raster(out, ns.out)
    return 0


def _cmd_keygen(ns) -> int:
    if ns.seed is None:
        raise ValueError("keygen requires --seed (no ambient entropy source exists)")
    pair = generate_keypair(ns.seed)
    print(f"private={pair.private}")
    print(f"public={pair.public}")
    return 0


def _cmd_inspect(ns) -> int:
    img = _load_raster(ns.infile)
    written = report.inspect(img, ns.out_dir)
    if not ns.quiet:
        for path in written:
            print(f"stegolab inspect: wrote {path}", file=sys.stderr)
    return 0


def _cmd_report(ns) -> int:
    config = report.load_config(ns.config) if ns.config else report.BenchConfig.default()
    rows = report.run_benchmark(config)
    rendered = report.emit_report(rows, ns.format, config.thresholds)
    if ns.out:
        _write_file(ns.out, rendered)
    else:
        sys.stdout.write(rendered.decode("ascii"))
    return 0


# --- parser wiring ---


def _add_steg_key_flags(p) -> None:
    p.add_argument("--k", type=int, required=True, help="bit planes used per pixel (1..4)")
    p.add_argument("--mode", choices=("nks", "sks", "pks"), default="nks", help="key mode")
    p.add_argument("--key", type=int, help="sks secret (decimal u64)")
    p.add_argument("--private", type=int, help="pks own private key")
    p.add_argument("--peer-public", type=int, help="pks peer public key")


def build_parser() -> _Parser:
    root = _Parser(
        prog="stegolab",
        description="Image steganography and watermarking toolkit.",
        formatter_class=_FORMATTER,
    )
    root.add_argument("--seed", type=int, help="seed for commands that need key material")
    root.add_argument("--quiet", action="store_true", help="suppress informational stderr notes")
    subs = root.add_subparsers(dest="command", metavar="command")

    def sub(name, handler, **kwargs):
        p = subs.add_parser(name, formatter_class=_FORMATTER, **kwargs)
        p.set_defaults(func=handler)
        return p

    p = sub("embed", _cmd_embed, help="hide a message in the low bit planes of an image")
    p.add_argument("--in", dest="infile", required=True, help="cover image")
    p.add_argument("--msg", required=True, help="message file to hide")
    _add_steg_key_flags(p)
    p.add_argument("--out", required=True, help="stego image to write")

    p = sub("extract", _cmd_extract, help="recover a hidden message (status 2 if none)")
    p.add_argument("--in", dest="infile", required=True, help="stego image")
    _add_steg_key_flags(p)
    p.add_argument("--out", required=True, help="recovered message file")

    p = sub("append", _cmd_append, help="hide a payload after the end of image data")
    p.add_argument("--in", dest="infile", required=True, help="container file (bmp/png/jpeg)")
    p.add_argument("--payload", required=True, help="payload file")
    p.add_argument("--mode", choices=("raw", "framed"), default="framed", help="trailer layout")
    p.add_argument("--out", required=True, help="output container")

    p = sub("extract-append", _cmd_extract_append, help="recover an after-EOF payload")
    p.add_argument("--in", dest="infile", required=True, help="container file")
    p.add_argument("--mode", choices=("raw", "framed"), default="framed", help="trailer layout")
    p.add_argument("--out", required=True, help="recovered payload file")

    wm = sub("wm", None, help="visible and invisible watermarking")
    wm_subs = wm.add_subparsers(dest="wm_command", metavar="operation")

    def wm_sub(name, handler, **kwargs):
        p = wm_subs.add_parser(name, formatter_class=_FORMATTER, **kwargs)
        p.set_defaults(func=handler)
        p.add_argument("--in", dest="infile", required=True, help="host image")
        p.add_argument("--out", required=True, help="output file")
        return p

    p = wm_sub("embed-visible", _cmd_wm_embed_visible, help="stamp a bi-tone mark into a high plane")
    p.add_argument("--mark", required=True, help="mark image (0/255 PGM)")
    p.add_argument("--origin", required=True, help="top-left corner as row,col")
    p.add_argument("--plane", type=int, default=7, help="bit plane (default 7)")

    p = wm_sub("extract-visible", _cmd_wm_extract_visible, help="read a stamped mark back")
    p.add_argument("--origin", required=True, help="top-left corner as row,col")
    p.add_argument("--dims", required=True, help="mark size as w,h")
    p.add_argument("--plane", type=int, default=7, help="bit plane (default 7)")

    p = wm_sub("embed-invisible", _cmd_wm_embed_invisible, help="hide a gray mark at keyed spots")
    p.add_argument("--mark", required=True, help="mark image (grayscale PGM)")
    p.add_argument("--seed", type=int, required=True, help="placement key")
    p.add_argument("--redundancy", type=int, default=5, help="copies per bit (odd, default 5)")
    p.add_argument("--plane", type=int, default=1, help="bit plane (default 1)")

    p = wm_sub("extract-invisible", _cmd_wm_extract_invisible, help="recover a hidden gray mark")
    p.add_argument("--seed", type=int, required=True, help="placement key")
    p.add_argument("--dims", required=True, help="mark size as w,h")
    p.add_argument("--redundancy", type=int, default=5, help="copies per bit (odd, default 5)")
    p.add_argument("--plane", type=int, default=1, help="bit plane (default 1)")

    p = sub("attack", _cmd_attack, help="apply an attack series to an image")
    p.add_argument("--in", dest="infile", required=True, help="input image")
    p.add_argument("--spec", required=True, help='e.g. "resize:0.5:bilinear:roundtrip,jpeg:75"')
    p.add_argument("--out", required=True, help="attacked image")

    p = sub("psnr", _cmd_psnr, help="print mse/psnr between two images")
    p.add_argument("a", help="first image")
    p.add_argument("b", help="second image")

    p = sub("scramble", _cmd_scramble, help="keyed coordinate scrambling of a square image")
    p.add_argument("--map", choices=("arnold", "fibolucas"), required=True, help="map family")
    p.add_argument("--index", type=int, default=1, help="fibolucas sequence index (default 1)")
    p.add_argument("--iters", type=int, default=1, help="map iterations (default 1)")
    p.add_argument("--inverse", action="store_true", help="apply the inverse map")
    p.add_argument("--in", dest="infile", required=True, help="input image (square)")
    p.add_argument("--out", required=True, help="output image")

    sub("keygen", _cmd_keygen, help="derive a toy key pair from --seed")

    p = sub("inspect", _cmd_inspect, help="write the eight bit planes as images")
    p.add_argument("--in", dest="infile", required=True, help="grayscale image")
    p.add_argument("--out-dir", required=True, help="directory for plane_0..7.pgm")

    p = sub("report", _cmd_report, help="run the benchmark and emit the comparison matrix")
    p.add_argument("--config", help="TOML benchmark config (defaults to the built-in run)")
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv", help="output format")

    return root


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(ns, "func", None) is None:
        parser.print_help()
        return 1
    try:
        return ns.func(ns)
    except NoFrameError as exc:
        print(f"stegolab: no frame: {exc}", file=sys.stderr)
        return 2
    except (StegolabError, ValueError, OSError) as exc:
        print(f"stegolab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
