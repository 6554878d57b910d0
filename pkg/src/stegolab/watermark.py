"""Visible MSB-plane watermarking and invisible keyed, redundant watermarking.

The visible path stamps a monochrome mark into one high bit plane of a host
rectangle, where flipping the MSB shifts intensity by 128. The invisible path
serializes a small grayscale mark, replicates every bit R times, and writes
single bits into a keyed selection of pixels at a low bit plane; extraction
majority-votes the R copies, which corrects any attack that flips at most
floor(R/2) copies of a bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError
from .keys import ScrambleSpec, keyed_permutation, scramble_point
from .raster import Image


@dataclass(frozen=True)
class MonoMark:
    """Bi-tone mark: ``bits`` holds width*height 0/1 bytes, row-major."""

    width: int
    height: int
    bits: bytes

    def __post_init__(self):
        if len(self.bits) != self.width * self.height:
            raise ValueError("mark bit buffer does not match dimensions")
        if any(b > 1 for b in self.bits):
            raise ValueError("mark values must be 0 or 1")

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.bits, dtype=np.uint8).reshape(self.height, self.width)


@dataclass(frozen=True)
class GrayMark:
    """Grayscale mark: width*height intensity bytes, row-major."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if len(self.data) != self.width * self.height:
            raise ValueError("mark buffer does not match dimensions")

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width)


@dataclass(frozen=True)
class WmKey:
    """Placement key for invisible marks.

    ``scramble`` opts into Fibonacci-Lucas/Arnold coordinate ordering instead
    of the keyed permutation; it requires a square host whose side matches the
    spec (and an odd side for the fibolucas kind).
    """

    seed: int
    redundancy: int = 5
    plane: int = 1
    scramble: Optional[ScrambleSpec] = None

    def __post_init__(self):
        if self.redundancy < 1 or self.redundancy % 2 == 0:
            raise ValueError(f"redundancy must be odd and >= 1, got {self.redundancy}")
        if not 0 <= self.plane <= 7:
            raise ValueError(f"plane must be in [0, 7], got {self.plane}")


# --- visible (high bit plane, rectangle) ---


def _check_gray(host: Image):
    if host.channels != 1:
        raise ValueError("watermarking operates on grayscale hosts only")


def embed_visible(
    host: Image, mark: MonoMark, origin: tuple[int, int], plane: int = 7
) -> Image:
    """Write mark bits into bit plane ``plane`` of the host rectangle at origin."""
    _check_gray(host)
    if not 0 <= plane <= 7:
        raise ValueError(f"plane must be in [0, 7], got {plane}")
    row, col = origin
    if row < 0 or col < 0 or row + mark.height > host.height or col + mark.width > host.width:
        raise ValueError(
            f"mark {mark.width}x{mark.height} at {origin} exceeds host "
            f"{host.width}x{host.height}"
        )
    arr = host.as_array()[:, :, 0].copy()
    region = arr[row : row + mark.height, col : col + mark.width]
    region &= np.uint8(0xFF ^ (1 << plane))
    region |= mark.as_array() << plane
    return Image.from_array(arr)


def extract_visible(
    marked: Image, origin: tuple[int, int], dims: tuple[int, int], plane: int = 7
) -> MonoMark:
    """Read a mark back from bit plane ``plane`` of the rectangle at origin."""
    _check_gray(marked)
    if not 0 <= plane <= 7:
        raise ValueError(f"plane must be in [0, 7], got {plane}")
    row, col = origin
    w, h = dims
    if row < 0 or col < 0 or row + h > marked.height or col + w > marked.width:
        raise ValueError(f"rectangle {w}x{h} at {origin} exceeds host bounds")
    region = marked.as_array()[row : row + h, col : col + w, 0]
    bits = (region >> plane) & 1
    return MonoMark(w, h, bits.tobytes())


# --- invisible (keyed slots, low bit plane, R-fold redundancy) ---


def _slot_positions(host: Image, key: WmKey, count: int) -> np.ndarray:
    n = host.width * host.height
    if key.scramble is None:
        return np.asarray(keyed_permutation(key.seed, n)[:count], dtype=np.int64)
    spec = key.scramble
    if host.width != host.height or host.width != spec.side:
        raise ValueError(
            f"scramble ordering needs a square host of side {spec.side}, "
            f"got {host.width}x{host.height}"
        )
    side = spec.side
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        x, y = scramble_point((i % side, i // side), spec)
        out[i] = y * side + x
    return out


def embed_invisible(host: Image, mark: GrayMark, key: WmKey) -> Image:
    """Scatter R copies of every mark bit into the keyed slot sequence."""
    _check_gray(host)
    nbits = 8 * mark.width * mark.height * key.redundancy
    if nbits > host.width * host.height:
        raise CapacityError(
            f"{nbits} mark-copy bits exceed {host.width * host.height} host pixels"
        )
    bits = np.repeat(
        np.unpackbits(np.frombuffer(mark.data, dtype=np.uint8)), key.redundancy
    )
    slots = _slot_positions(host, key, nbits)
    flat = np.frombuffer(host.pixels, dtype=np.uint8).copy()
    flat[slots] = (flat[slots] & ~np.uint8(1 << key.plane)) | (bits << key.plane)
    return Image(host.width, host.height, host.channels, flat.tobytes())


def extract_invisible(marked: Image, key: WmKey, dims: tuple[int, int]) -> GrayMark:
    """Majority-vote the R copies of every bit back into a mark of ``dims``."""
    _check_gray(marked)
    w, h = dims
    nbits = 8 * w * h * key.redundancy
    if nbits > marked.width * marked.height:
        raise CapacityError(
            f"{nbits} mark-copy bits exceed {marked.width * marked.height} host pixels"
        )
    slots = _slot_positions(marked, key, nbits)
    flat = np.frombuffer(marked.pixels, dtype=np.uint8)
    copies = ((flat[slots] >> key.plane) & 1).reshape(8 * w * h, key.redundancy)
    voted = (copies.sum(axis=1) * 2 > key.redundancy).astype(np.uint8)
    return GrayMark(w, h, np.packbits(voted).tobytes())


# --- mark <-> raster conversions (marks travel as PGM files at the CLI) ---


def mono_mark_from_image(img: Image) -> MonoMark:
    """Strict conversion: pixel values must be exactly 0 or 255."""
    _check_gray(img)
    arr = img.as_array()[:, :, 0]
    if not np.isin(arr, (0, 255)).all():
        raise ValueError("monochrome mark images must contain only 0 and 255")
    return MonoMark(img.width, img.height, (arr // 255).astype(np.uint8).tobytes())


def mono_mark_to_image(mark: MonoMark) -> Image:
    return Image.from_array(mark.as_array() * np.uint8(255))


def gray_mark_from_image(img: Image) -> GrayMark:
    _check_gray(img)
    return GrayMark(img.width, img.height, img.pixels)


def gray_mark_to_image(mark: GrayMark) -> Image:
    return Image(mark.width, mark.height, 1, mark.data)


def glyph_mark(side: int = 32) -> MonoMark:
    """Blocky anchor glyph (frame plus diagonals) used by demos and benchmarks."""
    arr = np.zeros((side, side), dtype=np.uint8)
    t = max(1, side // 8)
    arr[:t, :] = arr[-t:, :] = 1
    arr[:, :t] = arr[:, -t:] = 1
    idx = np.arange(side)
    for off in range(t):
        arr[idx, np.clip(idx + off, 0, side - 1)] = 1
        arr[idx, np.clip(side - 1 - idx - off, 0, side - 1)] = 1
    return MonoMark(side, side, arr.tobytes())
