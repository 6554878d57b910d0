"""Raster image model, bit-plane slicing, and bit-exact PGM/PPM/BMP codecs.

Pixels are 8-bit, row-major, channel-interleaved. Codecs are deterministic:
saving the same image twice yields identical bytes, and load(save(img)) == img.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FormatError


class ImageFormat(Enum):
    PGM_P5 = "pgm"
    PPM_P6 = "ppm"
    BMP8_GRAY = "bmp8"
    BMP24 = "bmp24"

    @property
    def channels(self) -> int:
        return 3 if self in (ImageFormat.PPM_P6, ImageFormat.BMP24) else 1


@dataclass(frozen=True)
class Image:
    """8-bit raster: ``pixels`` holds width*height*channels bytes, row-major."""

    width: int
    height: int
    channels: int
    pixels: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad dimensions {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        expected = self.width * self.height * self.channels
        if len(self.pixels) != expected:
            raise ValueError(
                f"pixel buffer holds {len(self.pixels)} bytes, expected {expected}"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Image":
        """Build from an (h, w) or (h, w, c) uint8 array."""
        a = np.asarray(arr)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D array, got shape {a.shape}")
        h, w, c = a.shape
        return cls(w, h, c, a.astype(np.uint8).tobytes())

    def as_array(self) -> np.ndarray:
        """Return an (h, w, c) uint8 view of the pixels."""
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width, self.channels
        )


@dataclass(frozen=True)
class BitPlane:
    """One bit plane of an image; ``bits`` holds 0/1 bytes in pixel layout."""

    width: int
    height: int
    channels: int
    plane_index: int
    bits: bytes

    def __post_init__(self):
        if not 0 <= self.plane_index <= 7:
            raise ValueError(f"plane_index must be in [0, 7], got {self.plane_index}")
        expected = self.width * self.height * self.channels
        if len(self.bits) != expected:
            raise ValueError(
                f"bit buffer holds {len(self.bits)} entries, expected {expected}"
            )
        if any(b > 1 for b in self.bits):
            raise ValueError("bit plane values must be 0 or 1")

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.bits, dtype=np.uint8).reshape(
            self.height, self.width, self.channels
        )


def get_bit_plane(img: Image, plane_index: int) -> BitPlane:
    """Slice out plane ``plane_index`` (0 = LSB, 7 = MSB)."""
    if not 0 <= plane_index <= 7:
        raise ValueError(f"plane_index must be in [0, 7], got {plane_index}")
    bits = (img.as_array() >> plane_index) & 1
    return BitPlane(img.width, img.height, img.channels, plane_index, bits.tobytes())


def set_bit_plane(img: Image, plane_index: int, plane: BitPlane) -> Image:
    """Replace plane ``plane_index`` with the given bits; other planes untouched."""
    if not 0 <= plane_index <= 7:
        raise ValueError(f"plane_index must be in [0, 7], got {plane_index}")
    if (plane.width, plane.height, plane.channels) != (
        img.width,
        img.height,
        img.channels,
    ):
        raise ValueError("bit plane dimensions do not match image")
    mask = np.uint8(0xFF ^ (1 << plane_index))
    out = (img.as_array() & mask) | (plane.as_array() << plane_index)
    return Image.from_array(out)


# --- PGM / PPM (binary, maxval 255) ---


def _read_pnm_tokens(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    """Read ``count`` whitespace-separated ASCII integers, skipping # comments."""
    tokens: list[int] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PNM header")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError:
            raise FormatError(f"bad PNM header token {data[start:pos]!r}") from None
    if pos >= n:
        raise FormatError("truncated PNM file")
    return tokens, pos + 1  # consume the single whitespace after maxval


def _load_pnm(data: bytes, magic: bytes, channels: int) -> Image:
    if data[:2] != magic:
        raise FormatError(f"expected {magic.decode()} magic, got {data[:2]!r}")
    (w, h, maxval), pos = _read_pnm_tokens(data, 3, 2)
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    if w < 1 or h < 1:
        raise FormatError(f"bad PNM dimensions {w}x{h}")
    need = w * h * channels
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise FormatError(f"truncated PNM raster: {len(raster)} of {need} bytes")
    return Image(w, h, channels, raster)


def _save_pnm(img: Image, magic: bytes) -> bytes:
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return header + img.pixels


# --- BMP (uncompressed, bottom-up, BITMAPINFOHEADER) ---

_BMP_FILE_HDR = "<2sIHHI"
_BMP_INFO_HDR = "<IiiHHIIiiII"


def _bmp_stride(width: int, bytes_per_px: int) -> int:
    return (width * bytes_per_px + 3) & ~3


def _load_bmp(data: bytes, expect_bits: int) -> Image:
    if len(data) < 54:
        raise FormatError("truncated BMP header")
    magic, _size, _r1, _r2, offbits = struct.unpack_from(_BMP_FILE_HDR, data, 0)
    if magic != b"BM":
        raise FormatError(f"expected BM magic, got {magic!r}")
    (hdr_size, w, h, planes, bitcount, compression, *_rest) = struct.unpack_from(
        _BMP_INFO_HDR, data, 14
    )
    if hdr_size != 40:
        raise FormatError(f"unsupported BMP header size {hdr_size}")
    if compression != 0:
        raise FormatError("compressed BMP is not supported")
    if planes != 1:
        raise FormatError(f"bad BMP plane count {planes}")
    if bitcount != expect_bits:
        raise FormatError(f"expected {expect_bits}-bit BMP, got {bitcount}-bit")
    if w < 1 or h < 1:
        raise FormatError(f"unsupported BMP dimensions {w}x{h}")

    if bitcount == 8:
        palette = data[54 : 54 + 1024]
        if len(palette) < 1024:
            raise FormatError("truncated BMP palette")
        pal = np.frombuffer(palette, dtype=np.uint8).reshape(256, 4)
        if not (pal[:, 0] == pal[:, 1]).all() or not (pal[:, 1] == pal[:, 2]).all():
            raise FormatError("non-grayscale BMP palette is not supported")
        lut = pal[:, 0].copy()
        bpp, channels = 1, 1
    else:
        lut = None
        bpp, channels = 3, 3

    stride = _bmp_stride(w, bpp)
    need = stride * h
    raw = data[offbits : offbits + need]
    if len(raw) < need:
        raise FormatError(f"truncated BMP raster: {len(raw)} of {need} bytes")
    rows = np.frombuffer(raw, dtype=np.uint8).reshape(h, stride)[:, : w * bpp]
    top_down = rows[::-1]  # stored bottom-up
    if bitcount == 8:
        arr = lut[top_down][:, :, None]
    else:
        arr = top_down.reshape(h, w, 3)[:, :, ::-1]  # BGR -> RGB
    return Image.from_array(arr)


def _save_bmp(img: Image, bitcount: int) -> bytes:
    bpp = bitcount // 8
    stride = _bmp_stride(img.width, bpp)
    palette_size = 1024 if bitcount == 8 else 0
    offbits = 14 + 40 + palette_size
    image_size = stride * img.height
    file_size = offbits + image_size

    out = bytearray()
    out += struct.pack(_BMP_FILE_HDR, b"BM", file_size, 0, 0, offbits)
    out += struct.pack(
        _BMP_INFO_HDR,
        40,
        img.width,
        img.height,
        1,
        bitcount,
        0,
        image_size,
        0,
        0,
        256 if bitcount == 8 else 0,
        0,
    )
    if bitcount == 8:
        pal = np.zeros((256, 4), dtype=np.uint8)
        pal[:, 0] = pal[:, 1] = pal[:, 2] = np.arange(256)
        out += pal.tobytes()

    arr = img.as_array()
    if bitcount == 24:
        arr = arr[:, :, ::-1]  # RGB -> BGR
    rows = arr.reshape(img.height, img.width * bpp)
    padded = np.zeros((img.height, stride), dtype=np.uint8)
    padded[:, : img.width * bpp] = rows
    out += padded[::-1].tobytes()  # bottom-up
    return bytes(out)


def load_image(data: bytes, fmt: ImageFormat) -> Image:
    """Decode ``data`` as the stated format."""
    if fmt is ImageFormat.PGM_P5:
        return _load_pnm(data, b"P5", 1)
    if fmt is ImageFormat.PPM_P6:
        return _load_pnm(data, b"P6", 3)
    if fmt is ImageFormat.BMP8_GRAY:
        return _load_bmp(data, 8)
    return _load_bmp(data, 24)


def save_image(img: Image, fmt: ImageFormat) -> bytes:
    """Encode ``img``; raises FormatError on a channel/format mismatch."""
    if img.channels != fmt.channels:
        raise FormatError(
            f"{fmt.name} requires {fmt.channels} channel(s), image has {img.channels}"
        )
    if fmt is ImageFormat.PGM_P5:
        return _save_pnm(img, b"P5")
    if fmt is ImageFormat.PPM_P6:
        return _save_pnm(img, b"P6")
    if fmt is ImageFormat.BMP8_GRAY:
        return _save_bmp(img, 8)
    return _save_bmp(img, 24)


def detect_format(data: bytes) -> ImageFormat:
    """Sniff the raster format from leading bytes."""
    if data[:2] == b"P5":
        return ImageFormat.PGM_P5
    if data[:2] == b"P6":
        return ImageFormat.PPM_P6
    if data[:2] == b"BM":
        if len(data) < 30:
            raise FormatError("truncated BMP header")
        bitcount = struct.unpack_from("<H", data, 28)[0]
        if bitcount == 8:
            return ImageFormat.BMP8_GRAY
        if bitcount == 24:
            return ImageFormat.BMP24
        raise FormatError(f"unsupported BMP bit depth {bitcount}")
    raise FormatError(f"unrecognized image signature {data[:2]!r}")
