"""Shared fixtures: deterministic covers and hand-built container files."""

from __future__ import annotations

import struct
import sys
import zlib

import numpy as np
import pytest

from stegolab.keys import keystream_bytes
from stegolab.raster import Image


def pytest_terminal_summary(terminalreporter):
    """Replay the acceptance-criterion PASS/FAIL lines after the run."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)


def seeded_image(seed: int, width: int, height: int, channels: int = 1) -> Image:
    raw = keystream_bytes(seed, width * height * channels)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
    return Image.from_array(arr if channels > 1 else arr[:, :, 0])


@pytest.fixture
def gray_cover() -> Image:
    return seeded_image(101, 64, 64)


@pytest.fixture
def color_cover() -> Image:
    return seeded_image(202, 48, 48, channels=3)


@pytest.fixture
def tiny_gray() -> Image:
    arr = np.arange(64, dtype=np.uint8).reshape(8, 8)
    return Image.from_array(arr)


def _png_chunk(kind: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + kind
        + body
        + struct.pack(">I", zlib.crc32(kind + body) & 0xFFFFFFFF)
    )


def make_png() -> bytes:
    """Minimal structurally valid PNG (1x1 gray), CRCs included."""
    sig = b"\x89PNG\r\n\x1a\n"
    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 0, 0, 0, 0)
    idat = zlib.compress(b"\x00\x80")
    return sig + _png_chunk(b"IHDR", ihdr) + _png_chunk(b"IDAT", idat) + _png_chunk(b"IEND", b"")


def make_jpeg() -> bytes:
    """Structurally valid JPEG skeleton: marker segments, an entropy-coded
    scan containing 0xFF00 stuffing and a restart marker, then EOI."""

    def seg(marker: int, body: bytes) -> bytes:
        return bytes([0xFF, marker]) + struct.pack(">H", len(body) + 2) + body

    out = b"\xff\xd8"  # SOI
    out += seg(0xE0, b"JFIF\x00\x01\x02\x00\x00\x01\x00\x01\x00\x00")  # APP0
    out += seg(0xDB, b"\x00" + bytes(64))  # DQT
    out += seg(0xC0, b"\x08\x00\x08\x00\x08\x01\x01\x11\x00")  # SOF0, 8x8, 1 comp
    out += seg(0xC4, b"\x00" + bytes(16) + b"\x00")  # DHT (degenerate)
    out += seg(0xDA, b"\x01\x01\x00\x00\x3f\x00")  # SOS header
    out += b"\x12\x34\xff\x00\x56\xff\xd0\x9a\xbc"  # scan: stuffed FF + RST0
    out += b"\xff\xd9"  # EOI
    return out


@pytest.fixture
def png_file() -> bytes:
    return make_png()


@pytest.fixture
def jpeg_file() -> bytes:
    return make_jpeg()
