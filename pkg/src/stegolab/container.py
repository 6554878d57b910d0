"""After-EOF payload hiding at the file-byte level.

Image viewers stop reading at the end of legitimate image data, so bytes
appended past that boundary ride along invisibly. ``raw`` mode is the plain
copy-append trick; ``framed`` mode adds a 16-byte footer so binary payloads
(including ones containing end-of-image markers) extract reliably.
"""

from __future__ import annotations

import struct
import warnings
from enum import Enum

from .errors import CorruptFrameError, FormatError, NoFrameError

FOOTER_MAGIC = b"SEOF"
FOOTER_VERSION = 1
FOOTER_LEN = 16

_PNG_SIG = b"\x89PNG\r\n\x1a\n"


class ContainerKind(Enum):
    BMP = "bmp"
    PNG = "png"
    JPEG = "jpeg"


def detect_container(data: bytes) -> ContainerKind:
    if data[:2] == b"BM":
        return ContainerKind.BMP
    if data[:8] == _PNG_SIG:
        return ContainerKind.PNG
    if data[:2] == b"\xff\xd8":
        return ContainerKind.JPEG
    raise FormatError(f"unrecognized container signature {data[:4]!r}")


def _bmp_boundary(data: bytes) -> int:
    if len(data) < 54:
        raise FormatError("truncated BMP header")
    declared = struct.unpack_from("<I", data, 2)[0]
    if declared == 0:
        # some writers leave the size field zero; fall back to computed extent
        offbits = struct.unpack_from("<I", data, 10)[0]
        w, h, _planes, bitcount = struct.unpack_from("<iiHH", data, 18)
        if w < 1 or h == 0:
            raise FormatError(f"bad BMP dimensions {w}x{h}")
        stride = (w * (bitcount // 8) + 3) & ~3
        declared = offbits + stride * abs(h)
    if declared > len(data):
        raise FormatError(
            f"BMP declares {declared} bytes but file holds {len(data)}"
        )
    return declared


def _png_boundary(data: bytes) -> int:
    pos = len(_PNG_SIG)
    while pos + 8 <= len(data):
        length = struct.unpack_from(">I", data, pos)[0]
        ctype = data[pos + 4 : pos + 8]
        if ctype == b"IEND":
            return pos + 12
        pos += 8 + length + 4
    raise FormatError("PNG has no IEND chunk")


_JPEG_STANDALONE = {0x01} | set(range(0xD0, 0xD8))  # TEM, RST0-7


def _jpeg_boundary(data: bytes) -> int:
    n = len(data)
    pos = 2  # past SOI
    while True:
        if pos + 2 > n:
            raise FormatError("JPEG has no EOI marker")
        if data[pos] != 0xFF:
            raise FormatError(f"expected JPEG marker at offset {pos}")
        while pos + 1 < n and data[pos + 1] == 0xFF:
            pos += 1  # fill bytes
        marker = data[pos + 1]
        if marker == 0xD9:  # EOI
            return pos + 2
        if marker in _JPEG_STANDALONE or marker == 0xD8:
            pos += 2
            continue
        if pos + 4 > n:
            raise FormatError("truncated JPEG segment header")
        seg_len = struct.unpack_from(">H", data, pos + 2)[0]
        if seg_len < 2:
            raise FormatError(f"bad JPEG segment length {seg_len}")
        pos += 2 + seg_len
        if marker == 0xDA:  # SOS: skip entropy-coded data
            while True:
                if pos + 1 >= n:
                    raise FormatError("JPEG scan runs past end of file")
                if data[pos] == 0xFF and data[pos + 1] != 0x00 and not (
                    0xD0 <= data[pos + 1] <= 0xD7
                ):
                    break  # next real marker
                pos += 1


def find_payload_boundary(data: bytes) -> int:
    """Index one past the last byte of legitimate image data."""
    kind = detect_container(data)
    if kind is ContainerKind.BMP:
        return _bmp_boundary(data)
    if kind is ContainerKind.PNG:
        return _png_boundary(data)
    return _jpeg_boundary(data)


def _build_footer(payload_len: int) -> bytes:
    if payload_len >= 1 << 64:
        raise ValueError("payload length overflows the 64-bit footer field")
    return FOOTER_MAGIC + bytes([FOOTER_VERSION, 0, 0, 0]) + struct.pack(
        ">Q", payload_len
    )


def append_payload(container: bytes, payload: bytes, mode: str = "framed") -> bytes:
    """Append ``payload`` past the image data; bytes before the boundary are kept."""
    if mode not in ("raw", "framed"):
        raise ValueError(f"mode must be 'raw' or 'framed', got {mode!r}")
    boundary = find_payload_boundary(container)
    if mode == "raw" and boundary < len(container):
        warnings.warn(
            f"container already carries {len(container) - boundary} trailing "
            "bytes; they are preserved ahead of the new payload",
            stacklevel=2,
        )
    if mode == "raw":
        return container + payload
    return container + payload + _build_footer(len(payload))


def extract_payload(data: bytes, mode: str = "framed") -> bytes:
    """Recover an appended payload; raw mode returns empty when nothing trails."""
    if mode not in ("raw", "framed"):
        raise ValueError(f"mode must be 'raw' or 'framed', got {mode!r}")
    boundary = find_payload_boundary(data)
    if mode == "raw":
        return data[boundary:]
    footer = data[len(data) - FOOTER_LEN :]
    if len(data) - boundary < FOOTER_LEN or footer[:4] != FOOTER_MAGIC:
        raise NoFrameError("no appended-payload footer found")
    if footer[4] != FOOTER_VERSION or footer[5:8] != b"\x00\x00\x00":
        raise NoFrameError(f"unsupported footer version/reserved bytes {footer[4:8]!r}")
    (length,) = struct.unpack(">Q", footer[8:])
    if length > len(data) - boundary - FOOTER_LEN:
        # magic and version matched, so a frame is present but inconsistent
        raise CorruptFrameError(
            f"footer declares {length} payload bytes but only "
            f"{len(data) - boundary - FOOTER_LEN} trail the image data"
        )
    return data[len(data) - FOOTER_LEN - length : len(data) - FOOTER_LEN]
