"""Raster I/O: PNM and BMP codecs, bit-plane access, format detection."""

from __future__ import annotations

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stegolab.errors import FormatError
from stegolab.raster import (
    BitPlane,
    Image,
    ImageFormat,
    detect_format,
    get_bit_plane,
    load_image,
    save_image,
    set_bit_plane,
)

from conftest import seeded_image

image_arrays = st.integers(1, 24).flatmap(
    lambda w: st.integers(1, 24).flatmap(
        lambda h: st.tuples(
            st.just(w),
            st.just(h),
            st.lists(st.integers(0, 255), min_size=w * h, max_size=w * h),
        )
    )
)


def test_image_validation():
    with pytest.raises(ValueError):
        Image(0, 4, 1, b"")
    with pytest.raises(ValueError):
        Image(2, 2, 2, bytes(8))  # only 1 or 3 channels exist here
    with pytest.raises(ValueError):
        Image(2, 2, 1, bytes(3))  # buffer size mismatch


def test_array_roundtrip(gray_cover, color_cover):
    for img in (gray_cover, color_cover):
        again = Image.from_array(img.as_array() if img.channels == 3 else img.as_array()[:, :, 0])
        assert again == img


@settings(max_examples=40)
@given(image_arrays)
def test_pgm_roundtrip(spec):
    w, h, pixels = spec
    img = Image(w, h, 1, bytes(pixels))
    assert load_image(save_image(img, ImageFormat.PGM_P5), ImageFormat.PGM_P5) == img


@settings(max_examples=25)
@given(image_arrays)
def test_bmp8_roundtrip(spec):
    w, h, pixels = spec
    img = Image(w, h, 1, bytes(pixels))
    assert load_image(save_image(img, ImageFormat.BMP8_GRAY), ImageFormat.BMP8_GRAY) == img


def test_ppm_bmp24_roundtrip(color_cover):
    for fmt in (ImageFormat.PPM_P6, ImageFormat.BMP24):
        assert load_image(save_image(color_cover, fmt), fmt) == color_cover


def test_pgm_header_layout(tiny_gray):
    data = save_image(tiny_gray, ImageFormat.PGM_P5)
    assert data.startswith(b"P5\n8 8\n255\n")
    assert data[len(b"P5\n8 8\n255\n") :] == tiny_gray.pixels


def test_pnm_comments_and_whitespace():
    body = bytes(range(6))
    data = b"P5 # magic\n# a comment line\n  3\t2 # dims\n255\n" + body
    img = load_image(data, ImageFormat.PGM_P5)
    assert (img.width, img.height) == (3, 2)
    assert img.pixels == body


def test_pnm_rejects_bad_maxval():
    with pytest.raises(FormatError):
        load_image(b"P5\n2 2\n65535\n" + bytes(8), ImageFormat.PGM_P5)


def test_pnm_rejects_truncated_body():
    with pytest.raises(FormatError):
        load_image(b"P5\n4 4\n255\n" + bytes(3), ImageFormat.PGM_P5)


def test_bmp8_header_golden():
    img = Image(4, 3, 1, bytes(range(12)))
    data = save_image(img, ImageFormat.BMP8_GRAY)
    # 54-byte header + 256-entry palette + 3 rows at stride 4
    assert len(data) == 54 + 1024 + 12
    assert data[:2] == b"BM"
    assert struct.unpack("<I", data[2:6])[0] == len(data)
    assert struct.unpack("<I", data[10:14])[0] == 54 + 1024  # pixel offset
    width, height = struct.unpack("<ii", data[18:26])
    assert (width, height) == (4, 3)
    assert struct.unpack("<H", data[28:30])[0] == 8  # bits per pixel
    # grayscale identity palette: entry i is (B,G,R,0) = (i,i,i,0)
    assert data[54 : 54 + 8] == bytes([0, 0, 0, 0, 1, 1, 1, 0])


def test_bmp_rows_are_bottom_up():
    arr = np.zeros((3, 4), dtype=np.uint8)
    arr[0, :] = 200  # top row
    data = save_image(Image.from_array(arr), ImageFormat.BMP8_GRAY)
    offset = struct.unpack("<I", data[10:14])[0]
    # last stored row is the top image row
    assert data[offset + 2 * 4 : offset + 2 * 4 + 4] == bytes([200] * 4)


def test_bmp24_pixels_are_bgr():
    arr = np.zeros((1, 1, 3), dtype=np.uint8)
    arr[0, 0] = (10, 20, 30)  # RGB
    data = save_image(Image.from_array(arr), ImageFormat.BMP24)
    offset = struct.unpack("<I", data[10:14])[0]
    assert data[offset : offset + 3] == bytes([30, 20, 10])


def test_bmp24_stride_padding():
    img = seeded_image(7, 3, 2, channels=3)  # 3*3 = 9 bytes/row -> stride 12
    data = save_image(img, ImageFormat.BMP24)
    assert struct.unpack("<I", data[2:6])[0] == 54 + 2 * 12
    assert load_image(data, ImageFormat.BMP24) == img


def test_bmp_rejects_compressed():
    img = Image(2, 2, 1, bytes(4))
    data = bytearray(save_image(img, ImageFormat.BMP8_GRAY))
    data[30:34] = struct.pack("<I", 1)  # BI_RLE8
    with pytest.raises(FormatError):
        load_image(bytes(data), ImageFormat.BMP8_GRAY)


def test_load_rejects_wrong_magic():
    with pytest.raises(FormatError):
        load_image(b"P6\n1 1\n255\n\x00\x00\x00", ImageFormat.PGM_P5)


def test_detect_format(gray_cover, color_cover):
    cases = [
        (gray_cover, ImageFormat.PGM_P5),
        (color_cover, ImageFormat.PPM_P6),
        (gray_cover, ImageFormat.BMP8_GRAY),
        (color_cover, ImageFormat.BMP24),
    ]
    for img, fmt in cases:
        assert detect_format(save_image(img, fmt)) is fmt
    with pytest.raises(FormatError):
        detect_format(b"GIF89a...")


def test_bit_plane_get_set_roundtrip(gray_cover):
    for plane_index in (0, 3, 7):
        plane = get_bit_plane(gray_cover, plane_index)
        assert set_bit_plane(gray_cover, plane_index, plane) == gray_cover


def test_bit_plane_isolation(gray_cover):
    flipped = get_bit_plane(gray_cover, 2)
    inverted = BitPlane(
        flipped.width,
        flipped.height,
        flipped.channels,
        flipped.plane_index,
        bytes(b ^ 1 for b in flipped.bits),
    )
    out = set_bit_plane(gray_cover, 2, inverted)
    diff = out.as_array().astype(np.int16) - gray_cover.as_array().astype(np.int16)
    assert set(np.unique(np.abs(diff))) == {4}  # every pixel moved by exactly 2^2


def test_bit_planes_recombine(gray_cover):
    acc = np.zeros((64, 64, 1), dtype=np.uint16)
    for plane_index in range(8):
        acc += get_bit_plane(gray_cover, plane_index).as_array().astype(np.uint16) << plane_index
    assert np.array_equal(acc.astype(np.uint8), gray_cover.as_array())


def test_save_format_channel_mismatch(gray_cover, color_cover):
    with pytest.raises(FormatError):
        save_image(color_cover, ImageFormat.PGM_P5)
    with pytest.raises(FormatError):
        save_image(gray_cover, ImageFormat.PPM_P6)
