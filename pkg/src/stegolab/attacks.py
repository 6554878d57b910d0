"""Attack harness: resize, rotation, JPEG-like DCT quantization, requantization,
seeded noise, and lossless format roundtrips.

Every attack is deterministic for a given (image, spec): noise draws from the
keystream, and all resampling uses fixed arithmetic. ``roundtrip`` variants
restore the original dimensions so that extraction can be attempted afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .keys import keystream_bytes
from .raster import Image, ImageFormat, load_image, save_image

# ITU-T81 Annex K.1 luminance quantization table
LUMINANCE_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


@dataclass(frozen=True)
class Resize:
    scale: float
    interp: str = "bilinear"
    roundtrip: bool = False

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.interp not in ("nearest", "bilinear"):
            raise ValueError(f"interp must be nearest or bilinear, got {self.interp!r}")


@dataclass(frozen=True)
class Rotate:
    degrees: float
    roundtrip: bool = False


@dataclass(frozen=True)
class JpegLike:
    quality: int

    def __post_init__(self):
        if not 1 <= self.quality <= 100:
            raise ValueError(f"quality must be in [1, 100], got {self.quality}")


@dataclass(frozen=True)
class Requantize:
    bits: int

    def __post_init__(self):
        if not 1 <= self.bits <= 8:
            raise ValueError(f"bits must be in [1, 8], got {self.bits}")


@dataclass(frozen=True)
class Noise:
    amplitude: int
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.amplitude <= 255:
            raise ValueError(f"amplitude must be in [0, 255], got {self.amplitude}")


@dataclass(frozen=True)
class FormatRoundtrip:
    fmt: ImageFormat


AttackSpec = Union[Resize, Rotate, JpegLike, Requantize, Noise, FormatRoundtrip]


# --- resampling ---


def _resize_arr(arr: np.ndarray, out_w: int, out_h: int, interp: str) -> np.ndarray:
    h, w, _ = arr.shape
    if interp == "nearest":
        xs = np.minimum(((np.arange(out_w) + 0.5) * w / out_w).astype(np.int64), w - 1)
        ys = np.minimum(((np.arange(out_h) + 0.5) * h / out_h).astype(np.int64), h - 1)
        return arr[ys][:, xs]
    fx = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    fy = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    x0f = np.floor(fx)
    y0f = np.floor(fy)
    tx = (fx - x0f)[None, :, None]
    ty = (fy - y0f)[:, None, None]
    x0 = np.clip(x0f.astype(np.int64), 0, w - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, w - 1)
    y0 = np.clip(y0f.astype(np.int64), 0, h - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, h - 1)
    a = arr.astype(np.float64)
    top = a[y0][:, x0] * (1 - tx) + a[y0][:, x1] * tx
    bot = a[y1][:, x0] * (1 - tx) + a[y1][:, x1] * tx
    out = top * (1 - ty) + bot * ty
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)


def _apply_resize(img: Image, spec: Resize) -> Image:
    arr = img.as_array()
    out_w = max(1, int(round(img.width * spec.scale)))
    out_h = max(1, int(round(img.height * spec.scale)))
    shrunk = _resize_arr(arr, out_w, out_h, spec.interp)
    if not spec.roundtrip:
        return Image.from_array(shrunk)
    return Image.from_array(_resize_arr(shrunk, img.width, img.height, spec.interp))


def _rotate_arr(arr: np.ndarray, degrees: float) -> np.ndarray:
    if degrees % 90 == 0:
        return np.rot90(arr, int(degrees // 90) % 4)
    h, w, _ = arr.shape
    theta = math.radians(degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    ys, xs = np.indices((h, w))
    dx = xs - cx
    dy = ys - cy
    sx = np.floor(cx + cos_t * dx - sin_t * dy + 0.5).astype(np.int64)
    sy = np.floor(cy + sin_t * dx + cos_t * dy + 0.5).astype(np.int64)
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    out = np.zeros_like(arr)
    out[inside] = arr[sy[inside], sx[inside]]
    return out


def _apply_rotate(img: Image, spec: Rotate) -> Image:
    arr = _rotate_arr(img.as_array(), spec.degrees)
    if spec.roundtrip:
        arr = _rotate_arr(arr, -spec.degrees)
    return Image.from_array(arr)


# --- JPEG-like DCT quantization ---


def dct_matrix() -> np.ndarray:
    """Orthonormal 8x8 DCT-II basis; forward transform is D @ block @ D.T."""
    x = np.arange(8)
    d = np.cos((2 * x[None, :] + 1) * x[:, None] * np.pi / 16)
    d *= np.sqrt(2.0 / 8)
    d[0, :] = np.sqrt(1.0 / 8)
    return d


def scaled_quant_table(quality: int) -> np.ndarray:
    """Annex-K luminance table scaled to ``quality``, entries clamped to [1, 255]."""
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    return np.clip(np.floor((LUMINANCE_TABLE * scale + 50.0) / 100.0), 1.0, 255.0)


def _block_transform(blocks: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    # einsum with a fixed contraction order keeps the float reduction
    # sequence independent of the BLAS backend, so results are reproducible
    # across installs (the report goldens rely on that).
    return np.einsum("ij,njk,kl->nil", left, blocks, right, optimize=False)


def _snap(values: np.ndarray, decimals: int = 9) -> np.ndarray:
    # Absorb last-ulp float differences before any round-to-integer step;
    # 1e-9 is far below the quantization steps and far above ulp noise.
    return np.round(values, decimals)


def _apply_jpeg_like(img: Image, spec: JpegLike) -> Image:
    table = scaled_quant_table(spec.quality)
    d = dct_matrix()
    arr = img.as_array()
    pad_h = (-img.height) % 8
    pad_w = (-img.width) % 8
    padded = np.pad(arr, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")
    ph, pw, ch = padded.shape
    out = np.empty_like(padded)
    for c in range(ch):
        blocks = (
            padded[:, :, c]
            .reshape(ph // 8, 8, pw // 8, 8)
            .transpose(0, 2, 1, 3)
            .reshape(-1, 8, 8)
            .astype(np.float64)
        ) - 128.0
        coeffs = _block_transform(blocks, d, d.T)
        coeffs = np.round(_snap(coeffs / table)) * table
        pixels = _block_transform(coeffs, d.T, d) + 128.0
        pixels = np.floor(_snap(pixels) + 0.5).clip(0, 255).astype(np.uint8)
        out[:, :, c] = (
            pixels.reshape(ph // 8, pw // 8, 8, 8)
            .transpose(0, 2, 1, 3)
            .reshape(ph, pw)
        )
    return Image.from_array(out[: img.height, : img.width])


# --- value-domain attacks ---


def _apply_requantize(img: Image, spec: Requantize) -> Image:
    levels = 1 << spec.bits
    idx = img.as_array() >> (8 - spec.bits)
    recon = np.floor(idx * (255.0 / (levels - 1)) + 0.5).astype(np.uint8)
    return Image.from_array(recon)


def _apply_noise(img: Image, spec: Noise) -> Image:
    if spec.amplitude == 0:
        return img
    raw = np.frombuffer(
        keystream_bytes(spec.seed, len(img.pixels)), dtype=np.uint8
    ).astype(np.int16)
    delta = raw % (2 * spec.amplitude + 1) - spec.amplitude
    noisy = np.frombuffer(img.pixels, dtype=np.uint8).astype(np.int16) + delta
    flat = noisy.clip(0, 255).astype(np.uint8)
    return Image(img.width, img.height, img.channels, flat.tobytes())


def apply_attack(img: Image, spec: AttackSpec) -> Image:
    if isinstance(spec, Resize):
        return _apply_resize(img, spec)
    if isinstance(spec, Rotate):
        return _apply_rotate(img, spec)
    if isinstance(spec, JpegLike):
        return _apply_jpeg_like(img, spec)
    if isinstance(spec, Requantize):
        return _apply_requantize(img, spec)
    if isinstance(spec, Noise):
        return _apply_noise(img, spec)
    if isinstance(spec, FormatRoundtrip):
        return load_image(save_image(img, spec.fmt), spec.fmt)
    raise TypeError(f"unknown attack spec {spec!r}")


def attack_series(img: Image, specs: Sequence[AttackSpec]) -> Image:
    for spec in specs:
        img = apply_attack(img, spec)
    return img


# --- CLI / config grammar: comma-separated series, colon-separated fields ---

_FORMAT_NAMES = {f.value: f for f in ImageFormat}


def describe_attack(spec: AttackSpec) -> str:
    """Canonical text form, also used as a report column label."""
    if isinstance(spec, Resize):
        base = f"resize:{spec.scale:g}:{spec.interp}"
        return base + (":roundtrip" if spec.roundtrip else "")
    if isinstance(spec, Rotate):
        base = f"rotate:{spec.degrees:g}"
        return base + (":roundtrip" if spec.roundtrip else "")
    if isinstance(spec, JpegLike):
        return f"jpeg:{spec.quality}"
    if isinstance(spec, Requantize):
        return f"requantize:{spec.bits}"
    if isinstance(spec, Noise):
        return f"noise:{spec.amplitude}:{spec.seed}"
    return f"format:{spec.fmt.value}"


def parse_attack(text: str) -> AttackSpec:
    parts = text.strip().split(":")
    name, args = parts[0], parts[1:]
    try:
        if name == "resize":
            roundtrip = args[-1:] == ["roundtrip"]
            if roundtrip:
                args = args[:-1]
            scale = float(args[0])
            interp = args[1] if len(args) > 1 else "bilinear"
            return Resize(scale, interp, roundtrip)
        if name == "rotate":
            roundtrip = args[-1:] == ["roundtrip"]
            if roundtrip:
                args = args[:-1]
            return Rotate(float(args[0]), roundtrip)
        if name == "jpeg":
            return JpegLike(int(args[0]))
        if name == "requantize":
            return Requantize(int(args[0]))
        if name == "noise":
            return Noise(int(args[0]), int(args[1]) if len(args) > 1 else 0)
        if name == "format":
            if args[0] not in _FORMAT_NAMES:
                raise ValueError(f"unknown format {args[0]!r}")
            return FormatRoundtrip(_FORMAT_NAMES[args[0]])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad attack spec {text!r}: {exc}") from None
    raise ValueError(f"unknown attack {name!r}")


def parse_attack_series(text: str) -> list[AttackSpec]:
    text = text.strip()
    if not text:
        return []
    return [parse_attack(part) for part in text.split(",")]
