"""Fidelity measurements: MSE, PSNR, and bit-error rate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

PEAK = 255.0


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float  # dB; math.inf when the images are identical
    ber: Optional[float] = None


def psnr(a, b) -> QualityReport:
    """MSE over all channel bytes jointly, and 10*log10(255^2 / MSE)."""
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise ValueError(
            f"shape mismatch: {a.width}x{a.height}x{a.channels} vs "
            f"{b.width}x{b.height}x{b.channels}"
        )
    diff = a.as_array().astype(np.int64) - b.as_array().astype(np.int64)
    mse = float(np.mean(diff * diff))
    value = math.inf if mse == 0.0 else 10.0 * math.log10(PEAK * PEAK / mse)
    return QualityReport(mse=mse, psnr=value)


def ber(a: Sequence[int], b: Sequence[int]) -> float:
    """Fraction of differing bits between two equal-length 0/1 sequences."""
    if len(a) != len(b):
        raise ValueError(f"bit sequences differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("bit sequences are empty")
    aa = np.asarray(a, dtype=np.uint8)
    bb = np.asarray(b, dtype=np.uint8)
    return float(np.count_nonzero(aa != bb)) / len(a)


def bytes_to_bits(data: bytes) -> np.ndarray:
    """MSB-first bit expansion of a byte string."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))
