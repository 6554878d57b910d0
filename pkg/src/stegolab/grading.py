"""Qualitative grading of measured benchmark numbers.

The comparison matrix uses five-word grades (Very Low .. Very High).  Words
are meaningless without numbers, so every grade here is a pure function of
measured values and the threshold table below.  The thresholds were frozen
after calibrating on the default benchmark cover; they live in one place so
the docs, the report module and the tests all agree.

Threshold table (see also README):

========================  ===================================================
attribute                 rule
========================  ===================================================
imperceptibility          PSNR >= 36 dB -> Very High; >= 30 -> High;
                          >= 20 -> Medium; else Low.  Visible watermarks
                          are graded "n/a": the mark is meant to be seen.
robustness                If the battery contains a lossless format
                          roundtrip and its BER > 0.45 the grade is
                          Very Low (the technique does not even survive a
                          faithful re-encode).  Otherwise the mean BER over
                          the graded attacks decides: <= 0.15 -> High;
                          <= 0.30 -> Medium; else Low.  JPEG-like attacks
                          with quality < 50 are reported but excluded from
                          the mean: severe recompression erases every
                          bit-plane method and would flatten all rows to
                          Very Low, hiding the ordering the matrix is
                          meant to show.  No spatial-domain technique here
                          earns Very High; that tier is reserved for
                          transform-domain embedding, which is out of
                          scope.
capacity                  ratio = capacity bytes / cover bytes.
                          >= 1.0 -> Very High; >= 0.25 -> High;
                          >= 0.05 -> Medium; else Low.
message secrecy           measured wrong-key rejection sets a base tier
                          (>= 0.99 -> Very High; >= 0.90 -> High;
                          >= 0.50 -> Medium; else Low) which is then
                          capped by what the key actually protects:
                          no key -> Low; a permutation seed (locations
                          only, content in clear) -> High; a public-key
                          exchange (key material on the wire) -> High;
                          a secret keystream over the whole frame ->
                          Very High.  Visible watermarks carry no key and
                          hide nothing: "n/a".
complexity                never measured (wall time is hardware noise);
                          a documented constant per technique family.
========================  ===================================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .attacks import AttackSpec, FormatRoundtrip, JpegLike

GRADE_VERY_LOW = "Very Low"
GRADE_LOW = "Low"
GRADE_MEDIUM = "Medium"
GRADE_HIGH = "High"
GRADE_VERY_HIGH = "Very High"
GRADE_NA = "n/a"


@dataclass(frozen=True)
class Thresholds:
    """The frozen threshold table; defaults are the documented values."""

    imperceptibility_very_high_db: float = 36.0
    imperceptibility_high_db: float = 30.0
    imperceptibility_medium_db: float = 20.0
    robustness_high_ber: float = 0.15
    robustness_medium_ber: float = 0.30
    robustness_roundtrip_fail_ber: float = 0.45
    capacity_very_high_ratio: float = 1.0
    capacity_high_ratio: float = 0.25
    capacity_medium_ratio: float = 0.05
    secrecy_very_high_rejection: float = 0.99
    secrecy_high_rejection: float = 0.90
    secrecy_medium_rejection: float = 0.50
    severe_jpeg_quality: int = 50


DEFAULT_THRESHOLDS = Thresholds()

# What the key protects, per technique family.  The cap encodes key
# *scope*, which no single-run measurement can see: a frame XORed with a
# secret keystream hides content outright, a permutation seed only hides
# where the (cleartext) bits sit, and a toy public-key exchange puts key
# material on the wire.
KEY_SCOPE_CAP = {
    "none": GRADE_LOW,
    "sks": GRADE_VERY_HIGH,
    "pks": GRADE_HIGH,
    "seed": GRADE_HIGH,
}

# Embedding/key-management complexity, a documented constant per family
# (fused "key management / embedding effort" wording, never measured).
COMPLEXITY = {
    "AfterEOF": "Not required/Very Low",
    "NKS": "Not required/Low",
    "SKS": "Difficult/Low",
    "PKS": "Easy/Low",
    "VWM": "High",
    "IVWM": "High",
    "TDS": "High",
}

_GRADE_ORDER = [GRADE_VERY_LOW, GRADE_LOW, GRADE_MEDIUM, GRADE_HIGH, GRADE_VERY_HIGH]


def _min_grade(a: str, b: str) -> str:
    return a if _GRADE_ORDER.index(a) <= _GRADE_ORDER.index(b) else b


def is_graded_attack(spec: AttackSpec, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> bool:
    """Severe recompression is reported but kept out of the robustness mean."""
    if isinstance(spec, JpegLike) and spec.quality < thresholds.severe_jpeg_quality:
        return False
    return True


def grade_imperceptibility(
    psnr_db: float, *, visible: bool = False, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> str:
    if visible:
        return GRADE_NA
    if psnr_db >= thresholds.imperceptibility_very_high_db:
        return GRADE_VERY_HIGH
    if psnr_db >= thresholds.imperceptibility_high_db:
        return GRADE_HIGH
    if psnr_db >= thresholds.imperceptibility_medium_db:
        return GRADE_MEDIUM
    return GRADE_LOW


def grade_capacity(
    capacity_bytes: int, cover_bytes: int, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> str:
    if cover_bytes <= 0:
        raise ValueError("cover_bytes must be positive")
    ratio = capacity_bytes / cover_bytes
    if ratio >= thresholds.capacity_very_high_ratio:
        return GRADE_VERY_HIGH
    if ratio >= thresholds.capacity_high_ratio:
        return GRADE_HIGH
    if ratio >= thresholds.capacity_medium_ratio:
        return GRADE_MEDIUM
    return GRADE_LOW


def graded_mean_ber(
    battery: Sequence[AttackSpec],
    bers: Sequence[float],
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> Optional[float]:
    """Mean BER over the graded subset of the battery (None if empty)."""
    if len(battery) != len(bers):
        raise ValueError("battery and bers must have equal length")
    graded = [b for spec, b in zip(battery, bers) if is_graded_attack(spec, thresholds)]
    if not graded:
        return None
    return sum(graded) / len(graded)


def lossless_roundtrip_ber(
    battery: Sequence[AttackSpec], bers: Sequence[float]
) -> Optional[float]:
    """BER under the first lossless format roundtrip in the battery, if any."""
    for spec, b in zip(battery, bers):
        if isinstance(spec, FormatRoundtrip):
            return b
    return None


def grade_robustness(
    battery: Sequence[AttackSpec],
    bers: Sequence[float],
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> str:
    roundtrip = lossless_roundtrip_ber(battery, bers)
    if roundtrip is not None and roundtrip > thresholds.robustness_roundtrip_fail_ber:
        return GRADE_VERY_LOW
    mean = graded_mean_ber(battery, bers, thresholds)
    if mean is None:
        return GRADE_NA
    if mean <= thresholds.robustness_high_ber:
        return GRADE_HIGH
    if mean <= thresholds.robustness_medium_ber:
        return GRADE_MEDIUM
    return GRADE_LOW


def grade_secrecy(
    rejection: Optional[float],
    key_scope: str,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> str:
    if key_scope not in KEY_SCOPE_CAP:
        raise ValueError(f"unknown key scope {key_scope!r}")
    cap = KEY_SCOPE_CAP[key_scope]
    if key_scope == "none":
        return cap  # nothing measurable: no key exists
    if rejection is None:
        raise ValueError("keyed technique requires a measured rejection rate")
    if rejection >= thresholds.secrecy_very_high_rejection:
        base = GRADE_VERY_HIGH
    elif rejection >= thresholds.secrecy_high_rejection:
        base = GRADE_HIGH
    elif rejection >= thresholds.secrecy_medium_rejection:
        base = GRADE_MEDIUM
    else:
        base = GRADE_LOW
    return _min_grade(base, cap)
