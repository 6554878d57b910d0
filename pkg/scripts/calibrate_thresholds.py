#!/usr/bin/env python3
"""Print the measurements behind the frozen grading thresholds.

The grade boundaries in ``stegolab.grading`` are constants, not knobs.  This
script re-derives the numbers they were frozen against on the default
synthetic cover and shows the margin between each measurement and the nearest
boundary, so a regression that eats into a margin is visible long before it
flips a grade.

    python scripts/calibrate_thresholds.py
"""

from __future__ import annotations

import sys

from stegolab import grading
from stegolab.report import BenchConfig, run_benchmark


def margin(value: float, boundary: float) -> str:
    return f"{value:.4f} (boundary {boundary:g}, margin {abs(value - boundary):.4f})"


def main() -> int:
    config = BenchConfig.default()
    th = config.thresholds
    rows = {row.technique: row for row in run_benchmark(config)}

    print("imperceptibility: PSNR in dB, graded at >=36 / >=30 / >=20")
    for name in ("NKS-1", "NKS-3", "NKS-4", "SKS-3", "PKS-4", "IVWM"):
        row = rows[name]
        nearest = min(
            (th.imperceptibility_very_high_db, th.imperceptibility_high_db,
             th.imperceptibility_medium_db),
            key=lambda b: abs(row.psnr_db - b),
        )
        print(f"  {name:<8} {row.grade('imperceptibility'):<10} {margin(row.psnr_db, nearest)}")

    print("\nrobustness: mean BER over graded attacks, high <= 0.15, medium <= 0.30")
    from stegolab.attacks import parse_attack_series

    for name in ("NKS-1", "VWM", "IVWM"):
        row = rows[name]
        battery = parse_attack_series(",".join(row.attack_labels))
        mean = grading.graded_mean_ber(battery, row.attack_bers, th)
        boundary = th.robustness_high_ber if mean <= th.robustness_high_ber else th.robustness_medium_ber
        print(f"  {name:<8} {row.grade('robustness'):<10} {margin(mean, boundary)}")
        for label, b in zip(row.attack_labels, row.attack_bers):
            print(f"           {label:<28} ber={b:.4f}")

    print("\nsecrecy: wrong-key rejection, very high >= 0.99, capped by key scope")
    for name, scope in (("SKS-3", "sks"), ("PKS-4", "pks"), ("IVWM", "seed")):
        row = rows[name]
        print(
            f"  {name:<8} {row.grade('secrecy'):<10} rejection "
            f"{margin(row.wrong_key_rejection, th.secrecy_very_high_rejection)} "
            f"cap {grading.KEY_SCOPE_CAP[scope]}"
        )

    print("\ncapacity: payload bytes / cover bytes, graded at >=1.0 / >=0.25 / >=0.05")
    cover_bytes = 256 * 256
    for name in ("AfterEOF", "NKS-4", "NKS-1", "IVWM", "VWM"):
        row = rows[name]
        ratio = row.capacity_bytes / cover_bytes
        print(
            f"  {name:<8} {row.grade('capacity'):<10} "
            f"{row.capacity_bytes:>8} B  ratio {ratio:.4f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
