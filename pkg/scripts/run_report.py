#!/usr/bin/env python3
"""Run the benchmark and emit the comparison matrix.

Equivalent to ``stegolab report`` but prints per-row wall times to stderr,
which is useful when sizing a custom config.

    python scripts/run_report.py --format markdown
    python scripts/run_report.py --config bench.example.toml --out matrix.csv
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from stegolab import report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="TOML benchmark config (defaults to the built-in run)")
    parser.add_argument("--format", choices=("csv", "markdown"), default="csv")
    parser.add_argument("--out", help="output file (stdout if omitted)")
    args = parser.parse_args()

    config = report.load_config(args.config) if args.config else report.BenchConfig.default()
    start = time.perf_counter()
    rows = report.run_benchmark(config)
    elapsed = time.perf_counter() - start

    for row in rows:
        note = f"{row.embed_seconds:.3f}s embed" if row.embed_seconds is not None else "-"
        state = f"error: {row.error}" if row.error else note
        print(f"  {row.technique:<24} {state}", file=sys.stderr)
    print(f"benchmark finished in {elapsed:.1f}s", file=sys.stderr)

    rendered = report.emit_report(rows, args.format, config.thresholds)
    if args.out:
        Path(args.out).write_bytes(rendered)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(rendered.decode("ascii"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
