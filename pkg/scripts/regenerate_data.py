#!/usr/bin/env python3
"""Rebuild every bundled dataset under src/modeshift/data.

The builders are deterministic, so rerunning this script reproduces the
committed files byte for byte (tests/test_data_calibration.py checks the
numbers, not the bytes).
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from modeshift import calibrate


def main() -> int:
    data_dir = Path(__file__).resolve().parents[1] / "src" / "modeshift" / "data"
    calibrate.write_all(data_dir)
    print(f"wrote bundled datasets under {data_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
