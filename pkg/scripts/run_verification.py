#!/usr/bin/env python3
"""Run every verification suite at a chosen seed and print text reports.

Usage: python scripts/run_verification.py [--seed N] [--count N] [--modulus M]
"""

import argparse
import sys

from spantrace.generate import GenParams
from spantrace.suites import SUITE_NAMES, report_emit, run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--modulus", type=int, default=None)
    args = ap.parse_args()
    params = GenParams(modulus=args.modulus)
    bad = 0
    for name in SUITE_NAMES:
        if name == "all":
            continue
        report = run_suite(name, args.seed, args.count, params)
        sys.stdout.write(report_emit(report, "text"))
        bad += report.failures
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
