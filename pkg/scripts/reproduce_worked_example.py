#!/usr/bin/env python3
"""Regenerate the worked-example datasets (solution curve, residual scan,
third-derivative curve, overlap curves, root table) into ./appendix_out."""

import sys

from p3prime.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "appendix_out"
    sys.exit(main(["reproduce-appendix", "--out", out]))
