#!/usr/bin/env python3
"""Script to verify the soliton catalog over a (lambda, mu) sweep.

This is a convenience wrapper around the CLI for use in automation; extra
arguments are passed to the sweep subcommand.
"""

import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from lbcv.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", *sys.argv[1:]]))
