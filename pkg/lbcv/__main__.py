"""Allow running the package with python -m lbcv."""

import sys

from lbcv.cli import main

if __name__ == "__main__":
    sys.exit(main())
