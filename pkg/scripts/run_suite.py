#!/usr/bin/env python3
"""Run the full verification suite from a source checkout.

Equivalent to `boundarylab verify --suite all` plus any extra
arguments, without requiring the console script to be installed.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from boundarylab.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--suite", "all", *sys.argv[1:]]))
