"""Allow running the CLI as ``python -m secdedup``."""

import sys

from secdedup.cli import main

if __name__ == "__main__":
    sys.exit(main())
