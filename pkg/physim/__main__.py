"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
import sys

from physim.cli import main


if __name__ == "__main__":
    sys.exit(main())
