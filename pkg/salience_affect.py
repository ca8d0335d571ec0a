"""
salience-affect command-line entry point.

    python salience_affect.py synth --out corpus/ --seed 0
    python salience_affect.py report --manifest corpus/manifest.json --labels corpus/labels.csv --out out/
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
