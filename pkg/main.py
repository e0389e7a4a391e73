#!/usr/bin/env python3
"""
hazardfield command-line entry point.

Usage:
    python main.py [--config PATH] [--seed N] [--threads N] [--out DIR] [--dry-run] <command>

Commands:
    simulate    Simulate a survey on the study geometry, with truth and prior predictive
    fit         Fit the exposure model to a dataset directory
    diagnose    Recompute R-hat/ESS report from draws CSVs
    validate    Discretization error and bound over a grid ladder
    study       Replicated simulation study (resumable)
    functional  Change in infection odds along a ray of locations
"""

import sys
from pathlib import Path

# Add repository root to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.app import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
