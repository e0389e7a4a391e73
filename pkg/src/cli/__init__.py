"""
CLI module for hazardfield.

Subcommands simulate, fit, diagnose, validate, study and functional, with
run manifests and exit-code mapping.
"""

from .manifest import RunManifest, file_digest
from .app import build_parser, exit_code_for, main

__all__ = [
    # Manifests
    'RunManifest',
    'file_digest',

    # Entry point
    'build_parser',
    'exit_code_for',
    'main',
]
