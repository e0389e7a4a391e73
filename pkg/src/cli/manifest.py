"""Run manifests: what was run, with which settings, on which inputs."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from src import __version__
from src.utils.exceptions import InputOutputError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

MANIFEST_FILE = "manifest.json"
DIGEST_BLOCK_BYTES = 1 << 20


def file_digest(path: Union[str, Path]) -> str:
    """sha256 hex digest of a file."""
    path = Path(path)
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for block in iter(lambda: f.read(DIGEST_BLOCK_BYTES), b""):
                digest.update(block)
    except OSError as e:
        raise InputOutputError(f"cannot read input file {path}: {e}") from e
    return digest.hexdigest()


@dataclass
class RunManifest:
    """One per output directory; digests are taken before the command runs."""

    command: str
    output_dir: str
    seed: int
    config_path: Optional[str] = None
    version: str = __version__
    input_digests: Dict[str, str] = field(default_factory=dict)
    settings: Dict[str, Any] = field(default_factory=dict)
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def add_inputs(self, paths: Iterable[Union[str, Path]]) -> None:
        for path in paths:
            path = Path(path)
            if path.is_dir():
                for child in sorted(p for p in path.iterdir() if p.is_file()):
                    self.input_digests[str(child)] = file_digest(child)
            else:
                self.input_digests[str(path)] = file_digest(path)

    def write(self) -> Path:
        directory = Path(self.output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / MANIFEST_FILE
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True, default=str)
        logger.info(f"Wrote manifest {path}")
        return path

    @classmethod
    def read(cls, directory: Union[str, Path]) -> "RunManifest":
        path = Path(directory) / MANIFEST_FILE
        if not path.exists():
            raise InputOutputError(f"missing manifest {path}")
        with open(path) as f:
            return cls(**json.load(f))
