"""Load HAZARDFIELD_* settings from a .env file for local runs."""

from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv


def load_env(env_file: Optional[Union[str, Path]] = None) -> bool:
    """
    Load environment variables from a .env file if it exists

    Args:
        env_file: Path to the file (default: .env in the working directory)

    Returns:
        True if a file was loaded. Variables already set are not overridden.
    """
    path = Path(env_file) if env_file is not None else Path.cwd() / ".env"
    if not path.exists():
        return False
    return load_dotenv(path, override=False)
