"""
Reader for the flat ``key = value`` text format shared by schema files and
experiment configuration files.
"""

from pathlib import Path
from typing import List, Tuple, Union


def parse_key_value_text(text: str, source: str = "<text>") -> List[Tuple[str, str, int]]:
    """
    Parse ``key = value`` lines.

    Blank lines and lines starting with ``#`` are ignored, and so is anything
    after an unquoted ``#`` on a value line.

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        List of (key, value, line_number) in file order

    Raises:
        ValueError: If a non-empty line has no ``=``
    """
    entries = []
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{line_number}: expected 'key = value', got '{raw_line.strip()}'")
        key, value = line.split("=", 1)
        entries.append((key.strip(), value.strip(), line_number))
    return entries


def read_key_value_file(path: Union[str, Path]) -> List[Tuple[str, str, int]]:
    """Read and parse a key-value file (UTF-8)."""
    path = Path(path)
    return parse_key_value_text(path.read_text(encoding="utf-8"), source=str(path))


def split_list(value: str) -> List[str]:
    """Split a comma separated value, dropping empty items."""
    return [item.strip() for item in value.split(",") if item.strip()]
