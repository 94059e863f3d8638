"""
File Utilities
Atomic output files and relative path checks
"""

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path, PurePosixPath, PureWindowsPath
from typing import Iterator, Union

PathLike = Union[str, os.PathLike]


@contextmanager
def atomic_output(path: PathLike) -> Iterator[Path]:
    """
    Yield a temporary path next to `path` and rename it into place on success

    An interrupted or failed write never leaves a truncated file at `path`.

    Args:
        path: Final output path

    Yields:
        Temporary path to write to
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
    os.close(fd)
    tmp_path = Path(tmp_name)
    try:
        yield tmp_path
        os.replace(tmp_path, target)
    finally:
        if tmp_path.exists():
            tmp_path.unlink()


def write_bytes_atomic(path: PathLike, data: bytes):
    """Write bytes to a file atomically"""
    with atomic_output(path) as tmp_path:
        tmp_path.write_bytes(data)


def is_safe_relative_path(value: str) -> bool:
    """
    Check that a manifest path is relative and never climbs out of its root

    Both POSIX and Windows spellings are checked so that manifests stay
    portable.

    Args:
        value: Path string from a manifest

    Returns:
        True if the path is a plain relative path
    """
    if not value:
        return False
    for flavour in (PurePosixPath, PureWindowsPath):
        candidate = flavour(value)
        if candidate.is_absolute() or candidate.drive or candidate.root:
            return False
        if '..' in candidate.parts:
            return False
    return True
