"""Small shared I/O helpers."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import IoError


def format_float(x: float) -> str:
    """Full double precision text form (17 significant digits)."""
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename.

    Concurrent writers targeting distinct paths never interleave; a crashed
    writer leaves no partial file at the destination.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
