"""Atomic file and directory writes, JSONL helpers."""

import json
import logging
import os
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class IoFailure(OSError):
    """A dataset or output file could not be read or written."""


class JsonLineError(ValueError):
    """A JSONL line that does not decode; carries the file and 1-based line number."""

    def __init__(self, path: PathLike, line: int, message: str):
        super().__init__(f"{path}:{line}: invalid JSON: {message}")
        self.path = Path(path)
        self.line = line
        self.message = message

    def __reduce__(self):
        return (type(self), (self.path, self.line, self.message))


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write ``text`` to a temporary sibling file, then rename it over ``path``."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


@contextmanager
def atomic_directory(path: PathLike) -> Iterator[Path]:
    """
    Yield a temporary directory that replaces ``path`` only if the block succeeds.

    Nothing is left behind at ``path`` when the block raises.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=f".{path.name}.", dir=path.parent))
    except OSError as e:
        raise IoFailure(f"cannot create {path}: {e}") from e
    try:
        yield staging
        backup = None
        if path.exists():
            backup = path.with_name(f".{path.name}.old")
            if backup.exists():
                shutil.rmtree(backup)
            os.replace(path, backup)
        os.replace(staging, path)
        if backup is not None:
            shutil.rmtree(backup, ignore_errors=True)
    except OSError as e:
        shutil.rmtree(staging, ignore_errors=True)
        raise IoFailure(f"cannot write {path}: {e}") from e
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise


def dumps_jsonl(records: Iterable[dict[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)


def write_jsonl(path: PathLike, records: Iterable[dict[str, Any]]) -> None:
    atomic_write_text(path, dumps_jsonl(records))


def read_jsonl(path: PathLike) -> list[dict[str, Any]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    records = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise JsonLineError(path, line_number, e.msg) from e
    return records


def read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
