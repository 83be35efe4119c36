"""Dataset directories: split JSONL files, a manifest and the dedup log."""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Union

from dataset.assembler import SPLIT_NAMES, DatasetSplits
from dataset.tuples import DatasetTuple
from utils.fileio import (
    IoFailure,
    JsonLineError,
    atomic_directory,
    atomic_write_text,
    dumps_jsonl,
    read_jsonl,
    read_text,
)

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
DEDUP_LOG = "dedup.log"
FORMAT_VERSION = 1


class ManifestMismatch(ValueError):
    """
    Split files disagree with the manifest or cannot be decoded.

    ``path`` and ``line`` locate an undecodable JSONL line when known.
    """

    def __init__(self, message: str, path: Optional[Path] = None, line: Optional[int] = None):
        super().__init__(message)
        self.path = path
        self.line = line


def ids_digest(ids: Iterable[str]) -> str:
    return hashlib.sha256("\n".join(ids).encode("utf-8")).hexdigest()


@dataclass
class DatasetManifest:
    """
    Everything needed to reproduce and verify a dataset directory.

    Attributes:
        ratios: Requested (train, validation, test) proportions
        seed: Shuffle seed
        counts: Tuples per split
        digests: sha256 of each split's ordered id list
        per_domain_counts: Tally per domain per split
        duplicates: Ids discarded as duplicates, in input order
        held_out_domains: Domains routed entirely to the test split
        config: Effective configuration of the run that produced the dataset
    """

    ratios: tuple[float, float, float]
    seed: int
    counts: dict[str, int]
    digests: dict[str, str]
    per_domain_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    duplicates: list[str] = field(default_factory=list)
    held_out_domains: tuple[str, ...] = ()
    config: dict[str, Any] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @classmethod
    def from_splits(cls, splits: DatasetSplits, config: Optional[dict[str, Any]] = None) -> "DatasetManifest":
        return cls(
            ratios=tuple(splits.ratios),
            seed=splits.seed,
            counts=splits.counts(),
            digests={name: ids_digest(splits.split(name)) for name in SPLIT_NAMES},
            per_domain_counts={d: dict(c) for d, c in splits.per_domain_counts.items()},
            duplicates=list(splits.duplicates),
            held_out_domains=tuple(splits.held_out_domains),
            config=dict(config or {}),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "ratios": list(self.ratios),
            "seed": self.seed,
            "counts": dict(self.counts),
            "digests": dict(self.digests),
            "per_domain_counts": self.per_domain_counts,
            "duplicates": list(self.duplicates),
            "held_out_domains": list(self.held_out_domains),
            "config": self.config,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DatasetManifest":
        try:
            return cls(
                ratios=tuple(data["ratios"]),
                seed=int(data["seed"]),
                counts={k: int(v) for k, v in data["counts"].items()},
                digests=dict(data["digests"]),
                per_domain_counts=data.get("per_domain_counts", {}),
                duplicates=list(data.get("duplicates", [])),
                held_out_domains=tuple(data.get("held_out_domains", ())),
                config=data.get("config", {}),
                version=int(data.get("version", FORMAT_VERSION)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestMismatch(f"malformed manifest: {e}") from e

    def save(self, path: Union[str, Path]) -> None:
        atomic_write_text(path, self.to_json())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DatasetManifest":
        try:
            data = json.loads(read_text(path))
        except json.JSONDecodeError as e:
            raise ManifestMismatch(f"{path}: invalid JSON: {e.msg}") from e
        return cls.from_dict(data)

    def to_splits(self, ids: dict[str, list[str]]) -> DatasetSplits:
        return DatasetSplits(
            train=list(ids["train"]),
            validation=list(ids["validation"]),
            test=list(ids["test"]),
            ratios=tuple(self.ratios),
            seed=self.seed,
            per_domain_counts={d: dict(c) for d, c in self.per_domain_counts.items()},
            duplicates=list(self.duplicates),
            held_out_domains=tuple(self.held_out_domains),
        )


def write_dataset(
    splits: DatasetSplits,
    tuples: Iterable[DatasetTuple],
    path: Union[str, Path],
    config: Optional[dict[str, Any]] = None,
) -> DatasetManifest:
    """
    Write ``train.jsonl``, ``validation.jsonl``, ``test.jsonl``, ``manifest.json``
    and ``dedup.log`` into ``path``.

    The directory is staged and renamed into place, so a failure leaves any
    previous dataset at ``path`` untouched.

    Args:
        splits: Assembled splits
        tuples: Tuples referenced by the splits (duplicates allowed)
        path: Output directory
        config: Effective run configuration recorded in the manifest

    Raises:
        KeyError: When a split references an id missing from ``tuples``
        IoFailure: When the directory cannot be written
    """
    by_id = {t.id: t for t in tuples}
    manifest = DatasetManifest.from_splits(splits, config)
    with atomic_directory(path) as staging:
        for name in SPLIT_NAMES:
            records = [by_id[i].to_dict() for i in splits.split(name)]
            atomic_write_text(staging / f"{name}.jsonl", dumps_jsonl(records))
        manifest.save(staging / MANIFEST_FILE)
        atomic_write_text(staging / DEDUP_LOG, "".join(f"duplicate {i}\n" for i in splits.duplicates))
    logger.info("Wrote dataset %s %s", path, manifest.counts)
    return manifest


def read_split(path: Union[str, Path], name: str) -> list[DatasetTuple]:
    """
    Tuples of one split file, in file order.

    Raises:
        IoFailure: The file is missing or unreadable
        ManifestMismatch: A line is not valid JSON (with its file and line number)
    """
    if name not in SPLIT_NAMES:
        raise ValueError(f"unknown split {name!r}")
    return [DatasetTuple.from_dict(r) for r in _read_records(Path(path) / f"{name}.jsonl")]


def _read_records(path: Path) -> list[dict[str, Any]]:
    try:
        return read_jsonl(path)
    except JsonLineError as e:
        raise ManifestMismatch(str(e), path=e.path, line=e.line) from e


def read_dataset(path: Union[str, Path]) -> tuple[DatasetSplits, list[DatasetTuple]]:
    """
    Read a dataset directory and verify it against its manifest.

    Returns:
        (splits, tuples) with tuples in split order: train, validation, test

    Raises:
        IoFailure: Missing or unreadable files
        ManifestMismatch: Counts, id digests or per-tuple hashes disagree
    """
    path = Path(path)
    if not path.is_dir():
        raise IoFailure(f"dataset directory {path} does not exist")
    manifest = DatasetManifest.load(path / MANIFEST_FILE)

    ids: dict[str, list[str]] = {}
    tuples: list[DatasetTuple] = []
    for name in SPLIT_NAMES:
        try:
            split_tuples = read_split(path, name)
        except ManifestMismatch:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestMismatch(f"{name}.jsonl: malformed record: {e}") from e
        split_ids = [t.id for t in split_tuples]
        if len(split_ids) != manifest.counts.get(name):
            raise ManifestMismatch(
                f"{name}: manifest says {manifest.counts.get(name)} tuples, file has {len(split_ids)}"
            )
        if ids_digest(split_ids) != manifest.digests.get(name):
            raise ManifestMismatch(f"{name}: id digest does not match manifest")
        for t in split_tuples:
            if t.content_id != t.id:
                raise ManifestMismatch(f"{name}: tuple {t.id} content does not match its hash")
        ids[name] = split_ids
        tuples.extend(split_tuples)
    return manifest.to_splits(ids), tuples


def load_tuples(path: Union[str, Path]) -> list[DatasetTuple]:
    """Tuples from a dataset directory or from a single JSONL file."""
    path = Path(path)
    if path.is_dir():
        return read_dataset(path)[1]
    return [DatasetTuple.from_dict(r) for r in _read_records(path)]
