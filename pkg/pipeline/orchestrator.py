"""End-to-end dataset pipeline: generate, transform, assemble, measure."""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from dataset.assembler import DatasetSplits, assemble, normalize_ratios
from dataset.storage import write_dataset
from dataset.tokens import TokenStats, get_counter, token_stats
from dataset.tuples import DatasetTuple, Encoding, Provenance, build_tuple
from planning.model import Domain, Problem, TimedPlan
from planning.parser import parse_domain
from tools.curriculum import curriculum_expand
from tools.dpgc import load_dpgc
from tools.generator import GeneratedPair, generate_batch, write_batch
from tools.planner import Heuristic, SearchConfig, Strategy
from utils.fileio import IoFailure, atomic_directory, read_text, write_jsonl

logger = logging.getLogger(__name__)

ANONYMIZE_MODES = ("none", "all", "curriculum")


class PipelineError(Exception):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        self.message = message
        super().__init__(f"{stage}: {message}")

    def __reduce__(self):
        return (PipelineError, (self.stage, self.message))


@dataclass(frozen=True)
class DomainSource:
    domain: str
    dpgc: str
    count: int


@dataclass
class PipelineConfig:
    """
    Pipeline configuration, read from JSON.

    Paths are resolved relative to ``base_dir`` (the config file's directory).
    ``jobs`` and ``base_dir`` never reach the output manifest, so output does
    not depend on them.
    """

    DEFAULT_LIMIT = 4096

    sources: list[DomainSource]
    seed: int = 0
    ratios: tuple[float, float, float] = (0.8, 0.2, 0.0)
    anonymize: str = "none"
    curriculum_copies: int = 2
    compact: bool = False
    held_out_domains: tuple[str, ...] = ()
    token_limit: int = DEFAULT_LIMIT
    counter: str = "whitespace"
    planner: dict[str, Any] = field(default_factory=dict)
    output: str = "dataset-out"
    jobs: int = 1
    base_dir: Path = Path(".")

    def __post_init__(self):
        if not self.sources:
            raise ValueError("pipeline needs at least one domain source")
        for source in self.sources:
            if source.count < 1:
                raise ValueError(f"count must be at least 1 for {source.domain}")
        if self.anonymize not in ANONYMIZE_MODES:
            raise ValueError(f"anonymize must be one of {ANONYMIZE_MODES}")
        if self.curriculum_copies < 1:
            raise ValueError("curriculum_copies must be at least 1")
        self.ratios = normalize_ratios(self.ratios)
        get_counter(self.counter)

    @classmethod
    def from_dict(cls, data: dict[str, Any], base_dir: Union[str, Path] = ".") -> "PipelineConfig":
        try:
            sources = [
                DomainSource(str(s["domain"]), str(s["dpgc"]), int(s.get("count", 1)))
                for s in data["domains"]
            ]
        except (KeyError, TypeError) as e:
            raise ValueError(f"invalid domains section: {e}") from e
        return cls(
            sources=sources,
            seed=int(data.get("seed", 0)),
            ratios=tuple(data.get("ratios", (0.8, 0.2))),
            anonymize=data.get("anonymize", "none"),
            curriculum_copies=int(data.get("curriculum_copies", 2)),
            compact=bool(data.get("compact", False)),
            held_out_domains=tuple(data.get("held_out_domains", ())),
            token_limit=int(data.get("token_limit", cls.DEFAULT_LIMIT)),
            counter=data.get("counter", "whitespace"),
            planner=dict(data.get("planner", {})),
            output=str(data.get("output", "dataset-out")),
            jobs=int(data.get("jobs", 1)),
            base_dir=Path(base_dir),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PipelineConfig":
        path = Path(path)
        try:
            data = json.loads(read_text(path))
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON: {e.msg}") from e
        return cls.from_dict(data, base_dir=path.parent)

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self.base_dir / path

    def search_config(self) -> SearchConfig:
        options = dict(self.planner)
        if "strategy" in options:
            options["strategy"] = Strategy(options["strategy"])
        if "heuristic" in options:
            options["heuristic"] = Heuristic(options["heuristic"])
        return SearchConfig(**options)

    def to_manifest(self) -> dict[str, Any]:
        """Effective configuration recorded in the dataset manifest."""
        return {
            "domains": [asdict(s) for s in self.sources],
            "seed": self.seed,
            "ratios": list(self.ratios),
            "anonymize": self.anonymize,
            "curriculum_copies": self.curriculum_copies,
            "compact": self.compact,
            "held_out_domains": list(self.held_out_domains),
            "token_limit": self.token_limit,
            "counter": self.counter,
            "planner": self.search_config().planner_id,
        }


@dataclass
class PipelineResult:
    output: Path
    splits: DatasetSplits
    stats: TokenStats
    generation: dict[str, dict[str, int]]
    curriculum_items: int = 0


@dataclass(frozen=True)
class _Source:
    domain: Domain
    problem: Problem
    plan: TimedPlan
    provenance: Provenance


class DatasetPipeline:
    """Runs the stages of one pipeline configuration."""

    def __init__(self, config: PipelineConfig, progress: bool = False):
        self.config = config
        self.progress = progress
        self.sources: dict[str, _Source] = {}

    def _stage(self, name: str, func, *args, **kwargs):
        try:
            return func(*args, **kwargs)
        except PipelineError:
            raise
        except Exception as e:
            raise PipelineError(name, f"{type(e).__name__}: {e}") from e

    def _generate(self, source: DomainSource, batch_dir: Path) -> tuple[Domain, list[GeneratedPair]]:
        domain = parse_domain(read_text(self.config.resolve(source.domain)))
        dpgc = load_dpgc(self.config.resolve(source.dpgc))
        seed = self.config.seed
        pairs = generate_batch(
            domain,
            dpgc,
            source.count,
            seed,
            planner_cfg=self.config.search_config(),
            jobs=self.config.jobs,
            progress=self.progress,
        )
        write_batch(domain, pairs, batch_dir / domain.name, dpgc_file=source.dpgc, seed=seed)
        return domain, pairs

    def _encoding(self) -> Encoding:
        return Encoding.combine(self.config.anonymize == "all", self.config.compact)

    def _tuples(self, source: DomainSource, domain: Domain, pairs: list[GeneratedPair]) -> list[DatasetTuple]:
        tuples = []
        for pair in pairs:
            if not pair.solved:
                logger.warning("Slot %d of %s is unsolved; skipped", pair.slot, domain.name)
                continue
            provenance = Provenance(source.dpgc, pair.seed, pair.planner_id)
            item = build_tuple(domain, pair.problem, pair.plan, self._encoding(), provenance)
            self.sources.setdefault(item.id, _Source(domain, pair.problem, pair.plan, provenance))
            tuples.append(item)
        return tuples

    def _curriculum(self, train_ids: list[str]) -> list[dict[str, Any]]:
        items = curriculum_expand(train_ids, self.config.curriculum_copies, self.config.seed)
        records = []
        for item in items:
            source = self.sources[item.source_id]
            encoding = Encoding.combine(item.anonymize, self.config.compact)
            rendered = build_tuple(source.domain, source.problem, source.plan, encoding, source.provenance)
            records.append(
                {
                    "index": item.index,
                    "source_id": item.source_id,
                    "probability": str(item.probability),
                    "anonymize": item.anonymize,
                    "tuple": rendered.to_dict(),
                }
            )
        return records

    def run(self) -> PipelineResult:
        """
        Execute every stage and write the output directory atomically.

        Layout: ``batches/<domain>/`` (generated problems and plans),
        ``dataset/`` (splits and manifest), ``dataset/train_curriculum.jsonl``
        when curriculum anonymisation is on, and ``stats.json``.

        Raises:
            PipelineError: Labelled with the failing stage
        """
        config = self.config
        output = config.resolve(config.output)
        tuples: list[DatasetTuple] = []
        generation: dict[str, dict[str, int]] = {}

        try:
            with atomic_directory(output) as staging:
                for source in config.sources:
                    domain, pairs = self._stage("generate", self._generate, source, staging / "batches")
                    produced = self._stage("transform", self._tuples, source, domain, pairs)
                    generation[domain.name] = {
                        "requested": source.count,
                        "solved": sum(1 for p in pairs if p.solved),
                        "duplicates": sum(1 for p in pairs if p.duplicate_of is not None),
                    }
                    tuples.extend(produced)

                if not tuples:
                    raise PipelineError("assemble", "no solved problems to assemble")
                splits = self._stage(
                    "assemble", assemble, tuples, config.ratios, config.seed, config.held_out_domains
                )
                self._stage("write", write_dataset, splits, tuples, staging / "dataset", config.to_manifest())

                curriculum_items = 0
                if config.anonymize == "curriculum" and splits.train:
                    records = self._stage("curriculum", self._curriculum, splits.train)
                    write_jsonl(staging / "dataset" / "train_curriculum.jsonl", records)
                    curriculum_items = len(records)

                stats = self._stage(
                    "stats", token_stats, tuples, config.token_limit, get_counter(config.counter)
                )
                summary = {"generation": generation, "splits": splits.counts(), "tokens": stats.to_dict()}
                (staging / "stats.json").write_text(
                    json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
                )
        except IoFailure as e:
            raise PipelineError("write", str(e)) from e

        logger.info("Pipeline finished: %s", splits.counts())
        return PipelineResult(output, splits, stats, generation, curriculum_items)


def run_pipeline(config: Union[PipelineConfig, str, Path], output: Optional[Union[str, Path]] = None,
                 jobs: Optional[int] = None, progress: bool = False,
                 seed: Optional[int] = None) -> PipelineResult:
    """Load (when given a path) and run a pipeline; ``output``, ``jobs`` and ``seed`` override the file."""
    if not isinstance(config, PipelineConfig):
        config = PipelineConfig.load(config)
    if output is not None:
        config.output = str(Path(output).resolve())
    if jobs is not None:
        config.jobs = jobs
    if seed is not None:
        config.seed = seed
    return DatasetPipeline(config, progress=progress).run()
