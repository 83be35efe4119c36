"""Dataset tuples: canonical (domain, problem, plan) texts with a content hash."""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

from planning.model import Domain, Problem, TimedPlan
from planning.parser import parse_domain, parse_plan, parse_problem
from planning.render import render_domain, render_plan, render_problem
from tools.anonymizer import anonymize_tuple
from tools.codec import encode_plan
from tools.generator import BatchManifest

logger = logging.getLogger(__name__)


class Encoding(str, Enum):
    STANDARD = "standard"
    COMPACT = "compact"
    ANONYMIZED = "anonymized"
    ANONYMIZED_COMPACT = "anonymized+compact"

    @property
    def anonymized(self) -> bool:
        return self in (Encoding.ANONYMIZED, Encoding.ANONYMIZED_COMPACT)

    @property
    def compact(self) -> bool:
        return self in (Encoding.COMPACT, Encoding.ANONYMIZED_COMPACT)

    @classmethod
    def combine(cls, anonymized: bool, compact: bool) -> "Encoding":
        if anonymized:
            return cls.ANONYMIZED_COMPACT if compact else cls.ANONYMIZED
        return cls.COMPACT if compact else cls.STANDARD


@dataclass(frozen=True)
class Provenance:
    dpgc_file: str = ""
    seed: Optional[int] = None
    planner: str = ""


def tuple_id(domain_text: str, problem_text: str, plan_text: str, encoding: Union[Encoding, str]) -> str:
    """sha256 over the three canonical texts and the encoding name."""
    payload = json.dumps(
        [domain_text, problem_text, plan_text, Encoding(encoding).value], ensure_ascii=False
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DatasetTuple:
    id: str
    domain_name: str
    domain_text: str
    problem_text: str
    plan_text: str
    encoding: Encoding = Encoding.STANDARD
    provenance: Provenance = field(default_factory=Provenance)

    @classmethod
    def create(
        cls,
        domain_name: str,
        domain_text: str,
        problem_text: str,
        plan_text: str,
        encoding: Union[Encoding, str] = Encoding.STANDARD,
        provenance: Optional[Provenance] = None,
    ) -> "DatasetTuple":
        encoding = Encoding(encoding)
        return cls(
            id=tuple_id(domain_text, problem_text, plan_text, encoding),
            domain_name=domain_name,
            domain_text=domain_text,
            problem_text=problem_text,
            plan_text=plan_text,
            encoding=encoding,
            provenance=provenance or Provenance(),
        )

    @property
    def content_id(self) -> str:
        """Hash recomputed from the texts; differs from ``id`` only if the record was altered."""
        return tuple_id(self.domain_text, self.problem_text, self.plan_text, self.encoding)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "domain_name": self.domain_name,
            "domain": self.domain_text,
            "problem": self.problem_text,
            "plan": self.plan_text,
            "encoding": self.encoding.value,
            "provenance": asdict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DatasetTuple":
        return cls(
            id=data["id"],
            domain_name=data["domain_name"],
            domain_text=data["domain"],
            problem_text=data["problem"],
            plan_text=data["plan"],
            encoding=Encoding(data.get("encoding", Encoding.STANDARD.value)),
            provenance=Provenance(**data.get("provenance", {})),
        )


def build_tuple(
    domain: Domain,
    problem: Problem,
    plan: TimedPlan,
    encoding: Union[Encoding, str] = Encoding.STANDARD,
    provenance: Optional[Provenance] = None,
) -> DatasetTuple:
    """Render a parsed triple under ``encoding``; ``domain_name`` keeps the original name."""
    encoding = Encoding(encoding)
    domain_name = domain.name
    if encoding.anonymized:
        domain, problem, plan, _ = anonymize_tuple(domain, problem, plan)
    plan_text = encode_plan(plan) if encoding.compact else render_plan(plan)
    return DatasetTuple.create(
        domain_name,
        render_domain(domain),
        render_problem(problem),
        plan_text,
        encoding,
        provenance,
    )


def load_batch_dir(path: Union[str, Path], encoding: Union[Encoding, str] = Encoding.STANDARD) -> list[DatasetTuple]:
    """
    Read every generated batch (a directory holding ``batch.json``) under ``path``.

    Unsolved slots are skipped. Texts are reparsed and rendered canonically.
    """
    path = Path(path)
    manifests = sorted(path.rglob("batch.json"))
    tuples: list[DatasetTuple] = []
    for manifest_path in manifests:
        batch_dir = manifest_path.parent
        manifest = BatchManifest.load(manifest_path)
        domain = parse_domain((batch_dir / "domain.pddl").read_text(encoding="utf-8"))
        skipped = 0
        for entry in manifest.entries:
            if not entry.get("plan"):
                skipped += 1
                continue
            problem = parse_problem((batch_dir / entry["problem"]).read_text(encoding="utf-8"), domain)
            plan = parse_plan((batch_dir / entry["plan"]).read_text(encoding="utf-8"))
            provenance = Provenance(manifest.dpgc_file, entry.get("seed"), entry.get("planner", ""))
            tuples.append(build_tuple(domain, problem, plan, encoding, provenance))
        logger.info("Loaded %s: %d tuples, %d unsolved", batch_dir, len(manifest.entries) - skipped, skipped)
    return tuples
