from .validator import Outcome, PlanValidator, ValidationReport
from .planner import InternalSolver, SearchConfig
from .external import ExternalSolver
from .dpgc import DpgcConfig, load_dpgc, validate_dpgc
from .generator import generate_batch, generate_problem
from .anonymizer import SymbolMap, anonymize_tuple
from .codec import decode_plan, encode_plan
from .curriculum import curriculum_expand

__all__ = [
    "Outcome",
    "PlanValidator",
    "ValidationReport",
    "InternalSolver",
    "SearchConfig",
    "ExternalSolver",
    "DpgcConfig",
    "load_dpgc",
    "validate_dpgc",
    "generate_batch",
    "generate_problem",
    "SymbolMap",
    "anonymize_tuple",
    "encode_plan",
    "decode_plan",
    "curriculum_expand",
]
