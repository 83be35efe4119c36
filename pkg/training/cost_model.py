"""Total training cost of planner-generated datasets versus verifier-reward training.

Two regimes are compared over N instances with sizes n_i, plan lengths L_i and
token totals T_i:

* planner-based: every instance is generated and solved by a planner up front,
  then the model trains for E epochs on (instance, plan) pairs.
* verifier-reward: instances are generated without plans; each epoch samples G
  candidates per instance and scores them with the validator.

Cost functions are supplied by the caller, as Python callables or as JSON
polynomials / tables.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from utils.fileio import read_text

logger = logging.getLogger(__name__)

DEFAULT_E_MAX = 1000

# name -> variables the callable takes, in positional order
COST_FUNCTIONS: dict[str, tuple[str, ...]] = {
    "planner": ("n",),
    "generation": ("n",),
    "validation": ("n", "L"),
    "language_model": ("P", "T"),
    "update": ("P", "T"),
}


class IncompatibleParams(ValueError):
    """Parameter sets that cannot be compared or are internally inconsistent."""


class PolynomialCost:
    """Sum of ``coef * prod(var ** power)`` terms over named variables."""

    def __init__(self, variables: Sequence[str], terms: Sequence[dict[str, Any]]):
        self.variables = tuple(variables)
        self.terms = []
        for term in terms:
            coef = float(term.get("coef", 1.0))
            powers = {k: float(v) for k, v in term.get("powers", {}).items()}
            unknown = set(powers) - set(self.variables)
            if unknown:
                raise IncompatibleParams(f"cost term uses {sorted(unknown)}, expected {self.variables}")
            if coef < 0 or any(p < 0 for p in powers.values()):
                raise IncompatibleParams("cost terms need non-negative coefficients and powers")
            self.terms.append((coef, powers))

    def __call__(self, *args: float) -> float:
        values = dict(zip(self.variables, args))
        return math.fsum(
            coef * math.prod(values[v] ** p for v, p in powers.items())
            for coef, powers in self.terms
        )


class TableCost:
    """Lookup table keyed by the comma-joined argument values, e.g. ``"12"`` or ``"12,5"``."""

    def __init__(self, variables: Sequence[str], table: dict[str, float]):
        self.variables = tuple(variables)
        self.table = {str(k): float(v) for k, v in table.items()}
        if any(v < 0 for v in self.table.values()):
            raise IncompatibleParams("cost tables must be non-negative")

    @staticmethod
    def _key(value: float) -> str:
        return str(int(value)) if float(value).is_integer() else repr(float(value))

    def __call__(self, *args: float) -> float:
        key = ",".join(self._key(a) for a in args)
        try:
            return self.table[key]
        except KeyError:
            raise IncompatibleParams(f"cost table over {self.variables} has no entry for {key}") from None


def unit_cost(*_args: float) -> float:
    return 1.0


def cost_function(name: str, spec: Any) -> Callable[..., float]:
    """
    Build a cost callable from its JSON form.

    Accepted forms: a number (constant), ``{"terms": [...]}`` (polynomial) or
    ``{"table": {...}}``.
    """
    variables = COST_FUNCTIONS[name]
    if isinstance(spec, (int, float)):
        if spec < 0:
            raise IncompatibleParams(f"{name}: constant cost must be non-negative")
        return PolynomialCost(variables, [{"coef": spec}])
    if isinstance(spec, dict) and "terms" in spec:
        return PolynomialCost(variables, spec["terms"])
    if isinstance(spec, dict) and "table" in spec:
        return TableCost(variables, spec["table"])
    raise IncompatibleParams(f"{name}: unsupported cost specification {spec!r}")


@dataclass
class CostParams:
    """
    Inputs of the cost formulas.

    Attributes:
        n: Instance sizes n_i (length N)
        L: Plan lengths L_i
        T: Token totals T_i (input plus output tokens)
        E: Training epochs
        G: Candidates sampled per instance and epoch
        P: Model parameter scalar, passed through to the model cost functions
        costs: Cost callables keyed by ``planner``, ``generation``, ``validation``,
            ``language_model`` and ``update``; missing ones default to unit cost
    """

    n: list[float]
    L: list[float]
    T: list[float]
    E: int = 1
    G: int = 1
    P: float = 1.0
    costs: dict[str, Callable[..., float]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.n) < 1:
            raise IncompatibleParams("N must be at least 1")
        if not len(self.n) == len(self.L) == len(self.T):
            raise IncompatibleParams("n, L and T must all have length N")
        if self.E < 0 or self.G < 1:
            raise IncompatibleParams("E must be >= 0 and G >= 1")
        unknown = set(self.costs) - set(COST_FUNCTIONS)
        if unknown:
            raise IncompatibleParams(f"unknown cost functions {sorted(unknown)}")
        for name in COST_FUNCTIONS:
            if name not in self.costs:
                logger.warning("No %s cost function given; using unit cost", name)
                self.costs[name] = unit_cost

    @property
    def N(self) -> int:
        return len(self.n)

    def cost(self, name: str, *args: float) -> float:
        value = float(self.costs[name](*args))
        if value < 0:
            raise IncompatibleParams(f"{name} cost returned a negative value {value}")
        return value

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CostParams":
        """
        Build parameters from JSON data.

        ``n``, ``L`` and ``T`` are lists or scalars; scalars are broadcast to
        ``N`` instances (``N`` is then required).
        """
        count = data.get("N")
        sequences = {}
        for key in ("n", "L", "T"):
            value = data.get(key, 1)
            if isinstance(value, list):
                sequences[key] = [float(v) for v in value]
            else:
                if count is None:
                    raise IncompatibleParams(f"scalar {key} requires N")
                sequences[key] = [float(value)] * int(count)
        if count is not None and len(sequences["n"]) != int(count):
            raise IncompatibleParams(f"N = {count} but n has {len(sequences['n'])} entries")
        costs = {name: cost_function(name, spec) for name, spec in data.get("costs", {}).items()
                 if name in COST_FUNCTIONS}
        unknown = set(data.get("costs", {})) - set(COST_FUNCTIONS)
        if unknown:
            raise IncompatibleParams(f"unknown cost functions {sorted(unknown)}")
        return cls(
            n=sequences["n"],
            L=sequences["L"],
            T=sequences["T"],
            E=int(data.get("E", 1)),
            G=int(data.get("G", 1)),
            P=float(data.get("P", 1.0)),
            costs=costs,
        )


def load_params(path: Union[str, Path]) -> tuple[CostParams, CostParams]:
    """
    Load (planner-regime, verifier-regime) parameters from a JSON file.

    The file holds either one parameter object used for both regimes, or
    ``{"planner": {...}, "rl": {...}}``; keys outside those two objects are
    shared defaults.
    """
    try:
        data = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise IncompatibleParams(f"{path}: invalid JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise IncompatibleParams(f"{path}: expected a JSON object")
    shared = {k: v for k, v in data.items() if k not in ("planner", "rl")}
    planner_data = {**shared, **data.get("planner", {})}
    rl_data = {**shared, **data.get("rl", {})}
    return CostParams.from_dict(planner_data), CostParams.from_dict(rl_data)


@dataclass(frozen=True)
class CostReport:
    regime: str
    data_generation: float
    training: float
    items: dict[str, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.data_generation + self.training

    def to_dict(self) -> dict[str, Any]:
        return {
            "regime": self.regime,
            "data_generation": self.data_generation,
            "training": self.training,
            "total": self.total,
            "items": dict(self.items),
        }


def _sum(params: CostParams, name: str) -> float:
    variables = COST_FUNCTIONS[name]
    total = []
    for i in range(params.N):
        values = {"n": params.n[i], "L": params.L[i], "T": params.T[i], "P": params.P}
        total.append(params.cost(name, *(values[v] for v in variables)))
    return math.fsum(total)


def planner_total(params: CostParams) -> CostReport:
    """Σ(C_generation + C_planner) + E·Σ(C_language_model + C_update)."""
    items = {name: _sum(params, name) for name in ("generation", "planner", "language_model", "update")}
    return CostReport(
        regime="planner",
        data_generation=items["generation"] + items["planner"],
        training=params.E * (items["language_model"] + items["update"]),
        items=items,
    )


def rl_total(params: CostParams) -> CostReport:
    """ΣC_generation + E·G·Σ(C_language_model + C_validation + C_update)."""
    items = {
        name: _sum(params, name) for name in ("generation", "language_model", "validation", "update")
    }
    return CostReport(
        regime="verifier-reward",
        data_generation=items["generation"],
        training=params.E * params.G * (items["language_model"] + items["validation"] + items["update"]),
        items=items,
    )


def inference_total(params: CostParams) -> CostReport:
    """ΣC_language_model: one forward generation per instance."""
    value = _sum(params, "language_model")
    return CostReport(regime="inference", data_generation=0.0, training=value, items={"language_model": value})


@dataclass(frozen=True)
class Comparison:
    planner: CostReport
    rl: CostReport
    break_even_epochs: Optional[int]
    e_max: int

    @property
    def delta(self) -> float:
        """Verifier-reward total minus planner-based total."""
        return self.rl.total - self.planner.total

    @property
    def cheaper(self) -> str:
        if self.delta < 0:
            return "verifier-reward"
        if self.delta > 0:
            return "planner-based"
        return "equal"

    def narrative(self) -> str:
        if self.cheaper == "equal":
            head = "Both regimes cost the same."
        else:
            head = f"{self.cheaper} training is cheaper by {abs(self.delta):g}."
        if self.break_even_epochs is None:
            tail = f"Verifier-reward stays at or below planner-based cost for every E <= {self.e_max}."
        else:
            tail = (
                "Verifier-reward shifts cost from dataset generation to training; "
                f"it exceeds planner-based cost from E = {self.break_even_epochs}."
            )
        return f"{head} {tail}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "planner": self.planner.to_dict(),
            "rl": self.rl.to_dict(),
            "delta": self.delta,
            "cheaper": self.cheaper,
            "break_even_epochs": self.break_even_epochs,
            "e_max": self.e_max,
            "narrative": self.narrative(),
        }


def break_even_epochs(params_planner: CostParams, params_rl: CostParams, e_max: int = DEFAULT_E_MAX) -> Optional[int]:
    """Smallest integer E in [0, e_max] where the verifier-reward total exceeds the planner total."""
    # both totals are affine in E
    planner = planner_total(replace(params_planner, E=1))
    rl = rl_total(replace(params_rl, E=1))
    for epochs in range(e_max + 1):
        if rl.data_generation + epochs * rl.training > planner.data_generation + epochs * planner.training:
            return epochs
    return None


def compare(params_planner: CostParams, params_rl: CostParams, e_max: int = DEFAULT_E_MAX) -> Comparison:
    """
    Compare both regimes at their configured epochs and locate the break-even epoch.

    Raises:
        IncompatibleParams: When the two parameter sets describe different instance counts
    """
    if params_planner.N != params_rl.N:
        raise IncompatibleParams(f"N differs: {params_planner.N} vs {params_rl.N}")
    return Comparison(
        planner=planner_total(params_planner),
        rl=rl_total(params_rl),
        break_even_epochs=break_even_epochs(params_planner, params_rl, e_max),
        e_max=e_max,
    )
