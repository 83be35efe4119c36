"""Tests for the training cost model."""

import math
import random

import pytest

from training.cost_model import (
    COST_FUNCTIONS,
    CostParams,
    IncompatibleParams,
    PolynomialCost,
    TableCost,
    break_even_epochs,
    compare,
    cost_function,
    inference_total,
    load_params,
    planner_total,
    rl_total,
)


def zero_validation(n, L):
    return 0.0


@pytest.fixture
def unit_params():
    """One instance, every cost function at its unit default."""

    def build(**overrides):
        values = dict(n=[1.0], L=[1.0], T=[1.0], E=1, G=1)
        values.update(overrides)
        return CostParams(**values)

    return build


class TestTotals:
    """Tests for the per-regime totals."""

    def test_planner_constants(self, unit_params):
        report = planner_total(unit_params())
        assert report.data_generation == 2
        assert report.training == 2
        assert report.total == 4

    def test_rl_constants(self, unit_params):
        """G = 3 with unit costs: 1 for generation, 3 * 3 for training."""
        report = rl_total(unit_params(G=3))
        assert report.data_generation == 1
        assert report.training == 9
        assert report.total == 10

    def test_equal_training_without_validation(self, unit_params):
        params = unit_params(costs={"validation": zero_validation})
        assert rl_total(params).training == planner_total(params).training

    def test_epochs_scale_training_only(self, unit_params):
        report = planner_total(unit_params(E=5))
        assert report.data_generation == 2
        assert report.training == 10

    def test_inference(self, unit_params):
        assert inference_total(unit_params(n=[1.0, 2.0], L=[1.0, 1.0], T=[3.0, 4.0])).total == 2

    def test_items(self, unit_params):
        assert set(rl_total(unit_params()).to_dict()["items"]) == {
            "generation",
            "language_model",
            "validation",
            "update",
        }


class TestCompare:
    """Tests for compare and break_even_epochs."""

    def test_planner_cheaper(self, unit_params):
        comparison = compare(unit_params(), unit_params(G=3))
        assert comparison.delta == 6
        assert comparison.cheaper == "planner-based"
        assert comparison.break_even_epochs == 1
        assert "E = 1" in comparison.narrative()

    def test_rl_cheaper_forever(self, unit_params):
        """Without validation cost and G = 1 the verifier regime never overtakes."""
        rl = unit_params(costs={"validation": zero_validation})
        comparison = compare(unit_params(), rl, e_max=50)
        assert comparison.cheaper == "verifier-reward"
        assert comparison.delta == -1
        assert comparison.break_even_epochs is None
        assert "E <= 50" in comparison.narrative()

    def test_equal(self, unit_params):
        rl = unit_params(costs={"validation": zero_validation, "generation": lambda n: 2.0})
        assert compare(unit_params(), rl).cheaper == "equal"

    def test_break_even_zero(self, unit_params):
        """A verifier regime with costlier generation exceeds before any training."""
        rl = unit_params(costs={"generation": lambda n: 5.0})
        assert break_even_epochs(unit_params(), rl) == 0

    def test_to_dict(self, unit_params):
        data = compare(unit_params(), unit_params(G=3)).to_dict()
        assert data["planner"]["total"] == 4
        assert data["rl"]["total"] == 10
        assert data["cheaper"] == "planner-based"

    def test_mismatched_instance_counts(self, unit_params):
        other = unit_params(n=[1.0, 1.0], L=[1.0, 1.0], T=[1.0, 1.0])
        with pytest.raises(IncompatibleParams):
            compare(unit_params(), other)


class TestCostFunctions:
    """Tests for JSON cost functions."""

    def test_polynomial(self):
        cost = PolynomialCost(("n", "L"), [{"coef": 2, "powers": {"n": 1, "L": 2}}, {"coef": 1}])
        assert cost(3, 2) == 25

    def test_table(self):
        cost = TableCost(("n",), {"12": 3})
        assert cost(12) == 3
        with pytest.raises(IncompatibleParams):
            cost(13)

    def test_constant(self):
        assert cost_function("planner", 7)(100) == 7

    @pytest.mark.parametrize(
        "spec",
        [-1, {"terms": [{"coef": -1}]}, {"terms": [{"powers": {"T": 1}}]}, "cheap", {"table": {"1": -2}}],
    )
    def test_rejected(self, spec):
        with pytest.raises(IncompatibleParams):
            cost_function("planner", spec)


class TestParams:
    """Tests for CostParams construction and loading."""

    def test_validation(self):
        with pytest.raises(IncompatibleParams):
            CostParams(n=[], L=[], T=[])
        with pytest.raises(IncompatibleParams):
            CostParams(n=[1.0], L=[1.0, 2.0], T=[1.0])
        with pytest.raises(IncompatibleParams):
            CostParams(n=[1.0], L=[1.0], T=[1.0], G=0)
        with pytest.raises(IncompatibleParams):
            CostParams(n=[1.0], L=[1.0], T=[1.0], costs={"storage": lambda n: 1.0})

    def test_negative_callable(self, unit_params):
        params = unit_params(costs={"update": lambda P, T: -1.0})
        with pytest.raises(IncompatibleParams):
            planner_total(params)

    def test_scalar_requires_count(self):
        with pytest.raises(IncompatibleParams):
            CostParams.from_dict({"n": 5, "L": 2, "T": 10})

    def test_load_fixture(self, fixtures_dir):
        planner, rl = load_params(fixtures_dir / "cost_params.json")
        assert planner.N == rl.N == 10
        assert planner_total(planner).total == pytest.approx(1030)
        assert rl_total(rl).total == pytest.approx(82)

    def test_regime_overrides(self, temp_dir):
        path = temp_dir / "params.json"
        path.write_text('{"N": 2, "n": 1, "L": 1, "T": 1, "planner": {"E": 3}, "rl": {"G": 4}}')
        planner, rl = load_params(path)
        assert (planner.E, planner.G) == (3, 1)
        assert (rl.E, rl.G) == (1, 4)

    def test_invalid_json(self, temp_dir):
        path = temp_dir / "params.json"
        path.write_text("{not json")
        with pytest.raises(IncompatibleParams):
            load_params(path)


def reference_totals(data):
    """Planner and verifier-reward (data, training) totals written out directly from the raw draw."""

    def poly(name, **values):
        return sum(
            term["coef"] * math.prod(values[v] ** p for v, p in term["powers"].items())
            for term in data["costs"][name]["terms"]
        )

    generation = planner = model = update = validation = 0.0
    for n, L, T in zip(data["n"], data["L"], data["T"]):
        generation += poly("generation", n=n)
        planner += poly("planner", n=n)
        model += poly("language_model", P=data["P"], T=T)
        update += poly("update", P=data["P"], T=T)
        validation += poly("validation", n=n, L=L)
    E, G = data["E"], data["G"]
    return (
        (generation + planner, E * (model + update)),
        (generation, E * G * (model + validation + update)),
    )


def random_draw(rng):
    size = rng.randint(1, 8)

    def terms(variables):
        return {"terms": [
            {"coef": rng.uniform(0, 5), "powers": {v: rng.randint(0, 2) for v in variables if rng.random() < 0.7}}
            for _ in range(rng.randint(1, 3))
        ]}

    return {
        "n": [float(rng.randint(1, 40)) for _ in range(size)],
        "L": [float(rng.randint(1, 60)) for _ in range(size)],
        "T": [float(rng.randint(50, 4000)) for _ in range(size)],
        "E": rng.randint(0, 20),
        "G": rng.randint(1, 16),
        "P": rng.uniform(0.1, 10.0),
        "costs": {name: terms(variables) for name, variables in COST_FUNCTIONS.items()},
    }


class TestRandomParameters:
    """Totals for random parameter draws match a direct evaluation."""

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_reference(self, seed):
        data = random_draw(random.Random(seed))
        params = CostParams.from_dict(data)
        (planner_data, planner_training), (rl_data, rl_training) = reference_totals(data)
        planner, rl = planner_total(params), rl_total(params)
        assert math.isclose(planner.data_generation, planner_data, rel_tol=1e-9)
        assert math.isclose(planner.training, planner_training, rel_tol=1e-9)
        assert math.isclose(rl.data_generation, rl_data, rel_tol=1e-9)
        assert math.isclose(rl.training, rl_training, rel_tol=1e-9)
        assert math.isclose(rl.total, rl_data + rl_training, rel_tol=1e-9)

    @pytest.mark.parametrize("seed", range(100))
    def test_single_candidate_without_validation(self, seed):
        """G = 1 and zero validation cost leave both training terms equal."""
        data = random_draw(random.Random(seed))
        data["G"] = 1
        data["costs"]["validation"] = 0
        params = CostParams.from_dict(data)
        assert rl_total(params).training == planner_total(params).training
