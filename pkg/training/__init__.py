from .rewards import RolloutGroup, group_advantages, reward, score_candidates
from .cost_model import CostParams, compare, planner_total, rl_total
from .prompts import export_sft

__all__ = [
    "RolloutGroup",
    "group_advantages",
    "reward",
    "score_candidates",
    "CostParams",
    "compare",
    "planner_total",
    "rl_total",
    "export_sft",
]
