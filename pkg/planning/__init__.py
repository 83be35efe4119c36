from .errors import PddlError
from .model import Domain, Problem, TimedPlan
from .parser import parse_domain, parse_plan, parse_problem
from .render import render, render_domain, render_plan, render_problem

__all__ = [
    "PddlError",
    "Domain",
    "Problem",
    "TimedPlan",
    "parse_domain",
    "parse_problem",
    "parse_plan",
    "render",
    "render_domain",
    "render_problem",
    "render_plan",
]
