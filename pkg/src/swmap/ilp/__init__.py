"""ILP generation, LP export and a small exact branch-and-bound oracle."""

from .bnb import BUDGET, INFEASIBLE, OPTIMAL, ExactSolution, exact_solve
from .build import Constraint, IlpModel, Variable, build_ilp, task_candidates
from .lpfile import export_lp, parse_lp, to_lp
