"""Exact solver for integer programs whose constraint matrix has two
non-zeros per row apart from a few extra rows and columns."""

from .exactmat import ExactMatrix, det, max_abs_subdet, is_totally_delta_modular
from .sgraph import SignedGraph, from_incidence, to_incidence, ocp_exact, alt_tree, alt_graph_exact
from .ipcore import Problem1Instance, Problem2Instance, Solution, Status, brute_force_solve, lp_solve
from .dpengine import SolverOptions, solve_problem2
from .reduction import PokInstance, pok_to_ip, solve_pok, solve_problem1

__version__ = "0.1.0"
