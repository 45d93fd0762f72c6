"""First- and second-order formulas: syntax, evaluation, and rank-q equivalence."""

from .evaluate import GUARDED, STANDARD, EvalResult, eval_formula
from .equivalence import EquivResult, equiv_q, equiv_q_explain
from .formula import quantifier_rank
from .parser import format_formula, parse_formula
