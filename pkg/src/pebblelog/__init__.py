"""Datalog, existential pebble games and MSO/GSO model checking on small finite structures."""

__version__ = "0.1.0"

from .canonical import canonical_eval, soundness_check, synthesize_canonical
from .datalog import (
    DatalogProgram,
    Rule,
    Width,
    derives_goal,
    intersect_program,
    least_fixed_point,
    parse_program,
    union_program,
    width,
)
from .errors import BudgetExceeded, ParseError, PebblelogError, SignatureMismatch, StructureError
from .homomorphism import Homomorphism, hom_exists, hom_search
from .pebble import greatest_strategy_family, lk_game_decision, spoiler_wins
from .structures import (
    Signature,
    Structure,
    canonical_database,
    disjoint_union,
    enumerate_structures,
    format_structure,
    guarded_tuples,
    parse_structure,
    structure,
    word_to_structure,
)

__all__ = [
    "BudgetExceeded",
    "DatalogProgram",
    "Homomorphism",
    "ParseError",
    "PebblelogError",
    "Rule",
    "Signature",
    "SignatureMismatch",
    "Structure",
    "StructureError",
    "Width",
    "canonical_database",
    "canonical_eval",
    "derives_goal",
    "disjoint_union",
    "enumerate_structures",
    "format_structure",
    "greatest_strategy_family",
    "guarded_tuples",
    "hom_exists",
    "hom_search",
    "intersect_program",
    "least_fixed_point",
    "lk_game_decision",
    "parse_program",
    "parse_structure",
    "soundness_check",
    "spoiler_wins",
    "structure",
    "synthesize_canonical",
    "union_program",
    "width",
    "word_to_structure",
]
