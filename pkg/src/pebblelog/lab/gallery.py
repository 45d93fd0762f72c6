"""Named programs, structures, sentences and classes used by the experiments.

Everything is built by code on each call, so the builders themselves are
under test.  ``gallery("path(3)")`` and ``gallery("path", 3)`` are the same.
"""

from __future__ import annotations

import re

from ..canonical import synthesize_canonical
from ..datalog import DatalogProgram, parse_program
from ..errors import PebblelogError
from ..logic.constructions import (
    acyclicity_sentence,
    gso_ladder_sentence,
    henson_outer_sentence,
    henson_tournament,
    ladder_of_word,
)
from ..structures import Signature, Structure, clique, disjoint_union, word_to_structure
from .oracle import ClassOracle

PATH_SIGNATURE = Signature((("S", 1), ("T", 1), ("R", 2)))
RB_SIGNATURE = Signature((("R", 1), ("B", 1)))
UNARY3_SIGNATURE = Signature((("R1", 1), ("R2", 1), ("R3", 1)))

LADDER_SOURCE = """\
#edb S/2 T/2 R/2 N/2
#idb U/2 goal/0
U(x,y) :- S(x,y).
U(x',y') :- U(x,y), N(x,x'), N(y,y'), R(x',y').
goal :- U(x,y), T(x,y).
"""

CRB_SOURCE = """\
#edb R/1 B/1
#idb goal/0
goal :- R(x), B(y).
"""

COMPLEMENT_EXAMPLE_SOURCE = """\
#edb S/1 T/1 R/2
#idb E/2 goal/0
E(x,y) :- S(x), S(y).
E(x,y) :- E(x',y'), R(x',x), R(y',y).
goal :- T(x), E(x,x'), R(x',y).
"""

# small companions so that union/intersect pairs are not trivial
_EXTRA_SOURCES = {
    "ladder_zero_step": "#edb S/2 T/2 R/2 N/2\n#idb goal/0\ngoal :- S(x,y), T(x,y).\n",
    "r_program": "#edb R/1 B/1\n#idb goal/0\ngoal :- R(x).\n",
    "b_program": "#edb R/1 B/1\n#idb goal/0\ngoal :- B(y).\n",
    "edge_program": "#edb E/2\n#idb goal/0\ngoal :- E(x,y).\n",
    "directed_cycle": "#edb E/2\n#idb P/2 goal/0\nP(x,y) :- E(x,y).\nP(x,z) :- P(x,y), E(y,z).\ngoal :- P(x,x).\n",
    "s_to_t_edge": "#edb S/1 T/1 R/2\n#idb goal/0\ngoal :- S(x), R(x,y), T(y).\n",
}


def path(n: int) -> Structure:
    """P_n: S = {1}, T = {n}, R = {(i, i+1)}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Structure(PATH_SIGNATURE, range(1, n + 1), {"S": [(1,)], "T": [(n,)], "R": [(i, i + 1) for i in range(1, n)]})


def unary_point(i: int) -> Structure:
    """The one-element {R1,R2,R3}-structure with only R_i non-empty (``i = 0`` gives all empty)."""
    rel = {f"R{i}": [(1,)]} if i else {}
    return Structure(UNARY3_SIGNATURE, [1], rel)


def unary_csp_oracle() -> ClassOracle:
    """CSP(S1+S2) or CSP(S2+S3) or CSP(S3+S1) over unary R1, R2, R3."""
    s = {i: unary_point(i) for i in (1, 2, 3)}
    pairs = [(1, 2), (2, 3), (3, 1)]
    return ClassOracle.csp_union([disjoint_union(s[i], s[j]) for i, j in pairs], "unary CSP union")


def ladder_program() -> DatalogProgram:
    return parse_program(LADDER_SOURCE)


def crb_program() -> DatalogProgram:
    return parse_program(CRB_SOURCE)


def complement_example_program() -> DatalogProgram:
    return parse_program(COMPLEMENT_EXAMPLE_SOURCE)


def ladder_structure_fig1() -> Structure:
    return ladder_of_word(word_to_structure("aaaabbbb"))


def gallery_programs() -> dict[str, DatalogProgram]:
    """Every Datalog program of the gallery, by name."""
    out = {
        "ladder_program": ladder_program(),
        "crb_program": crb_program(),
        "complement_example_program": complement_example_program(),
    }
    for name, src in _EXTRA_SOURCES.items():
        out[name] = parse_program(src)
    out["k2_canonical_1_2"] = synthesize_canonical(clique(2), 1, 2)
    return out


# pairs with equal EDB signatures, used for union/intersect checks
PROGRAM_PAIRS = (
    ("ladder_program", "ladder_zero_step"),
    ("ladder_program", "ladder_program"),
    ("crb_program", "r_program"),
    ("r_program", "b_program"),
    ("complement_example_program", "s_to_t_edge"),
    ("complement_example_program", "complement_example_program"),
    ("edge_program", "k2_canonical_1_2"),
    ("directed_cycle", "k2_canonical_1_2"),
)

_BUILDERS = {
    "ladder_program": ladder_program,
    "ladder_structure_fig1": ladder_structure_fig1,
    "crb_program": crb_program,
    "complement_example_program": complement_example_program,
    "unary_csp_oracle": unary_csp_oracle,
    "acyclicity_sentence": acyclicity_sentence,
    "henson_outer_sentence": henson_outer_sentence,
    "gso_ladder_sentence": gso_ladder_sentence,
    "path": path,
    "henson": henson_tournament,
}
_PARAMETRIC = {"path", "henson"}
_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*\(\s*(\d+)\s*\)\s*$")


class UnknownArtifact(PebblelogError, KeyError):
    pass


def names() -> list[str]:
    plain = [n for n in _BUILDERS if n not in _PARAMETRIC]
    return plain + [f"{n}(n)" for n in sorted(_PARAMETRIC)] + sorted(_EXTRA_SOURCES) + ["k2_canonical_1_2"]


def gallery(name: str, n: int | None = None):
    m = _CALL.match(name)
    if m:
        if n is not None:
            raise ValueError("parameter given twice")
        name, n = m.group(1), int(m.group(2))
    if name in _PARAMETRIC:
        if n is None:
            raise ValueError(f"{name} needs a size parameter")
        return _BUILDERS[name](n)
    if n is not None:
        raise ValueError(f"{name} takes no parameter")
    if name in _BUILDERS:
        return _BUILDERS[name]()
    if name in _EXTRA_SOURCES or name == "k2_canonical_1_2":
        return gallery_programs()[name]
    raise UnknownArtifact(f"unknown gallery artifact {name!r}; known: {', '.join(names())}")


__all__ = [
    "PATH_SIGNATURE",
    "PROGRAM_PAIRS",
    "RB_SIGNATURE",
    "UNARY3_SIGNATURE",
    "UnknownArtifact",
    "gallery",
    "gallery_programs",
    "names",
    "path",
    "unary_csp_oracle",
    "unary_point",
]
