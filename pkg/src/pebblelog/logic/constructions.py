"""Concrete sentences and structures: ladders over words, Henson tournaments, acyclicity."""

from __future__ import annotations

from typing import NamedTuple

from ..errors import StructureError, UnsupportedError
from ..structures import DIGRAPH, WORD_SIGNATURE, Signature, Structure
from .formula import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    ForallSO,
    Formula,
    Not,
    Or,
    conj,
    fresh_name,
    map_atoms,
    variables,
)
from .parser import parse_formula

LADDER_SIGNATURE = Signature((("S", 2), ("T", 2), ("R", 2), ("N", 2)))
HENSON_SIGNATURE = Signature((("X", 1), ("E", 2)))


def acyclicity_sentence() -> Formula:
    """Every non-empty vertex set has a vertex without an edge into the set."""
    return parse_formula("forall X:1 nonempty . exists x in X . forall y in X . ~E(x,y)")


# -- words and ladders ---------------------------------------------------------------


def _check_linear_order(w: Structure):
    if not set(WORD_SIGNATURE.names) <= set(w.signature.names):
        raise StructureError(f"expected a word structure over [{WORD_SIGNATURE}]")
    lt = w.rel("<")
    dom = w.domain
    for x in dom:
        if (x, x) in lt:
            raise StructureError("< is not irreflexive")
        for y in dom:
            if x != y and ((x, y) in lt) == ((y, x) in lt):
                raise StructureError(f"< does not order {x} and {y} strictly")
    for x, y in lt:
        for z in dom:
            if (y, z) in lt and (x, z) not in lt:
                raise StructureError("< is not transitive")


def ladder_of_word(w: Structure) -> Structure:
    """The {S,T,R,N}-structure read off a word structure.

    S pairs the least position with the first ``b``; T pairs the last ``a``
    with the greatest position; R is the order; N the successor relation.
    """
    _check_linear_order(w)
    lt = w.rel("<")
    below = {x: sum((y, x) in lt for y in w.domain) for x in w.domain}
    order = sorted(w.domain, key=below.get)
    a_pos = [x for x in order if (x,) in w.rel("P_a")]
    b_pos = [x for x in order if (x,) in w.rel("P_b")]
    S = [(order[0], b_pos[0])] if b_pos else []
    T = [(a_pos[-1], order[-1])] if a_pos else []
    N = list(zip(order, order[1:]))
    return Structure(LADDER_SIGNATURE, w.domain, {"S": S, "T": T, "R": lt, "N": N})


def ladder_formulas(x: str, y: str, z: str) -> dict[str, Formula]:
    """The defining formulas of S, T, R, N in terms of P_a, P_b and <, with bound variable ``z``."""
    lt = lambda u, v: Atom("<", (u, v))  # noqa: E731
    pa = lambda u: Atom("P_a", (u,))  # noqa: E731
    pb = lambda u: Atom("P_b", (u,))  # noqa: E731
    return {
        "S": conj(
            Forall(z, Or((Eq(z, x), lt(x, z)))),
            pb(y),
            Not(Exists(z, And((lt(z, y), pb(z))))),
        ),
        "T": conj(
            pa(x),
            Not(Exists(z, And((lt(x, z), pa(z))))),
            Forall(z, Or((Eq(z, y), lt(z, y)))),
        ),
        "R": lt(x, y),
        "N": conj(lt(x, y), Not(Exists(z, And((lt(x, z), lt(z, y)))))),
    }


def a_before_b_sentence() -> Formula:
    """No ``a`` follows a ``b`` position: if x < y and P_a(y) then P_a(x)."""
    return parse_formula("forall x . forall y . (x < y & P_a(y)) -> P_a(x)")


def substitute_ladder(phi: Formula, with_order_axiom: bool = False) -> Formula:
    """Replace each S/T/R/N atom by its defining formula over P_a, P_b, <."""
    taken = variables(phi)
    z = fresh_name("z", taken)

    def sub(atom: Atom) -> Formula:
        if atom.rel not in LADDER_SIGNATURE:
            if atom.rel in ("P_a", "P_b", "<"):
                raise UnsupportedError(f"atom {atom.rel} already over the word signature")
            return atom
        if len(atom.args) != 2:
            raise UnsupportedError(f"{atom.rel} must be binary")
        return ladder_formulas(atom.args[0], atom.args[1], z)[atom.rel]

    for f in _atoms(phi):
        if f.rel not in LADDER_SIGNATURE and not _is_bound_so(phi, f.rel):
            raise UnsupportedError(f"unexpected symbol {f.rel}")
    out = map_atoms(phi, lambda at: at if _is_bound_so(phi, at.rel) else sub(at))
    if with_order_axiom:
        out = conj(out, a_before_b_sentence())
    return out


def _atoms(phi):
    from .formula import subformulas

    return [f for f in subformulas(phi) if isinstance(f, Atom)]


def _is_bound_so(phi, name):
    from .formula import SO_QUANTIFIERS, subformulas

    return any(isinstance(f, SO_QUANTIFIERS) and f.var == name for f in subformulas(phi))


def gso_ladder_sentence() -> Formula:
    """Universal second-order sentence for the ladder program, meant for guarded semantics.

    Every binary relation that contains S and is closed under the ladder
    step meets T.  The least such relation is the IDB computed by the
    program, whose tuples are all guarded, so quantifying over guarded
    relations only gives the same answer.
    """
    return parse_formula(
        "forall U:2 . ((forall x, y . S(x,y) -> U(x,y))"
        " & (forall x, y, x', y' . (U(x,y) & N(x,x') & N(y,y') & R(x',y')) -> U(x',y')))"
        " -> (exists x, y . U(x,y) & T(x,y))"
    )


# -- Henson tournaments ---------------------------------------------------------------


def henson_tournament(n: int) -> Structure:
    """T_n on vertices 0..n+1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    edges = {(i, i + 1) for i in range(n + 1)}
    edges.add((0, n + 1))
    for i in range(n + 2):
        for j in range(n + 2):
            if i + 1 < j and (i, j) != (0, n + 1):
                edges.add((j, i))
    return Structure(DIGRAPH, range(n + 2), {"E": edges})


def _succ(S: str, x: str, x2: str, w: str) -> str:
    # x2 is the immediate E-predecessor of x inside S
    return f"(E({x2},{x}) & ~(exists {w} in {S} . E({x2},{w}) & E({w},{x})))"


def _endpoint(own: str, other: str) -> str:
    return (
        f"({own}(t) & (forall x in {own} . x != t -> E(t,x))"
        f" & (exists u in {other} . E(u,t))"
        f" & (forall u in {other} . E(u,t) -> (forall y in {other} . y != u -> E(u,y))))"
    )


HENSON_PHI_TEXT = f"""
exists A:1, B:1 . exists s, t, a, b .
  X(s) & X(t) & X(a) & X(b)
  & (forall x . (A(x) | B(x)) <-> (X(x) & x != s))
  & (forall x . ~(A(x) & B(x)))
  & A(a) & B(b) & t != s & t != a & t != b
  % E is a tournament on X
  & (forall x in X . ~E(x,x))
  & (forall x in X . forall y in X . x != y -> ((E(x,y) | E(y,x)) & ~(E(x,y) & E(y,x))))
  % E is a linear order on A with top a, and on B with top b
  & (forall x in A . forall y in A . forall z in A . (E(x,y) & E(y,z)) -> E(x,z))
  & (forall x in A . x != a -> E(x,a))
  & (forall x in B . forall y in B . forall z in B . (E(x,y) & E(y,z)) -> E(x,z))
  & (forall x in B . x != b -> E(x,b))
  % the start
  & E(s,t) & E(s,a) & E(a,b)
  & (forall x in X . (x != s & x != a & x != t) -> E(x,s))
  & (forall y in B . y != b -> E(y,a))
  % stepping down A moves the cut in B by one
  & (forall x in A . forall x' in A . {_succ("A", "x", "x'", "w")} ->
      (exists y0 in B . E(x,y0) & (forall y' in B . E(y',y0) -> E(y',x))
        & (forall y in B . E(x',y) <->
            ((E(x,y) & y != y0) | {_succ("B", "y0", "y", "w")} | {_succ("B", "y", "y0", "w")}))))
  % the end
  & ({_endpoint("A", "B")} | {_endpoint("B", "A")})
"""


class HensonSentences(NamedTuple):
    phi: Formula  # over {X, E}
    outer: Formula  # over {E}


def henson_phi() -> Formula:
    """True on an {X,E}-structure iff E restricted to X is some T_n with n >= 2."""
    return parse_formula(HENSON_PHI_TEXT)


def henson_outer_sentence() -> Formula:
    """Loopless and no induced copy of any T_n."""
    phi = henson_phi()
    return And((Forall("x", Not(Atom("E", ("x", "x")))), ForallSO("X", 1, Not(phi))))


def henson_sentence() -> HensonSentences:
    return HensonSentences(henson_phi(), henson_outer_sentence())
