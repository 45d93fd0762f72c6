"""Closure properties of classes and the bounded disjoint-union equivalence.

``hom_closure_check`` does not test all pairs ``a -> b``.  Every
homomorphism between structures of at most ``n`` elements factors into
steps that never leave that size range: identifying two elements, then
adding an isolated element or a single fact.  Checking membership
along these one-step homomorphisms is therefore equivalent to checking
every pair, and far cheaper.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import PebblelogError
from ..homomorphism import hom_exists
from ..structures import Structure, canonical_form, disjoint_union, enumerate_structures
from .oracle import ClassOracle


class PreconditionError(PebblelogError, ValueError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


def elementary_successors(a: Structure, size_bound: int):
    """Structures reachable from ``a`` by one elementary homomorphism, within ``size_bound``."""
    sig = a.signature
    # add one fact
    for name, ar in sig.relations:
        have = a.rel(name)
        for t in itertools.product(a.domain, repeat=ar):
            if t not in have:
                yield a.replace(relations={name: have | {t}})
    # add an isolated element
    if len(a) < size_bound:
        yield a.replace(domain=a.domain + (a.domain[-1] + 1,))
    # identify two elements
    for x, y in itertools.combinations(a.domain, 2):
        m = {e: (x if e == y else e) for e in a.domain}
        rel = {n: {tuple(m[e] for e in t) for t in f} for n, f in a.relations.items()}
        consts = {c: m[e] for c, e in a.constants.items()}
        yield Structure(sig, [e for e in a.domain if e != y], rel, consts)


def hom_closure_check(o: ClassOracle, size_bound: int, direction: str = "class", budget: int | None = None):
    """``True`` if membership (``direction="class"``) or non-membership
    (``"complement"``) is preserved along every homomorphism between
    structures of at most ``size_bound`` elements; otherwise the first
    violating pair ``(a, b)``."""
    if direction not in ("class", "complement"):
        raise ValueError("direction must be 'class' or 'complement'")
    keep = direction == "class"
    for a in enumerate_structures(o.signature, size_bound, up_to_iso=True, budget=budget):
        if o(a) != keep:
            continue
        for b in elementary_successors(a, size_bound):
            if o(b) != keep:
                return (a, b)
    return True


@dataclass
class SimPartition:
    universe: list
    blocks: list  # lists of structures from ``universe``
    member_bound: int
    witness_bound: int
    witnesses: list = field(default_factory=list)
    note: str = (
        "bounded approximation: only witnesses up to witness_bound are tried, "
        "so blocks may be coarser than the true relation"
    )

    def block_of(self, a: Structure) -> int:
        key = canonical_form(a)
        for i, block in enumerate(self.blocks):
            if any(canonical_form(m) == key for m in block):
                return i
        raise KeyError("structure not in the universe")

    def __len__(self):
        return len(self.blocks)


def class_members(o: ClassOracle, size_bound: int, budget: int | None = None) -> list:
    """Members of the class up to ``size_bound`` elements, one per isomorphism type."""
    return [a for a in enumerate_structures(o.signature, size_bound, up_to_iso=True, budget=budget) if o(a)]


def sim_partition(o: ClassOracle, member_bound: int, witness_bound: int, budget: int | None = None) -> SimPartition:
    """Group class members by the set of witnesses ``c`` with ``a + c`` in the class.

    Only defined when the complement of the class is closed under
    homomorphisms; that is checked first up to ``member_bound``.
    """
    pre = hom_closure_check(o, member_bound, "complement", budget)
    if pre is not True:
        raise PreconditionError("complement of the class is not closed under homomorphisms", pre)
    universe = class_members(o, member_bound, budget)
    witnesses = class_members(o, witness_bound, budget)
    blocks = {}
    for a in universe:
        profile = tuple(o(disjoint_union(a, c)) for c in witnesses)
        blocks.setdefault(profile, []).append(a)
    return SimPartition(universe, list(blocks.values()), member_bound, witness_bound, witnesses)


def joint_hom_check(
    o: ClassOracle,
    size_bound: int,
    members: list | None = None,
    witness_bound: int | None = None,
    budget: int | None = None,
):
    """``True`` if every pair of members has a common homomorphic image in the class.

    Pairs come from ``members`` if given, else from all members up to
    ``size_bound`` elements.  The common image ``c`` is searched among
    members with at most ``witness_bound`` elements (default: the size
    of the disjoint union of the pair), after trying the union itself and
    the two members.  Returns the first pair without a witness otherwise.
    """
    if members is None:
        members = class_members(o, size_bound, budget)
    else:
        members = [m for m in members if len(m) <= size_bound]
        for m in members:
            if not o(m):
                raise PreconditionError("listed structure is not in the class", m)
    pool = {}

    def candidates(n):
        if n not in pool:
            pool[n] = list(enumerate_structures(o.signature, n, up_to_iso=True, budget=budget))
        return pool[n]

    for i, a in enumerate(members):
        for b in members[i:]:
            if o(disjoint_union(a, b)) or hom_exists(b, a) or hom_exists(a, b):
                continue
            bound = witness_bound if witness_bound is not None else len(a) + len(b)
            if not any(hom_exists(a, c) and hom_exists(b, c) and o(c) for c in candidates(bound)):
                return (a, b)
    return True
