"""Homomorphisms between finite structures.

``hom_search`` walks the source domain in order and tries target values in
ascending order, so the first witness it finds is the lexicographically
least one.  ``hom_exists`` only answers yes/no and is free to reorder
variables (most constrained first), which is much faster on larger inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import SignatureMismatch, StructureError
from .structures import Structure


@dataclass(frozen=True)
class Homomorphism:
    source: Structure
    target: Structure
    map: Mapping[int, int] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "map", dict(self.map))
        if set(self.map) != set(self.source.domain):
            raise StructureError("homomorphism must be total on the source domain")
        if not is_homomorphism(self.source, self.target, self.map):
            raise StructureError("map does not preserve all facts and constants")

    def __call__(self, element):
        return self.map[element]

    def items(self):
        return sorted(self.map.items())


def _check(a: Structure, b: Structure):
    if not a.signature.same_as(b.signature):
        raise SignatureMismatch(f"signatures differ: [{a.signature}] vs [{b.signature}]")


def is_homomorphism(a: Structure, b: Structure, h: Mapping[int, int]) -> bool:
    for c, e in a.constants.items():
        if h.get(e) != b.constants.get(c):
            return False
    for name in a.signature.names:
        target = b.rel(name)
        for t in a.rel(name):
            if tuple(h[x] for x in t) not in target:
                return False
    return True


def is_partial_homomorphism(a: Structure, b: Structure, h: Mapping[int, int]) -> bool:
    """Facts of ``a`` lying inside ``dom(h)`` are preserved; constants in ``dom(h)`` too."""
    for c, e in a.constants.items():
        if e in h and h[e] != b.constants[c]:
            return False
    for name in a.signature.names:
        target = b.rel(name)
        for t in a.rel(name):
            if all(x in h for x in t) and tuple(h[x] for x in t) not in target:
                return False
    return True


class _Problem:
    """Shared preprocessing: per-variable facts and a support cache."""

    def __init__(self, a: Structure, b: Structure):
        self.a = a
        self.b = b
        self.vars = list(a.domain)
        self.values = list(b.domain)
        self.facts_of = {v: [] for v in self.vars}
        for name in a.signature.names:
            for t in a.rel(name):
                for v in set(t):
                    self.facts_of[v].append((name, t))
        self._support = {}
        self.fixed = {}
        for c, e in a.constants.items():
            want = b.constants[c]
            if self.fixed.setdefault(e, want) != want:
                self.fixed[e] = None  # two constants on one element, images differ

    def supported(self, name, t, h) -> bool:
        """Some target fact agrees with ``h`` on the assigned entries of ``t``."""
        pos = tuple(i for i, x in enumerate(t) if x in h)
        vals = tuple(h[t[i]] for i in pos)
        if len(pos) == len(t):
            # repeated variables are handled since vals come from one map
            return vals in self.b.rel(name)
        key = (name, pos, vals, tuple(t[i] == t[j] for i in range(len(t)) for j in range(len(t))))
        hit = self._support.get(key)
        if hit is None:
            hit = False
            for s in self.b.rel(name):
                if all(s[i] == v for i, v in zip(pos, vals)) and all(
                    s[i] == s[j] for i in range(len(t)) for j in range(len(t)) if t[i] == t[j]
                ):
                    hit = True
                    break
            self._support[key] = hit
        return hit

    def allowed(self, v):
        f = self.fixed.get(v, ...)
        if f is ...:
            return self.values
        return [] if f is None else [f]


def hom_search(a: Structure, b: Structure) -> Homomorphism | None:
    """Lexicographically least homomorphism ``a -> b`` or ``None``."""
    _check(a, b)
    p = _Problem(a, b)
    h = {}
    order = p.vars

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for val in p.allowed(v):
            h[v] = val
            if all(p.supported(n, t, h) for n, t in p.facts_of[v]) and extend(i + 1):
                return True
            del h[v]
        return False

    if extend(0):
        return Homomorphism(a, b, h)
    return None


def hom_exists(a: Structure, b: Structure) -> bool:
    """Existence only, with most-constrained-variable ordering."""
    _check(a, b)
    p = _Problem(a, b)
    cand = {v: set(p.allowed(v)) for v in p.vars}
    h = {}
    # unary and fully-repeated facts prune up front
    for v in p.vars:
        cand[v] = {x for x in cand[v] if all(p.supported(n, t, {v: x}) for n, t in p.facts_of[v] if set(t) == {v})}
        if not cand[v]:
            return False

    def solve(cand):
        if len(h) == len(p.vars):
            return True
        v = min((u for u in p.vars if u not in h), key=lambda u: (len(cand[u]), u))
        for val in sorted(cand[v]):
            h[v] = val
            ok = True
            new = dict(cand)
            for n, t in p.facts_of[v]:
                if not p.supported(n, t, h):
                    ok = False
                    break
                for u in set(t):
                    if u in h:
                        continue
                    keep = set()
                    for x in new[u]:
                        h[u] = x
                        if p.supported(n, t, h):
                            keep.add(x)
                        del h[u]
                    if not keep:
                        ok = False
                        break
                    new[u] = keep
                if not ok:
                    break
            if ok and solve(new):
                return True
            del h[v]
        return False

    return solve(cand)
