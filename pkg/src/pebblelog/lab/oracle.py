"""Membership oracles for classes of finite structures."""

from __future__ import annotations

from typing import Callable, Iterable

from ..errors import BudgetExceeded
from ..datalog import DatalogProgram, derives_goal
from ..homomorphism import hom_exists
from ..logic.evaluate import STANDARD, eval_formula
from ..logic.formula import Formula
from ..structures import Signature, Structure, canonical_form


class ClassOracle:
    """A total membership predicate on finite structures of one signature.

    Results are cached by isomorphism type, so the predicate must be
    invariant under isomorphism (all the built-in backings are).
    """

    def __init__(self, signature: Signature, predicate: Callable[[Structure], bool], name: str = "oracle", kind: str = "predicate"):
        self.signature = signature
        self._predicate = predicate
        self.name = name
        self.kind = kind
        self._cache = {}

    def __call__(self, a: Structure) -> bool:
        if not a.signature.same_as(self.signature):
            raise ValueError(f"{self.name}: expected signature [{self.signature}], got [{a.signature}]")
        try:
            key = canonical_form(a)
        except BudgetExceeded:  # too large to canonicalize; skip the cache
            return bool(self._predicate(a))
        hit = self._cache.get(key)
        if hit is None:
            hit = bool(self._predicate(a))
            self._cache[key] = hit
        return hit

    def __repr__(self):
        return f"ClassOracle({self.name})"

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_program(cls, p: DatalogProgram, name: str = "program") -> "ClassOracle":
        """Structures on which ``p`` derives goal."""
        return cls(Signature(p.edb.relations), lambda a: derives_goal(p, a), name, "program")

    @classmethod
    def from_formula(cls, phi: Formula, signature: Signature, mode: str = STANDARD, name: str = "formula") -> "ClassOracle":
        return cls(signature, lambda a: eval_formula(phi, a, mode), name, "formula")

    @classmethod
    def template(cls, b: Structure, name: str | None = None) -> "ClassOracle":
        """The complement of CSP(b): structures with no homomorphism to ``b``."""
        return cls(b.signature, lambda a: not hom_exists(a, b), name or "not CSP(b)", "template")

    @classmethod
    def csp(cls, b: Structure, name: str | None = None) -> "ClassOracle":
        """CSP(b): structures with a homomorphism to ``b``."""
        return cls(b.signature, lambda a: hom_exists(a, b), name or "CSP(b)", "csp")

    @classmethod
    def csp_union(cls, templates: Iterable[Structure], name: str = "CSP union") -> "ClassOracle":
        templates = list(templates)
        return cls(templates[0].signature, lambda a: any(hom_exists(a, b) for b in templates), name, "csp-union")

    @classmethod
    def explicit(cls, members: Iterable[Structure], name: str = "explicit") -> "ClassOracle":
        """Exactly the listed structures, up to isomorphism."""
        members = list(members)
        keys = {canonical_form(m) for m in members}
        return cls(members[0].signature, lambda a: canonical_form(a) in keys, name, "explicit")

    def complement(self) -> "ClassOracle":
        return ClassOracle(self.signature, lambda a: not self(a), f"not {self.name}", self.kind)
