"""Back-and-forth equivalence up to quantifier rank ``q``.

Two structures are ``q``-equivalent when their rank-``q`` types coincide.
The type of a position (named elements plus added relations) is built
recursively:

* rank 0: which atomic formulas hold among the named elements and constants;
* rank ``q+1``: the rank-0 type, the set of rank-``q`` types reachable by
  naming one more element, and the set reachable by adding one guarded
  relation of arity at most the cap.

Comparing sets of successor types is the same as checking the forth and
back conditions in both directions.  When the types differ a sentence of
rank at most ``q`` that separates the structures is assembled from the
first failing condition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .. import budget as _budget
from ..errors import BudgetExceeded, SignatureMismatch
from ..structures import Structure, guarded_tuples
from .evaluate import GUARDED, eval_formula, subsets_in_order
from .formula import Atom, Eq, Exists, ExistsSO, Forall, ForallSO, Formula, Not, conj, disj


class _Types:
    def __init__(self, a: Structure, cap: int, limit: int, counter):
        self.a = a
        self.cap = cap
        self.limit = limit
        self.counter = counter
        self.consts = tuple(a.constants[c] for c in sorted(a.signature.constants))
        self.rels = sorted(a.signature.relations)
        self.memo = {}
        self.expansions = {r: list(subsets_in_order(sorted(guarded_tuples(a, r)))) for r in range(1, cap + 1)}

    def names(self, picks):
        return self.consts + picks

    def atomic(self, picks, extra):
        """Rank-0 type as a tuple of booleans in a fixed order."""
        names = self.names(picks)
        n = len(names)
        out = [tuple(names[i] == names[j] for i in range(n) for j in range(i + 1, n))]
        for rel, ar in self.rels:
            facts = self.a.rel(rel)
            out.append(tuple(tuple(names[i] for i in idx) in facts for idx in itertools.product(range(n), repeat=ar)))
        for ar, facts in extra:
            out.append((ar,) + tuple(tuple(names[i] for i in idx) in facts for idx in itertools.product(range(n), repeat=ar)))
        return tuple(out)

    def type(self, q, picks=(), extra=()):
        key = (q, picks, extra)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.counter[0] += 1
        if self.counter[0] > self.limit:
            raise BudgetExceeded("type computations", self.counter[0], self.limit)
        t0 = self.atomic(picks, extra)
        if q == 0:
            t = (t0,)
        else:
            fo = frozenset(self.type(q - 1, picks + (e,), extra) for e in self.a.domain)
            so = frozenset(
                self.type(q - 1, picks, extra + ((r, s),)) for r, subs in self.expansions.items() for s in subs
            )
            t = (t0, fo, so)
        self.memo[key] = t
        return t


@dataclass(frozen=True)
class EquivResult:
    equivalent: bool
    q: int
    cap: int
    sentence: Formula | None = None
    trace: tuple[str, ...] = ()

    def __bool__(self):
        return self.equivalent


def _check(a, b):
    if not a.signature.same_as(b.signature):
        raise SignatureMismatch(f"signatures differ: [{a.signature}] vs [{b.signature}]")


def equiv_q(a: Structure, b: Structure, q: int, cap: int = 1, budget: int | None = None) -> bool:
    """``a`` and ``b`` agree on all sentences of rank at most ``q``
    (second-order quantifiers restricted to guarded relations of arity at most ``cap``)."""
    _check(a, b)
    if q < 0:
        raise ValueError("q must be >= 0")
    counter = [0]
    limit = _budget.resolve("equiv", budget)
    return _Types(a, cap, limit, counter).type(q) == _Types(b, cap, limit, counter).type(q)


def equiv_q_explain(a: Structure, b: Structure, q: int, cap: int = 1, budget: int | None = None) -> EquivResult:
    """Like :func:`equiv_q`, plus a separating sentence and move trace when not equivalent.

    The sentence holds in ``a`` and fails in ``b``; this is re-checked by
    evaluating it on both structures in guarded mode.
    """
    _check(a, b)
    counter = [0]
    limit = _budget.resolve("equiv", budget)
    ta, tb = _Types(a, cap, limit, counter), _Types(b, cap, limit, counter)
    if ta.type(q) == tb.type(q):
        return EquivResult(True, q, cap)
    sp = _Separator(a, cap)
    sentence = sp.sep(q, ta, tb, (), (), (), (), False)
    if not eval_formula(sentence, a, GUARDED) or eval_formula(sentence, b, GUARDED):
        raise AssertionError(f"separating sentence failed verification: {sentence}")
    return EquivResult(False, q, cap, sentence, tuple(sp.trace))


def _neg(f):
    return f.body if isinstance(f, Not) else Not(f)


class _Separator:
    """Builds a formula true at one position and false at another of a different type.

    A position is ``(types, picks, extra)``; picked elements become the
    variables ``x1, x2, ...`` after the constants and added relations
    become ``X1, X2, ...``.
    """

    def __init__(self, a, cap):
        taken = set(a.signature.names) | set(a.signature.constants)
        self.fo_stem = "x" if not any(n.startswith("x") for n in taken) else "v_"
        self.so_stem = "X" if not any(n.startswith("X") for n in taken) else "V_"
        self.consts = sorted(a.signature.constants)
        self.cap = cap
        self.trace = []

    def term(self, i):
        nc = len(self.consts)
        return self.consts[i] if i < nc else f"{self.fo_stem}{i - nc + 1}"

    def atomic(self, A, B, pa, pb, ea, eb):
        n = len(self.consts) + len(pa)
        na, nb = A.names(pa), B.names(pb)
        for i in range(n):
            for j in range(i + 1, n):
                va, vb = na[i] == na[j], nb[i] == nb[j]
                if va != vb:
                    f = Eq(self.term(i), self.term(j))
                    return f if va else Not(f)
        rels = [(rel, ar, A.a.rel(rel), B.a.rel(rel)) for rel, ar in A.rels]
        rels += [(f"{self.so_stem}{k + 1}", ar, fa, fb) for k, ((ar, fa), (_, fb)) in enumerate(zip(ea, eb))]
        for rel, ar, fa, fb in rels:
            for idx in itertools.product(range(n), repeat=ar):
                va = tuple(na[i] for i in idx) in fa
                vb = tuple(nb[i] for i in idx) in fb
                if va != vb:
                    f = Atom(rel, tuple(self.term(i) for i in idx))
                    return f if va else Not(f)
        raise AssertionError("atomic types differ but no atom found")

    def sep(self, q, A, B, pa, pb, ea, eb, flip):
        """Formula true at ``(A, pa, ea)`` and false at ``(B, pb, eb)``."""
        who = ("b", "a") if flip else ("a", "b")
        if A.atomic(pa, ea) != B.atomic(pb, eb):
            self.trace.append(f"rank {q}: atomic types differ")
            return self.atomic(A, B, pa, pb, ea, eb)
        var = self.term(len(self.consts) + len(pa))
        for x in A.a.domain:
            t = A.type(q - 1, pa + (x,), ea)
            ps = {}
            for y in B.a.domain:
                ps.setdefault(B.type(q - 1, pb + (y,), eb), y)
            if t not in ps:
                self.trace.append(f"rank {q}: element {x} of {who[0]} has no partner in {who[1]}")
                return Exists(var, conj(*(self.sep(q - 1, A, B, pa + (x,), pb + (y,), ea, eb, flip) for y in ps.values())))
        for y in B.a.domain:
            t = B.type(q - 1, pb + (y,), eb)
            ps = {}
            for x in A.a.domain:
                ps.setdefault(A.type(q - 1, pa + (x,), ea), x)
            if t not in ps:
                self.trace.append(f"rank {q}: element {y} of {who[1]} has no partner in {who[0]}")
                return Forall(
                    var, disj(*(_neg(self.sep(q - 1, B, A, pb + (y,), pa + (x,), eb, ea, not flip)) for x in ps.values()))
                )
        rvar = f"{self.so_stem}{len(ea) + 1}"
        for r in range(1, self.cap + 1):
            for s in A.expansions[r]:
                t = A.type(q - 1, pa, ea + ((r, s),))
                ps = {}
                for s2 in B.expansions[r]:
                    ps.setdefault(B.type(q - 1, pb, eb + ((r, s2),)), s2)
                if t not in ps:
                    self.trace.append(f"rank {q}: relation {sorted(s)} on {who[0]} has no partner in {who[1]}")
                    return ExistsSO(
                        rvar, r, conj(*(self.sep(q - 1, A, B, pa, pb, ea + ((r, s),), eb + ((r, s2),), flip) for s2 in ps.values()))
                    )
            for s2 in B.expansions[r]:
                t = B.type(q - 1, pb, eb + ((r, s2),))
                ps = {}
                for s in A.expansions[r]:
                    ps.setdefault(A.type(q - 1, pa, ea + ((r, s),)), s)
                if t not in ps:
                    self.trace.append(f"rank {q}: relation {sorted(s2)} on {who[1]} has no partner in {who[0]}")
                    return ForallSO(
                        rvar,
                        r,
                        disj(*(_neg(self.sep(q - 1, B, A, pb, pa, eb + ((r, s2),), ea + ((r, s),), not flip)) for s in ps.values())),
                    )
        raise AssertionError("types differ but no failing condition found")
