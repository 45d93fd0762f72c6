"""The canonical Datalog program of width (l,k) for the complement of CSP(B).

``canonical_eval`` runs (l,k)-consistency as a worklist over individual
partial maps with support counters.  It shares no code with
:mod:`pebblelog.pebble` beyond the structure types, so agreement between
the two is a real cross-check.

``synthesize_canonical`` writes the program out as rules.  IDB ``I{r}_{m}``
stands for the set of ``r``-tuples over B whose positions in the
lexicographic listing of ``B^r`` are the set bits of ``m``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from . import budget as _budget
from .datalog import GOAL, Atom, DatalogProgram, Rule, Width, derives_goal, width
from .errors import BudgetExceeded, SignatureMismatch, UnsupportedError
from .homomorphism import hom_exists
from .structures import Signature, Structure, enumerate_structures


@dataclass
class ConsistencyState:
    """Alive partial maps per domain; ``alive[D]`` holds value tuples for sorted ``D``."""

    alive: dict
    l: int
    k: int

    @property
    def wiped_out(self) -> bool:
        return not self.alive.get((), ())


def _partial_hom_ok(a, b, dom, vals):
    h = dict(zip(dom, vals))
    for c, e in a.constants.items():
        if e in h and h[e] != b.constants[c]:
            return False
    for name in a.signature.names:
        rb = b.rel(name)
        for t in a.rel(name):
            if all(x in h for x in t) and tuple(h[x] for x in t) not in rb:
                return False
    return True


def consistency_state(a: Structure, b: Structure, l: int, k: int, budget: int | None = None) -> ConsistencyState:
    if not a.signature.same_as(b.signature):
        raise SignatureMismatch(f"signatures differ: [{a.signature}] vs [{b.signature}]")
    if not (1 <= l < k):
        raise ValueError(f"need 1 <= l < k, got l={l}, k={k}")
    limit = _budget.resolve("canonical", budget)
    bound = len(a.domain) ** k * len(b.domain) ** k
    if bound > limit:
        raise BudgetExceeded("consistency candidate maps |A|^k*|B|^k", bound, limit)

    doms = [d for s in range(min(k, len(a)) + 1) for d in itertools.combinations(a.domain, s)]
    alive = {}
    for d in doms:
        alive[d] = {v for v in itertools.product(b.domain, repeat=len(d)) if _partial_hom_ok(a, b, d, v)}

    # support[(d, v, big)] = number of alive extensions of (d, v) to domain big
    support = {}
    watchers = {}  # (big, w) -> list of (d, v) keys it supports
    for d in doms:
        if len(d) > l:
            continue
        for big in doms:
            if len(big) <= len(d) or not set(d) <= set(big):
                continue
            where = [big.index(x) for x in d]
            for v in alive[d]:
                support[(d, v, big)] = 0
            for w in alive[big]:
                v = tuple(w[i] for i in where)
                if v in alive[d]:
                    support[(d, v, big)] += 1
                    watchers.setdefault((big, w), []).append((d, v))

    queue = deque()
    dead = set()

    def kill(d, v):
        if (d, v) not in dead:
            dead.add((d, v))
            alive[d].discard(v)
            queue.append((d, v))

    # maps that start without support, or on domains with nothing alive
    for (d, v, big), n in support.items():
        if n == 0:
            kill(d, v)

    while queue:
        d, v = queue.popleft()
        # restriction closure: one-point extensions of a dead map die
        if len(d) < min(k, len(a)):
            h = dict(zip(d, v))
            for x in a.domain:
                if x in h:
                    continue
                big = tuple(sorted(d + (x,)))
                for y in b.domain:
                    w = tuple(h[z] if z != x else y for z in big)
                    if w in alive[big]:
                        kill(big, w)
        # forth: maps supported by the dead one lose a witness
        for key in watchers.get((d, v), ()):
            sd, sv = key
            if key in dead:
                continue
            support[(sd, sv, d)] -= 1
            if support[(sd, sv, d)] == 0:
                kill(sd, sv)
    return ConsistencyState(alive, l, k)


def canonical_eval(a: Structure, b: Structure, l: int, k: int, budget: int | None = None) -> bool:
    """True iff the canonical (l,k)-program for the complement of CSP(b) derives goal on ``a``."""
    return consistency_state(a, b, l, k, budget).wiped_out


# ---------------------------------------------------------------------------
# synthesis


def idb_name(r: int, mask: int) -> str:
    return f"I{r}_{mask}"


def _tuples(b, r):
    return list(itertools.product(b.domain, repeat=r))


def synthesize_canonical(b: Structure, l: int, k: int, budget: int | None = None) -> DatalogProgram:
    """Materialize the canonical program for the complement of CSP(b).

    Rules use variables ``x1..xk``.  A body is any set of EDB atoms over
    those variables plus at most one IDB atom per sorted tuple of distinct
    variables of length at most ``l``.  For each body satisfiable in ``b``
    only the strongest sound heads are emitted; an unsatisfiable body
    yields ``goal``.  Bodies equal up to renaming variables are emitted once.
    """
    if b.signature.constants:
        raise UnsupportedError("synthesis supports constant-free templates only")
    if not (1 <= l < k):
        raise ValueError(f"need 1 <= l < k, got l={l}, k={k}")
    xs = [f"x{i}" for i in range(1, k + 1)]
    assigns = list(itertools.product(b.domain, repeat=k))
    full = (1 << len(assigns)) - 1

    def mask_of(pred):
        m = 0
        for j, s in enumerate(assigns):
            if pred(s):
                m |= 1 << j
        return m

    edb_atoms = []
    for name, ar in b.signature.relations:
        rel = b.rel(name)
        for idx in itertools.product(range(k), repeat=ar):
            edb_atoms.append((Atom(name, tuple(xs[i] for i in idx)), idx, mask_of(lambda s: tuple(s[i] for i in idx) in rel)))

    idb_rel = []
    slots = []  # (variable index tuple, [(atom, mask)])
    for r in range(1, l + 1):
        br = _tuples(b, r)
        idb_rel.extend((idb_name(r, m), r) for m in range(1 << len(br)))
        for idx in itertools.combinations(range(k), r):
            options = []
            for m in range(1, (1 << len(br)) - 1):
                S = {br[i] for i in range(len(br)) if m >> i & 1}
                options.append((Atom(idb_name(r, m), tuple(xs[i] for i in idx)), mask_of(lambda s: tuple(s[i] for i in idx) in S)))
            slots.append((idx, options))

    n_bodies = 2 ** len(edb_atoms)
    for _, opts in slots:
        n_bodies *= len(opts) + 1
    limit = _budget.resolve("synthesis", budget)
    if n_bodies > limit:
        raise BudgetExceeded("candidate rule bodies", n_bodies, limit)

    perms = list(itertools.permutations(range(k)))
    heads = []  # (var index tuple, r, br)
    for r in range(1, l + 1):
        br = _tuples(b, r)
        for idx in itertools.combinations(range(k), r):
            heads.append((idx, r, br))

    def canon_key(edb_sel, idb_sel):
        # body as (relation, index tuple) pairs, minimized over variable renamings
        atoms = [(a.rel, idx) for a, idx, _ in edb_sel] + [
            (a.rel, tuple(xs.index(v) for v in a.args)) for a, _ in idb_sel
        ]
        best = None
        for p in perms:
            key = tuple(sorted((rel, tuple(p[i] for i in idx)) for rel, idx in atoms))
            if best is None or key < best:
                best = key
        return best

    seen = set()
    rules = []
    spanning = None  # first body over all k variables, for the width anchor
    for bits in range(1 << len(edb_atoms)):
        edb_sel = [edb_atoms[i] for i in range(len(edb_atoms)) if bits >> i & 1]
        m0 = full
        for _, _, m in edb_sel:
            m0 &= m
        for choice in itertools.product(*[[None] + opts for _, opts in slots]):
            idb_sel = [c for c in choice if c is not None]
            m = m0
            for _, cm in idb_sel:
                m &= cm
            body_atoms = [a for a, _, _ in edb_sel] + [a for a, _ in idb_sel]
            used = {v for a in body_atoms for v in a.args}
            if not body_atoms:
                continue
            key = canon_key(edb_sel, idb_sel)
            if key in seen:
                continue
            seen.add(key)
            body = tuple(body_atoms)
            if spanning is None and len(used) == k:
                spanning = body
            if m == 0:
                rules.append(Rule(Atom(GOAL), body))
                continue
            sat = [assigns[j] for j in range(len(assigns)) if m >> j & 1]
            present = {tuple(a.args): a.rel for a, _ in idb_sel}
            for idx, r, br in heads:
                args = tuple(xs[i] for i in idx)
                if not set(args) <= used:
                    continue
                image = {tuple(s[i] for i in idx) for s in sat}
                if len(image) == len(br):
                    continue
                mask = sum(1 << i for i, t in enumerate(br) if t in image)
                name = idb_name(r, mask)
                if present.get(args) == name:
                    continue
                rules.append(Rule(Atom(name, args), body))
    edb = Signature(b.signature.relations)
    idb = Signature(tuple(idb_rel) + ((GOAL, 0),))
    prog = DatalogProgram(edb, idb, tuple(rules))
    if width(prog) != Width(l, k) and spanning is not None:
        # templates that absorb everything produce only trivial heads; keep
        # one of them so the program still has width (l,k)
        top = idb_name(l, (1 << len(b.domain) ** l) - 1)
        prog = prog.with_rules(prog.rules + (Rule(Atom(top, tuple(xs[:l])), spanning),))
    return prog


def soundness_check(p: DatalogProgram, b: Structure, size_bound: int, budget: int | None = None):
    """``True`` if every structure of at most ``size_bound`` elements on which
    ``p`` derives goal has no homomorphism to ``b``; else the first counterexample."""
    if dict(p.edb.relations) != dict(b.signature.relations):
        raise SignatureMismatch("program EDB differs from the template signature")
    if not any(r.head.rel == GOAL for r in p.rules):
        return True
    for a in enumerate_structures(b.signature, size_bound, budget=budget):
        if derives_goal(p, a) and hom_exists(a, b):
            return a
    return True
