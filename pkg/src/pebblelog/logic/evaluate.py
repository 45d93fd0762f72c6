"""Model checking by brute force, with a SAT back end for large second-order blocks.

``eval_formula`` walks the formula recursively.  First-order quantifiers
range over the domain.  A second-order variable of arity ``r`` ranges over
all subsets of ``A^r`` (standard semantics) or of the guarded ``r``-tuples
(guarded semantics).  Subsets are tried by increasing size, then
lexicographically.

When a run of like second-order quantifiers (looking through negations)
has a body without further second-order quantifiers, the block can be
decided by one SAT call instead: the body is grounded over the structure
into a circuit whose inputs are the candidate tuples of the quantified
relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .. import budget as _budget
from ..errors import BudgetExceeded, PebblelogError, SignatureMismatch
from ..structures import Structure, guarded_tuples
from . import sat
from .formula import (
    And,
    Atom,
    Const,
    Eq,
    Exists,
    ExistsSO,
    Forall,
    ForallSO,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    free_names,
    is_so_free,
)

STANDARD = "standard"
GUARDED = "guarded"
ENUMERATE_LIMIT = 2**6  # "auto" switches to SAT above this many branches


class FormulaError(PebblelogError, ValueError):
    pass


def check_sentence(phi: Formula, a: Structure):
    """Free element names must be constants of ``a``; relation names must be in its signature."""
    fo, so = free_names(phi)
    extra = sorted(fo - set(a.signature.constants))
    if extra:
        raise FormulaError(f"free variables {extra}")
    for rel, ar in so.items():
        if rel not in a.signature:
            raise SignatureMismatch(f"relation {rel} is not in the signature [{a.signature}]")
        if a.signature.arity(rel) != ar:
            raise SignatureMismatch(f"{rel} used with arity {ar}, declared {a.signature.arity(rel)}")


def subsets_in_order(universe):
    """All subsets of ``universe`` (a sorted list), by size then lexicographically."""
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            yield frozenset(combo)


@dataclass
class _Run:
    a: Structure
    mode: str
    engine: str
    limit: int
    branches: int = 0
    sat_calls: int = 0
    universes: dict = field(default_factory=dict)

    def universe(self, arity):
        u = self.universes.get(arity)
        if u is None:
            if self.mode == GUARDED:
                u = sorted(guarded_tuples(self.a, arity)) if arity else [()]
            else:
                u = list(itertools.product(self.a.domain, repeat=arity))
            self.universes[arity] = u
        return u

    def spend(self, n):
        self.branches += n
        if self.branches > self.limit:
            raise BudgetExceeded("second-order branches", self.branches, self.limit)


def _term(run, env, name):
    if name in env:
        return env[name]
    return run.a.constants[name]


def _so_block(f):
    """Collect a run of like second-order quantifiers starting at ``f``.

    Returns ``(exists_block, variables, body, negate_body)`` where the block
    reads ``Q X1..Xn . (not) body`` with a single effective quantifier ``Q``.
    """
    neg = False
    first = None
    vars_ = []
    while True:
        if isinstance(f, Not):
            neg = not neg
            f = f.body
            continue
        if isinstance(f, (ExistsSO, ForallSO)):
            eff = isinstance(f, ExistsSO) != neg
            if first is None:
                first = eff
            elif eff != first:
                break
            vars_.append((f.var, f.arity))
            f = f.body
            continue
        break
    return first, vars_, f, neg


def _ev(run: _Run, f: Formula, env: dict) -> bool:
    if isinstance(f, Atom):
        args = tuple(_term(run, env, x) for x in f.args)
        rel = env.get(("so", f.rel))
        if rel is None:
            rel = run.a.rel(f.rel)
        return args in rel
    if isinstance(f, Eq):
        return _term(run, env, f.left) == _term(run, env, f.right)
    if isinstance(f, Not):
        return not _ev(run, f.body, env)
    if isinstance(f, And):
        return all(_ev(run, p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(_ev(run, p, env) for p in f.parts)
    if isinstance(f, Implies):
        return not _ev(run, f.left, env) or _ev(run, f.right, env)
    if isinstance(f, Iff):
        return _ev(run, f.left, env) == _ev(run, f.right, env)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, (Exists, Forall)):
        want = isinstance(f, Exists)
        for e in run.a.domain:
            env2 = dict(env)
            env2[f.var] = e
            if _ev(run, f.body, env2) == want:
                return want
        return not want
    if isinstance(f, (ExistsSO, ForallSO)):
        return _ev_so(run, f, env)
    raise TypeError(f"not a formula: {f!r}")


def _ev_so(run, f, env):
    exists_block, vars_, body, neg = _so_block(f)
    if run.engine != "enumerate" and is_so_free(body):
        size = sum(len(run.universe(r)) for _, r in vars_)
        if run.engine == "sat" or 2**size > ENUMERATE_LIMIT:
            return _sat_block(run, exists_block, vars_, body, neg, env)
    u = run.universe(f.arity)
    if 2 ** len(u) > run.limit:
        raise BudgetExceeded(f"subsets for {f.var}:{f.arity}", 2 ** len(u), run.limit)
    want = isinstance(f, ExistsSO)
    for s in subsets_in_order(u):
        run.spend(1)
        env2 = dict(env)
        env2[("so", f.var)] = s
        if _ev(run, f.body, env2) == want:
            return want
    return not want


# -- grounding -------------------------------------------------------------------


class _Grounder:
    def __init__(self, run, so_inputs, circuit):
        self.run = run
        self.inputs = so_inputs  # name -> {tuple: literal}
        self.c = circuit
        self.memo = {}
        self.free = {}

    def free_fo(self, f):
        key = id(f)
        fv = self.free.get(key)
        if fv is None:
            fv = tuple(sorted(free_names(f)[0]))
            self.free[key] = (f, fv)
            return fv
        return fv[1]

    def ground(self, f, env):
        if isinstance(f, (Const, Atom, Eq)):
            return self._leaf(f, env)
        fv = self.free_fo(f)
        key = (id(f), tuple(env.get(v) for v in fv))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._node(f, env)
        self.memo[key] = out
        return out

    def _leaf(self, f, env):
        run = self.run
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Eq):
            return _term(run, env, f.left) == _term(run, env, f.right)
        args = tuple(_term(run, env, x) for x in f.args)
        if f.rel in self.inputs:
            return self.inputs[f.rel].get(args, False)
        rel = env.get(("so", f.rel))
        if rel is None:
            rel = run.a.rel(f.rel)
        return args in rel

    def _node(self, f, env):
        c = self.c
        if isinstance(f, Not):
            return c.neg(self.ground(f.body, env))
        if isinstance(f, And):
            out = []
            for p in f.parts:
                g = self.ground(p, env)
                if g is False:
                    return False
                out.append(g)
            return c.and_(out)
        if isinstance(f, Or):
            out = []
            for p in f.parts:
                g = self.ground(p, env)
                if g is True:
                    return True
                out.append(g)
            return c.or_(out)
        if isinstance(f, Implies):
            left = self.ground(f.left, env)
            if left is False:
                return True
            return c.or_([c.neg(left), self.ground(f.right, env)])
        if isinstance(f, Iff):
            return c.iff(self.ground(f.left, env), self.ground(f.right, env))
        if isinstance(f, (Exists, Forall)):
            out = []
            stop = isinstance(f, Exists)
            for e in self.run.a.domain:
                env2 = dict(env)
                env2[f.var] = e
                g = self.ground(f.body, env2)
                if g is stop:
                    return stop
                out.append(g)
            return c.or_(out) if stop else c.and_(out)
        raise TypeError(f"cannot ground {f!r}")


def _sat_block(run, exists_block, vars_, body, neg, env, want_model=False):
    """Decide ``Q vars . (not) body`` with one SAT call."""
    run.sat_calls += 1
    circuit = sat.Circuit()
    inputs = {}
    for name, r in vars_:
        inputs[name] = {t: circuit.new_var() for t in run.universe(r)}
    g = _Grounder(run, inputs, circuit)
    # the SAT question is always "exists vars . target"
    target = g.ground(body, env)
    if neg:
        target = circuit.neg(target)
    if not exists_block:
        target = circuit.neg(target)
    if target is True:
        model = {}
        found = True
    elif target is False:
        model = None
        found = False
    else:
        model = sat.solve(circuit.clauses + [[target]], circuit.nvars, budget=run.limit)
        found = model is not None
    if want_model:
        rels = None
        if found:
            rels = {
                name: frozenset(t for t, v in inputs[name].items() if model.get(v, False))
                for name, _ in vars_
            }
        return found, rels
    return found if exists_block else not found


# -- public API --------------------------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    value: bool
    # for the outermost quantifier block: the witness (if existential and
    # true) or counterexample (if universal and false), else None
    trace: tuple | None = None
    branches: int = 0
    sat_calls: int = 0

    def __bool__(self):
        return self.value


def eval_formula(
    phi: Formula,
    a: Structure,
    mode: str = STANDARD,
    engine: str = "auto",
    budget: int | None = None,
    trace: bool = False,
):
    """Truth value of the sentence ``phi`` in ``a``.

    ``mode`` is ``"standard"`` or ``"guarded"``; ``engine`` is ``"auto"``,
    ``"enumerate"`` or ``"sat"``.  With ``trace`` an :class:`EvalResult` is
    returned instead of a bool.
    """
    if mode not in (STANDARD, GUARDED):
        raise ValueError(f"unknown semantics mode {mode!r}")
    if engine not in ("auto", "enumerate", "sat"):
        raise ValueError(f"unknown engine {engine!r}")
    check_sentence(phi, a)
    run = _Run(a, mode, engine, _budget.resolve("so_branches", budget))
    if not trace:
        return _ev(run, phi, {})
    value, witness = _trace(run, phi)
    return EvalResult(value, witness, run.branches, run.sat_calls)


def _trace(run, phi):
    """Evaluate and report the outermost quantifier block's witness or counterexample."""
    if isinstance(phi, (ExistsSO, ForallSO)):
        exists_block, vars_, body, neg = _so_block(phi)
        if not any(isinstance(x, Not) for x in _prefix_nodes(phi, len(vars_))) and (
            run.engine != "enumerate" and is_so_free(body)
        ):
            size = sum(len(run.universe(r)) for _, r in vars_)
            if run.engine == "sat" or 2**size > ENUMERATE_LIMIT:
                # exists: witness of body; forall: witness of the negated body
                found, rels = _sat_block(run, True, vars_, body, not exists_block, {}, want_model=True)
                value = found if exists_block else not found
                wit = tuple(sorted(rels.items())) if found else None
                return value, wit
    chain = []
    f = phi
    kind = None
    while isinstance(f, (Exists, Forall, ExistsSO, ForallSO)):
        k = isinstance(f, (Exists, ExistsSO))
        if kind is None:
            kind = k
        elif k != kind:
            break
        chain.append(f)
        f = f.body
    if not chain:
        return _ev(run, phi, {}), None

    def rec(i, env):
        if i == len(chain):
            return _ev(run, f, env) == kind, []
        q = chain[i]
        if isinstance(q, (Exists, Forall)):
            options = [(q.var, e, e) for e in run.a.domain]
        else:
            u = run.universe(q.arity)
            if 2 ** len(u) > run.limit:
                raise BudgetExceeded(f"subsets for {q.var}:{q.arity}", 2 ** len(u), run.limit)
            options = [(("so", q.var), s, s) for s in subsets_in_order(u)]
        for key, val, shown in options:
            if isinstance(q, (ExistsSO, ForallSO)):
                run.spend(1)
            env2 = dict(env)
            env2[key] = val
            ok, w = rec(i + 1, env2)
            if ok:
                return True, [(q.var, shown)] + w
        return False, []

    found, w = rec(0, {})
    # found means: a witness (exists) or a counterexample (forall) exists
    value = found if kind else not found
    return value, (tuple(w) if found else None)


def _prefix_nodes(f, n):
    out = []
    seen = 0
    while seen < n:
        out.append(f)
        if isinstance(f, (ExistsSO, ForallSO)):
            seen += 1
        f = f.body
    return out
