"""Datalog programs: syntax, width, and bottom-up evaluation.

A program splits its relation symbols into EDBs (the input signature) and
IDBs (derived), one of which is the nullary ``goal``.  Rules must be range
restricted: every head variable occurs in the body.  Evaluation is
semi-naive and produces the least expansion of the input that satisfies
every rule.

Text format::

    #edb S/2 T/2 R/2 N/2
    #idb U/2 goal/0
    U(x,y) :- S(x,y).
    U(x',y') :- U(x,y), N(x,x'), N(y,y'), R(x',y').
    goal :- U(x,y), T(x,y).

``%`` starts a comment.  A rule with an empty body is written ``goal.``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from . import budget as _budget
from .errors import BudgetExceeded, ParseError, ProgramError, SignatureMismatch
from .structures import Signature, Structure

GOAL = "goal"


class Atom(NamedTuple):
    rel: str
    args: tuple[str, ...] = ()

    def __str__(self):
        if not self.args:
            return self.rel
        return f"{self.rel}({','.join(self.args)})"


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        missing = set(self.head.args) - {v for a in self.body for v in a.args}
        if missing:
            raise ProgramError(
                f"unsafe rule {self}: head variables {sorted(missing)} do not occur in the body"
            )

    @property
    def variables(self) -> tuple[str, ...]:
        seen = dict.fromkeys(self.head.args)
        for a in self.body:
            seen.update(dict.fromkeys(a.args))
        return tuple(seen)

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


class Width(NamedTuple):
    l: int
    k: int


@dataclass(frozen=True)
class DatalogProgram:
    edb: Signature
    idb: Signature
    rules: tuple[Rule, ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        idb = self.idb
        if GOAL not in idb:
            idb = Signature(idb.relations + ((GOAL, 0),))
            object.__setattr__(self, "idb", idb)
        if idb.arity(GOAL) != 0:
            raise ProgramError("goal must be nullary")
        clash = set(self.edb.names) & set(idb.names)
        if clash:
            raise ProgramError(f"symbols declared both EDB and IDB: {sorted(clash)}")
        arities = dict(self.edb.relations)
        arities.update(idb.relations)
        for r in self.rules:
            if r.head.rel not in idb:
                raise ProgramError(f"rule head {r.head} is not an IDB")
            for atom in (r.head,) + r.body:
                if atom.rel not in arities:
                    raise ProgramError(f"undeclared symbol {atom.rel}")
                if arities[atom.rel] != len(atom.args):
                    raise ProgramError(
                        f"{atom}: {atom.rel} has arity {arities[atom.rel]}, used with {len(atom.args)}"
                    )

    def with_rules(self, rules: Iterable[Rule]) -> "DatalogProgram":
        return DatalogProgram(self.edb, self.idb, tuple(rules), self.constants)

    def __str__(self):
        return format_program(self)


def width(p: DatalogProgram) -> Width:
    """``l`` is the largest IDB arity, ``k`` the most distinct variables in one rule.

    ``k`` is reported as at least 1 so that a program whose rules are all
    variable-free still has a legal width.
    """
    l = max((a for _, a in p.idb.relations), default=0)
    k = max((len(r.variables) for r in p.rules), default=0)
    return Width(l, max(k, 1))


# ---------------------------------------------------------------------------
# evaluation


def _join(body, rels, first, counter=None):
    """All bindings of ``body`` against ``rels[i]`` (one tuple set per atom).

    ``first`` is the index of the atom to start from (the delta atom in a
    semi-naive round).  Remaining atoms are picked greedily by the number of
    already bound variables.
    """
    n = len(body)
    order = [first] if n else []
    bound = set(body[first].args) if n else set()
    left = [i for i in range(n) if i != first]
    while left:
        best = max(left, key=lambda i: (sum(v in bound for v in body[i].args), -i))
        order.append(best)
        left.remove(best)
        bound.update(body[best].args)

    indexes = {}

    def lookup(i, env):
        args = body[i].args
        pos = tuple(j for j, v in enumerate(args) if v in env)
        key = tuple(env[args[j]] for j in pos)
        idx = indexes.get((i, pos))
        if idx is None:
            idx = {}
            for t in rels[i]:
                idx.setdefault(tuple(t[j] for j in pos), []).append(t)
            indexes[(i, pos)] = idx
        return idx.get(key, ())

    def rec(depth, env):
        if depth == len(order):
            yield env
            return
        i = order[depth]
        args = body[i].args
        for t in lookup(i, env):
            new = dict(env)
            ok = True
            for v, x in zip(args, t):
                y = new.setdefault(v, x)
                if y != x:
                    ok = False
                    break
            if ok:
                yield from rec(depth + 1, new)

    yield from rec(0, {})


def _check_input(p: DatalogProgram, a: Structure):
    if dict(a.signature.relations) != dict(p.edb.relations):
        raise SignatureMismatch(f"structure signature [{a.signature}] is not the EDB signature [{p.edb}]")
    used = {v for r in p.rules for at in (r.head,) + r.body for v in at.args}
    bad = used & set(p.constants)
    if bad:
        raise ProgramError(f"constants in rule atoms are not supported by the evaluator: {sorted(bad)}")


def least_fixed_point(p: DatalogProgram, a: Structure) -> Structure:
    """The least expansion of ``a`` by the IDBs of ``p`` satisfying all rules."""
    _check_input(p, a)
    facts = {name: set(a.rel(name)) for name in p.edb.names}
    idb = set(p.idb.names)
    for name in idb:
        facts[name] = set()

    def fire(rule, rels, first):
        out = set()
        if not rule.body:
            out.add(())
            return out
        for env in _join(rule.body, rels, first):
            out.add(tuple(env[v] for v in rule.head.args))
        return out

    # round 0: every rule against the EDB (IDBs still empty)
    delta = {name: set() for name in idb}
    for rule in p.rules:
        if any(at.rel in idb for at in rule.body):
            continue
        rels = [facts[at.rel] for at in rule.body]
        for t in fire(rule, rels, 0):
            if t not in facts[rule.head.rel]:
                delta[rule.head.rel].add(t)
    for name, new in delta.items():
        facts[name] |= new

    while any(delta.values()):
        fresh = {name: set() for name in idb}
        for rule in p.rules:
            for i, at in enumerate(rule.body):
                if at.rel not in idb or not delta[at.rel]:
                    continue
                rels = [facts[b.rel] for b in rule.body]
                rels[i] = delta[at.rel]
                for t in fire(rule, rels, i):
                    if t not in facts[rule.head.rel]:
                        fresh[rule.head.rel].add(t)
        for name, new in fresh.items():
            facts[name] |= new
        delta = fresh

    sig = Signature(a.signature.relations + p.idb.relations, a.signature.constants)
    return Structure(sig, a.domain, facts, a.constants, a.labels)


def derives_goal(p: DatalogProgram, a: Structure) -> bool:
    return bool(least_fixed_point(p, a).rel(GOAL))


def _minimize(sets):
    out = []
    for s in sorted(set(sets), key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return frozenset(out)


def minimal_witnesses(p: DatalogProgram, n: int, budget: int | None = None) -> dict:
    """Minimal sets of EDB facts deriving each IDB fact on the domain ``{1..n}``.

    Returns ``{(rel, tuple): antichain}`` where each antichain member is a
    frozenset of ``(edb_rel, tuple)`` facts.  An IDB fact is derived on a
    structure with domain ``{1..n}`` iff the structure contains one of its
    minimal sets.  This is a separate, symbolic evaluator: it grounds every
    rule over the whole domain and never looks at a concrete structure.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    limit = _budget.resolve("ground", budget)
    dom = range(1, n + 1)
    idb = set(p.idb.names)
    ground = []
    for rule in p.rules:
        vs = rule.variables
        if len(dom) ** len(vs) + len(ground) > limit:
            raise BudgetExceeded("ground rule instances", len(dom) ** len(vs) + len(ground), limit)
        for vals in itertools.product(dom, repeat=len(vs)):
            env = dict(zip(vs, vals))
            head = (rule.head.rel, tuple(env[v] for v in rule.head.args))
            body = [(at.rel, tuple(env[v] for v in at.args)) for at in rule.body]
            ground.append((head, [f for f in body if f[0] in idb], frozenset(f for f in body if f[0] not in idb)))
    users = {}
    for i, (_, idb_body, _) in enumerate(ground):
        for pos, f in enumerate(idb_body):
            users.setdefault(f, []).append((i, pos))
    w = {}
    pending = {}
    for head, idb_body, edb_body in ground:
        if not idb_body:
            pending.setdefault(head, set()).add(edb_body)
    # semi-naive over antichains: only newly minimal sets are propagated
    while pending:
        rnd, pending = pending, {}
        delta = {}
        for f, cand in rnd.items():
            have = w.get(f, frozenset())
            added = [s for s in _minimize(cand) if not any(t <= s for t in have)]
            if added:
                w[f] = _minimize(list(have) + added)
                delta[f] = added
        for f, added in delta.items():
            for i, pos in users.get(f, ()):
                head, idb_body, edb_body = ground[i]
                if any(g not in w for g in idb_body):
                    continue
                combos = [edb_body]
                for j, g in enumerate(idb_body):
                    combos = {c | m for c in combos for m in (added if j == pos else w[g])}
                pending.setdefault(head, set()).update(combos)
    return w


def goal_witnesses(p: DatalogProgram, n: int, budget: int | None = None) -> frozenset:
    """Minimal EDB fact sets on ``{1..n}`` on which ``p`` derives goal."""
    return minimal_witnesses(p, n, budget).get((GOAL, ()), frozenset())


# ---------------------------------------------------------------------------
# combinators


def rename_idbs(p: DatalogProgram, mapping) -> DatalogProgram:
    """Rename IDB symbols through ``mapping`` (a dict or a callable)."""
    f = mapping.get if isinstance(mapping, dict) else mapping

    def rn(name):
        if name not in p.idb:
            return name
        new = f(name)
        return name if new is None else new

    def atom(at):
        return Atom(rn(at.rel), at.args)

    idb = Signature(tuple((rn(n), a) for n, a in p.idb.relations))
    rules = tuple(Rule(atom(r.head), tuple(atom(b) for b in r.body)) for r in p.rules)
    return DatalogProgram(p.edb, idb, rules, p.constants)


def _tag(p, tag, goal_name):
    return rename_idbs(p, lambda n: goal_name if n == GOAL else f"{n}#{tag}")


def _check_edb(p1, p2):
    if dict(p1.edb.relations) != dict(p2.edb.relations):
        raise SignatureMismatch(f"EDB signatures differ: [{p1.edb}] vs [{p2.edb}]")


def _merge(p1, p2, extra=()):
    idb = dict(p1.idb.relations)
    idb.update(p2.idb.relations)
    consts = tuple(dict.fromkeys(p1.constants + p2.constants))
    return DatalogProgram(p1.edb, Signature(tuple(idb.items())), p1.rules + p2.rules + tuple(extra), consts)


def union_program(p1: DatalogProgram, p2: DatalogProgram) -> DatalogProgram:
    """Derives goal iff ``p1`` or ``p2`` does.  Non-goal IDBs get suffixes ``#1``/``#2``."""
    _check_edb(p1, p2)
    return _merge(_tag(p1, 1, GOAL), _tag(p2, 2, GOAL))


def intersect_program(p1: DatalogProgram, p2: DatalogProgram) -> DatalogProgram:
    """Derives goal iff both do, via ``goal :- goal1, goal2``."""
    _check_edb(p1, p2)
    both = Rule(Atom(GOAL), (Atom("goal1"), Atom("goal2")))
    return _merge(_tag(p1, 1, "goal1"), _tag(p2, 2, "goal2"), [both])


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<header>\#[a-z]+)
  | (?P<arrow>:-)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:\#[0-9]+)*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    line, col0 = 1, 0
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            col0 = m.end()
        elif kind not in ("ws", "comment"):
            out.append((kind, m.group(), line, m.start() - col0 + 1))
        pos = m.end()
    out.append(("eof", "", line, pos - col0 + 1))
    return out


def _parse_decls(words, line):
    rels = []
    for w in words:
        name, sep, ar = w.rpartition("/")
        if not sep or not name or not ar.isdigit():
            raise ParseError(f"expected NAME/ARITY, got {w!r}", line)
        rels.append((name, int(ar)))
    return rels


def parse_program(text: str) -> DatalogProgram:
    """Parse the program text format.

    Headers are read line-wise; the rest is tokenized.  Without any
    ``#edb``/``#idb`` header the split is inferred (rule heads are IDBs).
    """
    edb = idb = None
    consts = []
    body_lines = []
    for lineno, raw in enumerate(text.split("\n"), 1):
        stripped = raw.split("%", 1)[0].strip()
        if stripped.startswith("#"):
            head, *words = stripped.split()
            if head == "#edb":
                edb = (edb or []) + _parse_decls(words, lineno)
            elif head == "#idb":
                idb = (idb or []) + _parse_decls(words, lineno)
            elif head == "#const":
                consts.extend(words)
            else:
                raise ParseError(f"unknown header {head}", lineno, 1)
            body_lines.append("")
        else:
            body_lines.append(raw)
    toks = _tokenize("\n".join(body_lines))
    rules = []
    i = 0

    def expect(kind, value=None):
        nonlocal i
        k, v, ln, col = toks[i]
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = v or "end of input"
            raise ParseError(f"expected {want}, got {got!r}", ln, col)
        i += 1
        return v

    def atom():
        nonlocal i
        k, v, ln, col = toks[i]
        if k != "name":
            raise ParseError(f"expected an atom, got {v or 'end of input'!r}", ln, col)
        i += 1
        args = []
        if toks[i][1] == "(":
            i += 1
            if toks[i][1] != ")":
                while True:
                    k2, v2, ln2, col2 = toks[i]
                    if k2 != "name":
                        raise ParseError(f"expected a variable, got {v2 or 'end of input'!r}", ln2, col2)
                    args.append(v2)
                    i += 1
                    if toks[i][1] == ",":
                        i += 1
                        continue
                    break
            expect("punct", ")")
        return Atom(v, tuple(args)), (ln, col)

    occurrences = []  # (atom, (line, column)) in text order
    while toks[i][0] != "eof":
        head, where = atom()
        occurrences.append((head, where))
        body = []
        if toks[i][0] == "arrow":
            i += 1
            while True:
                b, bwhere = atom()
                occurrences.append((b, bwhere))
                body.append(b)
                if toks[i][1] == ",":
                    i += 1
                    continue
                break
        expect("punct", ".")
        try:
            rules.append(Rule(head, tuple(body)))
        except ProgramError as exc:
            raise ParseError(str(exc), *where) from None

    if edb is None and idb is None:
        heads = {r.head.rel: len(r.head.args) for r in rules}
        others = {}
        for r in rules:
            for b in r.body:
                if b.rel not in heads:
                    others.setdefault(b.rel, len(b.args))
        idb, edb = list(heads.items()), list(others.items())
    edb_sig = Signature(tuple(edb or ()))
    idb_sig = Signature(tuple(idb or ()))
    arities = dict(edb_sig.relations)
    arities.update(idb_sig.relations)
    arities.setdefault(GOAL, 0)
    for at, where in occurrences:
        if at.rel not in arities:
            raise ParseError(f"undeclared symbol {at.rel}", *where)
        if arities[at.rel] != len(at.args):
            raise ParseError(f"{at.rel} has arity {arities[at.rel]}, used with {len(at.args)}", *where)
    try:
        return DatalogProgram(edb_sig, idb_sig, tuple(rules), tuple(consts))
    except ProgramError as exc:
        raise ParseError(str(exc)) from None


def format_program(p: DatalogProgram) -> str:
    lines = [f"#edb {p.edb}".rstrip(), f"#idb {p.idb}".rstrip()]
    if p.constants:
        lines.append("#const " + " ".join(p.constants))
    lines.extend(str(r) for r in p.rules)
    return "\n".join(lines) + "\n"
