"""A small DPLL solver and a Tseitin circuit builder.

The solver uses two watched literals per clause, unit propagation and
chronological backtracking.  Decisions take variables in a fixed order
(most frequent first) and try ``False`` before ``True``, which finds the
least model of Horn instances without a single conflict.
"""

from __future__ import annotations

from collections import Counter

from .. import budget as _budget
from ..errors import BudgetExceeded


class Unsat(Exception):
    pass


def solve(clauses, nvars, budget=None, order=None):
    """Return a satisfying assignment ``{var: bool}`` or ``None``.

    ``budget`` bounds the number of decisions (default: the ``so_branches``
    budget).  ``order`` optionally fixes the decision order.
    """
    limit = _budget.resolve("so_branches", budget)
    val = [0] * (nvars + 1)
    watches = {}
    cls = []
    units = []
    for c in clauses:
        c = list(dict.fromkeys(c))
        if any(-x in c for x in c):
            continue
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
            continue
        idx = len(cls)
        cls.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)

    trail = []
    # decision stack entries: (trail length before decision, literal, flipped?)
    decisions = []

    def assign(lit):
        v = abs(lit)
        want = 1 if lit > 0 else -1
        if val[v] == want:
            return True
        if val[v] == -want:
            return False
        val[v] = want
        trail.append(lit)
        return True

    def value(lit):
        x = val[abs(lit)]
        return x if lit > 0 else -x

    def propagate(start):
        i = start
        while i < len(trail):
            lit = trail[i]
            i += 1
            falsified = -lit
            ws = watches.get(falsified)
            if not ws:
                continue
            keep = []
            j = 0
            conflict = False
            while j < len(ws):
                ci = ws[j]
                j += 1
                c = cls[ci]
                if c[0] == falsified:
                    c[0], c[1] = c[1], c[0]
                if value(c[0]) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for t in range(2, len(c)):
                    if value(c[t]) != -1:
                        c[1], c[t] = c[t], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if value(c[0]) == -1:
                    conflict = True
                    keep.extend(ws[j:])
                    break
                assign(c[0])
            watches[falsified] = keep
            if conflict:
                return False
        return True

    for u in units:
        if not assign(u):
            return None
    if not propagate(0):
        return None

    if order is None:
        freq = Counter(abs(x) for c in clauses for x in c)
        order = sorted(range(1, nvars + 1), key=lambda v: (-freq[v], v))
    pos = 0
    made = 0
    while True:
        while pos < len(order) and val[order[pos]] != 0:
            pos += 1
        if pos == len(order):
            return {v: val[v] == 1 for v in range(1, nvars + 1)}
        made += 1
        if made > limit:
            raise BudgetExceeded("SAT decisions", made, limit)
        v = order[pos]
        decisions.append((len(trail), -v, False, pos))
        start = len(trail)
        assign(-v)
        ok = propagate(start)
        while not ok:
            # undo to the most recent decision with an untried phase
            while decisions and decisions[-1][2]:
                mark, _, _, dpos = decisions.pop()
                for lit in trail[mark:]:
                    val[abs(lit)] = 0
                del trail[mark:]
            if not decisions:
                return None
            mark, lit, _, dpos = decisions.pop()
            for x in trail[mark:]:
                val[abs(x)] = 0
            del trail[mark:]
            decisions.append((mark, -lit, True, dpos))
            pos = dpos
            assign(-lit)
            ok = propagate(mark)


class Circuit:
    """Hash-consed and/or gates over literals, emitted as Tseitin clauses.

    Inputs are either Python booleans (folded away) or non-zero integer
    literals.
    """

    def __init__(self, limit=None):
        self.nvars = 0
        self.clauses = []
        self._gates = {}
        self.limit = _budget.resolve("ground", limit)

    def new_var(self):
        self.nvars += 1
        if self.nvars > self.limit:
            raise BudgetExceeded("grounded circuit size", self.nvars, self.limit)
        return self.nvars

    @staticmethod
    def neg(x):
        if x is True or x is False:
            return not x
        return -x

    def and_(self, items):
        lits = set()
        for x in items:
            if x is False:
                return False
            if x is True:
                continue
            if -x in lits:
                return False
            lits.add(x)
        if not lits:
            return True
        if len(lits) == 1:
            return next(iter(lits))
        key = ("and", frozenset(lits))
        g = self._gates.get(key)
        if g is None:
            g = self.new_var()
            for x in lits:
                self.clauses.append([-g, x])
            self.clauses.append([g] + [-x for x in lits])
            self._gates[key] = g
        return g

    def or_(self, items):
        return self.neg(self.and_([self.neg(x) for x in items]))

    def iff(self, x, y):
        return self.and_([self.or_([self.neg(x), y]), self.or_([x, self.neg(y)])])
