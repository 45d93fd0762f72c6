"""Formula syntax trees for first- and second-order logic over relational signatures.

Terms are variable names (strings).  A name that is not bound by a
quantifier is looked up among the structure's constant symbols during
evaluation.  Second-order variables carry an arity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)

    def __str__(self):
        from .parser import format_formula

        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self):
        return f"Const({self.value})"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    rel: str
    args: tuple[str, ...] = ()

    def __repr__(self):
        return f"Atom({self.rel!r}, {self.args!r})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: str
    right: str

    def __repr__(self):
        return f"Eq({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula

    def __repr__(self):
        return f"Not({self.body!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    parts: tuple[Formula, ...]

    def __repr__(self):
        return f"And({self.parts!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    parts: tuple[Formula, ...]

    def __repr__(self):
        return f"Or({self.parts!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Iff(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Iff({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula

    def __repr__(self):
        return f"Exists({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula

    def __repr__(self):
        return f"Forall({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class ExistsSO(Formula):
    var: str
    arity: int
    body: Formula

    def __repr__(self):
        return f"ExistsSO({self.var!r}, {self.arity}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class ForallSO(Formula):
    var: str
    arity: int
    body: Formula

    def __repr__(self):
        return f"ForallSO({self.var!r}, {self.arity}, {self.body!r})"


FO_QUANTIFIERS = (Exists, Forall)
SO_QUANTIFIERS = (ExistsSO, ForallSO)


# -- builders ----------------------------------------------------------------


def conj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif p == TRUE:
            continue
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        elif p == FALSE:
            continue
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def exists(vars_, body) -> Formula:
    for v in reversed(vars_.split() if isinstance(vars_, str) else vars_):
        body = Exists(v, body)
    return body


def forall(vars_, body) -> Formula:
    for v in reversed(vars_.split() if isinstance(vars_, str) else vars_):
        body = Forall(v, body)
    return body


def exists_in(var, set_var, body) -> Formula:
    """``exists var in set_var . body``"""
    return Exists(var, And((Atom(set_var, (var,)), body)))


def forall_in(var, set_var, body) -> Formula:
    """``forall var in set_var . body``"""
    return Forall(var, Implies(Atom(set_var, (var,)), body))


def forall_nonempty(set_var, body, witness=None) -> Formula:
    """``forall X nonempty . body``: ``forall X . (exists x . X(x)) -> body``."""
    w = witness or fresh_name("x", variables(body) | {set_var})
    return ForallSO(set_var, 1, Implies(Exists(w, Atom(set_var, (w,))), body))


def fresh_name(stem: str, taken) -> str:
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


# -- traversal -----------------------------------------------------------------


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (Not, Exists, Forall, ExistsSO, ForallSO)):
        return (phi.body,)
    if isinstance(phi, (And, Or)):
        return phi.parts
    if isinstance(phi, (Implies, Iff)):
        return (phi.left, phi.right)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(reversed(children(f)))


def variables(phi: Formula) -> set[str]:
    """Every variable or relation name mentioned anywhere (bound, free or symbol)."""
    out = set()
    for f in subformulas(phi):
        if isinstance(f, Atom):
            out.add(f.rel)
            out.update(f.args)
        elif isinstance(f, Eq):
            out.update((f.left, f.right))
        elif isinstance(f, (Exists, Forall, ExistsSO, ForallSO)):
            out.add(f.var)
    return out


def free_names(phi: Formula, bound_fo=frozenset(), bound_so=frozenset()):
    """``(free element names, free relation names with arities)``.

    Relation symbols of the signature show up as free relation names.
    """
    fo, so = set(), {}

    def walk(f, bfo, bso):
        if isinstance(f, Atom):
            if f.rel not in bso:
                so.setdefault(f.rel, len(f.args))
            fo.update(a for a in f.args if a not in bfo)
        elif isinstance(f, Eq):
            fo.update(a for a in (f.left, f.right) if a not in bfo)
        elif isinstance(f, (Exists, Forall)):
            walk(f.body, bfo | {f.var}, bso)
        elif isinstance(f, (ExistsSO, ForallSO)):
            walk(f.body, bfo, bso | {f.var})
        else:
            for c in children(f):
                walk(c, bfo, bso)

    walk(phi, frozenset(bound_fo), frozenset(bound_so))
    return fo, so


def quantifier_rank(phi: Formula) -> int:
    """Nesting depth of quantifiers, first- and second-order alike."""
    if isinstance(phi, (Exists, Forall, ExistsSO, ForallSO)):
        return 1 + quantifier_rank(phi.body)
    return max((quantifier_rank(c) for c in children(phi)), default=0)


def is_monadic(phi: Formula) -> bool:
    return all(f.arity <= 1 for f in subformulas(phi) if isinstance(f, SO_QUANTIFIERS))


def is_so_free(phi: Formula) -> bool:
    return not any(isinstance(f, SO_QUANTIFIERS) for f in subformulas(phi))


def map_atoms(phi: Formula, fn) -> Formula:
    """Rebuild ``phi`` with every :class:`Atom` replaced by ``fn(atom)``."""
    if isinstance(phi, Atom):
        return fn(phi)
    if isinstance(phi, (Const, Eq)):
        return phi
    if isinstance(phi, Not):
        return Not(map_atoms(phi.body, fn))
    if isinstance(phi, And):
        return And(tuple(map_atoms(p, fn) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(map_atoms(p, fn) for p in phi.parts))
    if isinstance(phi, Implies):
        return Implies(map_atoms(phi.left, fn), map_atoms(phi.right, fn))
    if isinstance(phi, Iff):
        return Iff(map_atoms(phi.left, fn), map_atoms(phi.right, fn))
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, map_atoms(phi.body, fn))
    if isinstance(phi, (ExistsSO, ForallSO)):
        return type(phi)(phi.var, phi.arity, map_atoms(phi.body, fn))
    raise TypeError(f"not a formula: {phi!r}")


def rename_free(phi: Formula, mapping: dict) -> Formula:
    """Capture-avoiding renaming of free element variables.

    Bound variables that would capture a new name are renamed first.
    """
    if not mapping:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.rel, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Const):
        return phi
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        var, body = phi.var, phi.body
        if var in inner.values():
            new = fresh_name(var, variables(body) | set(inner.values()) | set(inner))
            body = rename_free(body, {var: new})
            var = new
        return type(phi)(var, rename_free(body, inner))
    if isinstance(phi, (ExistsSO, ForallSO)):
        return type(phi)(phi.var, phi.arity, rename_free(phi.body, mapping))
    if isinstance(phi, Not):
        return Not(rename_free(phi.body, mapping))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(rename_free(p, mapping) for p in phi.parts))
    return type(phi)(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
