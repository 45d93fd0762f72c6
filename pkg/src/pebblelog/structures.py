"""Finite relational signatures and structures.

Elements are small integers.  A structure keeps its relations as frozensets
of tuples, is immutable, and compares equal to another structure exactly when
signature, domain, facts and constants coincide (element labels used for
printing are ignored).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from . import budget as _budget
from .errors import BudgetExceeded, ParseError, SignatureMismatch, StructureError

_NAME = re.compile(r"^[^\s/=#%()][^\s/=%()]*$")


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities plus a set of constant symbols.

    Relation order is significant only for printing.
    """

    relations: tuple[tuple[str, int], ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [r for r, _ in self.relations]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate relation symbol in {names}")
        if len(set(self.constants)) != len(self.constants):
            raise StructureError("duplicate constant symbol")
        for name in names + list(self.constants):
            if not name or not _NAME.match(name):
                raise StructureError(f"bad symbol name {name!r}")
        for name, ar in self.relations:
            if not isinstance(ar, int) or ar < 0:
                raise StructureError(f"bad arity {ar!r} for {name}")
        clash = set(names) & set(self.constants)
        if clash:
            raise StructureError(f"symbols used as relation and constant: {sorted(clash)}")

    @classmethod
    def of(cls, relations: Mapping[str, int] | Iterable[tuple[str, int]] = (), constants=()):
        if isinstance(relations, Mapping):
            relations = relations.items()
        return cls(tuple((str(r), int(a)) for r, a in relations), tuple(constants))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse ``"E/2 S/1"``."""
        rels = []
        for tok in text.split():
            name, sep, ar = tok.rpartition("/")
            if not sep or not name or not ar.isdigit():
                raise ParseError(f"expected NAME/ARITY, got {tok!r}")
            rels.append((name, int(ar)))
        return cls(tuple(rels))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.relations)

    def arity(self, name: str) -> int:
        for r, a in self.relations:
            if r == name:
                return a
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(r == name for r, _ in self.relations)

    def same_as(self, other: "Signature") -> bool:
        return dict(self.relations) == dict(other.relations) and set(self.constants) == set(
            other.constants
        )

    def union(self, other: "Signature") -> "Signature":
        rels = dict(self.relations)
        for r, a in other.relations:
            if rels.get(r, a) != a:
                raise SignatureMismatch(f"arity clash for {r}: {rels[r]} vs {a}")
            rels.setdefault(r, a)
        consts = tuple(dict.fromkeys(self.constants + other.constants))
        return Signature(tuple(rels.items()), consts)

    def restrict(self, names: Iterable[str]) -> "Signature":
        keep = set(names)
        return Signature(tuple((r, a) for r, a in self.relations if r in keep), self.constants)

    def without_constants(self) -> "Signature":
        return Signature(self.relations, ())

    def with_constants(self, constants: Iterable[str]) -> "Signature":
        return Signature(self.relations, tuple(dict.fromkeys(tuple(self.constants) + tuple(constants))))

    def __str__(self):
        return " ".join(f"{r}/{a}" for r, a in self.relations)


class Structure:
    """A finite structure over a :class:`Signature`.

    ``relations`` maps every relation symbol of the signature to a set of
    tuples (missing symbols are empty).  ``constants`` maps every constant
    symbol to a domain element.
    """

    __slots__ = ("signature", "domain", "_rel", "constants", "labels", "_hash", "_domset")

    def __init__(
        self,
        signature: Signature,
        domain: Iterable[int],
        relations: Mapping[str, Iterable[tuple]] | None = None,
        constants: Mapping[str, int] | None = None,
        labels: Mapping[int, str] | None = None,
    ):
        dom = tuple(sorted(set(domain)))
        if not dom:
            raise StructureError("domain must be non-empty")
        domset = frozenset(dom)
        relations = dict(relations or {})
        unknown = set(relations) - set(signature.names)
        if unknown:
            raise StructureError(f"relations not in signature: {sorted(unknown)}")
        rel = {}
        for name, ar in signature.relations:
            facts = frozenset(tuple(t) for t in relations.get(name, ()))
            for t in facts:
                if len(t) != ar:
                    raise StructureError(f"{name}{t}: arity {ar} expected")
                for e in t:
                    if e not in domset:
                        raise StructureError(f"{name}{t}: {e!r} not in domain")
            rel[name] = facts
        constants = dict(constants or {})
        if set(constants) != set(signature.constants):
            raise StructureError(
                f"constant map {sorted(constants)} does not match signature {sorted(signature.constants)}"
            )
        for c, e in constants.items():
            if e not in domset:
                raise StructureError(f"constant {c} -> {e!r} not in domain")
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "_rel", rel)
        object.__setattr__(self, "constants", constants)
        object.__setattr__(self, "labels", dict(labels) if labels else None)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_domset", domset)

    def __setattr__(self, key, value):
        raise AttributeError("Structure is immutable")

    # -- access -----------------------------------------------------------
    def rel(self, name: str) -> frozenset:
        return self._rel[name]

    @property
    def relations(self) -> dict[str, frozenset]:
        return dict(self._rel)

    def __len__(self):
        return len(self.domain)

    def __contains__(self, element):
        return element in self._domset

    def facts(self) -> Iterator[tuple[str, tuple]]:
        """All facts in signature order, tuples sorted."""
        for name in self.signature.names:
            for t in sorted(self._rel[name]):
                yield name, t

    def fact_count(self) -> int:
        return sum(len(v) for v in self._rel.values())

    def label(self, e) -> str:
        if self.labels and e in self.labels:
            return self.labels[e]
        return str(e)

    # -- identity ---------------------------------------------------------
    def _key(self):
        return (
            tuple(sorted(self.signature.relations)),
            tuple(sorted(self.signature.constants)),
            self.domain,
            tuple(sorted((n, tuple(sorted(f))) for n, f in self._rel.items())),
            tuple(sorted(self.constants.items())),
        )

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._key()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{n}={sorted(self._rel[n])}" for n in self.signature.names)
        consts = "".join(f", {c}={e}" for c, e in sorted(self.constants.items()))
        return f"Structure(domain={list(self.domain)}, {body}{consts})"

    # -- derived structures -----------------------------------------------
    def replace(self, relations=None, constants=None, signature=None, domain=None) -> "Structure":
        rel = dict(self._rel)
        if relations:
            rel.update(relations)
        sig = signature or self.signature
        rel = {k: v for k, v in rel.items() if k in sig}
        return Structure(
            sig,
            self.domain if domain is None else domain,
            rel,
            self.constants if constants is None else constants,
            self.labels,
        )

    def expand(self, name: str, arity: int, tuples: Iterable[tuple]) -> "Structure":
        """Add a new relation symbol interpreted by ``tuples``."""
        if name in self.signature:
            raise StructureError(f"{name} already in signature")
        sig = Signature(self.signature.relations + ((name, arity),), self.signature.constants)
        rel = dict(self._rel)
        rel[name] = tuples
        return Structure(sig, self.domain, rel, self.constants, self.labels)

    def with_constant(self, name: str, element: int) -> "Structure":
        sig = self.signature.with_constants([name])
        consts = dict(self.constants)
        consts[name] = element
        return Structure(sig, self.domain, self._rel, consts, self.labels)

    def reduct(self, names: Iterable[str]) -> "Structure":
        sig = self.signature.restrict(names)
        return Structure(sig, self.domain, {n: self._rel[n] for n in sig.names}, self.constants, self.labels)

    def relabel(self, mapping: Mapping[int, int]) -> "Structure":
        """Rename elements through an injective ``mapping``."""
        if len(set(mapping[e] for e in self.domain)) != len(self.domain):
            raise StructureError("relabelling must be injective")
        rel = {n: {tuple(mapping[e] for e in t) for t in f} for n, f in self._rel.items()}
        consts = {c: mapping[e] for c, e in self.constants.items()}
        labels = None
        if self.labels:
            labels = {mapping[e]: l for e, l in self.labels.items()}
        return Structure(self.signature, [mapping[e] for e in self.domain], rel, consts, labels)

    def normalized(self, start: int = 1) -> "Structure":
        """Relabel the domain to ``start, start+1, ...`` preserving order."""
        return self.relabel({e: i for i, e in enumerate(self.domain, start)})

    def induced(self, elements: Iterable[int]) -> "Structure":
        keep = frozenset(elements)
        rel = {n: {t for t in f if all(e in keep for e in t)} for n, f in self._rel.items()}
        return Structure(self.signature, keep, rel, self.constants, self.labels)

    def is_substructure_of(self, other: "Structure") -> bool:
        """Same domain and fact-wise inclusion."""
        if self.domain != other.domain or not self.signature.same_as(other.signature):
            return False
        return all(self._rel[n] <= other.rel(n) for n in self.signature.names)


# ---------------------------------------------------------------------------
# constructors used throughout the package and its tests


def structure(domain, signature=None, constants=None, **relations) -> Structure:
    """Shorthand: ``structure(3, E=[(1, 2)])`` builds a structure on 1..3.

    Without an explicit signature, arities are read off the given tuples
    (an empty relation needs an explicit signature).
    """
    if isinstance(domain, int):
        domain = range(1, domain + 1)
    if signature is None:
        rels = []
        for name, tuples in relations.items():
            tuples = list(tuples)
            if not tuples:
                raise StructureError(f"cannot infer arity of empty relation {name}")
            rels.append((name, len(tuples[0])))
        signature = Signature(tuple(rels), tuple((constants or {}).keys()))
    elif isinstance(signature, str):
        signature = Signature.parse(signature)
    return Structure(signature, domain, relations, constants)


DIGRAPH = Signature((("E", 2),))


def digraph(n: int, edges: Iterable[tuple[int, int]], start: int = 1) -> Structure:
    return Structure(DIGRAPH, range(start, start + n), {"E": edges})


def clique(n: int) -> Structure:
    """Loopless symmetric complete graph K_n on 1..n."""
    return digraph(n, [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j])


def cycle(n: int, symmetric: bool = False) -> Structure:
    edges = [(i, i % n + 1) for i in range(1, n + 1)]
    if symmetric:
        edges += [(j, i) for i, j in edges]
    return digraph(n, edges)


def directed_path(n: int) -> Structure:
    return digraph(n, [(i, i + 1) for i in range(1, n)])


# ---------------------------------------------------------------------------
# operations


def _check_same_signature(a: Structure, b: Structure):
    if not a.signature.same_as(b.signature):
        raise SignatureMismatch(f"signatures differ: [{a.signature}] vs [{b.signature}]")


def disjoint_union(a: Structure, b: Structure) -> Structure:
    """Union of two structures that share exactly their constants.

    Without constants, ``b`` is first shifted so that its elements follow
    those of ``a`` (for domains ``1..n`` and ``1..m`` the shift is ``n``).
    With constants, the domains must already intersect exactly in the
    constant images and the constant maps must agree.
    """
    _check_same_signature(a, b)
    if a.signature.constants:
        for c in a.signature.constants:
            if a.constants[c] != b.constants[c]:
                raise StructureError(f"constant {c} is interpreted differently")
        shared = set(a.constants.values())
        overlap = set(a.domain) & set(b.domain)
        if overlap != shared or set(b.constants.values()) != shared:
            raise StructureError(
                f"domains overlap in {sorted(overlap)}, expected exactly the constants {sorted(shared)}"
            )
    else:
        offset = a.domain[-1] - b.domain[0] + 1
        b = b.relabel({e: e + offset for e in b.domain})
    rel = {n: a.rel(n) | b.rel(n) for n in a.signature.names}
    labels = None
    if a.labels or b.labels:
        labels = {e: a.label(e) for e in a.domain}
        labels.update({e: b.label(e) for e in b.domain if e not in labels})
    return Structure(a.signature, set(a.domain) | set(b.domain), rel, a.constants, labels)


def guarded_tuples(a: Structure, n: int) -> frozenset:
    """Tuples of length ``n`` whose entries all occur in one fact.

    Constant tuples ``(x, ..., x)`` are always guarded (by ``x = x``).
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = {(e,) * n for e in a.domain}
    seen = set()
    for _, t in a.facts():
        cover = frozenset(t)
        if len(cover) < 2 or cover in seen:
            continue
        seen.add(cover)
        out.update(itertools.product(sorted(cover), repeat=n))
    return frozenset(out)


WORD_SIGNATURE = Signature((("P_a", 1), ("P_b", 1), ("<", 2)))


def word_to_structure(w: str) -> Structure:
    """Positions ``1..|w|`` with letter predicates and the strict order."""
    if not w:
        raise StructureError("empty word")
    bad = set(w) - {"a", "b"}
    if bad:
        raise StructureError(f"letters outside {{a,b}}: {sorted(bad)}")
    n = len(w)
    return Structure(
        WORD_SIGNATURE,
        range(1, n + 1),
        {
            "P_a": [(i,) for i, c in enumerate(w, 1) if c == "a"],
            "P_b": [(i,) for i, c in enumerate(w, 1) if c == "b"],
            "<": [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)],
        },
    )


# ---------------------------------------------------------------------------
# primitive positive formulas and canonical databases


@dataclass(frozen=True)
class PPFormula:
    """``exists bound . conjunct_1 & ... & conjunct_m`` without equality."""

    free: tuple[str, ...]
    bound: tuple[str, ...]
    conjuncts: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        if set(self.free) & set(self.bound):
            raise StructureError("free and bound variables overlap")
        if len(set(self.free)) != len(self.free) or len(set(self.bound)) != len(self.bound):
            raise StructureError("repeated variable")
        known = set(self.free) | set(self.bound)
        for rel, args in self.conjuncts:
            if rel == "=":
                raise StructureError("equality atoms are not allowed; contract variables first")
            for v in args:
                if v not in known:
                    raise StructureError(f"variable {v} in {rel}{args} is neither free nor bound")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.free + self.bound

    def signature(self) -> Signature:
        rels = {}
        for rel, args in self.conjuncts:
            if rels.setdefault(rel, len(args)) != len(args):
                raise StructureError(f"{rel} used with two arities")
        return Signature(tuple(rels.items()))

    def holds(self, a: Structure, values: Mapping[str, int]) -> bool:
        """Brute-force truth of the formula in ``a`` under ``values`` for the free variables."""
        for combo in itertools.product(a.domain, repeat=len(self.bound)):
            env = dict(values)
            env.update(zip(self.bound, combo))
            if all(tuple(env[v] for v in args) in a.rel(rel) for rel, args in self.conjuncts):
                return True
        return False


def canonical_database(phi: PPFormula, signature: Signature | None = None, constants=None) -> Structure:
    """Structure whose elements are the variables of ``phi``.

    Element ``i`` (1-based) is the ``i``-th variable, free ones first.  With
    ``constants`` (``True`` or a list of names) the free variables are also
    named by constants ``c1, c2, ...``.
    """
    variables = phi.variables
    if not variables:
        raise StructureError("formula has no variables; canonical database would be empty")
    sig = signature or phi.signature()
    index = {v: i for i, v in enumerate(variables, 1)}
    rel = {n: set() for n in sig.names}
    for r, args in phi.conjuncts:
        if r not in sig or sig.arity(r) != len(args):
            raise SignatureMismatch(f"{r}/{len(args)} not in signature")
        rel[r].add(tuple(index[v] for v in args))
    consts = {}
    if constants:
        names = [f"c{i}" for i in range(1, len(phi.free) + 1)] if constants is True else list(constants)
        if len(names) != len(phi.free):
            raise StructureError("need one constant name per free variable")
        consts = {c: index[v] for c, v in zip(names, phi.free)}
        sig = sig.with_constants(names)
    labels = {i: v for v, i in index.items()}
    return Structure(sig, index.values(), rel, consts, labels)


# ---------------------------------------------------------------------------
# isomorphism canonical forms and enumeration

MAX_CANON_SIZE = 8


def _element_invariant(a: Structure, e):
    inv = []
    for name in a.signature.names:
        facts = a.rel(name)
        ar = a.signature.arity(name)
        for pos in range(ar):
            inv.append(sum(1 for t in facts if t[pos] == e))
        inv.append(sum(1 for t in facts if ar and all(x == e for x in t)))
    inv.append(tuple(sorted(c for c, x in a.constants.items() if x == e)))
    return tuple(inv)


def canonical_form(a: Structure):
    """A hashable key equal for two structures iff they are isomorphic.

    Brute force over the permutations that respect a simple per-element
    invariant; refuses structures with more than eight elements.
    """
    n = len(a.domain)
    if n > MAX_CANON_SIZE:
        raise BudgetExceeded("canonical form domain size", n, MAX_CANON_SIZE)
    groups = {}
    for e in a.domain:
        groups.setdefault(_element_invariant(a, e), []).append(e)
    keys = sorted(groups)
    cells = [groups[k] for k in keys]
    names = a.signature.names
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in cells)):
        order = [e for p in perms for e in p]
        pos = {e: i for i, e in enumerate(order)}
        enc = tuple(tuple(sorted(tuple(pos[x] for x in t) for t in a.rel(nm))) for nm in names)
        if best is None or enc < best:
            best = enc
    consts = tuple(sorted(a.constants))
    return (tuple(sorted(a.signature.relations)), n, tuple(keys), best, consts)


def is_isomorphic(a: Structure, b: Structure) -> bool:
    if not a.signature.same_as(b.signature) or len(a) != len(b):
        return False
    return canonical_form(a) == canonical_form(b)


def count_structures(sig: Signature, max_size: int) -> int:
    return sum(2 ** sum(m**ar for _, ar in sig.relations) for m in range(1, max_size + 1))


def enumerate_structures(
    sig: Signature, max_size: int, up_to_iso: bool = False, budget: int | None = None, min_size: int = 1
) -> Iterator[Structure]:
    """Every structure on ``{1..m}`` for ``min_size <= m <= max_size``.

    Order: by size, then by the bitmask of present facts (fact positions
    ordered by relation, then lexicographically by tuple).  With
    ``up_to_iso`` only the first structure of each isomorphism class is
    produced.
    """
    if sig.constants:
        raise StructureError("enumeration requires a constant-free signature")
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    limit = _budget.resolve("enumerate", budget)
    total = count_structures(sig, max_size) - count_structures(sig, min_size - 1)
    if total > limit:
        raise BudgetExceeded("structure count", total, limit)
    for m in range(min_size, max_size + 1):
        dom = range(1, m + 1)
        slots = [(name, t) for name, ar in sig.relations for t in itertools.product(dom, repeat=ar)]
        seen = set()
        for bits in range(1 << len(slots)):
            rel = {name: [] for name in sig.names}
            i = 0
            b = bits
            while b:
                if b & 1:
                    name, t = slots[i]
                    rel[name].append(t)
                b >>= 1
                i += 1
            s = Structure(sig, dom, rel)
            if up_to_iso:
                key = canonical_form(s)
                if key in seen:
                    continue
                seen.add(key)
            yield s


# ---------------------------------------------------------------------------
# text format


def format_structure(a: Structure) -> str:
    """Serialize in the line-oriented ``#signature`` format, facts sorted."""
    lines = [f"#signature {a.signature}".rstrip()]
    n = len(a.domain)
    if a.labels:
        lines.append("#elements " + " ".join(a.label(e) for e in a.domain))
    elif a.domain == tuple(range(1, n + 1)):
        lines.append(f"#domain {n}")
    else:
        lines.append("#elements " + " ".join(str(e) for e in a.domain))
    for c in a.signature.constants:
        lines.append(f"#const {c}={a.label(a.constants[c])}")
    for name, t in a.facts():
        lines.append(" ".join([name] + [a.label(e) for e in t]))
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> Structure:
    """Inverse of :func:`format_structure`.

    ``#elements`` with purely numeric tokens keeps the numbers as element
    ids; otherwise the names are mapped to ``1..n`` in the listed order and
    kept as labels.  Blank lines and ``%`` comments are ignored.
    """
    sig = None
    ids = None
    labels = None
    consts = {}
    const_order = []
    facts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "#signature":
                try:
                    sig = Signature.parse(rest)
                except (ParseError, StructureError) as exc:
                    raise ParseError(str(exc), lineno) from None
            elif head == "#domain":
                if not rest.isdigit() or int(rest) < 1:
                    raise ParseError(f"bad domain size {rest!r}", lineno)
                ids = {str(i): i for i in range(1, int(rest) + 1)}
            elif head == "#elements":
                toks = rest.split()
                if not toks or len(set(toks)) != len(toks):
                    raise ParseError("#elements needs distinct names", lineno)
                if all(re.fullmatch(r"-?\d+", t) for t in toks):
                    ids = {t: int(t) for t in toks}
                else:
                    ids = {t: i for i, t in enumerate(toks, 1)}
                    labels = {i: t for t, i in ids.items()}
            elif head == "#const":
                name, eq, val = rest.partition("=")
                if not eq:
                    raise ParseError("expected #const NAME=ELEMENT", lineno)
                consts[name.strip()] = (val.strip(), lineno)
                const_order.append(name.strip())
            else:
                raise ParseError(f"unknown header {head}", lineno)
            continue
        toks = line.split()
        facts.append((toks[0], toks[1:], lineno))
    if sig is None:
        raise ParseError("missing #signature header")
    if ids is None:
        raise ParseError("missing #domain or #elements header")
    sig = sig.with_constants(const_order)
    rel = {n: set() for n in sig.names}
    for name, args, lineno in facts:
        if name not in sig:
            raise ParseError(f"relation {name} not declared", lineno)
        if len(args) != sig.arity(name):
            raise ParseError(f"{name} expects {sig.arity(name)} arguments, got {len(args)}", lineno)
        try:
            rel[name].add(tuple(ids[x] for x in args))
        except KeyError as exc:
            raise ParseError(f"unknown element {exc.args[0]}", lineno) from None
    cmap = {}
    for c, (val, lineno) in consts.items():
        if val not in ids:
            raise ParseError(f"unknown element {val}", lineno)
        cmap[c] = ids[val]
    return Structure(sig, ids.values(), rel, cmap, labels)
