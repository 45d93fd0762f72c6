"""The existential (l,k)-pebble game, decided positionally.

Duplicator wins iff there is a non-empty family of partial homomorphisms
with domains of size at most ``k`` that is closed under restriction and has
the forth property: every member with at most ``l`` elements extends to
every larger domain of size at most ``k``.  The greatest such family is
computed by deleting offending maps until nothing changes.

At a fixpoint that is closed under restriction, extending to every domain
of size exactly ``min(k, |A|)`` already implies extending to all smaller
supersets, so only those maximal domains are checked.
"""

from __future__ import annotations

import itertools
import random
from array import array
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import _kernels
from . import budget as _budget
from .errors import BudgetExceeded, PebblelogError, SignatureMismatch
from .homomorphism import hom_exists
from .structures import Structure, enumerate_structures


@dataclass(frozen=True, order=True)
class PartialHom:
    """A finite partial map, stored as sorted ``(x, y)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "PartialHom":
        return cls(tuple(sorted(mapping.items())))

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def restrict(self, elements: Iterable[int]) -> "PartialHom":
        keep = set(elements)
        return PartialHom(tuple(p for p in self.pairs if p[0] in keep))

    def __len__(self):
        return len(self.pairs)

    def __str__(self):
        if not self.pairs:
            return "{}"
        return ",".join(f"{x}->{y}" for x, y in self.pairs)


@dataclass(frozen=True)
class StrategyFamily:
    a: Structure
    b: Structure
    l: int
    k: int
    members: frozenset

    def __bool__(self):
        return bool(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, h):
        if isinstance(h, Mapping):
            h = PartialHom.of(h)
        return h in self.members

    def sorted_members(self) -> list[PartialHom]:
        return sorted(self.members, key=lambda h: (len(h), h.pairs))

    def dump(self) -> str:
        return "".join(f"{h}\n" for h in self.sorted_members())


def _check_params(a: Structure, b: Structure, l: int, k: int):
    if not a.signature.same_as(b.signature):
        raise SignatureMismatch(f"signatures differ: [{a.signature}] vs [{b.signature}]")
    if not (1 <= l < k):
        raise ValueError(f"need 1 <= l < k, got l={l}, k={k}")


def partial_homs_on(a: Structure, b: Structure, dom: Sequence[int]) -> list[tuple[int, ...]]:
    """Value tuples ``v`` such that ``dict(zip(dom, v))`` is a partial hom ``a -> b``.

    ``dom`` must be sorted; results come in lexicographic order.
    """
    inside = set(dom)
    pos = {x: i for i, x in enumerate(dom)}
    checks = []
    for name in a.signature.names:
        target = b.rel(name)
        for t in a.rel(name):
            if all(x in inside for x in t):
                checks.append((tuple(pos[x] for x in t), target))
    choices = []
    for x in dom:
        fixed = {b.constants[c] for c, e in a.constants.items() if e == x}
        if len(fixed) > 1:
            return []
        choices.append(sorted(fixed) if fixed else list(b.domain))
    out = []
    for vals in itertools.product(*choices):
        if all(tuple(vals[i] for i in idx) in target for idx, target in checks):
            out.append(vals)
    return out


def _build(a, b, l, k, budget):
    limit = _budget.resolve("pebble", budget)
    bound = len(a.domain) ** k * len(b.domain) ** k
    if bound > limit:
        raise BudgetExceeded("pebble candidate maps |A|^k*|B|^k", bound, limit)
    kk = min(k, len(a.domain))
    maps = []  # (dom, vals)
    index = {}
    for size in range(kk + 1):
        for dom in itertools.combinations(a.domain, size):
            for vals in partial_homs_on(a, b, dom):
                index[(dom, vals)] = len(maps)
                maps.append((dom, vals))

    parent_ptr, parent_idx = array("i", [0]), array("i")
    grp_ptr, ext_ptr, ext_idx = array("i", [0]), array("i", [0]), array("i")
    for dom, vals in maps:
        for j in range(len(dom)):
            sub = (dom[:j] + dom[j + 1 :], vals[:j] + vals[j + 1 :])
            parent_idx.append(index.get(sub, -1))
        parent_ptr.append(len(parent_idx))
        if len(dom) <= l and len(dom) < kk:
            rest = [x for x in a.domain if x not in dom]
            for more in itertools.combinations(rest, kk - len(dom)):
                big = tuple(sorted(dom + more))
                where = [big.index(x) for x in dom]
                free = [i for i in range(len(big)) if big[i] not in dom]
                for extra in itertools.product(b.domain, repeat=len(free)):
                    full = [0] * len(big)
                    for i, v in zip(where, vals):
                        full[i] = v
                    for i, v in zip(free, extra):
                        full[i] = v
                    e = index.get((big, tuple(full)))
                    if e is not None:
                        ext_idx.append(e)
                ext_ptr.append(len(ext_idx))
        grp_ptr.append(len(ext_ptr) - 1)
    # a missing restriction means the restriction is not a partial hom,
    # which cannot happen (restrictions of partial homs are partial homs)
    assert -1 not in parent_idx
    return maps, parent_ptr, parent_idx, grp_ptr, ext_ptr, ext_idx


def greatest_strategy_family(
    a: Structure,
    b: Structure,
    l: int,
    k: int,
    budget: int | None = None,
    order: str | int | None = None,
    kernel: Callable | None = None,
) -> StrategyFamily:
    """Greatest restriction-closed family with the (l,k)-forth property.

    ``order`` controls the sweep order: ``None`` for the natural order,
    ``"reverse"``, or an integer seed for a random permutation.  The result
    does not depend on it.  ``kernel`` overrides the sweep implementation.
    """
    _check_params(a, b, l, k)
    maps, parent_ptr, parent_idx, grp_ptr, ext_ptr, ext_idx = _build(a, b, l, k, budget)
    n = len(maps)
    seq = list(range(n))
    if order == "reverse":
        seq.reverse()
    elif isinstance(order, int):
        random.Random(order).shuffle(seq)
    alive = bytearray(b"\x01" * n)
    run = kernel or _kernels.sweep_fixpoint
    run(alive, parent_ptr, parent_idx, grp_ptr, ext_ptr, ext_idx, array("i", seq))
    members = frozenset(PartialHom(tuple(zip(dom, vals))) for (dom, vals), ok in zip(maps, alive) if ok)
    return StrategyFamily(a, b, l, k, members)


def spoiler_wins(a: Structure, b: Structure, l: int, k: int, budget: int | None = None) -> bool:
    return not greatest_strategy_family(a, b, l, k, budget)


def is_strategy_family(fam: StrategyFamily) -> bool:
    """Check the defining conditions directly (for tests)."""
    from .homomorphism import is_partial_homomorphism

    a, b, l, k = fam.a, fam.b, fam.l, fam.k
    for h in fam.members:
        d = h.as_dict()
        if len(d) > k or not is_partial_homomorphism(a, b, d):
            return False
        for x in d:
            if h.restrict(set(d) - {x}) not in fam.members:
                return False
        if len(d) <= l:
            rest = [x for x in a.domain if x not in d]
            for extra in range(1, k - len(d) + 1):
                for more in itertools.combinations(rest, extra):
                    if not any(
                        PartialHom.of({**d, **dict(zip(more, vals))}) in fam.members
                        for vals in itertools.product(b.domain, repeat=len(more))
                    ):
                        return False
    if fam.members and PartialHom(()) not in fam.members:
        return False
    return True


# ---------------------------------------------------------------------------
# the (l,k)-game against a finite menu of templates


@dataclass(frozen=True)
class GameVerdict:
    spoiler_wins: bool
    template: Structure | None  # Duplicator's pick when Duplicator wins
    template_index: int | None
    rejected: tuple  # (index, template, counterexample) for invalid templates

    @property
    def label(self) -> str:
        return "SPOILER" if self.spoiler_wins else "DUPLICATOR"


class EmptyMenu(PebblelogError, ValueError):
    pass


def lk_game_decision(
    a: Structure,
    menu: Sequence[Structure],
    oracle: Callable[[Structure], bool],
    l: int,
    k: int,
    check_bound: int,
    budget: int | None = None,
) -> GameVerdict:
    """Decide the (l,k)-game where Duplicator first picks a template from ``menu``.

    A template ``b`` is admissible only if no structure with at most
    ``check_bound`` elements is both in CSP(b) and in the oracle's class.
    Spoiler wins iff Spoiler wins the existential game on every admissible
    template.
    """
    for b in menu:
        if not a.signature.same_as(b.signature):
            raise SignatureMismatch("menu template signature differs from the input")
    rejected = []
    surviving = []
    sig = a.signature
    universe = list(enumerate_structures(sig, check_bound, budget=budget)) if check_bound else []
    for i, b in enumerate(menu):
        bad = next((s for s in universe if hom_exists(s, b) and oracle(s)), None)
        if bad is not None:
            rejected.append((i, b, bad))
        else:
            surviving.append((i, b))
    if not surviving:
        raise EmptyMenu("no menu template survives validation")
    for i, b in surviving:
        if not spoiler_wins(a, b, l, k, budget):
            return GameVerdict(False, b, i, tuple(rejected))
    return GameVerdict(True, None, None, tuple(rejected))
