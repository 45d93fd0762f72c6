"""Brute-force reference implementations, deliberately naive.

They share no code with the package beyond the Structure container.
"""

import itertools


def all_maps(a, b):
    dom = a.domain
    for vals in itertools.product(b.domain, repeat=len(dom)):
        yield dict(zip(dom, vals))


def preserves(a, b, h):
    for name in a.signature.names:
        target = b.rel(name)
        for t in a.rel(name):
            if all(x in h for x in t) and tuple(h[x] for x in t) not in target:
                return False
    for c, e in a.constants.items():
        if e in h and h[e] != b.constants[c]:
            return False
    return True


def brute_hom_exists(a, b):
    return any(preserves(a, b, h) for h in all_maps(a, b))


def brute_hom_least(a, b):
    """Lexicographically least homomorphism as a sorted item list, or None."""
    for h in all_maps(a, b):
        if preserves(a, b, h):
            return sorted(h.items())
    return None


def naive_lfp(p, a):
    """Naive iteration: re-fire every rule under every assignment until nothing changes."""
    facts = {n: set(a.rel(n)) for n in p.edb.names}
    for n in p.idb.names:
        facts[n] = set()
    changed = True
    while changed:
        changed = False
        for r in p.rules:
            vs = r.variables
            for vals in itertools.product(a.domain, repeat=len(vs)):
                env = dict(zip(vs, vals))
                if all(tuple(env[v] for v in at.args) in facts[at.rel] for at in r.body):
                    t = tuple(env[v] for v in r.head.args)
                    if t not in facts[r.head.rel]:
                        facts[r.head.rel].add(t)
                        changed = True
    return facts


def brute_greatest_family(a, b, l, k):
    """Greatest family by the definition: every domain of size <= k, every superset checked."""
    maps = set()
    for size in range(min(k, len(a.domain)) + 1):
        for dom in itertools.combinations(a.domain, size):
            for vals in itertools.product(b.domain, repeat=size):
                h = dict(zip(dom, vals))
                if preserves(a, b, h):
                    maps.add(tuple(sorted(h.items())))
    changed = True
    while changed:
        changed = False
        for m in sorted(maps):
            d = dict(m)
            ok = all(tuple(p for p in m if p[0] != x) in maps for x in d)
            if ok and len(d) <= l:
                rest = [x for x in a.domain if x not in d]
                for extra in range(1, k - len(d) + 1):
                    for more in itertools.combinations(rest, extra):
                        if not any(
                            tuple(sorted({**d, **dict(zip(more, vals))}.items())) in maps
                            for vals in itertools.product(b.domain, repeat=extra)
                        ):
                            ok = False
                            break
                    if not ok:
                        break
            if not ok:
                maps.discard(m)
                changed = True
    return maps


def has_directed_cycle(a):
    """Boolean matrix powers: some vertex reaches itself."""
    dom = list(a.domain)
    reach = {(x, y) for x, y in a.rel("E")}
    for _ in dom:
        reach |= {(x, z) for x, y in reach for y2, z in reach if y == y2}
    return any((x, x) in reach for x in dom)
