"""Reproducible experiments with expected verdicts.

Each experiment returns a :class:`Report`; ``report.ok`` is false as soon
as one row deviates from its expected value.
"""

from __future__ import annotations

import graphlib
import itertools
import re
from dataclasses import dataclass, field

from ..datalog import derives_goal
from ..homomorphism import hom_exists
from ..logic.constructions import HENSON_SIGNATURE, henson_phi, henson_tournament, ladder_of_word
from ..logic.evaluate import GUARDED, STANDARD, eval_formula
from ..structures import DIGRAPH, Structure, disjoint_union, enumerate_structures, word_to_structure
from .closure import sim_partition
from .gallery import gallery, path, unary_point


@dataclass
class Report:
    name: str
    header: tuple[str, ...]
    rows: list = field(default_factory=list)
    deviations: int = 0
    notes: list = field(default_factory=list)

    def add(self, *cells, ok: bool = True):
        self.rows.append(tuple(cells) + ("ok" if ok else "DEVIATION",))
        if not ok:
            self.deviations += 1

    @property
    def ok(self) -> bool:
        return self.deviations == 0

    def render(self) -> str:
        head = self.header + ("check",)
        table = [head] + [tuple(str(c) for c in r) for r in self.rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(head))]
        lines = [f"== {self.name} =="]
        for r in table:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        lines.extend(self.notes)
        lines.append(f"{len(self.rows)} rows, {self.deviations} deviations: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _is_anbn(w: str) -> bool:
    m = re.fullmatch(r"(a+)(b+)", w)
    return bool(m) and len(m.group(1)) == len(m.group(2))


def words_ab(min_len: int, max_len: int):
    """All words in a*b* with length in the given range, shortest first."""
    for n in range(min_len, max_len + 1):
        for i in range(n, -1, -1):
            yield "a" * i + "b" * (n - i)


def word_ladder(max_len: int = 10, gso_max_len: int = 8) -> Report:
    """Ladder program on words of a*b*, and the universal SO sentence in guarded mode."""
    prog = gallery("ladder_program")
    phi = gallery("gso_ladder_sentence")
    rep = Report("word-ladder", ("word", "expected", "datalog", "gso"))
    fig1 = gallery("ladder_structure_fig1")
    got = derives_goal(prog, fig1)
    rep.add("fig1", "GOAL", "GOAL" if got else "NO-GOAL", "-", ok=got)
    for w in words_ab(2, max_len):
        b = ladder_of_word(word_to_structure(w))
        want = _is_anbn(w)
        dl = derives_goal(prog, b)
        ok = dl == want
        gso = "-"
        if len(w) <= gso_max_len:
            g = eval_formula(phi, b, GUARDED)
            gso = "TRUE" if g else "FALSE"
            ok = ok and g == dl
        rep.add(w, "GOAL" if want else "NO-GOAL", "GOAL" if dl else "NO-GOAL", gso, ok=ok)
    return rep


def paths(max_n: int = 6) -> Report:
    """The complement example program on P_n and on P_i + P_j."""
    prog = gallery("complement_example_program")
    rep = Report("paths", ("input", "expected", "got"))
    for n in range(1, max_n + 1):
        got = derives_goal(prog, path(n))
        rep.add(f"P{n}", "NO-GOAL", "GOAL" if got else "NO-GOAL", ok=not got)
    for i in range(1, max_n + 1):
        for j in range(1, max_n + 1):
            got = derives_goal(prog, disjoint_union(path(i), path(j)))
            rep.add(f"P{i}+P{j}", "GOAL" if i != j else "NO-GOAL", "GOAL" if got else "NO-GOAL", ok=got == (i != j))
    return rep


def unary_expected_blocks():
    """Predicates describing the seven classes of the unary example.

    For distinct i, j: CSP(Si+Sj) minus CSP(Si) and CSP(Sj); CSP(Si) minus
    CSP(I); and CSP(I), where I is the one-point structure with empty
    relations.
    """
    s = {i: unary_point(i) for i in (0, 1, 2, 3)}
    blocks = {}
    for i, j in ((1, 2), (2, 3), (3, 1)):
        u = disjoint_union(s[i], s[j])
        blocks[f"[S{i}+S{j}]"] = (
            lambda a, u=u, i=i, j=j: hom_exists(a, u) and not hom_exists(a, s[i]) and not hom_exists(a, s[j])
        )
    for i in (1, 2, 3):
        blocks[f"[S{i}]"] = lambda a, i=i: hom_exists(a, s[i]) and not hom_exists(a, s[0])
    blocks["[I]"] = lambda a: hom_exists(a, s[0])
    return blocks


def unary_sim(member_bound: int = 3, witness_bounds=(2, 3)) -> Report:
    """Bounded ~-partition of the unary CSP-union class against the expected listing."""
    o = gallery("unary_csp_oracle")
    expected = unary_expected_blocks()
    rep = Report("unary-sim", ("witness_bound", "blocks", "members", "listing"))
    for m in witness_bounds:
        sp = sim_partition(o, member_bound, m)
        labels = []
        agree = True
        for block in sp.blocks:
            names = {next((n for n, f in expected.items() if f(a)), "?") for a in block}
            agree = agree and len(names) == 1 and "?" not in names
            labels.append(sorted(names)[0])
        agree = agree and len(set(labels)) == len(labels)
        listing = " ".join(f"{lab}:{len(b)}" for lab, b in sorted(zip(labels, sp.blocks), key=lambda t: t[0]))
        rep.add(m, len(sp), len(sp.universe), listing, ok=agree and len(sp) == 7)
    rep.notes.append("blocks are a bounded-witness approximation of ~ (they can only be coarser)")
    return rep


def tournaments(n: int):
    """All labelled tournaments on ``{0..n-1}``."""
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        edges = [(i, j) if bits >> k & 1 else (j, i) for k, (i, j) in enumerate(pairs)]
        yield Structure(DIGRAPH, range(n), {"E": edges})


def embeds_induced(small: Structure, big: Structure) -> bool:
    """Injective map preserving edges and non-edges of E."""
    es, eb = small.rel("E"), big.rel("E")
    dom = small.domain
    for img in itertools.permutations(big.domain, len(dom)):
        m = dict(zip(dom, img))
        if all(((m[x], m[y]) in eb) == ((x, y) in es) for x in dom for y in dom):
            return True
    return False


def henson_embedding_oracle(t: Structure) -> bool:
    """Loopless and no induced T_m, checked directly."""
    if any(x == y for x, y in t.rel("E")):
        return False
    return not any(embeds_induced(henson_tournament(m), t) for m in range(2, len(t) - 1))


def henson(max_vertices: int = 5, phi_sizes=(2, 3, 4)) -> Report:
    phi = henson_phi()
    outer = gallery("henson_outer_sentence")
    rep = Report("henson", ("input", "expected", "got"))
    for n in phi_sizes:
        t = henson_tournament(n)
        x = Structure(HENSON_SIGNATURE, t.domain, {"X": [(e,) for e in t.domain], "E": t.rel("E")})
        got = eval_formula(phi, x)
        rep.add(f"phi on T{n}", "TRUE", "TRUE" if got else "FALSE", ok=got)
    for v in range(1, max_vertices + 1):
        agree = total = 0
        for t in tournaments(v):
            total += 1
            agree += eval_formula(outer, t) == henson_embedding_oracle(t)
        rep.add(f"outer on {total} tournaments, {v} vertices", f"{total} agree", f"{agree} agree", ok=agree == total)
    return rep


def is_acyclic(a: Structure) -> bool:
    """Topological-sort oracle."""
    ts = graphlib.TopologicalSorter({x: set() for x in a.domain})
    for x, y in a.rel("E"):
        if x == y:
            return False
        ts.add(y, x)
    try:
        ts.prepare()
    except graphlib.CycleError:
        return False
    return True


def acyclic(max_vertices: int = 4) -> Report:
    phi = gallery("acyclicity_sentence")
    rep = Report("acyclic", ("vertices", "digraphs", "acyclic", "mismatches"))
    for v in range(1, max_vertices + 1):
        total = acyc = bad = 0
        for a in enumerate_structures(DIGRAPH, v, min_size=v):
            total += 1
            want = is_acyclic(a)
            acyc += want
            bad += eval_formula(phi, a, STANDARD) != want
        rep.add(v, total, acyc, bad, ok=bad == 0)
    return rep


EXPERIMENTS = {
    "word-ladder": word_ladder,
    "paths": paths,
    "unary-sim": unary_sim,
    "henson": henson,
    "acyclic": acyclic,
}


def run(name: str) -> Report:
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; known: {', '.join(EXPERIMENTS)}") from None
    return fn()
