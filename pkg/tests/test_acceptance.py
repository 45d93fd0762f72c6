"""Acceptance suite: one reported verdict line per criterion.

Run with ``pytest tests/test_acceptance.py``; the verdict lines appear in
the ``acceptance`` section of the terminal summary.
"""

import functools
import itertools
import random
import time

import pytest

from acceptance_log import expect, part
from oracles import naive_lfp
from pebblelog.canonical import canonical_eval, soundness_check, synthesize_canonical
from pebblelog.datalog import (
    Width,
    _minimize,
    derives_goal,
    goal_witnesses,
    intersect_program,
    least_fixed_point,
    parse_program,
    union_program,
    width,
)
from pebblelog.errors import BudgetExceeded
from pebblelog.homomorphism import hom_search
from pebblelog.lab import ClassOracle, hom_closure_check, sim_partition
from pebblelog.lab.experiments import acyclic, henson, paths, unary_expected_blocks, word_ladder
from pebblelog.lab.gallery import PROGRAM_PAIRS, gallery, gallery_programs
from pebblelog.logic import equiv_q
from pebblelog.logic.constructions import LADDER_SIGNATURE
from pebblelog.pebble import spoiler_wins
from pebblelog.structures import (
    DIGRAPH,
    Signature,
    Structure,
    canonical_form,
    clique,
    digraph,
    directed_path,
    disjoint_union,
    enumerate_structures,
)

TEMPLATES = {
    "K2": clique(2),
    "K3": clique(3),
    "loop": digraph(1, [(1, 1)]),
    "edgeless-1": digraph(1, []),
    "P3": directed_path(3),
}
PARAMS = ((1, 2), (2, 3))

expect(1, "canonical_eval = spoiler_wins on digraphs <= 4 elements (up to iso), 5 templates, (1,2) and (2,3)", "agreement")
expect(2, "spoiler_wins implies no homomorphism, same universe", "soundness")
expect(3, "ladder program on a*b* words of length 2..10 accepts exactly a^n b^n; figure structure gives GOAL", "words", "figure")
expect(4, "guarded GSO ladder sentence agrees with the ladder program for |w| <= 8", "agreement")
expect(5, "complement example program on P_n and P_i + P_j, i,j <= 6", "paths")
expect(6, "unary CSP-union class: 7 blocks with the expected listing, stable from witness bound 2 to 3", "blocks", "stability")
expect(7, "acyclicity sentence = topological-sort oracle on all labelled digraphs <= 4 vertices", "agreement")
expect(8, "Henson sentences: phi on T_2..T_4 and the outer sentence against embeddings up to 5 vertices", "phi", "outer")
expect(
    9,
    "union/intersect width and semantics on gallery pairs over structures <= 3 elements",
    "widths",
    "small signatures exhaustive <= 3",
    "ladder signature exhaustive <= 2",
    "ladder signature exact at 3 (witness antichains)",
    "ladder signature engine sample at 3",
)
expect(10, "disjoint-union composition for {E,R1}-structures <= 2 elements, q <= 2, cap 1", "composition")
expect(11, "hand-written sound width-(1,2) program for edgeless-1 is below the canonical program on <= 4 elements", "containment")
expect(
    12,
    "engine invariants and hom-closure for all gallery programs on structures <= 3 elements",
    "small signatures exhaustive <= 3",
    "ladder signature hom-closure exact <= 3",
    "ladder signature engine invariants sampled",
    "ladder signature engine invariants exhaustive <= 3",
)


@functools.cache
def _game_table():
    rows = []
    for a in enumerate_structures(DIGRAPH, 4, up_to_iso=True):
        for name, b in TEMPLATES.items():
            for l, k in PARAMS:
                rows.append((a, name, l, k, spoiler_wins(a, b, l, k), canonical_eval(a, b, l, k)))
    return rows


def test_criterion_1_canonical_agrees_with_pebble():
    with part(1, "agreement") as st:
        start = time.perf_counter()
        rows = _game_table()
        bad = [(a, n, l, k) for a, n, l, k, s, c in rows if s != c]
        elapsed = time.perf_counter() - start
        assert not bad, bad[:3]
        assert elapsed < 300
        st["note"] = f"{len(rows)} cases, 0 mismatches, {elapsed:.0f}s"


def test_criterion_2_soundness():
    with part(2, "soundness") as st:
        rows = _game_table()
        bad = [(a, n) for a, n, l, k, s, _ in rows if s and hom_search(a, TEMPLATES[n]) is not None]
        assert not bad, bad[:3]
        st["note"] = f"{sum(r[4] for r in rows)} Spoiler wins checked, 0 violations"


@functools.cache
def _word_report():
    start = time.perf_counter()
    rep = word_ladder(10, 8)
    return rep, time.perf_counter() - start


def test_criterion_3_word_correspondence():
    rep, elapsed = _word_report()
    with part(3, "figure"):
        assert rep.rows[0][0] == "fig1" and rep.rows[0][2] == "GOAL"
    with part(3, "words") as st:
        rows = rep.rows[1:]
        assert len(rows) == sum(n + 1 for n in range(2, 11))
        assert all(r[1] == r[2] for r in rows)
        assert [r[0] for r in rows if r[2] == "GOAL"] == ["ab", "aabb", "aaabbb", "aaaabbbb", "aaaaabbbbb"]
        assert elapsed < 30
        st["note"] = f"{len(rows)} words, {elapsed:.1f}s"


def test_criterion_4_gso_sentence():
    rep, elapsed = _word_report()
    with part(4, "agreement") as st:
        checked = [r for r in rep.rows[1:] if r[3] != "-"]
        assert len(checked) == sum(n + 1 for n in range(2, 9))
        assert all((r[3] == "TRUE") == (r[2] == "GOAL") for r in checked)
        assert elapsed < 120
        st["note"] = f"{len(checked)} words"


def test_criterion_5_paths():
    with part(5, "paths") as st:
        start = time.perf_counter()
        rep = paths(6)
        elapsed = time.perf_counter() - start
        assert rep.ok and len(rep.rows) == 6 + 36
        assert elapsed < 10
        st["note"] = f"42 inputs, {elapsed:.1f}s"


def test_criterion_6_unary_partition():
    o = gallery("unary_csp_oracle")
    expected = unary_expected_blocks()
    start = time.perf_counter()
    sp2 = sim_partition(o, 3, 2)
    with part(6, "blocks") as st:
        assert len(sp2) == 7
        labels = []
        for block in sp2.blocks:
            names = {next((n for n, f in expected.items() if f(a)), "?") for a in block}
            assert len(names) == 1 and "?" not in names
            labels.append(names.pop())
        assert sorted(labels) == sorted(expected)
        st["note"] = " ".join(sorted(labels))
    with part(6, "stability") as st:
        sp3 = sim_partition(o, 3, 3)
        as_sets = lambda sp: {frozenset(canonical_form(a) for a in b) for b in sp.blocks}
        assert as_sets(sp3) == as_sets(sp2)
        assert time.perf_counter() - start < 60


def test_criterion_7_acyclicity():
    with part(7, "agreement") as st:
        start = time.perf_counter()
        rep = acyclic(4)
        elapsed = time.perf_counter() - start
        assert rep.ok
        assert rep.rows[-1][1] == 2**16
        assert elapsed < 300
        st["note"] = f"{sum(r[1] for r in rep.rows)} digraphs, {elapsed:.0f}s"


def test_criterion_8_henson():
    start = time.perf_counter()
    rep = henson(5, (2, 3, 4))
    elapsed = time.perf_counter() - start
    with part(8, "phi"):
        assert all(r[-1] == "ok" for r in rep.rows[:3])
    with part(8, "outer") as st:
        assert all(r[-1] == "ok" for r in rep.rows[3:])
        assert len(rep.rows) == 3 + 5
        assert elapsed < 600
        st["note"] = f"1+2+8+64+1024 tournaments, {elapsed:.0f}s"


# -- criterion 9 ---------------------------------------------------------------------------------

PROGS = gallery_programs()


def _is_ladder_sig(p):
    return dict(p.edb.relations) == dict(LADDER_SIGNATURE.relations)


def _product_antichain(w1, w2):
    # for a program intersected with itself, every union m1 | m2 contains m1
    # and m1 | m1 = m1, so the antichain of unions is w1 itself
    if w1 == w2:
        return frozenset(w1)
    return frozenset(_minimize({m1 | m2 for m1 in w1 for m2 in w2}))


def _random_structure(sig, n, rng, density=0.3):
    rel = {}
    for name, ar in sig.relations:
        rel[name] = [t for t in itertools.product(range(1, n + 1), repeat=ar) if rng.random() < density]
    return Structure(sig, range(1, n + 1), rel)


def test_criterion_9_widths():
    with part(9, "widths") as st:
        for x, y in PROGRAM_PAIRS:
            p, q = PROGS[x], PROGS[y]
            wp, wq = width(p), width(q)
            want = Width(max(wp.l, wq.l), max(wp.k, wq.k))
            assert width(union_program(p, q)) == want, (x, y)
            assert width(intersect_program(p, q)) == want, (x, y)
        st["note"] = f"{len(PROGRAM_PAIRS)} pairs"


def test_criterion_9_small_signatures():
    with part(9, "small signatures exhaustive <= 3") as st:
        count = 0
        for x, y in PROGRAM_PAIRS:
            p, q = PROGS[x], PROGS[y]
            if _is_ladder_sig(p):
                continue
            u, i = union_program(p, q), intersect_program(p, q)
            for a in enumerate_structures(p.edb, 3):
                g1, g2 = derives_goal(p, a), derives_goal(q, a)
                assert derives_goal(u, a) == (g1 or g2), (x, y, a)
                assert derives_goal(i, a) == (g1 and g2), (x, y, a)
                count += 1
        st["note"] = f"{count} labelled structures"


LADDER_PAIRS = [(x, y) for x, y in PROGRAM_PAIRS if _is_ladder_sig(PROGS[x])]


def test_criterion_9_ladder_two_elements():
    with part(9, "ladder signature exhaustive <= 2") as st:
        count = 0
        for x, y in LADDER_PAIRS:
            p, q = PROGS[x], PROGS[y]
            u, i = union_program(p, q), intersect_program(p, q)
            for a in enumerate_structures(p.edb, 2):
                g1, g2 = derives_goal(p, a), derives_goal(q, a)
                assert derives_goal(u, a) == (g1 or g2)
                assert derives_goal(i, a) == (g1 and g2)
                count += 1
        st["note"] = f"{count} labelled structures"


@functools.cache
def _witnesses(name, n):
    if "|" in name or "&" in name:
        x, op, y = name.partition("|") if "|" in name else name.partition("&")
        p = union_program(PROGS[x], PROGS[y]) if op == "|" else intersect_program(PROGS[x], PROGS[y])
        return goal_witnesses(p, n)
    return goal_witnesses(PROGS[name], n)


def test_criterion_9_ladder_exact_three():
    with part(9, "ladder signature exact at 3 (witness antichains)") as st:
        sizes = []
        for x, y in LADDER_PAIRS:
            w1, w2 = _witnesses(x, 3), _witnesses(y, 3)
            assert _witnesses(f"{x}|{y}", 3) == frozenset(_minimize(set(w1) | set(w2)))
            assert _witnesses(f"{x}&{y}", 3) == _product_antichain(w1, w2)
            sizes.append(f"{x}/{y}: {len(w1)}x{len(w2)}")
        st["note"] = "; ".join(sizes)


def test_criterion_9_ladder_engine_sample():
    with part(9, "ladder signature engine sample at 3") as st:
        rng = random.Random(20261019)
        count = 0
        for x, y in LADDER_PAIRS:
            p, q = PROGS[x], PROGS[y]
            u, i = union_program(p, q), intersect_program(p, q)
            w1 = _witnesses(x, 3)
            for _ in range(300):
                a = _random_structure(p.edb, 3, rng, rng.choice((0.15, 0.3, 0.5)))
                facts = set(a.facts())
                g1, g2 = derives_goal(p, a), derives_goal(q, a)
                assert g1 == any(m <= facts for m in w1)
                assert derives_goal(u, a) == (g1 or g2)
                assert derives_goal(i, a) == (g1 and g2)
                count += 1
        st["note"] = f"{count} seeded structures"


# -- criterion 10 -------------------------------------------------------------------------------


def test_criterion_10_disjoint_union_composition():
    with part(10, "composition") as st:
        sig = Signature((("R1", 1), ("E", 2)))
        singles = list(enumerate_structures(sig, 2))
        start = time.perf_counter()
        checked = 0
        for q in (0, 1, 2):
            reps, cls = [], []
            for a in singles:
                j = next((j for j, r in enumerate(reps) if equiv_q(a, r, q)), None)
                if j is None:
                    reps.append(a)
                    j = len(reps) - 1
                cls.append(j)
            # the union's class must depend only on the classes of the parts;
            # this covers every quadruple a1 ~ a2, b1 ~ b2
            first = {}
            for (i, a), (j, b) in itertools.product(enumerate(singles), repeat=2):
                u = disjoint_union(a, b)
                key = (cls[i], cls[j])
                if key in first:
                    assert equiv_q(u, first[key], q), (q, a, b)
                else:
                    first[key] = u
                checked += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 300
        st["note"] = f"{len(singles)} structures, {checked} ordered pairs over q=0..2, {elapsed:.0f}s"


# -- criterion 11 -------------------------------------------------------------------------------

HAND_WRITTEN = """\
#edb E/2
#idb P/1 goal/0
P(x) :- E(x,y).
goal :- P(x).
"""


def test_criterion_11_canonicity_sample():
    with part(11, "containment") as st:
        hand = parse_program(HAND_WRITTEN)
        b = TEMPLATES["edgeless-1"]
        assert width(hand) == Width(1, 2)
        assert soundness_check(hand, b, 4) is True
        canon = synthesize_canonical(b, 1, 2)
        count = hits = 0
        for a in enumerate_structures(DIGRAPH, 4):
            count += 1
            if derives_goal(hand, a):
                hits += 1
                assert derives_goal(canon, a), a
        st["note"] = f"{count} structures, {hits} accepted by the hand-written program"


# -- criterion 12 -------------------------------------------------------------------------------


def _lfp(p, a):
    lfp = least_fixed_point(p, a)
    return {n: frozenset(lfp.rel(n)) for n in p.idb.names}


def _check_invariants(p, a, rng, shuffles=10):
    ours = _lfp(p, a)
    ref = naive_lfp(p, a)
    assert all(ours[n] == frozenset(ref[n]) for n in p.idb.names), ("minimality", a)
    for _ in range(shuffles):
        rules = list(p.rules)
        rng.shuffle(rules)
        assert _lfp(p.with_rules(rules), a) == ours, ("rule order", a)
    n = len(a.domain)
    for name, ar in p.edb.relations:
        for t in itertools.product(a.domain, repeat=ar):
            if t in a.rel(name):
                continue
            bigger = a.replace(relations={name: a.rel(name) | {t}})
            big = _lfp(p, bigger)
            assert all(ours[r] <= big[r] for r in p.idb.names), ("monotonicity", a, name, t)
    return n


SMALL_SIG_PROGRAMS = [n for n, p in PROGS.items() if not _is_ladder_sig(p)]
LADDER_SIG_PROGRAMS = [n for n, p in PROGS.items() if _is_ladder_sig(p)]


def test_criterion_12_small_signatures():
    with part(12, "small signatures exhaustive <= 3") as st:
        rng = random.Random(12)
        total = 0
        for name in SMALL_SIG_PROGRAMS:
            p = PROGS[name]
            for a in enumerate_structures(p.edb, 3, up_to_iso=True):
                _check_invariants(p, a, rng)
                total += 1
            assert hom_closure_check(ClassOracle.from_program(p), 3) is True, name
        st["note"] = f"{len(SMALL_SIG_PROGRAMS)} programs, {total} structures up to iso"


def test_criterion_12_ladder_hom_closure():
    with part(12, "ladder signature hom-closure exact <= 3") as st:
        checked = 0
        for name in LADDER_SIG_PROGRAMS:
            w = {n: _witnesses(name, n) for n in (1, 2, 3)}
            for n in (1, 2, 3):
                for m in w[n]:
                    for n2 in (1, 2, 3):
                        for img in itertools.product(range(1, n2 + 1), repeat=n):
                            h = dict(zip(range(1, n + 1), img))
                            image = {(r, tuple(h[x] for x in t)) for r, t in m}
                            assert any(m2 <= image for m2 in w[n2]), (name, m, h)
                            checked += 1
        st["note"] = f"{checked} witness images"


def test_criterion_12_ladder_sampled():
    with part(12, "ladder signature engine invariants sampled") as st:
        rng = random.Random(1012)
        total = 0
        for name in LADDER_SIG_PROGRAMS:
            p = PROGS[name]
            for a in enumerate_structures(p.edb, 1):
                _check_invariants(p, a, rng)
                total += 1
            for n, count in ((2, 1500), (3, 600)):
                for _ in range(count):
                    _check_invariants(p, _random_structure(p.edb, n, rng, rng.choice((0.15, 0.3, 0.5))), rng)
                    total += 1
        st["note"] = f"{total} structures (all of size 1, seeded samples of sizes 2 and 3)"


@pytest.mark.xfail(raises=BudgetExceeded, strict=True, reason="2^36 structures on 3 elements")
def test_criterion_12_ladder_literal():
    with part(12, "ladder signature engine invariants exhaustive <= 3"):
        rng = random.Random(0)
        for name in LADDER_SIG_PROGRAMS:
            p = PROGS[name]
            for a in enumerate_structures(p.edb, 3):
                _check_invariants(p, a, rng)
