import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import has_directed_cycle
from strategies import UNARY_BINARY, structures
from pebblelog.errors import BudgetExceeded, ParseError, SignatureMismatch
from pebblelog.logic import GUARDED, STANDARD, equiv_q, equiv_q_explain, eval_formula, format_formula, parse_formula
from pebblelog.logic.constructions import (
    acyclicity_sentence,
    gso_ladder_sentence,
    henson_tournament,
    ladder_formulas,
    ladder_of_word,
    substitute_ladder,
)
from pebblelog.logic.evaluate import FormulaError, subsets_in_order
from pebblelog.logic.formula import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    ForallSO,
    Implies,
    Not,
    Or,
    quantifier_rank,
)
from pebblelog.logic.sat import Circuit, solve
from pebblelog.structures import (
    DIGRAPH,
    Signature,
    Structure,
    cycle,
    digraph,
    directed_path,
    disjoint_union,
    enumerate_structures,
    word_to_structure,
)

# -- syntax ------------------------------------------------------------------------------


def test_parse_acyclicity_sugar():
    phi = parse_formula("forall X:1 nonempty . exists x in X . forall y in X . ~E(x,y)")
    assert isinstance(phi, ForallSO) and phi.arity == 1
    assert isinstance(phi.body, Implies)
    assert phi == acyclicity_sentence()


def test_operator_precedence():
    phi = parse_formula("A(x) | B(x) & C(x) -> D(x) -> E(x)")
    a, b, c, d, e = (Atom(n, ("x",)) for n in "ABCDE")
    assert phi == Implies(Or((a, And((b, c)))), Implies(d, e))


def test_comparisons():
    assert parse_formula("x < y") == Atom("<", ("x", "y"))
    assert parse_formula("x != y") == Not(Eq("x", "y"))


def test_quantifier_rank_counts_every_quantifier():
    assert quantifier_rank(parse_formula("exists x . exists y . ~x = y")) == 2
    assert quantifier_rank(parse_formula("exists X:1 . forall x . X(x) | exists y . E(x,y)")) == 3
    assert quantifier_rank(parse_formula("(exists x . true) & (exists y . true)")) == 1


@pytest.mark.parametrize(
    "text",
    [
        "forall X:1 . (exists x1 . X(x1)) -> (exists x . X(x) & (forall y . X(y) -> ~E(x,y)))",
        "exists R:2 . forall x, y . R(x,y) <-> ~R(y,x)",
        "true & ~false | x = y",
    ],
)
def test_format_roundtrip(text):
    phi = parse_formula(text)
    assert parse_formula(format_formula(phi)) == phi


def test_generated_sentences_roundtrip():
    for phi in (acyclicity_sentence(), gso_ladder_sentence()):
        assert parse_formula(format_formula(phi)) == phi


@pytest.mark.parametrize("text, column", [("forall x . E(x,", 16), ("exists X:z . true", 10), ("E(x) &", 7)])
def test_parse_errors_have_positions(text, column):
    with pytest.raises(ParseError) as err:
        parse_formula(text)
    assert err.value.line == 1 and err.value.column == column


# -- SAT core ------------------------------------------------------------------------------


def _brute_sat(clauses, n):
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(x) - 1] == (x > 0) for x in c) for c in clauses):
            return True
    return False


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8), st.lists(st.lists(st.integers(1, 8).flatmap(lambda v: st.sampled_from([v, -v])), max_size=4), max_size=30))
def test_dpll_against_brute_force(n, clauses):
    clauses = [[x for x in c if abs(x) <= n] for c in clauses]
    model = solve(clauses, n)
    assert (model is not None) == _brute_sat(clauses, n)
    if model is not None:
        assert all(any(model.get(abs(x), False) == (x > 0) for x in c) for c in clauses)


def test_circuit_folds_constants():
    c = Circuit()
    x = c.new_var()
    assert c.and_([x, True]) == x
    assert c.and_([x, -x]) is False
    assert c.or_([x, True]) is True


# -- evaluation ----------------------------------------------------------------------------


def test_acyclicity_examples():
    phi = acyclicity_sentence()
    assert not eval_formula(phi, cycle(3))
    assert eval_formula(phi, directed_path(3))


def test_gso_ladder_on_figure_structure():
    fig1 = ladder_of_word(word_to_structure("aaaabbbb"))
    assert eval_formula(gso_ladder_sentence(), fig1, GUARDED)


def test_exists_x_equal_x():
    phi = parse_formula("exists x . x = x")
    for a in enumerate_structures(DIGRAPH, 2):
        assert eval_formula(phi, a)


def test_free_variables_rejected():
    with pytest.raises(FormulaError):
        eval_formula(parse_formula("E(x,x)"), cycle(2))


def test_unknown_symbol_rejected():
    with pytest.raises((FormulaError, SignatureMismatch)):
        eval_formula(parse_formula("exists x . Q(x)"), cycle(2))


def test_budget_refusal():
    phi = parse_formula("exists R:2 . forall x . R(x,x)")
    with pytest.raises(BudgetExceeded):
        eval_formula(phi, cycle(5), engine="enumerate", budget=100)


def test_subset_order_is_popcount_then_lexicographic():
    order = [tuple(sorted(x)) for x in subsets_in_order([1, 2, 3])]
    assert order[0] == () and order[-1] == (1, 2, 3)
    assert order[1:4] == [(1,), (2,), (3,)]
    assert order[4:7] == [(1, 2), (1, 3), (2, 3)]


def test_trace_reports_counterexample():
    res = eval_formula(acyclicity_sentence(), cycle(3), trace=True)
    assert not res.value and res.trace is not None


MSO_SENTENCES = [
    acyclicity_sentence(),
    parse_formula("exists X:1 . forall x, y . E(x,y) -> (X(x) <-> ~X(y))"),
    parse_formula("forall X:1 . (exists x . X(x)) -> exists x in X . exists y . E(x,y) & ~X(y)"),
    parse_formula("exists X:1 nonempty . forall x in X . exists y in X . E(x,y)"),
]


@pytest.mark.parametrize("i", range(len(MSO_SENTENCES)))
def test_guarded_equals_standard_on_mso(i):
    phi = MSO_SENTENCES[i]
    for a in enumerate_structures(DIGRAPH, 3):
        assert eval_formula(phi, a, GUARDED) == eval_formula(phi, a, STANDARD)


@settings(max_examples=40, deadline=None)
@given(structures(min_size=4, max_size=4))
def test_guarded_equals_standard_on_four_elements(a):
    for phi in MSO_SENTENCES:
        assert eval_formula(phi, a, GUARDED) == eval_formula(phi, a, STANDARD)


@pytest.mark.parametrize("i", range(len(MSO_SENTENCES)))
def test_engines_agree(i):
    phi = MSO_SENTENCES[i]
    for a in enumerate_structures(DIGRAPH, 3, up_to_iso=True):
        assert eval_formula(phi, a, engine="enumerate") == eval_formula(phi, a, engine="sat")


def test_binary_so_guarded_differs_from_standard():
    # a relation containing a non-guarded pair exists only in standard mode
    phi = parse_formula("exists R:2 . exists x, y . R(x,y) & ~E(x,y) & ~E(y,x) & ~x = y")
    a = digraph(2, [])
    assert eval_formula(phi, a, STANDARD)
    assert not eval_formula(phi, a, GUARDED)


def test_two_colourability_sentence():
    phi = MSO_SENTENCES[1]
    assert eval_formula(phi, cycle(4, symmetric=True))
    assert not eval_formula(phi, cycle(3, symmetric=True))


def test_acyclicity_matches_cycle_oracle_up_to_three():
    phi = acyclicity_sentence()
    for a in enumerate_structures(DIGRAPH, 3):
        assert eval_formula(phi, a) == (not has_directed_cycle(a))


# -- equivalence ----------------------------------------------------------------------------


E_ONLY = Signature((("E", 2),))


def test_equiv_reflexive():
    for a in enumerate_structures(DIGRAPH, 2, up_to_iso=True):
        for q in range(3):
            assert equiv_q(a, a, q)


def test_one_versus_two_empty_elements():
    a, b = digraph(1, []), digraph(2, [])
    assert equiv_q(a, b, 1)
    res = equiv_q_explain(a, b, 2)
    assert not res.equivalent
    assert quantifier_rank(res.sentence) <= 2
    assert eval_formula(res.sentence, a, GUARDED) != eval_formula(res.sentence, b, GUARDED)
    assert res.trace


def test_isomorphic_structures_are_equivalent():
    a = digraph(3, [(1, 2), (2, 3)])
    b = digraph(3, [(3, 1), (1, 2)])
    assert equiv_q(a, b, 2)


def test_separating_sentences_are_verified():
    small = list(enumerate_structures(DIGRAPH, 2, up_to_iso=True))
    for a, b in itertools.combinations(small, 2):
        res = equiv_q_explain(a, b, 2)
        if not res.equivalent:
            assert eval_formula(res.sentence, a, GUARDED)
            assert not eval_formula(res.sentence, b, GUARDED)


UB2 = list(enumerate_structures(UNARY_BINARY, 2, up_to_iso=True))


def test_equivalence_relation_and_refinement():
    for q in (0, 1, 2):
        rel = {(i, j): equiv_q(a, b, q) for (i, a), (j, b) in itertools.product(enumerate(UB2), repeat=2)}
        for i, j in rel:
            assert rel[i, j] == rel[j, i]
            for m in range(len(UB2)):
                if rel[i, j] and rel[j, m]:
                    assert rel[i, m]
        if q:
            for i, j in rel:
                if rel[i, j]:
                    assert prev[i, j]
        prev = rel


def test_disjoint_union_composition_sample():
    rng = random.Random(7)
    for _ in range(60):
        a1, a2, b1, b2 = (rng.choice(UB2) for _ in range(4))
        for q in (1, 2):
            if equiv_q(a1, a2, q) and equiv_q(b1, b2, q):
                assert equiv_q(disjoint_union(a1, b1), disjoint_union(a2, b2), q)


# -- constructions --------------------------------------------------------------------------


def test_ladder_of_ab():
    s = ladder_of_word(word_to_structure("ab"))
    assert all(s.rel(r) == {(1, 2)} for r in "STRN")


def test_ladder_of_ba_degenerate():
    s = ladder_of_word(word_to_structure("ba"))
    assert s.rel("S") == {(1, 1)}
    assert s.rel("T") == {(2, 2)}


def test_ladder_of_word_matches_formula_definitions():
    defs = ladder_formulas("x", "y", "z")
    for w in ("aabb", "abab", "bbaa", "aaab"):
        ws = word_to_structure(w)
        lad = ladder_of_word(ws)
        for r, f in defs.items():
            got = set()
            for x, y in itertools.product(ws.domain, repeat=2):
                probe = Structure(
                    Signature(ws.signature.relations + (("_x", 1), ("_y", 1))),
                    ws.domain,
                    {**{n: ws.rel(n) for n in ws.signature.names}, "_x": [(x,)], "_y": [(y,)]},
                )
                sent = Exists("x", And((Atom("_x", ("x",)), Exists("y", And((Atom("_y", ("y",)), f))))))
                if eval_formula(sent, probe):
                    got.add((x, y))
            assert got == lad.rel(r), (w, r)


def test_ladder_of_word_rejects_non_orders():
    bad = Structure(word_to_structure("ab").signature, [1, 2], {"P_a": [(1,)], "P_b": [(2,)], "<": [(1, 2), (2, 1)]})
    with pytest.raises(Exception):
        ladder_of_word(bad)


def test_henson_tournament_two():
    t = henson_tournament(2)
    assert t.domain == (0, 1, 2, 3)
    assert t.rel("E") == {(0, 1), (1, 2), (2, 3), (0, 3), (2, 0), (3, 1)}
    with pytest.raises(ValueError):
        henson_tournament(1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_henson_tournaments_are_tournaments(n):
    t = henson_tournament(n)
    e = t.rel("E")
    for x, y in itertools.combinations(t.domain, 2):
        assert ((x, y) in e) != ((y, x) in e)
    assert not any(x == y for x, y in e)


def test_substitute_ladder():
    assert substitute_ladder(parse_formula("S(x,y)")) == ladder_formulas("x", "y", "z")["S"]
    assert substitute_ladder(parse_formula("true")) == parse_formula("true")
    got = substitute_ladder(parse_formula("R(x,y) & N(x,z)"))
    assert got == And((ladder_formulas("x", "y", "w")["R"], ladder_formulas("x", "z", "z1")["N"]))
    with pytest.raises(Exception):
        substitute_ladder(parse_formula("Q(x,y)"))
