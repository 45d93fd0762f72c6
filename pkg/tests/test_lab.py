import pytest

from pebblelog.datalog import derives_goal
from pebblelog.lab import ClassOracle, PreconditionError, hom_closure_check, joint_hom_check, sim_partition
from pebblelog.lab.closure import class_members, elementary_successors
from pebblelog.lab.experiments import EXPERIMENTS, Report, is_acyclic, run, unary_expected_blocks, words_ab
from pebblelog.lab.gallery import (
    PROGRAM_PAIRS,
    RB_SIGNATURE,
    UnknownArtifact,
    gallery,
    gallery_programs,
    names,
    path,
    unary_point,
)
from pebblelog.logic.constructions import henson_tournament
from pebblelog.structures import DIGRAPH, Structure, clique, cycle, digraph, directed_path, disjoint_union


# -- gallery ------------------------------------------------------------------------------


def test_path_three():
    p = gallery("path(3)")
    assert p == gallery("path", 3) == path(3)
    assert p.domain == (1, 2, 3)
    assert p.rel("S") == {(1,)} and p.rel("T") == {(3,)}
    assert p.rel("R") == {(1, 2), (2, 3)}


def test_crb_program_has_one_rule():
    p = gallery("crb_program")
    assert len(p.rules) == 1
    assert [a.rel for a in p.rules[0].body] == ["R", "B"]


def test_henson_entry():
    assert gallery("henson(2)") == henson_tournament(2)


def test_unknown_and_malformed_names():
    with pytest.raises(UnknownArtifact):
        gallery("nope")
    with pytest.raises(KeyError):
        gallery("nope")
    with pytest.raises(ValueError):
        gallery("path")
    with pytest.raises(ValueError):
        gallery("crb_program", 2)


def test_every_listed_name_builds():
    for n in names():
        if n.endswith("(n)"):
            assert gallery(n[:-3], 2) is not None
        else:
            assert gallery(n) is not None


def test_program_pairs_share_edb():
    progs = gallery_programs()
    for x, y in PROGRAM_PAIRS:
        assert dict(progs[x].edb.relations) == dict(progs[y].edb.relations)


# -- closure checks --------------------------------------------------------------------------


def test_elementary_successors_of_a_point():
    succ = list(elementary_successors(digraph(1, []), 2))
    assert digraph(1, [(1, 1)]) in succ
    assert any(len(s) == 2 for s in succ)


def test_one_element_oracle_is_not_hom_closed():
    o = ClassOracle(DIGRAPH, lambda a: len(a) == 1, "one element")
    bad = hom_closure_check(o, 3)
    assert bad is not True
    a, b = bad
    assert len(a) == 1 and len(b) == 2


def test_csp_template_closure():
    assert hom_closure_check(ClassOracle.template(clique(2)), 3, "class") is True
    assert hom_closure_check(ClassOracle.csp(clique(2)), 3, "complement") is True
    assert hom_closure_check(ClassOracle.csp(clique(2)), 3, "class") is not True


@pytest.mark.parametrize("name", ["crb_program", "directed_cycle", "edge_program", "k2_canonical_1_2", "r_program"])
def test_datalog_classes_are_hom_closed(name):
    o = ClassOracle.from_program(gallery(name))
    assert hom_closure_check(o, 3) is True


def test_bad_direction():
    with pytest.raises(ValueError):
        hom_closure_check(ClassOracle.csp(clique(2)), 2, "sideways")


# -- bounded ~ partition -------------------------------------------------------------------------


def test_unary_example_has_seven_blocks():
    o = gallery("unary_csp_oracle")
    expected = unary_expected_blocks()
    sp = sim_partition(o, 3, 2)
    assert len(sp) == 7
    for block in sp.blocks:
        labels = {next(n for n, f in expected.items() if f(a)) for a in block}
        assert len(labels) == 1
    assert "approximation" in sp.note
    assert len(sim_partition(o, 3, 3)) == 7


def test_blocks_only_split_as_witnesses_grow():
    o = gallery("unary_csp_oracle")
    coarse, fine = sim_partition(o, 2, 1), sim_partition(o, 2, 2)
    for block in fine.blocks:
        assert len({coarse.block_of(a) for a in block}) == 1
    assert len(fine) >= len(coarse)


def test_union_closed_classes_have_one_block():
    assert len(sim_partition(ClassOracle.csp(clique(2)), 3, 2)) == 1
    everything = ClassOracle(DIGRAPH, lambda a: True, "all")
    assert len(sim_partition(everything, 2, 2)) == 1


def test_precondition_is_checked():
    with pytest.raises(PreconditionError) as err:
        sim_partition(ClassOracle.template(clique(2)), 3, 2)
    assert err.value.counterexample is not None


def test_class_members_up_to_iso():
    members = class_members(ClassOracle.csp(digraph(1, [])), 3)
    assert all(not a.rel("E") for a in members)
    assert sorted(len(a) for a in members) == [1, 2, 3]


# -- joint homomorphism property ----------------------------------------------------------------


def test_csp_class_has_joint_homs():
    assert joint_hom_check(ClassOracle.csp(clique(2)), 2) is True


def test_complement_example_path_pair():
    o = ClassOracle.from_program(gallery("complement_example_program")).complement()
    assert joint_hom_check(o, 3, members=[path(1), path(1)]) is True
    assert joint_hom_check(o, 3, members=[path(1), path(2)], witness_bound=3) == (path(1), path(2))


def test_crb_complement_pair():
    o = ClassOracle.from_program(gallery("crb_program")).complement()
    r = Structure(RB_SIGNATURE, [1], {"R": [(1,)]})
    b = Structure(RB_SIGNATURE, [1], {"B": [(1,)]})
    assert joint_hom_check(o, 1, members=[r, b]) == (r, b)


def test_listed_members_must_be_in_class():
    o = ClassOracle.csp(clique(2))
    with pytest.raises(PreconditionError):
        joint_hom_check(o, 3, members=[clique(3)])


# -- experiments -------------------------------------------------------------------------------


def test_words_ab():
    assert list(words_ab(2, 2)) == ["aa", "ab", "bb"]
    assert len(list(words_ab(2, 10))) == sum(n + 1 for n in range(2, 11))


def test_topological_oracle():
    assert is_acyclic(directed_path(3))
    assert not is_acyclic(cycle(3))
    assert not is_acyclic(digraph(1, [(1, 1)]))


def test_report_rendering():
    rep = Report("demo", ("a", "b"))
    rep.add(1, 2)
    rep.add(3, 4, ok=False)
    text = rep.render()
    assert text.splitlines()[0] == "== demo =="
    assert "DEVIATION" in text and text.endswith("2 rows, 1 deviations: FAIL")
    assert not rep.ok


def test_paths_experiment():
    rep = run("paths")
    assert rep.ok and len(rep.rows) == 42


def test_unknown_experiment():
    with pytest.raises(KeyError):
        run("nope")
    assert set(EXPERIMENTS) == {"word-ladder", "paths", "unary-sim", "henson", "acyclic"}
