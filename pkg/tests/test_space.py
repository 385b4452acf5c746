import pytest

from fkmod import corpus
from fkmod.space import (FiniteSpace, classify_space,
                         unique_path_six_conditions,
                         elementary_boundary_pairs,
                         DuplicatePoint, UnknownPoint, CycleDetected)


def test_basic_topology():
    sp = corpus.sierpinski()
    assert sp.n == 2
    assert sp.is_open({"2"}) and not sp.is_closed({"2"})
    assert sp.is_closed({"1"})
    assert sp.closure({"2"}) == frozenset({"1", "2"})
    assert sp.open_hull({"1"}) == frozenset({"1", "2"})


def test_constructor_errors():
    with pytest.raises(DuplicatePoint):
        FiniteSpace(["a", "a"], [])
    with pytest.raises(UnknownPoint):
        FiniteSpace(["a"], [("a", "b")])
    with pytest.raises(CycleDetected):
        FiniteSpace(["a", "b"], [("a", "b"), ("b", "a")])


def test_diamond_not_unique_path():
    cls = classify_space(corpus.diamond())
    assert not cls.unique_path
    p1, p2 = cls.witnesses["unique_path"]
    assert p1 != p2 and p1[0] == p2[0] and p1[-1] == p2[-1]


def test_chain_is_accordion_and_ebp():
    for n in (1, 2, 3, 4):
        cls = classify_space(corpus.chain(n))
        assert cls.unique_path and cls.ebp and cls.accordion and cls.forest


def test_accordion4_and_forest5():
    cls = classify_space(corpus.accordion4())
    assert cls.accordion and cls.ebp
    cls = classify_space(corpus.forest5())
    assert cls.forest and cls.ebp and not cls.accordion


def test_sixteen_point_unique_path_not_ebp():
    q = corpus.sixteen_point()
    cls = classify_space(q)
    assert cls.unique_path
    assert not cls.ebp
    u, c = cls.witnesses["ebp"]
    um, cm = q.mask_of(u), q.mask_of(c)
    assert (um, cm) in elementary_boundary_pairs(q)
    arrows = {(q.up[b], q.down[a]) for a, b in q.cover_pairs()}
    assert (um, cm) not in arrows


def test_pseudocircle():
    # no comparable pair has two cover chains, but the Hasse diagram
    # closes a cycle
    cls = classify_space(corpus.pseudocircle())
    assert cls.unique_path
    assert not cls.forest and not cls.accordion


def test_six_conditions_agree_on_fixtures():
    for sp in (corpus.sierpinski(), corpus.chain(4), corpus.accordion4(),
               corpus.forest5(), corpus.diamond(), corpus.pseudocircle()):
        conds = unique_path_six_conditions(sp)
        assert len(set(conds.values())) == 1, conds


def test_sixteen_point_hull_closure_divergence():
    # documented divergence: the hull/closure condition is only a
    # small-poset characterization, see its docstring
    conds = unique_path_six_conditions(corpus.sixteen_point())
    assert not conds.pop("hull_closure_pairs")
    assert all(conds.values())


def test_locally_closed_sets():
    sp = corpus.sierpinski()
    lcs = sp.locally_closed_sets()
    assert frozenset() in lcs
    assert frozenset({"1", "2"}) in lcs
    assert len(lcs) == 4  # every subset of the Sierpinski space is lc


def test_paths():
    sp = corpus.chain(3)
    assert len(sp.paths("3", "1")) == 1
    d = corpus.diamond()
    assert len(d.paths("4", "1")) == 2
