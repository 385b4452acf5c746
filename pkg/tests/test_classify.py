from fkmod import corpus
from fkmod.space import FiniteSpace
from fkmod.invariants import (Module, PointedModule, st_point_module,
                              b_extension_module, direct_sum_modules)
from fkmod.functors import restrict
from fkmod.classify import (range_check_graph, range_check_ck,
                            range_check_unital, phantom_verdict)
from fkmod.zmodule import FgGroup, GroupMap, IntMatrix


POINT = FiniteSpace(["x"], [])


def one_point_r(k1: FgGroup, op: FgGroup) -> Module:
    bd = FgGroup.trivial()
    return Module("r", POINT,
                  {("k1", 0): k1, ("bd", 0): bd, ("op", 0): op},
                  {("d", 0): GroupMap.zero(k1, bd),
                   ("ib", 0): GroupMap.zero(bd, op)})


def test_graph_requires_free_k1():
    v = range_check_graph(one_point_r(FgGroup.cyclic(2), FgGroup.free(1)))
    assert not v.graph_realizable
    bad = [c for c in v.checks if not c.ok]
    assert bad and bad[0].criterion == "r.free.x"
    assert range_check_graph(one_point_r(FgGroup.free(1),
                                         FgGroup.free(1))).graph_realizable


def test_ck_rank_condition():
    z = FgGroup.free(1)
    assert range_check_ck(one_point_r(z, z)).ck_realizable
    assert not range_check_ck(one_point_r(FgGroup.trivial(), z)).ck_realizable
    z2 = FgGroup.free(2)
    z2z3 = FgGroup(3, IntMatrix(1, 3, [[0, 0, 3]]))
    assert range_check_ck(one_point_r(z2, z2z3)).ck_realizable


def test_unital_rank_conditions():
    z = FgGroup.free(1)
    v = range_check_unital(one_point_r(FgGroup.trivial(), z))
    assert v.unital_graph_realizable and not v.unital_ck_realizable
    v = range_check_unital(one_point_r(z, z))
    assert v.unital_graph_realizable and v.unital_ck_realizable
    v = range_check_unital(one_point_r(FgGroup.free(2), z))
    assert not v.unital_graph_realizable and not v.unital_ck_realizable


def test_phantom_point():
    z2 = FgGroup.free(2)
    even = st_point_module(POINT, "x", 0, z2)
    odd = st_point_module(POINT, "x", 1, z2)
    both, _ = direct_sum_modules([even, odd])
    assert phantom_verdict(POINT, both).phantom
    torsion = st_point_module(POINT, "x", 1, FgGroup.cyclic(2))
    mixed, _ = direct_sum_modules([even, torsion])
    assert not phantom_verdict(POINT, mixed).phantom


def test_phantom_balanced_chain():
    sp = corpus.chain(3)
    mods = [b_extension_module(sp, "2", "1"),
            b_extension_module(sp, "3", "2"),
            restrict(st_point_module(sp, "1", 0), "b"),
            restrict(st_point_module(sp, "3", 1), "b")]
    total, _ = direct_sum_modules(mods)
    assert phantom_verdict(sp, total).phantom


def test_phantom_not_applicable_off_accordion():
    sp = corpus.diamond()
    m = st_point_module(sp, "1", 0)
    v = phantom_verdict(sp, m)
    assert not v.applicable
    assert v.phantom is None


def test_verdict_serialization():
    v = range_check_ck(one_point_r(FgGroup.free(1), FgGroup.free(1)))
    d = v.as_dict()
    assert d["ck_realizable"] is True
    assert {c["criterion"] for c in d["checks"]} == {
        "r.exact", "r.free.x", "ck.fin.x", "ck.rank.x"}


def test_pointed_module_accepted():
    z = FgGroup.free(1)
    m = one_point_r(z, z)
    pm = PointedModule(m, (1,))
    assert range_check_unital(pm).unital_ck_realizable
