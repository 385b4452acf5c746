import pytest

from fkmod import corpus
from fkmod.invariants import (validate_module, is_exact, is_rrz,
                              verify_morphism, identity_map,
                              st_point_module, b_extension_module,
                              SpaceNotEbp)
from fkmod.functors import (restrict, restrict_map, tb_to_r, tb_to_r_map,
                            reconstruct_st, g_on_map, compute_eta,
                            verify_delta_decomposition,
                            lift_r_morphism, lift_to_st, modules_equal,
                            FreenessHypothesisFailed)
from fkmod.zmodule import (FgGroup, GroupMap, IntMatrix, is_iso, maps_equal)


def test_restrictions_of_point_module():
    sp = corpus.accordion4()
    m = st_point_module(sp, "b", 1)
    for kind in ("b", "tb", "r"):
        r = restrict(m, kind)
        assert r.kind == kind
        assert validate_module(r).ok
        assert is_exact(r).ok


def test_restrict_map_of_identity():
    sp = corpus.chain(3)
    m = st_point_module(sp, "2", 0)
    f = identity_map(m)
    for kind in ("b", "tb", "r"):
        g = restrict_map(f, kind)
        assert verify_morphism(g).ok


def test_tb_to_r_roundtrip_shape():
    sp = corpus.forest5()
    m = restrict(st_point_module(sp, "a", 1), "tb")
    r, layouts = tb_to_r(m)
    assert validate_module(r).ok
    phi = tb_to_r_map(identity_map(m), r, layouts, r, layouts)
    assert verify_morphism(phi).ok


def test_reconstruction_roundtrip_extension():
    for spname in ("sierpinski", "chain3", "chain4", "accordion4", "forest5"):
        sp = corpus.RECONSTRUCTION_SPACES[spname]()
        y, x = sp.cover_pairs()[0]
        n = b_extension_module(sp, sp.points[y], sp.points[x])
        rec = reconstruct_st(n)
        st = rec.module
        assert validate_module(st).ok
        assert is_exact(st).ok
        assert is_rrz(st).ok
        assert modules_equal(restrict(st, "b"), n)


def test_reconstruction_roundtrip_torsion_point():
    sp = corpus.chain(3)
    m = st_point_module(sp, "2", 1, FgGroup.cyclic(3))
    n = restrict(m, "b")
    st = reconstruct_st(n).module
    assert modules_equal(restrict(st, "b"), n)


def test_eta_is_isomorphism():
    for spname in ("sierpinski", "chain3", "accordion4"):
        sp = corpus.RECONSTRUCTION_SPACES[spname]()
        for point in sp.points:
            m = st_point_module(sp, point, 0)
            eta, _ = compute_eta(m)
            assert verify_morphism(eta).ok
            assert all(is_iso(c) for c in eta.components.values())


def test_delta_decomposition_on_reconstructions():
    sp = corpus.forest5()
    y, x = sp.cover_pairs()[0]
    n = b_extension_module(sp, sp.points[y], sp.points[x])
    st = reconstruct_st(n).module
    assert verify_delta_decomposition(st).ok


def test_g_on_map_identity():
    sp = corpus.chain(3)
    n = b_extension_module(sp, "2", "1")
    rec = reconstruct_st(n)
    g = g_on_map(identity_map(n), rec, rec)
    assert verify_morphism(g).ok
    assert all(is_iso(c) for c in g.components.values())


def test_reconstruction_needs_ebp():
    q = corpus.sixteen_point()
    m = b_extension_module(q, "x2", "x1")
    with pytest.raises(SpaceNotEbp):
        reconstruct_st(m)


def test_lift_identity_tb():
    sp = corpus.accordion4()
    m = restrict(reconstruct_st(b_extension_module(sp, "a", "b")).module, "tb")
    r, lay = tb_to_r(m)
    phi = identity_map(r)
    big = lift_r_morphism(m, m, phi)
    assert verify_morphism(big).ok
    back = tb_to_r_map(big, r, lay, r, lay)
    assert all(maps_equal(back.components[k], phi.components[k])
               for k in phi.components)


def test_lift_negation_st():
    sp = corpus.chain(3)
    m = st_point_module(sp, "1", 1)
    r = restrict(m, "r")
    neg = identity_map(r)
    comps = {k: GroupMap(v.dom, v.cod,
                         IntMatrix(v.matrix.rows, v.matrix.cols,
                                   [[-e for e in row] for row in v.matrix.data]))
             for k, v in neg.components.items()}
    from fkmod.invariants import ModuleMap
    phi = ModuleMap(r, r, comps)
    big = lift_to_st(m, m, phi)
    assert verify_morphism(big).ok
    back = restrict_map(big, "r")
    assert all(maps_equal(back.components[k], phi.components[k])
               for k in phi.components)


def test_lift_freeness_failure():
    # torsion in a closed-point odd group outside k1 blocks the lift
    sp = corpus.forest5()
    m = st_point_module(sp, "c", 1, FgGroup.cyclic(2))
    n = st_point_module(sp, "c", 1, FgGroup.cyclic(2))
    r = restrict(m, "r")
    phi = identity_map(r)
    with pytest.raises(FreenessHypothesisFailed):
        lift_to_st(m, n, phi)


def test_lift_torsion_inside_k1():
    # torsion at an open point sits inside k1 and lifts fine
    sp = corpus.forest5()
    m = st_point_module(sp, "a", 1, FgGroup.cyclic(2))
    r = restrict(m, "r")
    big = lift_to_st(m, m, identity_map(r))
    assert verify_morphism(big).ok


def test_modules_equal_structural():
    sp1 = corpus.chain(3)
    sp2 = corpus.chain(3)
    a = st_point_module(sp1, "2", 0)
    b = st_point_module(sp2, "2", 0)
    assert modules_equal(a, b)
    c = st_point_module(sp1, "1", 0)
    assert not modules_equal(a, c)
