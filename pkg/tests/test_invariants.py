import pytest

from fkmod import corpus
from fkmod.invariants import (
    Module, PointedModule, validate_module, is_exact, is_rrz,
    verify_morphism, identity_map, direct_sum_modules,
    st_point_module, b_extension_module,
    unit_receptacle, check_pointed_map, check_open_cover,
    check_unit_sequence, st_boundary_pairs, required_slots, required_maps,
    ShapeIncomplete,
)
from fkmod.zmodule import FgGroup


def test_point_modules_validate_and_are_exact():
    for spname in ("sierpinski", "chain3", "accordion4", "forest5"):
        sp = corpus.RECONSTRUCTION_SPACES[spname]()
        for point in sp.points:
            for parity in (0, 1):
                m = st_point_module(sp, point, parity)
                assert validate_module(m).ok
                assert is_exact(m).ok
                assert is_rrz(m).ok


def test_point_module_torsion_coefficient():
    sp = corpus.chain(3)
    m = st_point_module(sp, "2", 1, FgGroup.cyclic(4))
    assert validate_module(m).ok and is_exact(m).ok
    assert m.groups[(sp.mask_of({"2"}), 1)].torsion == (4,)


def test_extension_modules():
    sp = corpus.chain(3)
    for a, b in [(sp.points[x], sp.points[y]) for y, x in sp.cover_pairs()][:0] or [("2", "1"), ("3", "2")]:
        m = b_extension_module(sp, a, b)
        assert m.kind == "b"
        assert validate_module(m).ok and is_exact(m).ok
    with pytest.raises(ValueError):
        b_extension_module(sp, "3", "1")  # not a cover arrow


def test_direct_sum():
    sp = corpus.sierpinski()
    a = st_point_module(sp, "1", 0)
    b = st_point_module(sp, "2", 1)
    s, _ = direct_sum_modules([a, b])
    assert validate_module(s).ok and is_exact(s).ok
    assert s.groups[(sp.full, 0)].rank == 1
    assert s.groups[(sp.full, 1)].rank == 1


def test_identity_morphism_verifies():
    sp = corpus.accordion4()
    m = st_point_module(sp, "a", 0)
    f = identity_map(m)
    assert verify_morphism(f).ok


def test_missing_slot_raises():
    sp = corpus.sierpinski()
    m = st_point_module(sp, "1", 0)
    broken = Module("st", sp, dict(list(m.groups.items())[:-1]), m.maps)
    with pytest.raises(ShapeIncomplete):
        validate_module(broken)


def test_broken_relation_is_reported():
    import os
    from fkmod.serialize import load_json, module_from_dict
    import fkmod
    fx = os.path.join(os.path.dirname(fkmod.__file__), "fixtures")
    path = os.path.join(fx, "module_chain3_perturbed_st.json")
    m = module_from_dict(load_json(path), base_dir=fx)
    rep = validate_module(m)
    assert not rep.ok
    assert rep.failures


def test_unit_receptacle_and_pointed_map():
    sp = corpus.sierpinski()
    m = b_extension_module(sp, "2", "1")
    rec = unit_receptacle(m)
    assert rec is not None
    st = st_point_module(sp, "1", 0)
    pm = PointedModule(st, (1,))
    f = identity_map(st)
    assert check_pointed_map(f, pm, pm)
    assert not check_pointed_map(f, pm, PointedModule(st, (0,)))


def test_unit_vector_shape_checked():
    sp = corpus.sierpinski()
    st = st_point_module(sp, "1", 0)
    with pytest.raises(ShapeIncomplete):
        PointedModule(st, (1, 2, 3))


def test_open_cover_exactness():
    sp = corpus.forest5()
    m = st_point_module(sp, "c", 0)
    opens = [u for u in range(sp.full + 1) if u and sp.is_open_m(u)]
    for y in opens:
        parts = [u for u in opens if u & y == u and u != y]
        for i, u1 in enumerate(parts):
            for u2 in parts[i:]:
                if u1 | u2 == y:
                    assert check_open_cover(m, y, [u1, u2])


def test_unit_sequence():
    for spname in ("sierpinski", "chain3", "accordion4"):
        sp = corpus.RECONSTRUCTION_SPACES[spname]()
        m = st_point_module(sp, sp.points[0], 0)
        assert check_unit_sequence(m)


def test_required_slots_and_maps_counts():
    sp = corpus.sierpinski()
    assert len(required_slots("st", sp)) == 2 * len(sp.lc_masks())
    assert len(required_slots("b", sp)) == 2 * sp.n
    assert len(required_slots("tb", sp)) == 3 * sp.n
    assert len(required_slots("r", sp)) == 3 * sp.n
    assert all(len(k) == 3 for k in st_boundary_pairs(sp))
    for kind in ("st", "b", "tb", "r"):
        assert required_maps(kind, sp)
