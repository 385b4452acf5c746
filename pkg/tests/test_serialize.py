import json

import pytest

from fkmod import corpus
from fkmod.space import FiniteSpace
from fkmod.invariants import (PointedModule, st_point_module,
                              b_extension_module, identity_map,
                              ShapeIncomplete)
from fkmod.functors import restrict, modules_equal
from fkmod.serialize import (SerializationError,
                             space_to_dict, space_from_dict,
                             module_to_dict, module_from_dict,
                             morphism_to_dict, morphism_from_dict,
                             dump_json, load_json)
from fkmod.zmodule import FgGroup, maps_equal


def test_space_roundtrip():
    for name, mk in corpus.RECONSTRUCTION_SPACES.items():
        sp = mk()
        sp2 = space_from_dict(space_to_dict(sp))
        assert sp2.points == sp.points
        assert sp2.cover_pairs() == sp.cover_pairs()


def test_reserved_point_names_rejected():
    with pytest.raises(SerializationError):
        space_to_dict(FiniteSpace(["a,b"], []))
    with pytest.raises(SerializationError):
        space_to_dict(FiniteSpace(["a:b"], []))


def test_module_roundtrip_all_kinds():
    sp = corpus.accordion4()
    st = st_point_module(sp, "b", 1, FgGroup.cyclic(6))
    mods = [st, restrict(st, "b"), restrict(st, "tb"), restrict(st, "r")]
    for m in mods:
        m2 = module_from_dict(module_to_dict(m))
        assert modules_equal(m, m2)


def test_pointed_module_roundtrip():
    sp = corpus.sierpinski()
    st = st_point_module(sp, "1", 0)
    d = module_to_dict(st, unit=(1,))
    pm = module_from_dict(d)
    assert isinstance(pm, PointedModule)
    assert pm.unit == (1,)


def test_module_space_by_reference(tmp_path):
    sp = corpus.chain(3)
    dump_json(space_to_dict(sp), str(tmp_path / "space.json"))
    m = b_extension_module(sp, "2", "1")
    d = module_to_dict(m, space_ref="space.json")
    dump_json(d, str(tmp_path / "mod.json"))
    m2 = module_from_dict(load_json(str(tmp_path / "mod.json")),
                          base_dir=str(tmp_path))
    assert modules_equal(m, m2)


def test_unknown_key_rejected():
    sp = corpus.sierpinski()
    m = st_point_module(sp, "1", 0)
    d = module_to_dict(m)
    d["groups"]["bogus:1"] = {"gens": 1, "rels": []}
    with pytest.raises(SerializationError):
        module_from_dict(d)


def test_missing_group_rejected():
    sp = corpus.sierpinski()
    m = st_point_module(sp, "1", 0)
    d = module_to_dict(m)
    key = sorted(d["groups"])[0]
    del d["groups"][key]
    with pytest.raises(ShapeIncomplete):
        module_from_dict(d)


def test_bad_kind_rejected():
    sp = corpus.sierpinski()
    d = module_to_dict(st_point_module(sp, "1", 0))
    d["kind"] = "xyz"
    with pytest.raises(SerializationError):
        module_from_dict(d)


def test_morphism_roundtrip(tmp_path):
    sp = corpus.chain(3)
    m = restrict(st_point_module(sp, "2", 1), "tb")
    f = identity_map(m)
    dump_json(module_to_dict(m), str(tmp_path / "m.json"))
    d = morphism_to_dict(f, source_ref="m.json", target_ref="m.json")
    dump_json(d, str(tmp_path / "f.json"))
    f2 = morphism_from_dict(load_json(str(tmp_path / "f.json")),
                            base_dir=str(tmp_path))
    assert all(maps_equal(f.components[k], f2.components[k])
               for k in f.components)


def test_morphism_inline_modules():
    sp = corpus.sierpinski()
    m = restrict(st_point_module(sp, "1", 0), "r")
    f = identity_map(m)
    d = morphism_to_dict(f)
    f2 = morphism_from_dict(d)
    assert all(maps_equal(f.components[k], f2.components[k])
               for k in f.components)


def test_deterministic_output():
    sp = corpus.accordion4()
    m = st_point_module(sp, "c", 0)
    a = json.dumps(module_to_dict(m), sort_keys=True)
    b = json.dumps(module_to_dict(m), sort_keys=True)
    assert a == b
