import json
import os

import fkmod
from fkmod.cli import main

FIXTURES = os.path.join(os.path.dirname(fkmod.__file__), "fixtures")


def fx(name: str) -> str:
    return os.path.join(FIXTURES, name)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    lines = [json.loads(ln) for ln in captured.out.splitlines() if ln]
    return code, lines, captured.err


def test_space_diamond(capsys):
    code, lines, err = run(capsys, "space", fx("space_d.json"))
    assert code == 0
    assert lines[0]["unique_path"] is False
    assert "unique_path: false" in err


def test_space_chain4_accordion(capsys):
    code, lines, _ = run(capsys, "space", fx("space_chain4.json"))
    assert code == 0
    assert lines[0]["accordion"] is True


def test_space_q_not_ebp(capsys):
    code, lines, _ = run(capsys, "space", fx("space_q.json"))
    assert code == 0
    assert lines[0]["unique_path"] is True
    assert lines[0]["ebp"] is False


def test_space_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, lines, _ = run(capsys, "space", str(bad))
    assert code == 2
    assert lines[0]["error"] == "SerializationError"


def test_check_valid_st(capsys):
    code, lines, _ = run(capsys, "check", fx("module_sierpinski_ext_st.json"),
                         "--kind", "st")
    assert code == 0
    assert lines[0]["valid"] and lines[0]["exact"]


def test_check_kind_mismatch(capsys):
    code, lines, _ = run(capsys, "check", fx("module_sierpinski_ext_st.json"),
                         "--kind", "b")
    assert code == 2


def test_check_perturbed_fails(capsys):
    code, lines, _ = run(capsys, "check", fx("module_chain3_perturbed_st.json"))
    assert code == 1
    assert lines[0]["valid"] is False
    assert lines[0]["failures"]


def test_extend_writes_verified_output(capsys, tmp_path):
    out = str(tmp_path / "st.json")
    code, lines, _ = run(capsys, "extend", fx("module_sierpinski_ext_b.json"),
                         "-o", out)
    assert code == 0
    assert lines[0]["verified"] and lines[0]["restricts_to_input"]
    code, lines, _ = run(capsys, "check", out)
    assert code == 0 and lines[0]["real_rank_zero_like"]


def test_extend_full_even_group_trivial(capsys, tmp_path):
    out = str(tmp_path / "st.json")
    run(capsys, "extend", fx("module_sierpinski_ext_b.json"), "-o", out)
    d = json.load(open(out))
    assert d["groups"]["lc:1,2:0"] == {"gens": 0, "rels": []}


def test_extend_rejects_non_ebp(capsys, tmp_path):
    from fkmod import corpus
    from fkmod.invariants import b_extension_module
    from fkmod.serialize import module_to_dict, dump_json
    q = corpus.sixteen_point()
    mod = tmp_path / "q_b.json"
    dump_json(module_to_dict(b_extension_module(q, "x2", "x1")), str(mod))
    code, lines, _ = run(capsys, "extend", str(mod),
                         "-o", str(tmp_path / "st.json"))
    assert code == 1
    assert lines[0]["error"] == "space_not_ebp"
    assert not os.path.exists(tmp_path / "st.json")


def test_lift_identity(capsys, tmp_path):
    out = str(tmp_path / "phi.json")
    code, lines, _ = run(capsys, "lift",
                         "--source", fx("module_accordion4_ext_tb.json"),
                         "--target", fx("module_accordion4_ext_tb.json"),
                         "--map", fx("morphism_accordion4_identity_r.json"),
                         "-o", out)
    assert code == 0
    assert lines[0]["lifted"] and lines[0]["kind"] == "tb"
    d = json.load(open(out))
    assert d["kind"] == "tb" and d["components"]


def test_classify_phantom_point(capsys):
    code, lines, _ = run(capsys, "classify", fx("module_point_z2z2_st.json"))
    assert code == 0
    assert lines[0]["phantom"]["phantom"] is True


def test_classify_r_module(capsys):
    code, lines, _ = run(capsys, "classify", fx("module_point_zz_r.json"))
    assert code == 0
    assert lines[0]["range"]["ck_realizable"] is True


def test_classify_unital(capsys):
    code, lines, _ = run(capsys, "classify", fx("module_point_zz_r.json"),
                         "--unital")
    assert code == 0
    assert lines[0]["unital"]["unital_ck_realizable"] is True


def test_classify_failing_verdict(capsys, tmp_path):
    from fkmod.space import FiniteSpace
    from fkmod.invariants import Module
    from fkmod.serialize import module_to_dict, dump_json
    from fkmod.zmodule import FgGroup, GroupMap
    pt = FiniteSpace(["x"], [])
    k1, bd, op = FgGroup.cyclic(2), FgGroup.trivial(), FgGroup.free(1)
    m = Module("r", pt, {("k1", 0): k1, ("bd", 0): bd, ("op", 0): op},
               {("d", 0): GroupMap.zero(k1, bd),
                ("ib", 0): GroupMap.zero(bd, op)})
    path = tmp_path / "torsion_r.json"
    dump_json(module_to_dict(m), str(path))
    code, lines, _ = run(capsys, "classify", str(path))
    assert code == 1
    assert lines[0]["range"]["graph_realizable"] is False


def test_json_flag_suppresses_stderr(capsys):
    code, lines, err = run(capsys, "space", fx("space_d.json"), "--json")
    assert code == 0 and lines and err == ""


def test_deterministic_reports(capsys):
    _, lines1, _ = run(capsys, "space", fx("space_q.json"), "--json")
    _, lines2, _ = run(capsys, "space", fx("space_q.json"), "--json")
    assert lines1 == lines2
