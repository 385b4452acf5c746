"""The nine acceptance criteria, with their runtime budgets.

Each test drives the corresponding criterion of the self-test harness
(the same code that `fkmod selftest` runs) and asserts both the verdict
and the stated time budget.
"""

from fkmod import selftest


def _run(fn, budget=None, **kw):
    res = fn(**kw)
    assert res.ok, f"{res.criterion}: {res.detail}"
    if budget is not None:
        assert res.seconds < budget, (
            f"{res.criterion} took {res.seconds:.1f}s, budget {budget}s")
    return res


def test_criterion_1_unique_path_six_way_equivalence():
    # all labeled posets on <= 5 points, six conditions each, < 60 s
    res = _run(selftest.criterion_1, budget=60)
    assert "4473 posets" in res.detail


def test_criterion_2_space_fixtures():
    # D not unique path; Q unique path but not EBP with an accepted
    # witness pair; every accordion space on <= 6 points is a forest
    # and EBP
    _run(selftest.criterion_2)


def test_criterion_3_smith_normal_form_soundness():
    # 1000 random matrices: UMV = D, unimodularity, divisibility chain,
    # brute-force cokernel-order oracle, < 30 s
    _run(selftest.criterion_3, budget=30, seed=0)


def test_criterion_4_reconstruction_round_trip():
    # >= 50 exact b modules over five spaces: reconstruction output is
    # valid/exact/real-rank-zero-like, restricts back slot-for-slot,
    # and the comparison morphism is an isomorphism, < 3 min
    res = _run(selftest.criterion_4, budget=180, seed=0)
    assert "112 b modules" in res.detail


def test_criterion_5_boundary_decomposition():
    # every boundary map of every reconstruction decomposes as the sum
    # of its arrow-wise factorizations, zero mismatches
    _run(selftest.criterion_5, seed=0)


def test_criterion_6_morphism_lifting():
    # >= 100 lifted morphisms: restriction returns the input exactly,
    # slotwise isos lift to slotwise isos, < 2 min
    res = _run(selftest.criterion_6, budget=120, seed=0)
    assert "92 tb lifts + 12 st lifts" in res.detail


def test_criterion_7_covering_exactness_and_units():
    # every open cover by <= 3 opens of every open set gives an exact
    # sequence; the unit receptacle surjects onto the full even group
    _run(selftest.criterion_7, seed=0)


def test_criterion_8_open_boundary_redundancy():
    # on unique path spaces the assembled minimal-open sum maps
    # isomorphically onto every open-boundary group
    _run(selftest.criterion_8, seed=0)


def test_criterion_9_classification_verdicts():
    # anchored verdict examples plus a 500-module monotonicity sweep
    _run(selftest.criterion_9, seed=0)
