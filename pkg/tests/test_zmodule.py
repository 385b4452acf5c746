import random

import pytest

from fkmod.zmodule import (
    IntMatrix, FgGroup, GroupMap, BlockLayout,
    smith_normal_form, snf_diagonal, hermite_normal_form, determinant,
    left_kernel, solve_right, unimodular_inverse,
    kernel, cokernel, image, is_exact_at, is_iso, is_injective, is_surjective,
    maps_equal, group_map_inverse, free_complement, QuotientNotFree,
)


def rand_matrix(rng, rows, cols, lo=-9, hi=9):
    return IntMatrix(rows, cols,
                     [[rng.randint(lo, hi) for _ in range(cols)]
                      for _ in range(rows)])


def test_smith_normal_form_properties():
    rng = random.Random(7)
    for _ in range(50):
        r, c = rng.randint(0, 5), rng.randint(0, 5)
        m = rand_matrix(rng, r, c)
        u, d, v = smith_normal_form(m)
        assert u.mul(m).mul(v).data == d.data  # tuples on both sides
        assert abs(determinant(u)) == 1
        assert abs(determinant(v)) == 1
        diag = snf_diagonal(d)
        assert all(x >= 0 for x in diag)
        for a, b in zip(diag, diag[1:]):
            if b:
                assert a and b % a == 0


def test_hermite_normal_form_row_space():
    m = IntMatrix(3, 3, [[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    h = hermite_normal_form(m)
    # same row lattice: each generates the other
    for mat, other in ((m, h), (h, m)):
        for row in mat.data:
            sol, _ = solve_right(other, IntMatrix(1, len(row), [list(row)]))
            assert sol is not None


def test_determinant_matches_snf():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n, n)
        _, d, _ = smith_normal_form(m)
        prod = 1
        for k in snf_diagonal(d):
            prod *= k
        assert abs(determinant(m)) == prod


def test_left_kernel():
    m = IntMatrix(3, 2, [[1, 0], [0, 1], [1, 1]])
    k = left_kernel(m)
    assert k.rows == 1
    assert list(map(list, k.mul(m).data)) == [[0, 0]]


def test_solve_right():
    a = IntMatrix(2, 3, [[1, 2, 0], [0, 0, 3]])
    b = IntMatrix(1, 3, [[2, 4, 3]])
    sol, _ = solve_right(a, b)
    assert sol is not None and sol.mul(a).data == b.data
    none, _ = solve_right(a, IntMatrix(1, 3, [[0, 1, 0]]))
    assert none is None


def test_unimodular_inverse():
    u = IntMatrix(2, 2, [[2, 1], [1, 1]])
    v = unimodular_inverse(u)
    assert list(map(list, u.mul(v).data)) == [[1, 0], [0, 1]]


def test_fg_group_invariants():
    g = FgGroup(3, IntMatrix(2, 3, [[2, 0, 0], [0, 3, 0]]))
    assert g.rank == 1
    assert g.torsion == (6,)
    assert not g.is_free()
    assert FgGroup.free(2).is_free()
    assert FgGroup.trivial().is_trivial()
    assert FgGroup.cyclic(5).order() == 5


def test_kernel_cokernel_image():
    z = FgGroup.free(1)
    times2 = GroupMap(z, z, IntMatrix(1, 1, [[2]]))
    ker, _ = kernel(times2)
    assert ker.is_trivial()
    cok, _ = cokernel(times2)
    assert cok.order() == 2
    img, emb, _ = image(times2)
    assert img.rank == 1 and is_injective(emb)


def test_exactness_and_iso():
    z = FgGroup.free(1)
    z2 = FgGroup.cyclic(2)
    times2 = GroupMap(z, z, IntMatrix(1, 1, [[2]]))
    proj = GroupMap(z, z2, IntMatrix(1, 1, [[1]]))
    # 0 -> Z --2--> Z -> Z/2 -> 0
    assert is_injective(times2)
    assert is_exact_at(times2, proj)
    assert is_surjective(proj)
    assert not is_iso(times2)
    ident = GroupMap.identity(z)
    assert is_iso(ident)
    assert maps_equal(group_map_inverse(ident), ident)


def test_free_complement_and_failure():
    z2 = FgGroup.free(2)
    sub = GroupMap(FgGroup.free(1), z2, IntMatrix(1, 2, [[1, 0]]))
    comp = free_complement(sub)
    assert len(comp) == 1
    with pytest.raises(QuotientNotFree):
        free_complement(GroupMap(FgGroup.free(1), z2, IntMatrix(1, 2, [[2, 0]])))


def test_block_layout():
    a, b = FgGroup.free(1), FgGroup.cyclic(3)
    lay = BlockLayout((a, b))
    assert lay.group.gens == 2
    inj = lay.injection(1)
    assert inj.dom is b and inj.cod is lay.group
