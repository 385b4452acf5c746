"""Exact arithmetic for finitely presented abelian groups.

Everything here is built on integer matrices with arbitrary-precision
entries and the Smith normal form.  Conventions: group elements are row
vectors and matrices act from the right, so the composite of f and g has
matrix f.matrix * g.matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence


class ShapeError(ValueError):
    pass


class IllFormedMap(ValueError):
    """The matrix does not induce a homomorphism of the presented groups."""


class QuotientNotFree(ValueError):
    """free_complement was asked to split off a quotient with torsion."""


class IntMatrix:
    """Immutable integer matrix.  Rows/cols may be zero."""

    __slots__ = ("_rows", "_cols", "data")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[int]]):
        data = tuple(tuple(int(v) for v in row) for row in data)
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ShapeError(f"expected {rows}x{cols} data")
        self._rows = rows
        self._cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = [list(r) for r in data]
        if cols is None:
            if not data:
                raise ShapeError("cols required for a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    def row(self, i: int) -> tuple:
        return self.data[i]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.data for v in r)

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self._cols != other._rows:
            raise ShapeError(f"cannot multiply {self._rows}x{self._cols} by {other._rows}x{other._cols}")
        od = other.data
        out = []
        for r in self.data:
            acc = [0] * other._cols
            for k, v in enumerate(r):
                if v:
                    ok = od[k]
                    for j in range(other._cols):
                        acc[j] += v * ok[j]
            out.append(acc)
        return IntMatrix(self._rows, other._cols, out)

    def add(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self._rows, self._cols,
                         [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def sub(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self._rows, self._cols,
                         [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def neg(self) -> "IntMatrix":
        return IntMatrix(self._rows, self._cols, [[-v for v in r] for r in self.data])

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self._cols, self._rows,
                         [[self.data[i][j] for i in range(self._rows)] for j in range(self._cols)])

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self._cols != other._cols:
            raise ShapeError("column mismatch in vstack")
        return IntMatrix(self._rows + other._rows, self._cols, self.data + other.data)

    def _same_shape(self, other: "IntMatrix") -> None:
        if (self._rows, self._cols) != (other._rows, other._cols):
            raise ShapeError("shape mismatch")

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix)
                and self._rows == other._rows and self._cols == other._cols
                and self.data == other.data)

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self.data))

    def __repr__(self) -> str:
        return f"IntMatrix({self._rows}x{self._cols}, {list(map(list, self.data))})"


def vstack_all(mats: Sequence[IntMatrix], cols: int) -> IntMatrix:
    rows: list = []
    for m in mats:
        if m.cols != cols:
            raise ShapeError("column mismatch")
        rows.extend(m.data)
    return IntMatrix(len(rows), cols, rows)


# ---------------------------------------------------------------------------
# Smith / Hermite normal forms and solvers
# ---------------------------------------------------------------------------

def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*m*V = D, U and V unimodular, D diagonal
    with non-negative entries d1 | d2 | ...

    Deterministic: the pivot is always the smallest-magnitude nonzero
    entry of the remaining block, ties broken by (row, col).
    """
    r, c = m.rows, m.cols
    a = [list(row) for row in m.data]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def find_pivot(t: int):
        best = None
        for i in range(t, r):
            ai = a[i]
            for j in range(t, c):
                x = ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best
        return best

    for t in range(min(r, c)):
        while True:
            piv = find_pivot(t)
            if piv is None:
                break
            _, pi, pj = piv
            if pi != t:
                a[t], a[pi] = a[pi], a[t]
                u[t], u[pi] = u[pi], u[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                        u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, c):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                        for row in v:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            # cross is clear; enforce divisibility of the remaining block
            fixed = True
            for i in range(t + 1, r):
                if any(x % p for x in a[i][t + 1:]):
                    a[t] = [x + y for x, y in zip(a[t], a[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    fixed = False
                    break
            if fixed:
                break
    d = [[a[i][j] if i == j else 0 for j in range(c)] for i in range(r)]
    return (IntMatrix(r, r, u), IntMatrix(r, c, d), IntMatrix(c, c, v))


def snf_diagonal(d: IntMatrix) -> list[int]:
    return [d.data[i][i] for i in range(min(d.rows, d.cols))]


def hermite_normal_form(m: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form (nonzero rows only, positive pivots,
    entries above a pivot reduced into [0, pivot))."""
    c = m.cols
    work = [list(r) for r in m.data if any(r)]
    out: list[list[int]] = []
    for col in range(c):
        live = [r for r in work if r[col]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            for r in live[1:]:
                q = r[col] // p[col]
                if q:
                    for j in range(c):
                        r[j] -= q * p[j]
            live = [r for r in live if r[col]]
        p = live[0]
        if p[col] < 0:
            for j in range(c):
                p[j] = -p[j]
        out.append(p)
        work = [r for r in work if r is not p and any(r) and not r[col]] + \
               [r for r in work if r is not p and any(r) and r[col]]
        # rows still having a nonzero entry in this column get reduced by p
        for r in work:
            if r[col]:
                q = r[col] // p[col]
                for j in range(c):
                    r[j] -= q * p[j]
        work = [r for r in work if any(r)]
        if any(r[col] for r in work):  # pragma: no cover - gcd loop above prevents this
            raise AssertionError("HNF column not cleared")
    # reduce entries above each pivot
    for i in reversed(range(len(out))):
        pivcol = next(j for j, x in enumerate(out[i]) if x)
        p = out[i][pivcol]
        for k in range(i):
            q = out[k][pivcol] // p
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return IntMatrix(len(out), c, out)


def reduce_mod_lattice(vec: Sequence[int], lattice: IntMatrix) -> tuple:
    """Canonical representative of vec modulo the row lattice."""
    h = hermite_normal_form(lattice)
    v = list(vec)
    for row in h.data:
        pivcol = next(j for j, x in enumerate(row) if x)
        q = v[pivcol] // row[pivcol]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return tuple(v)


def determinant(m: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    if m.rows != m.cols:
        raise ShapeError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(r) for r in m.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def left_kernel(m: IntMatrix) -> IntMatrix:
    """Basis (as rows) of {x : x * m = 0}."""
    u, d, _ = smith_normal_form(m)
    diag = snf_diagonal(d)
    rows = [u.data[j] for j in range(m.rows) if j >= len(diag) or diag[j] == 0]
    return IntMatrix(len(rows), m.rows, rows)


def solve_right(a: IntMatrix, b: IntMatrix) -> tuple[Optional[IntMatrix], IntMatrix]:
    """Solve X * a = b over the integers.

    Returns (X, K) where X is a particular solution (or None if there is
    none) and K is a basis of the left kernel of a.
    """
    if a.cols != b.cols:
        raise ShapeError("solve_right: column mismatch")
    u, d, v = smith_normal_form(a)
    diag = snf_diagonal(d)
    kernel_rows = [u.data[j] for j in range(a.rows) if j >= len(diag) or diag[j] == 0]
    kernel = IntMatrix(len(kernel_rows), a.rows, kernel_rows)
    bv = b.mul(v)
    xs = []
    for row in bv.data:
        y = [0] * a.rows
        for j in range(a.cols):
            dj = diag[j] if j < len(diag) else 0
            if dj:
                if row[j] % dj:
                    return None, kernel
                if j < a.rows:
                    y[j] = row[j] // dj
            elif row[j]:
                return None, kernel
        xs.append(y)
    x = IntMatrix(b.rows, a.rows, xs).mul(u)
    return x, kernel


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    if m.rows != m.cols:
        raise ShapeError("inverse of a non-square matrix")
    n = m.rows
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m.data)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise ShapeError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = [[x for x in row[n:]] for row in a]
    if any(x.denominator != 1 for row in out for x in row):
        raise ShapeError("matrix is not unimodular")
    return IntMatrix(n, n, [[int(x) for x in row] for row in out])


# ---------------------------------------------------------------------------
# Finitely presented abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FgGroup:
    """Z^gens modulo the row lattice of ``rels`` (rels has ``gens`` columns)."""

    gens: int
    rels: IntMatrix

    def __post_init__(self):
        if self.rels.cols != self.gens:
            raise ShapeError("relation matrix has wrong number of columns")

    @classmethod
    def free(cls, rank: int) -> "FgGroup":
        return cls(rank, IntMatrix.zeros(0, rank))

    @classmethod
    def trivial(cls) -> "FgGroup":
        return cls(0, IntMatrix.zeros(0, 0))

    @classmethod
    def cyclic(cls, n: int) -> "FgGroup":
        """Z/n, with Z for n = 0."""
        if n == 0:
            return cls.free(1)
        return cls(1, IntMatrix(1, 1, [[n]]))

    @cached_property
    def _snf(self):
        u, d, v = smith_normal_form(self.rels)
        return u, snf_diagonal(d), v

    @property
    def rank(self) -> int:
        _, diag, _ = self._snf
        return self.gens - sum(1 for x in diag if x)

    @property
    def torsion(self) -> tuple[int, ...]:
        _, diag, _ = self._snf
        return tuple(x for x in diag if x > 1)

    @property
    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return (self.rank, self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def order(self) -> Optional[int]:
        if self.rank:
            return None
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def member(self, vec: Sequence[int]) -> bool:
        """Is vec in the relation lattice (i.e. the zero class)?"""
        if len(vec) != self.gens:
            raise ShapeError("vector length mismatch")
        _, diag, v = self._snf
        vd = v.data
        for j in range(self.gens):
            w = sum(int(vec[k]) * vd[k][j] for k in range(self.gens))
            d = diag[j] if j < len(diag) else 0
            if d:
                if w % d:
                    return False
            elif w:
                return False
        return True

    def contains_rows(self, m: IntMatrix) -> bool:
        return all(self.member(r) for r in m.data)

    def same_presentation(self, other: "FgGroup") -> bool:
        """Same generators and the same relation lattice."""
        return (self.gens == other.gens
                and self.contains_rows(other.rels)
                and other.contains_rows(self.rels))

    def describe(self) -> str:
        rank, tors = self.invariants
        parts = ["Z"] * rank + [f"Z/{t}" for t in tors]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupMap:
    """Homomorphism dom -> cod given by a gens(dom) x gens(cod) matrix
    acting on row vectors from the right."""

    dom: FgGroup
    cod: FgGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != self.dom.gens or self.matrix.cols != self.cod.gens:
            raise ShapeError(
                f"map matrix is {self.matrix.rows}x{self.matrix.cols}, "
                f"expected {self.dom.gens}x{self.cod.gens}")
        for row in self.dom.rels.data:
            img = [sum(row[k] * self.matrix.data[k][j] for k in range(self.dom.gens))
                   for j in range(self.cod.gens)]
            if not self.cod.member(img):
                raise IllFormedMap("domain relator does not map into codomain relations")

    @classmethod
    def identity(cls, g: FgGroup) -> "GroupMap":
        return cls(g, g, IntMatrix.identity(g.gens))

    @classmethod
    def zero(cls, dom: FgGroup, cod: FgGroup) -> "GroupMap":
        return cls(dom, cod, IntMatrix.zeros(dom.gens, cod.gens))

    def then(self, other: "GroupMap") -> "GroupMap":
        if self.cod.gens != other.dom.gens:
            raise ShapeError("composition shape mismatch")
        return GroupMap(self.dom, other.cod, self.matrix.mul(other.matrix))

    def add(self, other: "GroupMap") -> "GroupMap":
        return GroupMap(self.dom, self.cod, self.matrix.add(other.matrix))

    def neg(self) -> "GroupMap":
        return GroupMap(self.dom, self.cod, self.matrix.neg())

    def is_zero_map(self) -> bool:
        return self.cod.contains_rows(self.matrix)

    def apply(self, vec: Sequence[int]) -> tuple:
        if len(vec) != self.dom.gens:
            raise ShapeError("vector length mismatch")
        md = self.matrix.data
        return tuple(sum(int(vec[k]) * md[k][j] for k in range(self.dom.gens))
                     for j in range(self.cod.gens))


def maps_equal(f: GroupMap, g: GroupMap) -> bool:
    """Equality as homomorphisms (matrices may differ by relations)."""
    if f.dom.gens != g.dom.gens or f.cod.gens != g.cod.gens:
        return False
    return f.cod.contains_rows(f.matrix.sub(g.matrix))


def kernel(f: GroupMap) -> tuple[FgGroup, GroupMap]:
    """Kernel subgroup with its inclusion into f.dom."""
    n = f.dom.gens
    stacked = f.matrix.vstack(f.cod.rels)
    lk = left_kernel(stacked)
    kmat = IntMatrix(lk.rows, n, [r[:n] for r in lk.data])
    rel_src = kmat.vstack(f.dom.rels)
    rels_lk = left_kernel(rel_src)
    krels = IntMatrix(rels_lk.rows, kmat.rows, [r[:kmat.rows] for r in rels_lk.data])
    kgroup = FgGroup(kmat.rows, krels)
    return kgroup, GroupMap(kgroup, f.dom, kmat)


def cokernel(f: GroupMap) -> tuple[FgGroup, GroupMap]:
    """Cokernel with the projection from f.cod."""
    cg = FgGroup(f.cod.gens, f.cod.rels.vstack(f.matrix))
    return cg, GroupMap(f.cod, cg, IntMatrix.identity(f.cod.gens))


def image(f: GroupMap) -> tuple[FgGroup, GroupMap, GroupMap]:
    """Image subgroup with the surjection from f.dom and inclusion into f.cod."""
    stacked = f.matrix.vstack(f.cod.rels)
    lk = left_kernel(stacked)
    irels = IntMatrix(lk.rows, f.dom.gens, [r[:f.dom.gens] for r in lk.data])
    igroup = FgGroup(f.dom.gens, irels)
    surj = GroupMap(f.dom, igroup, IntMatrix.identity(f.dom.gens))
    incl = GroupMap(igroup, f.cod, f.matrix)
    return igroup, surj, incl


def is_exact_at(f: GroupMap, g: GroupMap) -> bool:
    """Exactness of dom(f) -> mid -> cod(g) at the middle group."""
    if f.cod.gens != g.dom.gens:
        raise ShapeError("is_exact_at: f.cod and g.dom do not match")
    mid = g.dom
    comp = f.matrix.mul(g.matrix)
    if not g.cod.contains_rows(comp):
        return False
    kgroup, kincl = kernel(g)
    lattice = FgGroup(mid.gens, f.matrix.vstack(mid.rels))
    return lattice.contains_rows(kincl.matrix)


def is_iso(f: GroupMap) -> bool:
    kg, _ = kernel(f)
    if not kg.is_trivial():
        return False
    cg, _ = cokernel(f)
    return cg.is_trivial()


def is_injective(f: GroupMap) -> bool:
    kg, _ = kernel(f)
    return kg.is_trivial()


def is_surjective(f: GroupMap) -> bool:
    cg, _ = cokernel(f)
    return cg.is_trivial()


def solve_through(f: GroupMap, target_vecs: IntMatrix) -> Optional[IntMatrix]:
    """For each row b of target_vecs (in f.cod coordinates) find x with
    x * f.matrix = b modulo codomain relations; None if some b is not in
    the image of f."""
    stacked = f.matrix.vstack(f.cod.rels)
    x, _ = solve_right(stacked, target_vecs)
    if x is None:
        return None
    return IntMatrix(target_vecs.rows, f.dom.gens, [r[:f.dom.gens] for r in x.data])


def group_map_inverse(f: GroupMap) -> GroupMap:
    """Inverse of an isomorphism."""
    if not is_iso(f):
        raise IllFormedMap("map is not an isomorphism")
    x = solve_through(f, IntMatrix.identity(f.cod.gens))
    if x is None:
        raise IllFormedMap("failed to invert an isomorphism")  # pragma: no cover
    return GroupMap(f.cod, f.dom, x)


def factor_through(incl: GroupMap, ambient_map: IntMatrix, dom: FgGroup) -> GroupMap:
    """Given incl: K -> A and a matrix dom -> A whose image lies in the
    subgroup K (modulo relations of A), produce the factored map dom -> K."""
    x = solve_through(incl, ambient_map)
    if x is None:
        raise IllFormedMap("map does not factor through the subgroup")
    return GroupMap(dom, incl.dom, x)


def free_complement(sub: GroupMap) -> list[tuple]:
    """Basis lift for a free complement of image(sub) inside sub.cod.

    Returns vectors of sub.cod projecting to a basis of the quotient
    cod/image; raises QuotientNotFree when the quotient has torsion.
    """
    g = sub.cod
    q_rels = g.rels.vstack(sub.matrix)
    _, d, v = smith_normal_form(q_rels)
    diag = snf_diagonal(d)
    if any(x > 1 for x in diag):
        raise QuotientNotFree(f"quotient has torsion {tuple(x for x in diag if x > 1)}")
    vinv = unimodular_inverse(v)
    free_idx = [j for j in range(g.gens) if j >= len(diag) or diag[j] == 0]
    lifts = [reduce_mod_lattice(vinv.data[j], q_rels) for j in free_idx]
    return lifts


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------

@dataclass
class BlockLayout:
    """Direct sum of groups with coordinate bookkeeping."""

    parts: tuple[FgGroup, ...]
    group: FgGroup = field(init=False)
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        offsets = []
        total = 0
        for g in self.parts:
            offsets.append(total)
            total += g.gens
        rows = []
        for g, off in zip(self.parts, offsets):
            for r in g.rels.data:
                row = [0] * total
                row[off:off + g.gens] = list(r)
                rows.append(row)
        self.offsets = tuple(offsets)
        self.group = FgGroup(total, IntMatrix(len(rows), total, rows))

    def injection(self, i: int) -> GroupMap:
        g = self.parts[i]
        off = self.offsets[i]
        data = [[0] * self.group.gens for _ in range(g.gens)]
        for k in range(g.gens):
            data[k][off + k] = 1
        return GroupMap(g, self.group, IntMatrix(g.gens, self.group.gens, data))

    def projection_matrix(self, i: int) -> IntMatrix:
        g = self.parts[i]
        off = self.offsets[i]
        data = [[0] * g.gens for _ in range(self.group.gens)]
        for k in range(g.gens):
            data[off + k][k] = 1
        return IntMatrix(self.group.gens, g.gens, data)

    def assemble_from(self, maps: Sequence[GroupMap], cod: FgGroup) -> GroupMap:
        """Map from the sum given by per-part maps into a common codomain."""
        rows = []
        for m in maps:
            rows.extend(m.matrix.data)
        return GroupMap(self.group, cod, IntMatrix(self.group.gens, cod.gens, rows))

    def assemble_into(self, maps: Sequence[GroupMap], dom: FgGroup) -> GroupMap:
        """Map into the sum given by per-part maps from a common domain."""
        data = [[0] * self.group.gens for _ in range(dom.gens)]
        for m, off in zip(maps, self.offsets):
            for i in range(dom.gens):
                for j in range(m.cod.gens):
                    data[i][off + j] = m.matrix.data[i][j]
        return GroupMap(dom, self.group, IntMatrix(dom.gens, self.group.gens, data))
