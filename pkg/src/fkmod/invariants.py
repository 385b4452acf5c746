"""Module categories over a finite T0-space.

Four diagram shapes are supported, all with values in finitely presented
abelian groups:

* ``st``  -- one group per locally closed subset and parity, with
  extension/restriction/boundary maps for every boundary pair;
* ``b``   -- groups on closures (odd) and minimal opens (even) with one
  r/delta/i triple per cover arrow (unique-path spaces);
* ``tb``  -- ``b`` plus the odd point groups and their inclusions;
* ``r``   -- odd point groups, minimal opens and open boundaries.

Modules are stored as dictionaries keyed by slot and map keys; the key
schemas live in this file so that validation, morphisms, direct sums and
serialization all agree on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .space import FiniteSpace, _iter_bits
from .zmodule import (BlockLayout, FgGroup, GroupMap, IntMatrix,
                      is_exact_at, is_injective, is_iso, is_surjective,
                      maps_equal, vstack_all)


class ShapeIncomplete(ValueError):
    """A required group or map is missing or has the wrong endpoints."""


class SpaceNotUniquePath(ValueError):
    pass


class SpaceNotEbp(ValueError):
    pass


KINDS = ("st", "b", "tb", "r")


@dataclass
class Module:
    kind: str
    space: FiniteSpace
    groups: dict
    maps: dict

    def group(self, key) -> FgGroup:
        return self.groups[key]

    def map(self, key) -> GroupMap:
        return self.maps[key]


@dataclass
class Report:
    ok: bool
    failures: list = field(default_factory=list)

    @classmethod
    def collect(cls, failures: list) -> "Report":
        return cls(ok=not failures, failures=failures)


# ---------------------------------------------------------------------------
# Key schemas
# ---------------------------------------------------------------------------

def st_boundary_pairs(sp: FiniteSpace) -> list[tuple[int, int, int]]:
    """All (Y, U, C) with Y locally closed, U relatively open in Y and
    C = Y minus U, in deterministic order."""
    out = []
    for y in sp.lc_masks():
        for u in sp.rel_open_subsets_m(y):
            out.append((y, u, y & ~u))
    return out


def required_slots(kind: str, sp: FiniteSpace) -> list:
    if kind == "st":
        return [(m, p) for m in sp.lc_masks() for p in (0, 1)]
    pts = range(sp.n)
    if kind == "b":
        return [("cl", x) for x in pts] + [("op", x) for x in pts]
    if kind == "tb":
        return ([("k1", x) for x in pts] + [("cl", x) for x in pts]
                + [("op", x) for x in pts])
    if kind == "r":
        return ([("k1", x) for x in pts] + [("bd", x) for x in pts]
                + [("op", x) for x in pts])
    raise ValueError(f"unknown kind {kind!r}")


def required_maps(kind: str, sp: FiniteSpace) -> list:
    if kind == "st":
        keys = []
        seen = set()
        for y, u, c in st_boundary_pairs(sp):
            for p in (0, 1):
                for k in (("i", u, y, p), ("r", y, c, p), ("d", c, u, p)):
                    if k not in seen:
                        seen.add(k)
                        keys.append(k)
        return keys
    arrows = sp.cover_pairs()
    if kind in ("b", "tb"):
        keys = []
        for x, y in arrows:
            keys += [("r", x, y), ("d", x, y), ("i", x, y)]
        if kind == "tb":
            keys += [("u", x) for x in range(sp.n)]
        return keys
    if kind == "r":
        keys = [("d", x) for x in range(sp.n)] + [("ib", x) for x in range(sp.n)]
        keys += [("io", y, x) for y, x in arrows]
        return keys
    raise ValueError(f"unknown kind {kind!r}")


def map_endpoints(kind: str, key) -> tuple:
    """Slot keys (domain, codomain) of a generator map key."""
    if kind == "st":
        tag = key[0]
        if tag == "i":
            _, u, y, p = key
            return (u, p), (y, p)
        if tag == "r":
            _, y, c, p = key
            return (y, p), (c, p)
        if tag == "d":
            _, c, u, p = key
            return (c, p), (u, 1 - p)
    else:
        tag = key[0]
        if kind in ("b", "tb"):
            if tag == "r":
                return ("cl", key[1]), ("cl", key[2])
            if tag == "d":  # delta of the arrow x -> y: cl(y) -> op(x)
                return ("cl", key[2]), ("op", key[1])
            if tag == "i":
                return ("op", key[1]), ("op", key[2])
            if tag == "u" and kind == "tb":
                return ("k1", key[1]), ("cl", key[1])
        if kind == "r":
            if tag == "d":
                return ("k1", key[1]), ("bd", key[1])
            if tag == "ib":
                return ("bd", key[1]), ("op", key[1])
            if tag == "io":
                return ("op", key[1]), ("bd", key[2])
    raise ValueError(f"bad map key {key!r} for kind {kind!r}")


def check_shape(m: Module) -> None:
    """Raise ShapeIncomplete unless all required slots/maps are present
    with matching endpoints."""
    if m.kind not in KINDS:
        raise ShapeIncomplete(f"unknown kind {m.kind!r}")
    for sk in required_slots(m.kind, m.space):
        if sk not in m.groups:
            raise ShapeIncomplete(f"missing group {sk!r}")
    for mk in required_maps(m.kind, m.space):
        if mk not in m.maps:
            raise ShapeIncomplete(f"missing map {mk!r}")
        a, b = map_endpoints(m.kind, mk)
        f = m.maps[mk]
        ga, gb = m.groups[a], m.groups[b]
        if f.dom.gens != ga.gens or f.dom.rels != ga.rels:
            raise ShapeIncomplete(f"map {mk!r} has wrong domain")
        if f.cod.gens != gb.gens or f.cod.rels != gb.rels:
            raise ShapeIncomplete(f"map {mk!r} has wrong codomain")


# ---------------------------------------------------------------------------
# Composites along the order
# ---------------------------------------------------------------------------

def _unique_path(m: Module, y: int, x: int) -> tuple:
    ps = m.space.paths_m(y, x)
    if len(ps) != 1:
        raise SpaceNotUniquePath(
            f"{len(ps)} cover paths from {m.space.points[y]} to {m.space.points[x]}")
    return ps[0]


def op_composite(m: Module, y: int, x: int) -> GroupMap:
    """The canonical map op(y) -> op(x) for y >= x.

    For b/tb modules this is the composite of arrow inclusions along the
    unique cover path.  For r modules the composite runs through the open
    boundary of each intermediate point; path independence is a module
    relation, so the lexicographically first path is used.
    """
    if y == x:
        return GroupMap.identity(m.groups[("op", x)])
    if m.kind in ("b", "tb"):
        path = _unique_path(m, y, x)
        f = None
        for k in range(len(path) - 1, 0, -1):
            step = m.maps[("i", path[k], path[k - 1])]
            f = step if f is None else f.then(step)
        return f
    if m.kind == "r":
        path = min(m.space.paths_m(y, x))
        f = _r_path_composite(m, path)
        return f.then(m.maps[("io", path[1], x)]).then(m.maps[("ib", x)])
    raise ValueError(f"op_composite undefined for kind {m.kind!r}")


def _r_path_composite(m: Module, path: tuple) -> GroupMap:
    """For an ascending path (x, z2, ..., y) in an r module, the composite
    op(y) -> op(z2) running alternately through the open boundaries."""
    f = GroupMap.identity(m.groups[("op", path[-1])])
    for k in range(len(path) - 1, 1, -1):
        f = f.then(m.maps[("io", path[k], path[k - 1])])
        f = f.then(m.maps[("ib", path[k - 1])])
    return f


def cl_composite(m: Module, x: int, y: int) -> GroupMap:
    """The restriction cl(x) -> cl(y) for y <= x in a b/tb module."""
    if x == y:
        return GroupMap.identity(m.groups[("cl", x)])
    path = _unique_path(m, x, y)
    f = None
    for k in range(len(path) - 1, 0, -1):
        step = m.maps[("r", path[k], path[k - 1])]
        f = step if f is None else f.then(step)
    return f


# ---------------------------------------------------------------------------
# Validation (defining relations)
# ---------------------------------------------------------------------------

def _eqm(f: GroupMap, g: GroupMap) -> bool:
    return maps_equal(f, g)


def _validate_st(m: Module) -> list:
    sp = m.space
    fails: list = []
    pairs = st_boundary_pairs(sp)
    pairset = {(u, c) for _, u, c in pairs}
    lc = sp.lc_masks()

    def imap(u, y, p):
        return m.maps[("i", u, y, p)]

    def rmap(y, c, p):
        return m.maps[("r", y, c, p)]

    def dmap(c, u, p):
        return m.maps[("d", c, u, p)]

    def name(mask):
        return "{" + ",".join(sp.sorted_ids(mask)) + "}"

    # (1) identities
    for y in lc:
        for p in (0, 1):
            g = m.groups[(y, p)]
            ident = GroupMap.identity(g)
            if not _eqm(imap(y, y, p), ident):
                fails.append(f"(1) i on {name(y)} parity {p} is not the identity")
            if not _eqm(rmap(y, y, p), ident):
                fails.append(f"(1) r on {name(y)} parity {p} is not the identity")

    # (2) topologically disjoint decompositions
    for yi, y in enumerate(lc):
        if not y:
            continue
        for z in lc[:yi]:
            if not z or (y & z):
                continue
            if sp.hull_m(y) & z or sp.hull_m(z) & y:
                continue
            w = y | z
            if not sp.is_lc_m(w):
                fails.append(f"(2) disjoint union {name(w)} is not locally closed")
                continue
            for p in (0, 1):
                lhs = rmap(w, y, p).then(imap(y, w, p)).add(
                    rmap(w, z, p).then(imap(z, w, p)))
                if not _eqm(lhs, GroupMap.identity(m.groups[(w, p)])):
                    fails.append(f"(2) fails on {name(y)} | {name(z)} parity {p}")

    # (3)/(4) transitivity of i and r, and (5) compatibility
    for y in lc:
        ros = sp.rel_open_subsets_m(y)
        for v in ros:
            for u in sp.rel_open_subsets_m(v):
                if u == v or v == y:
                    continue
                for p in (0, 1):
                    if not _eqm(imap(u, v, p).then(imap(v, y, p)), imap(u, y, p)):
                        fails.append(f"(3) fails on {name(u)} < {name(v)} < {name(y)} parity {p}")
        rcs = [y & ~u for u in ros]
        for d in rcs:
            for c_rel in sp.rel_open_subsets_m(d):
                c = d & ~c_rel
                if c == d or d == y:
                    continue
                for p in (0, 1):
                    if not _eqm(rmap(y, d, p).then(rmap(d, c, p)), rmap(y, c, p)):
                        fails.append(f"(4) fails on {name(c)} < {name(d)} < {name(y)} parity {p}")
        for u in ros:
            for c in rcs:
                uc = u & c
                for p in (0, 1):
                    lhs = imap(u, y, p).then(rmap(y, c, p))
                    rhs = rmap(u, uc, p).then(imap(uc, c, p))
                    if not _eqm(lhs, rhs):
                        fails.append(f"(5) fails on U={name(u)}, C={name(c)} in {name(y)} parity {p}")

    # (6)/(7) boundary naturality
    for _, u, c in pairs:
        for cp in sp.rel_open_subsets_m(c):
            if (u, cp) not in pairset:
                continue
            for p in (0, 1):
                if not _eqm(imap(cp, c, p).then(dmap(c, u, p)), dmap(cp, u, p)):
                    fails.append(f"(6) fails on C'={name(cp)} < C={name(c)}, U={name(u)} parity {p}")
        for urel in sp.rel_open_subsets_m(u):
            up_ = u & ~urel  # relatively closed in u
            if (up_, c) not in pairset:
                continue
            for p in (0, 1):
                if not _eqm(dmap(c, u, p).then(rmap(u, up_, 1 - p)), dmap(c, up_, p)):
                    fails.append(f"(7) fails on U'={name(up_)} < U={name(u)}, C={name(c)} parity {p}")

    # (8) the exchange relation: Y, W relatively closed in Y | W, Z, W
    # relatively open in Z | W, W covered by Y | Z; then
    # d(Y -> W\Y) ; i(W\Y -> Z) = r(Y -> W\Z) ; d(W\Z -> Z).
    for y in lc:
        if not y:
            continue
        for z in lc:
            for w in lc:
                if w & ~(y | z):
                    continue
                yw, zw = y | w, z | w
                if not (sp.is_lc_m(yw) and sp.is_lc_m(zw)):
                    continue
                if not (sp.rel_closed_m(y, yw) and sp.rel_closed_m(w, yw)):
                    continue
                if not (sp.rel_open_m(z, zw) and sp.rel_open_m(w, zw)):
                    continue
                wy = w & ~y
                wz = w & ~z
                if (wy, y) not in pairset or (z, wz) not in pairset:
                    continue
                if wy & ~z or not sp.rel_open_m(wy, z):
                    continue
                if wz & ~y or not sp.rel_closed_m(wz, y):
                    continue
                for p in (0, 1):
                    lhs = dmap(y, wy, p).then(imap(wy, z, 1 - p))
                    rhs = rmap(y, wz, p).then(dmap(wz, z, p))
                    if not _eqm(lhs, rhs):
                        fails.append(
                            f"(8) fails on Y={name(y)}, Z={name(z)}, W={name(w)} parity {p}")
    return fails


def _validate_b_relations(m: Module) -> list:
    sp = m.space
    fails = []
    for x in range(sp.n):
        tgt = m.groups[("op", x)]
        src = m.groups[("cl", x)]
        lhs = GroupMap.zero(src, tgt)
        for y in _iter_bits(sp.children[x]):
            lhs = lhs.add(m.maps[("r", x, y)].then(m.maps[("d", x, y)]))
        rhs = GroupMap.zero(src, tgt)
        for z in _iter_bits(sp.parents[x]):
            rhs = rhs.add(m.maps[("d", z, x)].then(m.maps[("i", z, x)]))
        if not _eqm(lhs, rhs):
            fails.append(f"b relation fails at {sp.points[x]}")
    return fails


def _validate_tb(m: Module) -> list:
    sp = m.space
    fails = _validate_b_relations(m)
    for x, y in sp.cover_pairs():
        comp = m.maps[("u", x)].then(m.maps[("r", x, y)])
        if not comp.is_zero_map():
            fails.append(f"tb relation u;r nonzero on arrow {sp.points[x]} -> {sp.points[y]}")
    return fails


def _validate_r(m: Module) -> list:
    sp = m.space
    fails = []
    for x in range(sp.n):
        if not m.maps[("d", x)].then(m.maps[("ib", x)]).is_zero_map():
            fails.append(f"r relation d;i nonzero at {sp.points[x]}")
    for x in range(sp.n):
        for y in _iter_bits(sp._gt[x]):
            ps = sp.paths_m(y, x)
            if len(ps) < 2:
                continue
            ref = None
            for p in ps:
                f = _r_path_composite(m, p).then(m.maps[("io", p[1], x)])
                if ref is None:
                    ref = f
                elif not _eqm(ref, f):
                    fails.append(
                        f"path independence fails from {sp.points[y]} to {sp.points[x]}")
                    break
    return fails


def validate_module(m: Module) -> Report:
    check_shape(m)
    if m.kind == "st":
        return Report.collect(_validate_st(m))
    if m.kind == "b":
        if not all(len(m.space.paths_m(y, x)) <= 1
                   for x in range(m.space.n) for y in _iter_bits(m.space._gt[x])):
            raise SpaceNotUniquePath("b modules require a unique-path space")
        return Report.collect(_validate_b_relations(m))
    if m.kind == "tb":
        if not all(len(m.space.paths_m(y, x)) <= 1
                   for x in range(m.space.n) for y in _iter_bits(m.space._gt[x])):
            raise SpaceNotUniquePath("tb modules require a unique-path space")
        return Report.collect(_validate_tb(m))
    if m.kind == "r":
        return Report.collect(_validate_r(m))
    raise ValueError(f"unknown kind {m.kind!r}")


# ---------------------------------------------------------------------------
# Exactness
# ---------------------------------------------------------------------------

def _exact_st(m: Module) -> list:
    sp = m.space
    fails = []
    for y, u, c in st_boundary_pairs(sp):
        if u == 0 or c == 0:
            continue  # degenerate pairs reduce to relation (1)
        seq = [
            (m.maps[("d", c, u, 1)], m.maps[("i", u, y, 0)], "U even"),
            (m.maps[("i", u, y, 0)], m.maps[("r", y, c, 0)], "Y even"),
            (m.maps[("r", y, c, 0)], m.maps[("d", c, u, 0)], "C even"),
            (m.maps[("d", c, u, 0)], m.maps[("i", u, y, 1)], "U odd"),
            (m.maps[("i", u, y, 1)], m.maps[("r", y, c, 1)], "Y odd"),
            (m.maps[("r", y, c, 1)], m.maps[("d", c, u, 1)], "C odd"),
        ]
        for f, g, where in seq:
            if not is_exact_at(f, g):
                fails.append(
                    f"six-term sequence for U={{{','.join(sp.sorted_ids(u))}}}, "
                    f"C={{{','.join(sp.sorted_ids(c))}}} not exact at {where}")
    return fails


def _b_middle(m: Module, x: int):
    """The middle term of the b exactness sequence at x, with the maps in
    and out of it."""
    sp = m.space
    downs = list(_iter_bits(sp.children[x]))
    ups = list(_iter_bits(sp.parents[x]))
    parts = [m.groups[("cl", y)] for y in downs] + [m.groups[("op", z)] for z in ups]
    layout = BlockLayout(tuple(parts))
    into = layout.assemble_into(
        [m.maps[("r", x, y)] for y in downs]
        + [m.maps[("d", z, x)].neg() for z in ups],
        m.groups[("cl", x)])
    out = layout.assemble_from(
        [m.maps[("d", x, y)] for y in downs]
        + [m.maps[("i", z, x)] for z in ups],
        m.groups[("op", x)])
    return into, out


def _exact_b(m: Module) -> list:
    fails = []
    for x in range(m.space.n):
        into, out = _b_middle(m, x)
        if not is_exact_at(into, out):
            fails.append(f"b sequence not exact at {m.space.points[x]}")
    return fails


def _exact_tb(m: Module) -> list:
    sp = m.space
    fails = _exact_b(m)
    for x in range(sp.n):
        u = m.maps[("u", x)]
        if not is_injective(u):
            fails.append(f"tb unit map not injective at {sp.points[x]}")
        downs = list(_iter_bits(sp.children[x]))
        layout = BlockLayout(tuple(m.groups[("cl", y)] for y in downs))
        rmap = layout.assemble_into([m.maps[("r", x, y)] for y in downs],
                                    m.groups[("cl", x)])
        if not is_exact_at(u, rmap):
            fails.append(f"tb sequence not exact at cl({sp.points[x]})")
    return fails


def _exact_r(m: Module) -> list:
    sp = m.space
    fails = []
    for x in range(sp.n):
        if not is_exact_at(m.maps[("d", x)], m.maps[("ib", x)]):
            fails.append(f"r sequence not exact at bd({sp.points[x]})")
        ups = list(_iter_bits(sp.parents[x]))
        layout = BlockLayout(tuple(m.groups[("op", y)] for y in ups))
        out = layout.assemble_from([m.maps[("io", y, x)] for y in ups],
                                   m.groups[("bd", x)])
        if not is_surjective(out):
            fails.append(f"assembled map onto bd({sp.points[x]}) not surjective")
        dps = sp.double_paths_m(x)
        srcs = [m.groups[("op", p[-1])] for p, _ in dps]
        dlayout = BlockLayout(tuple(srcs))
        pos = {y: k for k, y in enumerate(ups)}
        comps = []
        for p, q in dps:
            src = m.groups[("op", p[-1])]
            fp = _r_path_composite(m, p)
            fq = _r_path_composite(m, q)
            vec = [GroupMap.zero(src, m.groups[("op", y)]) for y in ups]
            vec[pos[p[1]]] = vec[pos[p[1]]].add(fp)
            vec[pos[q[1]]] = vec[pos[q[1]]].add(fq.neg())
            comps.append(layout.assemble_into(vec, src))
        if dps:
            dmat = vstack_all([c.matrix for c in comps], layout.group.gens)
            diff = GroupMap(dlayout.group, layout.group, dmat)
        else:
            diff = GroupMap.zero(dlayout.group, layout.group)
        if not is_exact_at(diff, out):
            fails.append(f"double-path sequence not exact at parents of {sp.points[x]}")
    return fails


def is_exact(m: Module) -> Report:
    check_shape(m)
    if m.kind == "st":
        return Report.collect(_exact_st(m))
    if m.kind == "b":
        return Report.collect(_exact_b(m))
    if m.kind == "tb":
        return Report.collect(_exact_tb(m))
    if m.kind == "r":
        return Report.collect(_exact_r(m))
    raise ValueError(f"unknown kind {m.kind!r}")


def is_rrz(m: Module) -> Report:
    """Real-rank-zero style condition: all even-to-odd boundary maps vanish."""
    if m.kind != "st":
        raise ValueError("rrz is a property of st modules")
    fails = []
    for key, f in sorted(m.maps.items()):
        if key[0] == "d" and key[3] == 0 and not f.is_zero_map():
            fails.append(f"boundary map {key!r} is nonzero")
    return Report.collect(fails)


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

@dataclass
class ModuleMap:
    src: Module
    dst: Module
    components: dict  # slot key -> GroupMap

    @property
    def kind(self) -> str:
        return self.src.kind

    def component(self, key) -> GroupMap:
        return self.components[key]

    def then(self, other: "ModuleMap") -> "ModuleMap":
        comps = {k: f.then(other.components[k]) for k, f in self.components.items()}
        return ModuleMap(self.src, other.dst, comps)


def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, {k: GroupMap.identity(g) for k, g in m.groups.items()
                            if k in set(required_slots(m.kind, m.space))})


def verify_morphism(f: ModuleMap) -> Report:
    """Check that the components commute with every generator map."""
    if f.src.kind != f.dst.kind:
        return Report(False, ["kind mismatch"])
    kind, sp = f.src.kind, f.src.space
    fails = []
    for sk in required_slots(kind, sp):
        if sk not in f.components:
            raise ShapeIncomplete(f"missing morphism component {sk!r}")
    for mk in required_maps(kind, sp):
        a, b = map_endpoints(kind, mk)
        lhs = f.src.maps[mk].then(f.components[b])
        rhs = f.components[a].then(f.dst.maps[mk])
        if not maps_equal(lhs, rhs):
            fails.append(f"component square for map {mk!r} does not commute")
    return Report.collect(fails)


def is_slotwise_iso(f: ModuleMap) -> bool:
    return all(is_iso(f.components[k])
               for k in required_slots(f.src.kind, f.src.space))


def direct_sum_modules(mods: Sequence[Module]) -> tuple[Module, dict]:
    """Blockwise direct sum; returns the sum and per-slot BlockLayouts."""
    kind, sp = mods[0].kind, mods[0].space
    if any(m.kind != kind or m.space is not sp for m in mods[1:]):
        raise ValueError("direct sum requires a common kind and space")
    layouts = {}
    groups = {}
    for sk in required_slots(kind, sp):
        layouts[sk] = BlockLayout(tuple(m.groups[sk] for m in mods))
        groups[sk] = layouts[sk].group
    maps = {}
    for mk in required_maps(kind, sp):
        a, b = map_endpoints(kind, mk)
        la, lb = layouts[a], layouts[b]
        data = [[0] * lb.group.gens for _ in range(la.group.gens)]
        for m, offa, offb in zip(mods, la.offsets, lb.offsets):
            md = m.maps[mk].matrix.data
            for i in range(m.maps[mk].matrix.rows):
                row = data[offa + i]
                for j, v in enumerate(md[i]):
                    row[offb + j] = v
        maps[mk] = GroupMap(groups[a], groups[b],
                            IntMatrix(la.group.gens, lb.group.gens, data))
    return Module(kind, sp, groups, maps), layouts


# ---------------------------------------------------------------------------
# Units
# ---------------------------------------------------------------------------

@dataclass
class Receptacle:
    """cokernel of the comparison map between minimal-open slots; the home
    of unit classes for b/tb/r modules."""

    layout: BlockLayout          # over op(x), in point order
    group: FgGroup               # layout.group plus comparison rows

    def member_zero(self, vec: Sequence[int]) -> bool:
        return self.group.member(vec)


def unit_receptacle(m: Module) -> Receptacle:
    if m.kind not in ("b", "tb", "r"):
        raise ValueError("unit receptacles are for b/tb/r modules")
    sp = m.space
    layout = BlockLayout(tuple(m.groups[("op", x)] for x in range(sp.n)))
    rows = []
    total = layout.group.gens
    for x in range(sp.n):
        for xp in range(x + 1, sp.n):
            for y in _iter_bits(sp.upper_bounds_m(x, xp)):
                fx = op_composite(m, y, x)
                fxp = op_composite(m, y, xp)
                offx, offxp = layout.offsets[x], layout.offsets[xp]
                for g in range(m.groups[("op", y)].gens):
                    row = [0] * total
                    for j, v in enumerate(fx.matrix.data[g]):
                        row[offx + j] += v
                    for j, v in enumerate(fxp.matrix.data[g]):
                        row[offxp + j] -= v
                    rows.append(row)
    rel = layout.group.rels.vstack(IntMatrix(len(rows), total, rows))
    return Receptacle(layout=layout, group=FgGroup(total, rel))


@dataclass
class PointedModule:
    module: Module
    unit: tuple  # coordinates in M(X, 0) for st, in the receptacle ambient otherwise

    def __post_init__(self):
        if self.module.kind == "st":
            want = self.module.groups[(self.module.space.full, 0)].gens
        else:
            want = sum(self.module.groups[("op", x)].gens
                       for x in range(self.module.space.n))
        if len(self.unit) != want:
            raise ShapeIncomplete("unit vector has the wrong length")
        self.unit = tuple(int(v) for v in self.unit)


def check_pointed_map(f: ModuleMap, src: PointedModule, dst: PointedModule) -> bool:
    """Does f send the unit class of src to the unit class of dst?"""
    m, n = src.module, dst.module
    if m.kind == "st":
        full = m.space.full
        img = f.components[(full, 0)].apply(src.unit)
        diff = [a - b for a, b in zip(img, dst.unit)]
        return n.groups[(full, 0)].member(diff)
    rec = unit_receptacle(n)
    img: list[int] = []
    off = 0
    for x in range(m.space.n):
        g = m.groups[("op", x)].gens
        comp = f.components[("op", x)]
        part = comp.apply(src.unit[off:off + g])
        img.extend(part)
        off += g
    diff = [a - b for a, b in zip(img, dst.unit)]
    return rec.member_zero(diff)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def st_point_module(sp: FiniteSpace, point: str, parity: int,
                    coeff: Optional[FgGroup] = None) -> Module:
    """The st module concentrated at one point: coeff on every locally
    closed set containing the point (in the given parity), zero elsewhere."""
    coeff = coeff if coeff is not None else FgGroup.free(1)
    x = sp.index(point)
    xbit = 1 << x
    groups = {}
    for y in sp.lc_masks():
        for p in (0, 1):
            groups[(y, p)] = coeff if (p == parity and (y & xbit)) else FgGroup.trivial()
    maps = {}
    for mk in required_maps("st", sp):
        a, b = map_endpoints("st", mk)
        ga, gb = groups[a], groups[b]
        if ga is coeff and gb is coeff and mk[0] != "d":
            maps[mk] = GroupMap.identity(coeff)
        else:
            maps[mk] = GroupMap.zero(ga, gb)
    return Module("st", sp, groups, maps)


def b_extension_module(sp: FiniteSpace, upper: str, lower: str,
                       coeff: Optional[FgGroup] = None) -> Module:
    """The b module of a one-step extension along the cover arrow
    upper -> lower: odd coeff on closures of points above ``lower`` but not
    above ``upper``, even coeff on minimal opens of points below ``upper``
    but not below ``lower``, connected by an identity boundary map."""
    coeff = coeff if coeff is not None else FgGroup.free(1)
    u, v = sp.index(upper), sp.index(lower)
    if not (sp.children[u] >> v) & 1:
        raise ValueError(f"{upper} does not cover {lower}")
    odd = sp.up[v] & ~sp.up[u]      # z >= lower, z not >= upper
    even = sp.down[u] & ~sp.down[v]  # z <= upper, z not <= lower
    groups = {}
    for x in range(sp.n):
        groups[("cl", x)] = coeff if (odd >> x) & 1 else FgGroup.trivial()
        groups[("op", x)] = coeff if (even >> x) & 1 else FgGroup.trivial()
    maps = {}
    for x, y in sp.cover_pairs():
        gcl_x, gcl_y = groups[("cl", x)], groups[("cl", y)]
        gop_x, gop_y = groups[("op", x)], groups[("op", y)]
        maps[("r", x, y)] = (GroupMap.identity(coeff)
                             if gcl_x is coeff and gcl_y is coeff
                             else GroupMap.zero(gcl_x, gcl_y))
        maps[("i", x, y)] = (GroupMap.identity(coeff)
                             if gop_x is coeff and gop_y is coeff
                             else GroupMap.zero(gop_x, gop_y))
        maps[("d", x, y)] = (GroupMap.identity(coeff)
                             if gcl_y is coeff and gop_x is coeff
                             else GroupMap.zero(gcl_y, gop_x))
    return Module("b", sp, groups, maps)


# ---------------------------------------------------------------------------
# Covering sequences (even parts of exact modules with zero even-to-odd
# boundaries behave like cosheaves on the open sets)
# ---------------------------------------------------------------------------

def check_open_cover(m: Module, ymask: int, cover: Sequence[int]) -> bool:
    """For an st module, check exactness of

        + M(U_i & U_j, 0) -> + M(U_i, 0) -> M(Y, 0) -> 0

    for an open cover (U_i) of the open set ymask."""
    sp = m.space
    acc = 0
    for u in cover:
        if not sp.is_open_m(u) or u & ~ymask:
            raise ValueError("cover members must be open subsets of the set")
        acc |= u
    if acc != ymask:
        raise ValueError("not a cover")
    mid = BlockLayout(tuple(m.groups[(u, 0)] for u in cover))
    out = mid.assemble_from([m.maps[("i", u, ymask, 0)] for u in cover],
                            m.groups[(ymask, 0)])
    pair_groups = []
    pair_cols = []   # (slot index i, slot index j, intersection mask)
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            pair_groups.append(m.groups[(cover[i] & cover[j], 0)])
            pair_cols.append((i, j, cover[i] & cover[j]))
    top = BlockLayout(tuple(pair_groups))
    data = [[0] * mid.group.gens for _ in range(top.group.gens)]
    for k, (i, j, w) in enumerate(pair_cols):
        fi = m.maps[("i", w, cover[i], 0)].matrix
        fj = m.maps[("i", w, cover[j], 0)].matrix
        for g in range(fi.rows):
            row = data[top.offsets[k] + g]
            for c, v in enumerate(fi.data[g]):
                row[mid.offsets[i] + c] += v
            for c, v in enumerate(fj.data[g]):
                row[mid.offsets[j] + c] -= v
    into = GroupMap(top.group, mid.group,
                    IntMatrix(top.group.gens, mid.group.gens, data))
    return is_exact_at(into, out) and is_surjective(out)


def check_unit_sequence(m: Module) -> bool:
    """For an st module, check exactness of the unit sequence

        + M(op y, 0) -> + M(op x, 0) -> M(X, 0) -> 0

    with the left map ranging over pairs x, x' and their common upper
    bounds y; its cokernel is the receptacle of the restricted module."""
    sp = m.space
    nb_rec = unit_receptacle(_restrict_b_for_units(m))
    layout = nb_rec.layout
    out = layout.assemble_from(
        [m.maps[("i", sp.up[x], sp.full, 0)] for x in range(sp.n)],
        m.groups[(sp.full, 0)])
    rel_rows = nb_rec.group.rels
    into = GroupMap(FgGroup.free(rel_rows.rows), layout.group, rel_rows)
    return is_exact_at(into, out) and is_surjective(out)


def _restrict_b_for_units(m: Module) -> Module:
    """The b-shaped data of an st module, used only to build receptacles
    (avoids a circular import with the functors module)."""
    sp = m.space
    groups: dict = {}
    maps: dict = {}
    for x in range(sp.n):
        groups[("cl", x)] = m.groups[(sp.down[x], 1)]
        groups[("op", x)] = m.groups[(sp.up[x], 0)]
    for x, y in sp.cover_pairs():
        maps[("r", x, y)] = m.maps[("r", sp.down[x], sp.down[y], 1)]
        maps[("d", x, y)] = m.maps[("d", sp.down[y], sp.up[x], 1)]
        maps[("i", x, y)] = m.maps[("i", sp.up[x], sp.up[y], 0)]
    return Module("b", sp, groups, maps)
