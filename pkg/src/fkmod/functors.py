"""Functors between the module categories.

* restrict:   st -> b / tb / r (read off the base slots);
* tb_to_r:    tb -> r (open boundaries become sums of minimal opens);
* reconstruct_st: the inverse construction b -> st over EBP spaces,
  extending the even part as a colimit over the minimal-open basis and
  the odd part as sections over closures, with boundary maps given by
  the arrow-wise decomposition formula;
* compute_eta: the natural isomorphism m -> reconstruct_st(restrict(m));
* lift_r_morphism / lift_to_st: lifting of r-morphisms to tb and st.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .space import FiniteSpace, _iter_bits, classify_space
from .invariants import (Module, ModuleMap, SpaceNotEbp, SpaceNotUniquePath,
                         cl_composite, op_composite, map_endpoints,
                         required_maps, required_slots, st_boundary_pairs,
                         _b_middle)
from .zmodule import (BlockLayout, FgGroup, GroupMap, IntMatrix,
                      QuotientNotFree, factor_through, group_map_inverse,
                      is_iso, kernel, maps_equal, solve_right, free_complement)


class FreenessHypothesisFailed(ValueError):
    pass


class NotLiftable(ValueError):
    pass


class ReconstructionFailed(AssertionError):
    """An induced map of the reconstruction was not unique/iso as required."""


# ---------------------------------------------------------------------------
# Restriction functors
# ---------------------------------------------------------------------------

def _require_unique_path(sp: FiniteSpace) -> None:
    for x in range(sp.n):
        for y in _iter_bits(sp._gt[x]):
            if len(sp.paths_m(y, x)) > 1:
                raise SpaceNotUniquePath(
                    f"two cover paths from {sp.points[y]} to {sp.points[x]}")


def restrict(st: Module, kind: str) -> Module:
    """Read a b/tb/r module off the base slots of an st module."""
    if st.kind != "st":
        raise ValueError("restrict expects an st module")
    sp = st.space
    if kind in ("b", "tb"):
        _require_unique_path(sp)
    groups: dict = {}
    maps: dict = {}
    if kind in ("b", "tb"):
        for x in range(sp.n):
            groups[("cl", x)] = st.groups[(sp.down[x], 1)]
            groups[("op", x)] = st.groups[(sp.up[x], 0)]
        for x, y in sp.cover_pairs():
            maps[("r", x, y)] = st.maps[("r", sp.down[x], sp.down[y], 1)]
            maps[("d", x, y)] = st.maps[("d", sp.down[y], sp.up[x], 1)]
            maps[("i", x, y)] = st.maps[("i", sp.up[x], sp.up[y], 0)]
        if kind == "tb":
            for x in range(sp.n):
                groups[("k1", x)] = st.groups[(1 << x, 1)]
                maps[("u", x)] = st.maps[("i", 1 << x, sp.down[x], 1)]
        return Module(kind, sp, groups, maps)
    if kind == "r":
        for x in range(sp.n):
            obd = sp.up[x] & ~(1 << x)
            groups[("k1", x)] = st.groups[(1 << x, 1)]
            groups[("bd", x)] = st.groups[(obd, 0)]
            groups[("op", x)] = st.groups[(sp.up[x], 0)]
            maps[("d", x)] = st.maps[("d", 1 << x, obd, 1)]
            maps[("ib", x)] = st.maps[("i", obd, sp.up[x], 0)]
        for y, x in sp.cover_pairs():
            obd = sp.up[x] & ~(1 << x)
            maps[("io", y, x)] = st.maps[("i", sp.up[y], obd, 0)]
        return Module("r", sp, groups, maps)
    raise ValueError(f"cannot restrict to kind {kind!r}")


def restrict_map(f: ModuleMap, kind: str) -> ModuleMap:
    """Restriction of an st morphism along restrict."""
    sp = f.src.space
    src = restrict(f.src, kind)
    dst = restrict(f.dst, kind)
    comps: dict = {}
    for sk in required_slots(kind, sp):
        tag, x = sk
        if tag == "cl":
            comps[sk] = f.components[(sp.down[x], 1)]
        elif tag == "op":
            comps[sk] = f.components[(sp.up[x], 0)]
        elif tag == "k1":
            comps[sk] = f.components[(1 << x, 1)]
        elif tag == "bd":
            comps[sk] = f.components[(sp.up[x] & ~(1 << x), 0)]
    return ModuleMap(src, dst, comps)


def tb_to_r(tb: Module) -> tuple[Module, dict]:
    """Forget the closures: open boundaries become sums of the minimal
    opens of the covering points.  Returns the r module and the per-point
    BlockLayouts of those sums."""
    if tb.kind != "tb":
        raise ValueError("tb_to_r expects a tb module")
    sp = tb.space
    groups: dict = {}
    maps: dict = {}
    layouts: dict = {}
    for x in range(sp.n):
        ups = list(_iter_bits(sp.parents[x]))
        layout = BlockLayout(tuple(tb.groups[("op", y)] for y in ups))
        layouts[x] = (ups, layout)
        groups[("k1", x)] = tb.groups[("k1", x)]
        groups[("op", x)] = tb.groups[("op", x)]
        groups[("bd", x)] = layout.group
        maps[("d", x)] = layout.assemble_into(
            [tb.maps[("u", x)].then(tb.maps[("d", y, x)]) for y in ups],
            tb.groups[("k1", x)])
        maps[("ib", x)] = layout.assemble_from(
            [tb.maps[("i", y, x)] for y in ups], tb.groups[("op", x)])
        for k, y in enumerate(ups):
            maps[("io", y, x)] = layout.injection(k)
    return Module("r", sp, groups, maps), layouts


def tb_to_r_map(phi: ModuleMap, src_r: Module, src_layouts: dict,
                dst_r: Module, dst_layouts: dict) -> ModuleMap:
    """Image of a tb morphism under tb_to_r."""
    sp = phi.src.space
    comps: dict = {}
    for x in range(sp.n):
        comps[("k1", x)] = GroupMap(src_r.groups[("k1", x)], dst_r.groups[("k1", x)],
                                    phi.components[("k1", x)].matrix)
        comps[("op", x)] = GroupMap(src_r.groups[("op", x)], dst_r.groups[("op", x)],
                                    phi.components[("op", x)].matrix)
        ups, la = src_layouts[x]
        _, lb = dst_layouts[x]
        data = [[0] * lb.group.gens for _ in range(la.group.gens)]
        for k, y in enumerate(ups):
            c = phi.components[("op", y)].matrix
            for i in range(c.rows):
                for j in range(c.cols):
                    data[la.offsets[k] + i][lb.offsets[k] + j] = c.data[i][j]
        comps[("bd", x)] = GroupMap(src_r.groups[("bd", x)], dst_r.groups[("bd", x)],
                                    IntMatrix(la.group.gens, lb.group.gens, data))
    return ModuleMap(src_r, dst_r, comps)


# ---------------------------------------------------------------------------
# Reconstruction b -> st
# ---------------------------------------------------------------------------

@dataclass
class Reconstruction:
    module: Module                 # the st module, base slots re-based
    base: Module                   # the input b module
    even_layout: dict = field(default_factory=dict)   # mask -> BlockLayout over hull slots
    even_canon: dict = field(default_factory=dict)    # mask -> FgGroup
    odd_layout: dict = field(default_factory=dict)    # mask -> BlockLayout over Y slots
    odd_canon: dict = field(default_factory=dict)     # mask -> FgGroup
    odd_incl: dict = field(default_factory=dict)      # mask -> GroupMap canon -> ambient
    transport: dict = field(default_factory=dict)     # slot -> GroupMap new -> canonical
    transport_inv: dict = field(default_factory=dict)


def _slot_embedding(src: BlockLayout, src_pts: list, dst: BlockLayout,
                    dst_pts: list) -> IntMatrix:
    """Matrix of the coordinate embedding between two block layouts whose
    blocks are indexed by points (src_pts must be a subset of dst_pts)."""
    pos = {x: k for k, x in enumerate(dst_pts)}
    data = [[0] * dst.group.gens for _ in range(src.group.gens)]
    for k, x in enumerate(src_pts):
        off_s = src.offsets[k]
        off_d = dst.offsets[pos[x]]
        for t in range(src.parts[k].gens):
            data[off_s + t][off_d + t] = 1
    return IntMatrix(src.group.gens, dst.group.gens, data)


def reconstruct_st(n: Module) -> Reconstruction:
    """Extend an exact b module over an EBP space to a full st module."""
    if n.kind != "b":
        raise ValueError("reconstruct_st expects a b module")
    sp = n.space
    cls = classify_space(sp)
    if not cls.ebp:
        raise SpaceNotEbp(f"space is not EBP: {cls.witnesses}")

    lc = sp.lc_masks()
    pts_of = {m: list(_iter_bits(m)) for m in lc}
    for m in lc:
        h = sp.hull_m(m)
        if h not in pts_of:
            pts_of[h] = list(_iter_bits(h))

    # composites of the base maps along the order
    ocomp: dict = {}
    for x in range(sp.n):
        for y in _iter_bits(sp.up[x]):
            ocomp[(y, x)] = op_composite(n, y, x).matrix
    rcomp: dict = {}
    for x in range(sp.n):
        for w in _iter_bits(sp.down[x]):
            rcomp[(x, w)] = cl_composite(n, x, w).matrix

    # -- even part: colimits over the minimal-open basis ---------------------
    even_layout: dict = {}
    triple_rows_cache: dict = {}

    def layout_over(mask: int) -> BlockLayout:
        if mask not in even_layout:
            even_layout[mask] = BlockLayout(
                tuple(n.groups[("op", x)] for x in _iter_bits(mask)))
        return even_layout[mask]

    def triple_rows(openmask: int) -> list:
        if openmask in triple_rows_cache:
            return triple_rows_cache[openmask]
        lay = layout_over(openmask)
        pts = list(_iter_bits(openmask))
        pos = {x: k for k, x in enumerate(pts)}
        total = lay.group.gens
        rows = []
        for ai in range(len(pts)):
            for bi in range(ai + 1, len(pts)):
                a, b = pts[ai], pts[bi]
                for y in _iter_bits(sp.upper_bounds_m(a, b)):
                    ca, cb = ocomp[(y, a)], ocomp[(y, b)]
                    offa, offb = lay.offsets[pos[a]], lay.offsets[pos[b]]
                    for g in range(n.groups[("op", y)].gens):
                        row = [0] * total
                        for j, v in enumerate(ca.data[g]):
                            row[offa + j] += v
                        for j, v in enumerate(cb.data[g]):
                            row[offb + j] -= v
                        rows.append(row)
        triple_rows_cache[openmask] = rows
        return rows

    def kill_rows(openmask: int, dead: int) -> list:
        lay = layout_over(openmask)
        pts = list(_iter_bits(openmask))
        rows = []
        for k, x in enumerate(pts):
            if (dead >> x) & 1:
                for t in range(lay.parts[k].gens):
                    row = [0] * lay.group.gens
                    row[lay.offsets[k] + t] = 1
                    rows.append(row)
        return rows

    even_canon: dict = {}
    for y in lc:
        h = sp.hull_m(y)
        lay = layout_over(h)
        rows = [list(r) for r in lay.group.rels.data]
        rows += triple_rows(h)
        rows += kill_rows(h, h & ~y)
        even_canon[y] = FgGroup(lay.group.gens,
                                IntMatrix(len(rows), lay.group.gens, rows))

    # -- odd part: sections over closures supported on Y ---------------------
    odd_layout: dict = {}
    odd_canon: dict = {}
    odd_incl: dict = {}
    for y in lc:
        pts = pts_of[y]
        lay = BlockLayout(tuple(n.groups[("cl", x)] for x in pts))
        odd_layout[y] = lay
        blocks: list = []   # (target group, columns from each slot)
        cols: list = []     # per constraint block: dict slot index -> matrix
        for ai in range(len(pts)):
            for bi in range(ai + 1, len(pts)):
                a, b = pts[ai], pts[bi]
                for w in _iter_bits(sp.lower_bounds_m(a, b)):
                    blocks.append(n.groups[("cl", w)])
                    cols.append({ai: rcomp[(a, w)],
                                 bi: IntMatrix(rcomp[(b, w)].rows,
                                               rcomp[(b, w)].cols,
                                               [[-v for v in r]
                                                for r in rcomp[(b, w)].data])})
        for ai, a in enumerate(pts):
            for w in _iter_bits(sp.down[a] & ~y):
                blocks.append(n.groups[("cl", w)])
                cols.append({ai: rcomp[(a, w)]})
        tlay = BlockLayout(tuple(blocks))
        theta = [[0] * tlay.group.gens for _ in range(lay.group.gens)]
        for bk, colmap in enumerate(cols):
            off_t = tlay.offsets[bk]
            for ai, mat in colmap.items():
                off_s = lay.offsets[ai]
                for i in range(mat.rows):
                    for j in range(mat.cols):
                        theta[off_s + i][off_t + j] += mat.data[i][j]
        kg, ki = kernel(GroupMap(lay.group, tlay.group,
                                 IntMatrix(lay.group.gens, tlay.group.gens, theta)))
        odd_canon[y] = kg
        odd_incl[y] = ki

    groups: dict = {}
    for y in lc:
        groups[(y, 0)] = even_canon[y]
        groups[(y, 1)] = odd_canon[y]

    # -- even i and r maps ----------------------------------------------------
    maps: dict = {}
    r_open_cache: dict = {}

    def even_i(u: int, y: int) -> GroupMap:
        hu, hy = sp.hull_m(u), sp.hull_m(y)
        emb = _slot_embedding(layout_over(hu), pts_of.get(hu, list(_iter_bits(hu))),
                              layout_over(hy), pts_of.get(hy, list(_iter_bits(hy))))
        return GroupMap(even_canon[u], even_canon[y], emb)

    def r_open(v: int, c: int) -> IntMatrix:
        """Matrix of the restriction from the open set v onto its
        relatively closed subset c, in canonical slot coordinates."""
        if (v, c) in r_open_cache:
            return r_open_cache[(v, c)]
        lay_v = layout_over(v)
        rows = [list(r) for r in lay_v.group.rels.data]
        rows += triple_rows(v)
        rows += kill_rows(v, v & ~c)
        p_group = FgGroup(lay_v.group.gens,
                          IntMatrix(len(rows), lay_v.group.gens, rows))
        hc = sp.hull_m(c)
        emb = _slot_embedding(layout_over(hc), list(_iter_bits(hc)),
                              lay_v, list(_iter_bits(v)))
        comp = GroupMap(even_canon[c], p_group, emb)
        if not is_iso(comp):
            raise ReconstructionFailed(
                "presentation comparison is not an isomorphism")
        inv = group_map_inverse(comp)
        r_open_cache[(v, c)] = inv.matrix
        return inv.matrix

    def even_r(y: int, c: int) -> GroupMap:
        return GroupMap(even_canon[y], even_canon[c], r_open(sp.hull_m(y), c))

    # -- odd i and r maps ------------------------------------------------------
    def odd_r(y: int, c: int) -> GroupMap:
        emb = _slot_embedding(odd_layout[c], pts_of[c], odd_layout[y], pts_of[y])
        # project the ambient of y onto the ambient of c
        proj = emb.transpose()
        amb = odd_incl[y].matrix.mul(proj)
        return factor_through(odd_incl[c], amb, odd_canon[y])

    def odd_i(u: int, y: int) -> GroupMap:
        emb = _slot_embedding(odd_layout[u], pts_of[u], odd_layout[y], pts_of[y])
        amb = odd_incl[u].matrix.mul(emb)
        return factor_through(odd_incl[y], amb, odd_canon[u])

    for y, u, c in st_boundary_pairs(sp):
        if ("i", u, y, 0) not in maps:
            maps[("i", u, y, 0)] = even_i(u, y)
            maps[("i", u, y, 1)] = odd_i(u, y)
        if ("r", y, c, 0) not in maps:
            maps[("r", y, c, 0)] = even_r(y, c)
            maps[("r", y, c, 1)] = odd_r(y, c)

    # -- boundary maps ---------------------------------------------------------
    def cl_top_projection(x: int) -> IntMatrix:
        """Canonical odd group of a point closure -> base group at x."""
        lay = odd_layout[sp.down[x]]
        pts = pts_of[sp.down[x]]
        k = pts.index(x)
        return odd_incl[sp.down[x]].matrix.mul(lay.projection_matrix(k))

    def op_slot_embedding(x: int) -> IntMatrix:
        """Base group at x -> canonical even group of the minimal open."""
        lay = layout_over(sp.up[x])
        pts = list(_iter_bits(sp.up[x]))
        k = pts.index(x)
        g = n.groups[("op", x)].gens
        data = [[0] * lay.group.gens for _ in range(g)]
        for t in range(g):
            data[t][lay.offsets[k] + t] = 1
        return IntMatrix(g, lay.group.gens, data)

    for y, u, c in st_boundary_pairs(sp):
        gc1 = odd_canon[c]
        gu0 = even_canon[u]
        total = IntMatrix.zeros(gc1.gens, gu0.gens)
        for x, yy in sp.cover_pairs():
            if not ((u >> x) & 1 and (c >> yy) & 1):
                continue
            cy = sp.down[yy]
            ox = sp.up[x]
            term = maps[("r", c, cy & c, 1)].matrix
            term = term.mul(maps[("i", cy & c, cy, 1)].matrix)
            term = term.mul(cl_top_projection(yy))
            term = term.mul(n.maps[("d", x, yy)].matrix)
            term = term.mul(op_slot_embedding(x))
            term = term.mul(maps[("r", ox, ox & u, 0)].matrix)
            term = term.mul(maps[("i", ox & u, u, 0)].matrix)
            total = total.add(term)
        maps[("d", c, u, 1)] = GroupMap(gc1, gu0, total)
        maps[("d", c, u, 0)] = GroupMap.zero(even_canon[c], odd_canon[u])

    canonical = Module("st", sp, groups, maps)

    # -- re-base the minimal-open and closure slots ---------------------------
    transport: dict = {}
    for x in range(sp.n):
        sk = (sp.up[x], 0)
        sigma = GroupMap(n.groups[("op", x)], even_canon[sp.up[x]],
                         op_slot_embedding(x))
        if not is_iso(sigma):
            raise ReconstructionFailed("minimal-open comparison not an isomorphism")
        transport[sk] = sigma
        sk = (sp.down[x], 1)
        cmask = sp.down[x]
        amb_rows = []
        for g in range(n.groups[("cl", x)].gens):
            row: list = []
            for w in pts_of[cmask]:
                row.extend(rcomp[(x, w)].data[g])
            amb_rows.append(row)
        amb = IntMatrix(n.groups[("cl", x)].gens, odd_layout[cmask].group.gens,
                        amb_rows)
        tau = factor_through(odd_incl[cmask], amb, n.groups[("cl", x)])
        if not is_iso(tau):
            raise ReconstructionFailed("closure comparison not an isomorphism")
        transport[(cmask, 1)] = tau

    transport_inv = {k: group_map_inverse(v) for k, v in transport.items()}

    new_groups = dict(groups)
    for sk, t in transport.items():
        new_groups[sk] = t.dom
    new_maps: dict = {}
    for mk, f in maps.items():
        a, b = map_endpoints("st", mk)
        mat = f.matrix
        if a in transport:
            mat = transport[a].matrix.mul(mat)
        if b in transport:
            mat = mat.mul(transport_inv[b].matrix)
        new_maps[mk] = GroupMap(new_groups[a], new_groups[b], mat)
    module = Module("st", sp, new_groups, new_maps)

    return Reconstruction(module=module, base=n,
                          even_layout=even_layout, even_canon=even_canon,
                          odd_layout=odd_layout, odd_canon=odd_canon,
                          odd_incl=odd_incl, transport=transport,
                          transport_inv=transport_inv)


def g_on_map(phi: ModuleMap, rm: Reconstruction, rn: Reconstruction) -> ModuleMap:
    """The reconstruction functor applied to a morphism of b modules."""
    sp = rm.module.space
    comps: dict = {}
    for y in sp.lc_masks():
        # even: block-diagonal on the colimit presentations
        h = sp.hull_m(y)
        pts = list(_iter_bits(h))
        la = rm.even_layout[h]
        lb = rn.even_layout[h]
        data = [[0] * lb.group.gens for _ in range(la.group.gens)]
        for k, x in enumerate(pts):
            c = phi.components[("op", x)].matrix
            for i in range(c.rows):
                for j in range(c.cols):
                    data[la.offsets[k] + i][lb.offsets[k] + j] = c.data[i][j]
        mat = IntMatrix(la.group.gens, lb.group.gens, data)
        sk = (y, 0)
        if sk in rm.transport:
            mat = rm.transport[sk].matrix.mul(mat)
        if sk in rn.transport:
            mat = mat.mul(rn.transport_inv[sk].matrix)
        comps[sk] = GroupMap(rm.module.groups[sk], rn.module.groups[sk], mat)
        # odd: induced on the section subgroups
        pts = list(_iter_bits(y))
        la = rm.odd_layout[y]
        lb = rn.odd_layout[y]
        data = [[0] * lb.group.gens for _ in range(la.group.gens)]
        for k, x in enumerate(pts):
            c = phi.components[("cl", x)].matrix
            for i in range(c.rows):
                for j in range(c.cols):
                    data[la.offsets[k] + i][lb.offsets[k] + j] = c.data[i][j]
        amb = rm.odd_incl[y].matrix.mul(IntMatrix(la.group.gens, lb.group.gens, data))
        f = factor_through(rn.odd_incl[y], amb, rm.odd_canon[y])
        mat = f.matrix
        sk = (y, 1)
        if sk in rm.transport:
            mat = rm.transport[sk].matrix.mul(mat)
        if sk in rn.transport:
            mat = mat.mul(rn.transport_inv[sk].matrix)
        comps[sk] = GroupMap(rm.module.groups[sk], rn.module.groups[sk], mat)
    return ModuleMap(rm.module, rn.module, comps)


def compute_eta(m: Module) -> tuple[ModuleMap, Reconstruction]:
    """Natural isomorphism m -> reconstruct_st(restrict(m, b)) for an
    exact st module with vanishing even-to-odd boundaries."""
    if m.kind != "st":
        raise ValueError("compute_eta expects an st module")
    sp = m.space
    recon = reconstruct_st(restrict(m, "b"))
    g = recon.module
    comps: dict = {}
    for y in sp.lc_masks():
        # even: invert the canonical comparison g(Y,0) -> m(Y,0)
        h = sp.hull_m(y)
        pts = list(_iter_bits(h))
        rows: list = []
        for x in pts:
            comp = m.maps[("i", sp.up[x], h, 0)].matrix.mul(
                m.maps[("r", h, y, 0)].matrix)
            rows.extend(comp.data)
        gamma = IntMatrix(recon.even_canon[y].gens, m.groups[(y, 0)].gens, rows)
        sk = (y, 0)
        if sk in recon.transport:
            gamma = recon.transport[sk].matrix.mul(gamma)
        gmap = GroupMap(g.groups[sk], m.groups[sk], gamma)
        if not is_iso(gmap):
            raise ReconstructionFailed(f"even comparison at {sk} not an isomorphism")
        comps[sk] = group_map_inverse(gmap)
        # odd: section map m(Y,1) -> g(Y,1)
        pts = list(_iter_bits(y))
        amb_cols: list = []
        for x in pts:
            cyx = sp.down[x] & y
            f = m.maps[("r", y, cyx, 1)].then(m.maps[("i", cyx, sp.down[x], 1)])
            amb_cols.append(f.matrix)
        gens = m.groups[(y, 1)].gens
        amb_rows = []
        for i in range(gens):
            row: list = []
            for cmat in amb_cols:
                row.extend(cmat.data[i])
            amb_rows.append(row)
        amb = IntMatrix(gens, recon.odd_layout[y].group.gens, amb_rows)
        f = factor_through(recon.odd_incl[y], amb, m.groups[(y, 1)])
        mat = f.matrix
        sk = (y, 1)
        if sk in recon.transport:
            mat = mat.mul(recon.transport_inv[sk].matrix)
        fmap = GroupMap(m.groups[sk], g.groups[sk], mat)
        if not is_iso(fmap):
            raise ReconstructionFailed(f"odd comparison at {sk} not an isomorphism")
        comps[sk] = fmap
    return ModuleMap(m, g, comps), recon


# ---------------------------------------------------------------------------
# The boundary decomposition formula
# ---------------------------------------------------------------------------

def verify_delta_decomposition(m: Module):
    """Check that every odd-to-even boundary map equals the sum of its
    arrow-wise factorizations through the base slots."""
    from .invariants import Report
    if m.kind != "st":
        raise ValueError("expected an st module")
    sp = m.space
    fails = []
    for y, u, c in st_boundary_pairs(sp):
        gc1 = m.groups[(c, 1)]
        gu0 = m.groups[(u, 0)]
        total = IntMatrix.zeros(gc1.gens, gu0.gens)
        for x, yy in sp.cover_pairs():
            if not ((u >> x) & 1 and (c >> yy) & 1):
                continue
            cy = sp.down[yy]
            ox = sp.up[x]
            term = m.maps[("r", c, cy & c, 1)].matrix
            term = term.mul(m.maps[("i", cy & c, cy, 1)].matrix)
            term = term.mul(m.maps[("d", cy, ox, 1)].matrix)
            term = term.mul(m.maps[("r", ox, ox & u, 0)].matrix)
            term = term.mul(m.maps[("i", ox & u, u, 0)].matrix)
            total = total.add(term)
        if not gu0.contains_rows(m.maps[("d", c, u, 1)].matrix.sub(total)):
            fails.append(
                f"decomposition mismatch for U={{{','.join(sp.sorted_ids(u))}}}, "
                f"C={{{','.join(sp.sorted_ids(c))}}}")
    return Report.collect(fails)


# ---------------------------------------------------------------------------
# Lifting
# ---------------------------------------------------------------------------

def lift_r_morphism(m: Module, n: Module, phi: ModuleMap) -> ModuleMap:
    """Lift a morphism between the r images of two exact tb modules to a
    tb morphism, by induction up the order.

    phi must be a morphism tb_to_r(m) -> tb_to_r(n); its k1 and op
    components are used.  The odd point groups of m and n must be free at
    every non-open point (else FreenessHypothesisFailed).
    """
    if m.kind != "tb" or n.kind != "tb":
        raise ValueError("lift_r_morphism expects tb modules")
    sp = m.space
    comps: dict = {}
    for x in range(sp.n):
        comps[("k1", x)] = GroupMap(m.groups[("k1", x)], n.groups[("k1", x)],
                                    phi.components[("k1", x)].matrix)
        comps[("op", x)] = GroupMap(m.groups[("op", x)], n.groups[("op", x)],
                                    phi.components[("op", x)].matrix)
    order = sorted(range(sp.n), key=lambda x: (bin(sp.down[x]).count("1"), x))
    for x in order:
        um = m.maps[("u", x)]
        un = n.maps[("u", x)]
        phik = comps[("k1", x)]
        if sp.children[x] == 0:
            # closed point: the unit map is an isomorphism
            if not is_iso(um):
                raise NotLiftable(f"unit map at closed point {sp.points[x]} not iso")
            comps[("cl", x)] = group_map_inverse(um).then(phik).then(un)
            continue
        try:
            lifts = free_complement(um)
        except QuotientNotFree as e:
            raise FreenessHypothesisFailed(
                f"cl({sp.points[x]})/k1({sp.points[x]}) is not free: {e}") from e
        clm, cln = m.groups[("cl", x)], n.groups[("cl", x)]
        bv = IntMatrix(len(lifts), clm.gens, lifts)
        tm, _ = _b_middle(m, x)
        tn, _ = _b_middle(n, x)
        downs = list(_iter_bits(sp.children[x]))
        ups = list(_iter_bits(sp.parents[x]))
        blocks = ([comps[("cl", y)] for y in downs]
                  + [comps[("op", z)] for z in ups])
        # block diagonal middle_m -> middle_n
        width = tn.cod.gens
        bd_rows: list = []
        offb = 0
        for bmap in blocks:
            for i in range(bmap.matrix.rows):
                row = [0] * width
                row[offb:offb + bmap.matrix.cols] = list(bmap.matrix.data[i])
                bd_rows.append(row)
            offb += bmap.matrix.cols
        bdiag = IntMatrix(len(bd_rows), width, bd_rows)
        targets = bv.mul(tm.matrix).mul(bdiag)
        stacked = tn.matrix.vstack(tn.cod.rels)
        sol, _ = solve_right(stacked, targets)
        if sol is None:
            raise NotLiftable(f"pentagon at {sp.points[x]} has no solution")
        xv = IntMatrix(len(lifts), cln.gens, [r[:cln.gens] for r in sol.data])
        # decompose the generators along cl = V + image(u)
        deco_src = bv.vstack(um.matrix).vstack(clm.rels)
        deco, _ = solve_right(deco_src, IntMatrix.identity(clm.gens))
        if deco is None:
            raise NotLiftable(f"inner direct sum at {sp.points[x]} failed")
        k = len(lifts)
        g1 = um.matrix.rows
        a_part = IntMatrix(clm.gens, k, [r[:k] for r in deco.data])
        b_part = IntMatrix(clm.gens, g1, [r[k:k + g1] for r in deco.data])
        img_map = phik.matrix.mul(un.matrix)
        comps[("cl", x)] = GroupMap(clm, cln,
                                    a_part.mul(xv).add(b_part.mul(img_map)))
    return ModuleMap(m, n, comps)


def lift_to_st(m: Module, n: Module, phi: ModuleMap) -> ModuleMap:
    """Lift a morphism between the r restrictions of two exact st modules
    (with vanishing even-to-odd boundaries) to a full st morphism."""
    if m.kind != "st" or n.kind != "st":
        raise ValueError("lift_to_st expects st modules")
    mtb, ntb = restrict(m, "tb"), restrict(n, "tb")
    mr, mlay = tb_to_r(mtb)
    nr, nlay = tb_to_r(ntb)
    comps: dict = {}
    sp = m.space
    for x in range(sp.n):
        comps[("k1", x)] = GroupMap(mr.groups[("k1", x)], nr.groups[("k1", x)],
                                    phi.components[("k1", x)].matrix)
        comps[("op", x)] = GroupMap(mr.groups[("op", x)], nr.groups[("op", x)],
                                    phi.components[("op", x)].matrix)
        ups, la = mlay[x]
        _, lb = nlay[x]
        data = [[0] * lb.group.gens for _ in range(la.group.gens)]
        for k, y in enumerate(ups):
            c = phi.components[("op", y)].matrix
            for i in range(c.rows):
                for j in range(c.cols):
                    data[la.offsets[k] + i][lb.offsets[k] + j] = c.data[i][j]
        comps[("bd", x)] = GroupMap(mr.groups[("bd", x)], nr.groups[("bd", x)],
                                    IntMatrix(la.group.gens, lb.group.gens, data))
    phi_prime = ModuleMap(mr, nr, comps)
    phi_tb = lift_r_morphism(mtb, ntb, phi_prime)
    mb, nb = restrict(m, "b"), restrict(n, "b")
    phi_b = ModuleMap(mb, nb, {k: v for k, v in phi_tb.components.items()
                               if k[0] in ("cl", "op")})
    eta_m, rm = compute_eta(m)
    eta_n, rn = compute_eta(n)
    gphi = g_on_map(phi_b, rm, rn)
    out: dict = {}
    for sk in required_slots("st", sp):
        out[sk] = eta_m.components[sk].then(gphi.components[sk]).then(
            group_map_inverse(eta_n.components[sk]))
    return ModuleMap(m, n, out)


# ---------------------------------------------------------------------------
# Module equality (round trips)
# ---------------------------------------------------------------------------

def modules_equal(a: Module, b: Module) -> bool:
    """Slot-for-slot: identical presentations and equal generator maps."""
    if a.kind != b.kind:
        return False
    if a.space is not b.space and (a.space.points != b.space.points
                                   or a.space.cover_pairs() != b.space.cover_pairs()):
        return False
    for sk in required_slots(a.kind, a.space):
        if not a.groups[sk].same_presentation(b.groups[sk]):
            return False
    for mk in required_maps(a.kind, a.space):
        if not maps_equal(a.maps[mk], b.maps[mk]):
            return False
    return True
