"""Deterministic corpora of spaces and modules for self-testing.

Everything here is seeded: the same seed produces the same corpus, so
verification reports are reproducible byte for byte.
"""

from __future__ import annotations

import random

from .space import FiniteSpace
from .invariants import (Module, ModuleMap, direct_sum_modules,
                         required_maps, required_slots, map_endpoints,
                         st_point_module, b_extension_module)
from .zmodule import FgGroup, GroupMap, IntMatrix, unimodular_inverse


# ---------------------------------------------------------------------------
# Named spaces
# ---------------------------------------------------------------------------

def sierpinski() -> FiniteSpace:
    return FiniteSpace(["1", "2"], [("2", "1")])


def chain(n: int) -> FiniteSpace:
    pts = [str(i + 1) for i in range(n)]
    return FiniteSpace(pts, [(pts[i + 1], pts[i]) for i in range(n - 1)])


def accordion4() -> FiniteSpace:
    """Four points whose Hasse diagram is the zigzag a > b < c > d."""
    return FiniteSpace(["a", "b", "c", "d"],
                       [("a", "b"), ("c", "b"), ("c", "d")])


def forest5() -> FiniteSpace:
    return FiniteSpace(["a", "b", "c", "d", "e"],
                       [("a", "b"), ("a", "c"), ("d", "c"), ("e", "c")])


def diamond() -> FiniteSpace:
    """The four-point space with two incomparable middle points; not a
    unique path space."""
    return FiniteSpace(["1", "2", "3", "4"],
                       [("4", "3"), ("4", "2"), ("3", "1"), ("2", "1")])


def pseudocircle() -> FiniteSpace:
    return FiniteSpace(["a", "b", "c", "d"],
                       [("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")])


def sixteen_point() -> FiniteSpace:
    """The sixteen-point unique path space that is not EBP: two rings of
    eight points with the upper ring spiralling onto the lower."""
    xs = [f"x{i}" for i in range(1, 9)]
    ys = [f"y{i}" for i in range(1, 9)]
    covers = []
    # upper ring: even x's cover their odd neighbours
    for k in (2, 4, 6, 8):
        covers.append((f"x{k}", f"x{k - 1}"))
        covers.append((f"x{k}", f"x{(k % 8) + 1}"))
    # lower ring, same shape
    for k in (2, 4, 6, 8):
        covers.append((f"y{k}", f"y{k - 1}"))
        covers.append((f"y{k}", f"y{(k % 8) + 1}"))
    # spiral: odd x's drop onto odd y's two steps around
    for a, b in ((1, 7), (3, 1), (5, 3), (7, 5)):
        covers.append((f"x{a}", f"y{b}"))
    # even x's drop onto the even y two steps around
    for a, b in ((2, 4), (4, 6), (6, 8), (8, 2)):
        covers.append((f"x{a}", f"y{b}"))
    return FiniteSpace(xs + ys, covers)


RECONSTRUCTION_SPACES = {
    "sierpinski": sierpinski,
    "chain3": lambda: chain(3),
    "chain4": lambda: chain(4),
    "accordion4": accordion4,
    "forest5": forest5,
}


# ---------------------------------------------------------------------------
# Random presentation twists
# ---------------------------------------------------------------------------

def random_unimodular(n: int, rng: random.Random, steps: int = 6) -> IntMatrix:
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        for k in range(n):
            m[i][k] += c * m[j][k]
        if rng.random() < 0.3:
            i, j = rng.sample(range(n), 2)
            m[i], m[j] = m[j], m[i]
    if n and rng.random() < 0.5:
        i = rng.randrange(n)
        m[i] = [-v for v in m[i]]
    return IntMatrix(n, n, m)


def represent_module(m: Module, rng: random.Random) -> tuple[Module, dict]:
    """An isomorphic copy of m with every slot group re-presented by a
    random unimodular change of generators.  Returns the copy and the
    per-slot matrices (slot iso m -> copy)."""
    twists = {}
    inv = {}
    groups = {}
    for sk in required_slots(m.kind, m.space):
        g = m.groups[sk]
        u = random_unimodular(g.gens, rng)
        twists[sk] = u
        inv[sk] = unimodular_inverse(u)
        groups[sk] = FgGroup(g.gens, g.rels.mul(u))
    maps = {}
    for mk in required_maps(m.kind, m.space):
        a, b = map_endpoints(m.kind, mk)
        mat = inv[a].mul(m.maps[mk].matrix).mul(twists[b])
        maps[mk] = GroupMap(groups[a], groups[b], mat)
    return Module(m.kind, m.space, groups, maps), twists


def twist_morphism(m: Module, n: Module, twists: dict) -> ModuleMap:
    """The slotwise isomorphism m -> represent_module(m)[0]."""
    comps = {sk: GroupMap(m.groups[sk], n.groups[sk], twists[sk])
             for sk in required_slots(m.kind, m.space)}
    return ModuleMap(m, n, comps)


# ---------------------------------------------------------------------------
# Module corpora
# ---------------------------------------------------------------------------

def torsion_coefficients() -> list[FgGroup]:
    return [FgGroup.cyclic(n) for n in (2, 3, 4, 6, 12)]


def st_corpus(sp: FiniteSpace, rng: random.Random) -> list[Module]:
    """Exact st modules with zero even-to-odd boundaries: point modules in
    both parities, torsion point modules, and random direct sums."""
    base = []
    for p in sp.points:
        for parity in (0, 1):
            base.append(st_point_module(sp, p, parity))
    for i, coeff in enumerate(torsion_coefficients()):
        p = sp.points[i % sp.n]
        base.append(st_point_module(sp, p, i % 2, coeff))
    out = list(base)
    for _ in range(3):
        picks = rng.sample(base, min(len(base), rng.randrange(2, 4)))
        out.append(direct_sum_modules(picks)[0])
    return out


def b_corpus(sp: FiniteSpace, rng: random.Random) -> list[Module]:
    """Exact b modules: restrictions of the st corpus plus extension
    modules (free and torsion) along every cover arrow and random sums."""
    from .functors import restrict
    base = [restrict(m, "b") for m in st_corpus(sp, rng)]
    exts = []
    for y, x in sp.cover_pairs():
        exts.append(b_extension_module(sp, sp.points[y], sp.points[x]))
        n = rng.choice((2, 3, 5, 8, 12))
        exts.append(b_extension_module(sp, sp.points[y], sp.points[x],
                                       FgGroup.cyclic(n)))
    out = base + exts
    for _ in range(2):
        picks = rng.sample(exts + base[:4], 2)
        out.append(direct_sum_modules(picks)[0])
    return out


def free_st_corpus(sp: FiniteSpace, rng: random.Random) -> list[Module]:
    """Exact st modules whose odd point groups are free (lifting corpus)."""
    base = []
    for p in sp.points:
        for parity in (0, 1):
            base.append(st_point_module(sp, p, parity))
    out = list(base)
    for _ in range(2):
        picks = rng.sample(base, min(len(base), rng.randrange(2, 4)))
        out.append(direct_sum_modules(picks)[0])
    return out


def random_r_module(rng: random.Random) -> Module:
    """A small exact-shaped r module on the one-point space with random
    point groups (used for verdict monotonicity sweeps)."""
    sp = FiniteSpace(["x"], [])

    def rand_group():
        gens = rng.randrange(0, 3)
        rows = []
        if gens and rng.random() < 0.5:
            row = [0] * gens
            row[rng.randrange(gens)] = rng.choice((2, 3, 4))
            rows.append(row)
        return FgGroup(gens, IntMatrix(len(rows), gens, rows))

    k1, op = rand_group(), rand_group()
    bd = FgGroup.trivial()
    groups = {("k1", 0): k1, ("bd", 0): bd, ("op", 0): op}
    maps = {("d", 0): GroupMap.zero(k1, bd), ("ib", 0): GroupMap.zero(bd, op)}
    return Module("r", sp, groups, maps)
