"""The acceptance suite: nine deterministic property checks, shared by
the test suite and the ``selftest`` CLI command.

Each criterion function returns a CriterionResult with a pass flag, a
human-readable detail line and the elapsed wall time; run_all executes
all nine with a given seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from . import corpus
from .space import (FiniteSpace, UNIQUE_PATH_CONDITIONS, classify_space,
                    elementary_boundary_pairs, _iter_bits)
from .zmodule import (FgGroup, GroupMap, IntMatrix, hermite_normal_form,
                      is_iso, maps_equal, smith_normal_form, snf_diagonal,
                      determinant, BlockLayout)
from .invariants import (check_open_cover, check_unit_sequence,
                         is_exact, is_rrz, is_slotwise_iso,
                         st_point_module, b_extension_module,
                         direct_sum_modules, validate_module, verify_morphism,
                         Module, ModuleMap)
from .functors import (compute_eta, lift_r_morphism, lift_to_st, modules_equal,
                       reconstruct_st, restrict, restrict_map, tb_to_r,
                       tb_to_r_map, verify_delta_decomposition)
from .classify import (phantom_verdict, range_check_ck, range_check_graph,
                       range_check_unital)


@dataclass
class CriterionResult:
    criterion: str
    ok: bool
    detail: str
    seconds: float

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "ok": self.ok,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _timed(name):
    def wrap(fn):
        def run(*args, **kw) -> CriterionResult:
            t0 = time.monotonic()
            ok, detail = fn(*args, **kw)
            return CriterionResult(name, ok, detail, time.monotonic() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------------------
# Poset enumeration (for the equivalence sweep)
# ---------------------------------------------------------------------------

def labeled_posets(n: int):
    """All strict partial orders on n labeled points, as lists of masks
    below[i] (points strictly under i).  Built by inserting one point at
    a time."""
    posets = [[]]
    for k in range(n):
        new = []
        for below in posets:
            above = [0] * k
            for i in range(k):
                for j in _iter_bits(below[i]):
                    above[j] |= 1 << i
            full = (1 << k) - 1
            for down in _submasks(full):
                # down-set: closed under going down
                if any(below[i] & ~down for i in _iter_bits(down)):
                    continue
                allowed_up = full & ~down
                for i in _iter_bits(allowed_up):
                    # candidates above must already dominate all of down
                    if down & ~below[i]:
                        allowed_up &= ~(1 << i)
                for up in _submasks(allowed_up):
                    if any(above[i] & ~up for i in _iter_bits(up)):
                        continue
                    nb = list(below) + [down]
                    for i in _iter_bits(up):
                        nb[i] |= (1 << k) | down
                    new.append(nb)
        posets = new
    return posets


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _space_from_below(below: list) -> FiniteSpace:
    n = len(below)
    pts = [str(i) for i in range(n)]
    covers = [(pts[i], pts[j]) for i in range(n) for j in _iter_bits(below[i])]
    return FiniteSpace(pts, covers)


POSET_COUNTS = {1: 1, 2: 3, 3: 19, 4: 219, 5: 4231}


@_timed("1. unique-path six-way equivalence")
def criterion_1():
    """Six independent unique-path conditions agree on every labeled poset
    with at most five points."""
    checked = 0
    for n in range(1, 6):
        posets = labeled_posets(n)
        if len(posets) != POSET_COUNTS[n]:
            return False, (f"enumeration produced {len(posets)} posets on "
                           f"{n} points, expected {POSET_COUNTS[n]}")
        for below in posets:
            sp = _space_from_below(below)
            answers = {name: fn(sp) for name, fn in UNIQUE_PATH_CONDITIONS.items()}
            if len(set(answers.values())) != 1:
                return False, f"conditions disagree on {sp.points}, {below}: {answers}"
            checked += 1
    return True, f"{checked} posets, six conditions each"


@_timed("2. space fixtures")
def criterion_2():
    """The diamond is not unique-path; the sixteen-point space is
    unique-path but not EBP with the documented witness; every accordion
    space on up to six points is a forest and EBP."""
    d = classify_space(corpus.diamond())
    if d.unique_path:
        return False, "diamond classified unique-path"
    q = corpus.sixteen_point()
    qc = classify_space(q)
    if not qc.unique_path or qc.ebp:
        return False, f"sixteen-point space: unique_path={qc.unique_path} ebp={qc.ebp}"
    u = q.mask_of([f"x{i}" for i in range(1, 9)])
    c = q.mask_of([f"y{i}" for i in range(1, 9)])
    pairs = set(elementary_boundary_pairs(q))
    if (u, c) not in pairs:
        return False, "documented witness pair is not elementary"
    arrow_pairs = {(q.up[b], q.down[a]) for a, b in q.cover_pairs()}
    if (u, c) in arrow_pairs:
        return False, "witness pair unexpectedly of arrow form"
    count = 0
    for sp in _accordion_spaces(6):
        cls = classify_space(sp)
        if not (cls.accordion and cls.forest and cls.ebp and cls.unique_path):
            return False, f"accordion space misclassified: {sp.cover_pairs()}"
        count += 1
    return True, f"D, Q and {count} accordion spaces agree"


def _accordion_spaces(nmax: int):
    """All spaces on <= nmax points whose Hasse diagram is a single path,
    one per (labeled path, arrow orientation)."""
    for n in range(1, nmax + 1):
        pts = [str(i) for i in range(n)]
        for perm in itertools.permutations(range(n)):
            if n > 1 and perm[0] > perm[-1]:
                continue  # skip the reversed duplicate
            for bits in range(1 << max(n - 1, 0)):
                covers = []
                for i in range(n - 1):
                    a, b = perm[i], perm[i + 1]
                    if (bits >> i) & 1:
                        covers.append((pts[a], pts[b]))
                    else:
                        covers.append((pts[b], pts[a]))
                yield FiniteSpace(pts, covers)
            if n == 1:
                break


@_timed("3. Smith normal form soundness")
def criterion_3(seed: int = 0):
    """1000 random integer matrices: exact factorization, unimodular
    transforms, divisibility chain; invariant factors cross-checked
    against an order-counting oracle built on Hermite normal form."""
    rng = random.Random(seed + 3)
    oracle_cases = 0
    for trial in range(1000):
        rows = rng.randrange(1, 7)
        cols = rng.randrange(1, 7)
        m = IntMatrix(rows, cols, [[rng.randrange(-9, 10) for _ in range(cols)]
                                   for _ in range(rows)])
        u, d, v = smith_normal_form(m)
        if u.mul(m).mul(v).data != d.data:
            return False, f"UMV != D at trial {trial}"
        if abs(determinant(u)) != 1 or abs(determinant(v)) != 1:
            return False, f"non-unimodular transform at trial {trial}"
        diag = snf_diagonal(d)
        for i in range(len(diag) - 1):
            if diag[i + 1] and (diag[i] == 0 or diag[i + 1] % diag[i]):
                return False, f"divisibility chain broken at trial {trial}: {diag}"
        if any(x < 0 for x in diag):
            return False, f"negative invariant factor at trial {trial}"
        if rows == cols:
            det = determinant(m)
            if det and abs(det) <= 200:
                if not _orders_match(m, diag):
                    return False, f"oracle mismatch at trial {trial}: {diag}"
                oracle_cases += 1
    return True, f"1000 matrices, {oracle_cases} oracle cross-checks"


def _orders_match(m: IntMatrix, diag) -> bool:
    """Enumerate Z^n modulo the row lattice of m via Hermite normal form
    and compare the multiset of element orders with the prediction from
    the claimed invariant factors."""
    n = m.cols
    h = hermite_normal_form(m)
    hd = [h.data[i][i] for i in range(n)]
    if any(x <= 0 for x in hd):
        return False

    def order_of(vec) -> int:
        k = 1
        cur = list(vec)
        while True:
            red = list(cur)
            ok = True
            for i in range(n):
                q, r = divmod(red[i], hd[i])
                if r:
                    ok = False
                    break
                for j in range(n):
                    red[j] -= q * h.data[i][j]
            if ok and all(v == 0 for v in red):
                return k
            k += 1
            cur = [v + w for v, w in zip(cur, vec)]

    from collections import Counter
    found = Counter()
    for coords in itertools.product(*[range(x) for x in hd]):
        found[order_of(coords)] += 1
    predicted = Counter()
    fulldiag = [x for x in diag if x] + [1] * (n - len(diag))
    for coords in itertools.product(*[range(x) for x in fulldiag]):
        o = 1
        for c, mod in zip(coords, fulldiag):
            g = mod // _gcd(c, mod)
            o = o * g // _gcd(o, g)
        predicted[o] += 1
    return found == predicted


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a if a else 1


def _reconstruction_corpus(seed: int):
    rng = random.Random(seed + 4)
    spaces = {name: mk() for name, mk in corpus.RECONSTRUCTION_SPACES.items()}
    return {name: corpus.b_corpus(sp, rng) for name, sp in spaces.items()}, spaces


@_timed("4. reconstruction round trip")
def criterion_4(seed: int = 0):
    """Every b module in the corpus extends to a validated exact module
    with zero even-to-odd boundaries whose restriction is the original;
    the comparison morphism is an isomorphism on the st side."""
    per_space, spaces = _reconstruction_corpus(seed)
    total = 0
    eta_count = 0
    rng = random.Random(seed + 40)
    for name, mods in per_space.items():
        for nb in mods:
            recon = reconstruct_st(nb)
            g = recon.module
            r1 = validate_module(g)
            if not r1.ok:
                return False, f"{name}: output invalid: {r1.failures[0]}"
            r2 = is_exact(g)
            if not r2.ok:
                return False, f"{name}: output not exact: {r2.failures[0]}"
            if not is_rrz(g).ok:
                return False, f"{name}: output has nonzero even-to-odd boundary"
            if not modules_equal(restrict(g, "b"), nb):
                return False, f"{name}: round trip is not slot-for-slot equal"
            total += 1
        for m in corpus.st_corpus(spaces[name], rng):
            eta, _ = compute_eta(m)
            if not verify_morphism(eta).ok:
                return False, f"{name}: eta does not commute"
            if not is_slotwise_iso(eta):
                return False, f"{name}: eta is not an isomorphism"
            eta_count += 1
    return True, f"{total} b modules round-tripped, {eta_count} eta isomorphisms"


@_timed("5. boundary decomposition")
def criterion_5(seed: int = 0):
    """The arrow-wise decomposition of every odd-to-even boundary map
    holds on every reconstructed module, for every boundary pair."""
    per_space, _ = _reconstruction_corpus(seed)
    pairs = 0
    for name, mods in per_space.items():
        for nb in mods:
            g = reconstruct_st(nb).module
            rep = verify_delta_decomposition(g)
            if not rep.ok:
                return False, f"{name}: {rep.failures[0]}"
            pairs += len(rep.failures) == 0
    return True, f"{pairs} modules, all boundary pairs decomposed"


@_timed("6. morphism lifting")
def criterion_6(seed: int = 0):
    """Lifting r morphisms: the lift restricts back to the input, and
    isomorphisms lift to isomorphisms; the full st lift restricts to the
    input as well."""
    rng = random.Random(seed + 6)
    spaces = [corpus.sierpinski(), corpus.chain(3), corpus.chain(4),
              corpus.accordion4(), corpus.forest5()]
    tb_pairs = 0
    st_pairs = 0
    for sp in spaces:
        sts = corpus.free_st_corpus(sp, rng)
        for m_st in sts:
            m = restrict(m_st, "tb")
            mr, mlay = tb_to_r(m)
            n, tw = corpus.represent_module(m, rng)
            nr, nlay = tb_to_r(n)
            psi = corpus.twist_morphism(m, n, tw)
            phi = tb_to_r_map(psi, mr, mlay, nr, nlay)
            lift = lift_r_morphism(m, n, phi)
            if not verify_morphism(lift).ok:
                return False, f"lift does not commute on {sp.points}"
            back = tb_to_r_map(lift, mr, mlay, nr, nlay)
            for k, v in phi.components.items():
                if not maps_equal(back.components[k], v):
                    return False, f"tb_to_r(lift) != phi at {k} on {sp.points}"
            if not is_slotwise_iso(lift):
                return False, f"iso input, non-iso lift on {sp.points}"
            # a non-iso morphism: compose with multiplication by 2
            two = ModuleMap(m, n, {k: v.add(v) for k, v in psi.components.items()})
            phi2 = tb_to_r_map(two, mr, mlay, nr, nlay)
            lift2 = lift_r_morphism(m, n, phi2)
            back2 = tb_to_r_map(lift2, mr, mlay, nr, nlay)
            if not verify_morphism(lift2).ok:
                return False, f"non-iso lift does not commute on {sp.points}"
            for k, v in phi2.components.items():
                if not maps_equal(back2.components[k], v):
                    return False, f"non-iso lift restriction mismatch at {k}"
            tb_pairs += 2
    for sp in spaces[:3]:
        sts = corpus.free_st_corpus(sp, rng)[:4]
        for m_st in sts:
            n_st, tw = corpus.represent_module(m_st, rng)
            phi = restrict_map(corpus.twist_morphism(m_st, n_st, tw), "r")
            full = lift_to_st(m_st, n_st, phi)
            if not verify_morphism(full).ok:
                return False, f"st lift does not commute on {sp.points}"
            if not is_slotwise_iso(full):
                return False, f"st lift of iso not iso on {sp.points}"
            back = restrict_map(full, "r")
            for k, v in phi.components.items():
                if not maps_equal(back.components[k], v):
                    return False, f"restrict(st lift) != phi at {k}"
            st_pairs += 1
    total = tb_pairs + st_pairs
    if total < 100:
        return False, f"only {total} lifting pairs exercised"
    return True, f"{tb_pairs} tb lifts + {st_pairs} st lifts"


@_timed("7. covering exactness and unit sequence")
def criterion_7(seed: int = 0):
    """For exact st modules with zero even-to-odd boundaries: every open
    cover by at most three opens yields an exact even sequence, and the
    unit sequence onto the total even group is exact."""
    rng = random.Random(seed + 7)
    covers_checked = 0
    mods_checked = 0
    for name, mk in corpus.RECONSTRUCTION_SPACES.items():
        sp = mk()
        opens = [u for u in range(1 << sp.n) if sp.is_open_m(u)]
        cover_table = {}
        for y in opens:
            subs = [u for u in opens if not (u & ~y)]
            table = []
            for k in (1, 2, 3):
                for combo in itertools.combinations(subs, k):
                    acc = 0
                    for u in combo:
                        acc |= u
                    if acc == y:
                        table.append(list(combo))
            cover_table[y] = table
        for m in corpus.st_corpus(sp, rng)[:8]:
            if not check_unit_sequence(m):
                return False, f"{name}: unit sequence not exact"
            for y, table in cover_table.items():
                for combo in table:
                    if not check_open_cover(m, y, combo):
                        return False, (f"{name}: cover of "
                                       f"{sp.sorted_ids(y)} by "
                                       f"{[sp.sorted_ids(u) for u in combo]} fails")
                    covers_checked += 1
            mods_checked += 1
    return True, f"{mods_checked} modules, {covers_checked} covers"


@_timed("8. open-boundary redundancy")
def criterion_8(seed: int = 0):
    """On unique-path spaces the assembled map from the minimal opens of
    the covering points onto each open boundary is an isomorphism for
    every exact r module in the corpus."""
    rng = random.Random(seed + 8)
    checked = 0
    for name, mk in corpus.RECONSTRUCTION_SPACES.items():
        sp = mk()
        for m_st in corpus.st_corpus(sp, rng):
            m = restrict(m_st, "r")
            for x in range(sp.n):
                ups = list(_iter_bits(sp.parents[x]))
                layout = BlockLayout(tuple(m.groups[("op", y)] for y in ups))
                f = layout.assemble_from([m.maps[("io", y, x)] for y in ups],
                                         m.groups[("bd", x)])
                if not is_iso(f):
                    return False, (f"{name}: boundary at {sp.points[x]} "
                                   "is not the sum of the covering opens")
                checked += 1
    return True, f"{checked} open boundaries"


@_timed("9. classification verdicts")
def criterion_9(seed: int = 0):
    """The worked examples of the three verdict operations return the
    documented answers, and the summary flags are monotone on a random
    sweep."""
    # one-point space examples for the finite-graph rank criterion
    pt = FiniteSpace(["x"], [])

    def one_point_r(k1: FgGroup, op: FgGroup) -> Module:
        bd = FgGroup.trivial()
        return Module("r", pt, {("k1", 0): k1, ("bd", 0): bd, ("op", 0): op},
                      {("d", 0): GroupMap.zero(k1, bd),
                       ("ib", 0): GroupMap.zero(bd, op)})

    z = FgGroup.free(1)
    z2 = FgGroup.free(2)
    z2z3 = FgGroup(3, IntMatrix(1, 3, [[0, 0, 3]]))
    zero = FgGroup.trivial()
    cases = [
        (one_point_r(z, z), True, None),
        (one_point_r(zero, z), False, None),
        (one_point_r(z2, z2z3), True, None),
    ]
    for m, want, _ in cases:
        got = range_check_ck(m).ck_realizable
        if got != want:
            return False, f"ck example expected {want}, got {got}"
    unital_cases = [
        (one_point_r(zero, z), True, False),
        (one_point_r(z, z), True, True),
        (one_point_r(z2, z), False, False),
    ]
    for m, want_g, want_ck in unital_cases:
        v = range_check_unital(m)
        if (v.unital_graph_realizable, v.unital_ck_realizable) != (want_g, want_ck):
            return False, (f"unital example expected {(want_g, want_ck)}, got "
                           f"{(v.unital_graph_realizable, v.unital_ck_realizable)}")
    # phantom examples
    m = direct_sum_modules([st_point_module(pt, "x", 0), st_point_module(pt, "x", 0),
                            st_point_module(pt, "x", 1), st_point_module(pt, "x", 1)])[0]
    if phantom_verdict(pt, m).phantom is not True:
        return False, "one-point (Z^2, Z^2) example should satisfy the criteria"
    mt = st_point_module(pt, "x", 1, FgGroup.cyclic(2))
    if phantom_verdict(pt, mt).phantom is not False:
        return False, "torsion K1 example should fail the freeness condition"
    c3 = corpus.chain(3)
    balanced = direct_sum_modules([
        b_extension_module(c3, "2", "1"), b_extension_module(c3, "3", "2"),
        restrict(st_point_module(c3, "1", 0), "b"),
        restrict(st_point_module(c3, "3", 1), "b")])[0]
    if phantom_verdict(c3, balanced).phantom is not True:
        return False, "balanced 3-chain sum should satisfy the criteria"
    if phantom_verdict(corpus.diamond(),
                       st_point_module(corpus.diamond(), "1", 0)).applicable:
        return False, "non-accordion space should be not-applicable"
    # monotonicity sweep
    rng = random.Random(seed + 9)
    spaces = [corpus.sierpinski(), corpus.chain(3), corpus.accordion4()]
    for trial in range(500):
        if trial % 2:
            m = corpus.random_r_module(rng)
        else:
            sp = rng.choice(spaces)
            coeff = rng.choice([None, FgGroup.cyclic(rng.choice((2, 3, 4))),
                                FgGroup.free(2)])
            m = restrict(st_point_module(sp, rng.choice(sp.points),
                                         rng.randrange(2), coeff), "r")
        g = range_check_graph(m).graph_realizable
        c = range_check_ck(m).ck_realizable
        v = range_check_unital(m)
        if c and not g:
            return False, f"monotonicity ck => graph broken at trial {trial}"
        if v.unital_ck_realizable and not v.unital_graph_realizable:
            return False, f"monotonicity unital_ck => unital_graph broken at {trial}"
    return True, "anchored examples and 500-module monotonicity sweep"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def run_all(seed: int = 0) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        if fn in (criterion_1, criterion_2):
            out.append(fn())
        else:
            out.append(fn(seed))
    return out
