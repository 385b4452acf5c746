"""Realizability verdicts.

The verdicts evaluate the decidable hypotheses of the range and
classification theorems on a validated module; they never construct
graphs or algebras.  Criterion ids are stable strings so that verdict
JSON is diffable:

* ``r.exact``          the r module is exact;
* ``r.free.<x>``       the odd point group at x is free;
* ``ck.rank.<x>``      rank k1(x) equals the rank of coker(ib at x);
* ``unital.fin.<x>``   that cokernel is finitely generated (always true
                       here, reported for visibility);
* ``unital.rank.le.<x>`` rank k1(x) <= rank coker(ib at x);
* ``unital.rank.eq.<x>`` equality, the regular-vertex case;
* ``phantom.accordion``  the space is an accordion;
* ``phantom.free.<x>`` / ``phantom.fin.<x>`` / ``phantom.rank.<x>``
                       the pointwise conditions of the classification
                       criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .space import FiniteSpace, _iter_bits, classify_space
from .invariants import Module, PointedModule, is_exact
from .zmodule import BlockLayout, FgGroup, cokernel, kernel


@dataclass
class Check:
    criterion: str
    ok: bool
    witness: str = ""

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "ok": self.ok,
                "witness": self.witness}


@dataclass
class Verdict:
    checks: list = field(default_factory=list)
    graph_realizable: bool = None
    ck_realizable: bool = None
    unital_graph_realizable: bool = None
    unital_ck_realizable: bool = None
    phantom: bool = None
    applicable: bool = True

    def add(self, criterion: str, ok: bool, witness: str = "") -> bool:
        self.checks.append(Check(criterion, ok, witness if not ok else ""))
        return ok

    def as_dict(self) -> dict:
        out = {"checks": [c.as_dict() for c in self.checks],
               "applicable": self.applicable}
        for k in ("graph_realizable", "ck_realizable",
                  "unital_graph_realizable", "unital_ck_realizable",
                  "phantom"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


def _coker_ib(m: Module, x: int) -> FgGroup:
    g, _ = cokernel(m.maps[("ib", x)])
    return g


def range_check_graph(m: Module) -> Verdict:
    """Hypotheses for realization by a countable graph: exactness plus
    freeness of every odd point group."""
    if m.kind != "r":
        raise ValueError("range checks expect an r module")
    v = Verdict()
    rep = is_exact(m)
    ok = v.add("r.exact", rep.ok, "; ".join(rep.failures[:3]))
    for x in range(m.space.n):
        g = m.groups[("k1", x)]
        ok &= v.add(f"r.free.{m.space.points[x]}", g.is_free(),
                    f"k1({m.space.points[x]}) has torsion {g.torsion}")
    v.graph_realizable = bool(ok)
    return v


def range_check_ck(m: Module) -> Verdict:
    """Finite-graph (Cuntz-Krieger) case: additionally each odd point rank
    must equal the rank of the cokernel of the boundary inclusion."""
    v = range_check_graph(m)
    ok = v.graph_realizable
    sp = m.space
    for x in range(sp.n):
        p = sp.points[x]
        ok &= v.add(f"ck.fin.{p}", True)  # finitely presented by construction
        rk = m.groups[("k1", x)].rank
        crk = _coker_ib(m, x).rank
        ok &= v.add(f"ck.rank.{p}", rk == crk,
                    f"rank k1({p}) = {rk} but rank coker(i) = {crk}")
    v.ck_realizable = bool(ok)
    return v


def range_check_unital(pm: PointedModule) -> Verdict:
    """Unital range: the cokernel of the boundary inclusion must be
    finitely generated with rank bounding (graph case) or equal to
    (Cuntz-Krieger case) the odd point rank; the unit class itself is
    unconstrained."""
    m = pm.module if isinstance(pm, PointedModule) else pm
    v = range_check_graph(m)
    ok_g = v.graph_realizable
    ok_le = ok_g
    ok_eq = ok_g
    sp = m.space
    for x in range(sp.n):
        p = sp.points[x]
        co = _coker_ib(m, x)
        ok_le &= v.add(f"unital.fin.{p}", True)
        rk = m.groups[("k1", x)].rank
        crk = co.rank
        ok_le &= v.add(f"unital.rank.le.{p}", rk <= crk,
                       f"rank k1({p}) = {rk} > rank coker(i) = {crk}")
        ok_eq &= v.add(f"unital.rank.eq.{p}", rk == crk,
                       f"rank k1({p}) = {rk} but rank coker(i) = {crk}")
    v.unital_graph_realizable = bool(ok_le)
    v.unital_ck_realizable = bool(ok_le and ok_eq)
    return v


def _b_point_k1(m: Module, x: int) -> FgGroup:
    """Odd point group of a b module: kernel of the assembled restriction
    out of cl(x)."""
    sp = m.space
    downs = list(_iter_bits(sp.children[x]))
    layout = BlockLayout(tuple(m.groups[("cl", y)] for y in downs))
    rmap = layout.assemble_into([m.maps[("r", x, y)] for y in downs],
                                m.groups[("cl", x)])
    g, _ = kernel(rmap)
    return g


def _b_point_k0_rank(m: Module, x: int) -> int:
    """Rank of the even point group of a b module: cokernel of the
    assembled inclusion into op(x)."""
    sp = m.space
    ups = list(_iter_bits(sp.parents[x]))
    layout = BlockLayout(tuple(m.groups[("op", y)] for y in ups))
    imap = layout.assemble_from([m.maps[("i", y, x)] for y in ups],
                                m.groups[("op", x)])
    g, _ = cokernel(imap)
    return g.rank


def phantom_verdict(sp: FiniteSpace, pm) -> Verdict:
    """Classification criterion over accordion spaces: every simple
    subquotient must have free odd K-theory of the same rank as its even
    K-theory.  Input is a pointed (or plain) exact st module with zero
    even-to-odd boundaries, or a b module."""
    m = pm.module if isinstance(pm, PointedModule) else pm
    v = Verdict()
    cls = classify_space(sp)
    if not v.add("phantom.accordion", cls.accordion,
                 str(cls.witnesses.get("accordion", "not an accordion"))):
        v.applicable = False
        v.phantom = None
        return v
    ok = True
    for x in range(sp.n):
        p = sp.points[x]
        if m.kind == "st":
            k1 = m.groups[(1 << x, 1)]
            k0_rank = m.groups[(1 << x, 0)].rank
        elif m.kind == "b":
            k1 = _b_point_k1(m, x)
            k0_rank = _b_point_k0_rank(m, x)
        else:
            raise ValueError("phantom_verdict expects an st or b module")
        ok &= v.add(f"phantom.free.{p}", k1.is_free(),
                    f"K1 at {p} has torsion {k1.torsion}")
        ok &= v.add(f"phantom.fin.{p}", True)
        ok &= v.add(f"phantom.rank.{p}", k1.rank == k0_rank,
                    f"rank K1 = {k1.rank} but rank K0 = {k0_rank} at {p}")
    v.phantom = bool(ok)
    return v
