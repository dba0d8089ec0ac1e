"""Lifting along projections with full fibers, fiberwise isomorphisms, and carrier extension."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .complex import (
    ScaledPathMetric,
    SimplicialComplex,
    VertexMap,
    as_beta_vertex,
    beta,
    check_map,
    is_chain,
    vertex_label,
)
from .construction import FiniteStagePoint, NoebelingStep, Tower
from .errors import (
    CarrierViolation,
    DimensionTooHigh,
    FiberMismatch,
    InsufficientCopies,
    MultiplicityTooHigh,
    NotCommuting,
    NotQuasiSimplicial,
)


@dataclass(frozen=True, eq=False)
class Projection:
    """A quasi-simplicial map K -> L with values in β(L)."""

    domain: SimplicialComplex
    codomain: SimplicialComplex
    assignment: Mapping
    n: int

    @classmethod
    def of_step(cls, step: NoebelingStep) -> "Projection":
        return cls(step.result, step.source, {v: v.base for v in step.result.vertices}, step.n)

    @classmethod
    def of_tower(cls, t: Tower, i: int) -> "Projection":
        return cls(t.stage(i), t.stage(i - 1), t.bonds[i - 1], t.n)

    @cached_property
    def fibers(self) -> dict:
        out = {}
        for v, b in self.assignment.items():
            out.setdefault(b, []).append(v)
        key = lambda v: (getattr(v, "copy", 0), vertex_label(v))
        return {b: sorted(vs, key=key) for b, vs in out.items()}


# --- the lifting problem -------------------------------------------------------


@dataclass(eq=False)
class LiftProblem:
    p: Projection
    A: SimplicialComplex
    B: SimplicialComplex
    g: Mapping  # vertices of B -> vertices of p.domain
    G: Mapping  # vertices of A -> simplices of p.codomain

    def validate(self):
        p = self.p
        if self.A.dim > p.n:
            raise DimensionTooHigh(f"dim A = {self.A.dim} > n = {p.n}")
        if not self.B.simplices <= self.A.simplices:
            raise ValueError("B is not a subcomplex of A")
        G = {a: as_beta_vertex(b, p.codomain) for a, b in self.G.items()}
        chk = check_map(VertexMap(self.A, p.codomain, G), "quasi")
        if not chk:
            raise NotQuasiSimplicial(chk.counterexample)
        chk = check_map(VertexMap(self.B, p.domain, self.g), "simplicial")
        if not chk:
            raise ValueError(f"g is not simplicial on {vertex_label(chk.counterexample)}")
        for b in self.B.sorted_vertices():
            if p.assignment[self.g[b]] != G[b]:
                raise NotCommuting(f"p(g({vertex_label(b)})) != G({vertex_label(b)})")
        return G


def solve_lift(prob: LiftProblem) -> VertexMap:
    """Fill in A \\ B with fresh copies: the least unused copy over each G-value."""
    G = prob.validate()
    fibers = prob.p.fibers
    used = {}
    for b in prob.B.vertices:
        used.setdefault(G[b], set()).add(prob.g[b])
    out = dict(prob.g)
    for a in prob.A.sorted_vertices():
        if a in out:
            continue
        taken = used.setdefault(G[a], set())
        choice = next((v for v in fibers.get(G[a], ()) if v not in taken), None)
        if choice is None:
            raise InsufficientCopies(f"fiber over {vertex_label(G[a])} has no unused copy")
        taken.add(choice)
        out[a] = choice
    lift = VertexMap(prob.A, prob.p.domain, out)
    chk = check_map(lift, "simplicial")
    if not chk:
        # only possible when the fibers of p are not full
        raise NotQuasiSimplicial(chk.counterexample, "lift is not simplicial; fibers of p are not full")
    return lift


def lift_clauses(prob: LiftProblem, lift: VertexMap) -> dict:
    """The three lifting clauses, checked exactly."""
    G = {a: as_beta_vertex(b, prob.p.codomain) for a, b in prob.G.items()}
    off_b = [a for a in prob.A.vertices if a not in prob.B.vertices]
    images = [lift.assignment[a] for a in off_b]
    on_b = {prob.g[b] for b in prob.B.vertices}
    return {
        "simplicial": bool(check_map(lift, "simplicial")),
        "commutes": all(prob.p.assignment[lift.assignment[a]] == G[a] for a in prob.A.vertices),
        "extends": all(lift.assignment[b] == prob.g[b] for b in prob.B.vertices),
        "fresh": len(set(images)) == len(images) and not (set(images) & on_b),
    }


# --- uniqueness up to fiberwise isomorphism -------------------------------------


def canonical_iso(p1: Projection, p2: Projection) -> VertexMap:
    """Fiber-preserving bijection K1 -> K2 matching each fiber in sorted order."""
    if p1.codomain != p2.codomain:
        raise FiberMismatch("projections have different targets")
    f1, f2 = p1.fibers, p2.fibers
    if set(f1) != set(f2):
        raise FiberMismatch("projections cover different β-vertices")
    h = {}
    for b in f1:
        if len(f1[b]) != len(f2[b]):
            raise FiberMismatch(f"fiber over {vertex_label(b)}: {len(f1[b])} vs {len(f2[b])} vertices")
        order = lambda v: vertex_label(v)
        h.update(zip(sorted(f1[b], key=order), sorted(f2[b], key=order)))
    return VertexMap(p1.domain, p2.domain, h)


def is_isomorphism(h: VertexMap) -> bool:
    a = h.assignment
    if len(set(a.values())) != len(a) or set(a.values()) != set(h.codomain.vertices):
        return False
    forward = all(frozenset(a[v] for v in s) in h.codomain.simplices for s in h.domain.simplices)
    inv = {w: v for v, w in a.items()}
    backward = all(frozenset(inv[w] for w in s) in h.domain.simplices for s in h.codomain.simplices)
    return forward and backward


# --- carriers ---------------------------------------------------------------------


@dataclass(eq=False)
class CarrierFn:
    """A cover of Y by open sets and a star center in K_i for each.

    The element with vertex set S stands for the union of the open stars of S,
    so an open simplex tau lies in it exactly when tau meets S.
    """

    Y: SimplicialComplex
    cover: Mapping  # index -> frozenset of vertices of Y
    values: Mapping  # index -> vertex of K_i

    def family(self, tau) -> list:
        return [w for w, s in self.cover.items() if s & tau]

    def span(self, tau) -> frozenset:
        return frozenset(self.values[w] for w in self.family(tau))

    def multiplicity(self) -> int:
        return max((len(self.family(t)) for t in self.Y.simplices), default=0)

    def is_one_to_one(self) -> bool:
        return len(set(self.values.values())) == len(self.values)


def check_carrier(W: CarrierFn, K: SimplicialComplex, n: int) -> None:
    for tau in W.Y.sorted_simplices():
        fam = W.family(tau)
        if not fam:
            raise CarrierViolation(f"{vertex_label(tau)} is not covered")
        if len(fam) > n + 1:
            raise MultiplicityTooHigh(f"{vertex_label(tau)} lies in {len(fam)} cover elements")
        if W.span(tau) not in K.simplices:
            raise CarrierViolation(f"carrier values over {vertex_label(tau)} do not span a simplex")


def carrier_extend(W: CarrierFn, K: SimplicialComplex, n: int, partial: Mapping | None = None) -> VertexMap:
    """Extend a carried partial map Y -> K_i stratum by stratum of multiplicity."""
    check_carrier(W, K, n)
    partial = dict(partial or {})
    for y, v in partial.items():
        if v not in W.span(frozenset([y])):
            raise CarrierViolation(f"{vertex_label(y)} is not carried by the cover")
    out = dict(partial)
    strata = sorted(
        (y for y in W.Y.vertices if y not in out),
        key=lambda y: (len(W.family(frozenset([y]))), vertex_label(y)),
    )
    for y in strata:
        out[y] = min(W.span(frozenset([y])), key=vertex_label)
    g = VertexMap(W.Y, K, out)
    chk = check_map(g, "simplicial")
    if not chk:
        raise CarrierViolation(f"partial map is not simplicial on {vertex_label(chk.counterexample)}")
    return g


def preimage_mesh(g: VertexMap, metric: ScaledPathMetric):
    """mesh of g^{-1}(star cover of the target), measured on closed stars in Y."""
    fibres = {}
    for y, v in g.assignment.items():
        fibres.setdefault(v, []).append(y)
    return max((metric.star_union_diameter(ys) for ys in fibres.values()), default=0 * metric.scale)


def star_mesh(W: CarrierFn, metric: ScaledPathMetric):
    """mesh st W: for each element, the union of all elements meeting it."""
    Y = W.Y
    touching = {w: set() for w in W.cover}
    for tau in Y.simplices:
        fam = W.family(tau)
        for a in fam:
            touching[a].update(fam)
    best = 0 * metric.scale
    for w, others in touching.items():
        vs = frozenset().union(*(W.cover[o] for o in others))
        best = max(best, metric.star_union_diameter(vs))
    return best


def is_carried(g: VertexMap, W: CarrierFn) -> bool:
    """g(y) lies in the simplex spanned by the carrier values of the elements containing y."""
    return all(g.assignment[y] in W.span(frozenset([y])) for y in W.Y.vertices)


# --- maps from a test complex into finite stages --------------------------------


class SubdivisionLevels:
    """Y, βY, ββY, ... built on demand, with exact barycentric bookkeeping."""

    def __init__(self, Y: SimplicialComplex, scale=1):
        self.levels = [Y]
        self.scale = Fraction(scale)
        self._coarse = {}

    @property
    def base(self) -> SimplicialComplex:
        return self.levels[0]

    def level(self, s: int) -> SimplicialComplex:
        while len(self.levels) <= s:
            self.levels.append(beta(self.levels[-1]))
        return self.levels[s]

    def metric(self, s: int) -> ScaledPathMetric:
        # barycentric subdivision halves edge lengths in dimension 1
        return ScaledPathMetric(self.level(s), self.scale / 2 ** s)

    def embed_vertex(self, y, frm: int, to: int):
        for _ in range(to - frm):
            y = frozenset([y])
        return y

    def weights(self, y, s: int, r: int) -> dict:
        """Barycentric weights over level-r vertices of the level-s vertex y (r <= s)."""
        if s == r:
            return {y: Fraction(1)}
        key = (y, s, r)
        hit = self._coarse.get(key)
        if hit is not None:
            return hit
        out = {}
        share = Fraction(1, len(y))
        for u in y:
            for v, w in self.weights(u, s - 1, r).items():
                out[v] = out.get(v, 0) + share * w
        self._coarse[key] = out
        return out

    def carrier(self, tau, s: int, r: int) -> frozenset:
        """Level-r simplex whose interior contains the interior of the level-s simplex tau."""
        tau = frozenset(tau)
        while s > r:
            tau, s = max(tau, key=len), s - 1
        return tau

    def subdivide(self, simplices, frm: int, to: int) -> frozenset:
        """The subdivision at level ``to`` of a subcomplex given at level ``frm``."""
        cur = frozenset(simplices)
        for _ in range(to - frm):
            cur = frozenset(_chains_inside(cur))
        return cur


def _chains_inside(simplices: frozenset) -> set:
    sub = SimplicialComplex(frozenset(v for s in simplices for v in s), simplices)
    return beta(sub).simplices


@dataclass(eq=False)
class StageMap:
    """A simplicial map from the level-``level`` subdivision of Y into stage ``stage``."""

    source: SubdivisionLevels
    level: int
    stage: int
    assignment: dict

    @property
    def domain(self) -> SimplicialComplex:
        return self.source.level(self.level)

    def as_vertex_map(self, target: SimplicialComplex) -> VertexMap:
        return VertexMap(self.domain, target, self.assignment)

    def weights_at(self, y, s: int) -> dict:
        """Image of a level-s vertex (s >= level) as weights over stage vertices."""
        out = {}
        for u, w in self.source.weights(y, s, self.level).items():
            v = self.assignment[u]
            out[v] = out.get(v, 0) + w
        return out

    def point(self, y, s: int | None = None) -> FiniteStagePoint:
        s = self.level if s is None else s
        if s < self.level:
            y, s = self.source.embed_vertex(y, s, self.level), self.level
        return FiniteStagePoint.make(self.stage, self.weights_at(y, s))

    def open_carrier(self, tau, s: int) -> frozenset:
        """Stage simplex whose interior holds the image of the open level-s simplex tau."""
        top = self.source.carrier(tau, s, self.level)
        return frozenset(self.assignment[u] for u in top)
