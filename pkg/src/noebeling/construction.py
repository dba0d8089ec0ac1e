"""The complex N^n_kappa(K), its projection onto βK, and towers of such steps."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, NamedTuple

from .complex import (
    SimplicialComplex,
    VertexMap,
    as_beta_vertex,
    beta,
    check_map,
    is_chain,
    is_full,
    vertex_label,
)
from .errors import BudgetExceeded, InvalidParameter, InvalidSimplex, InvalidStage, NotQuasiSimplicial

DEFAULT_BUDGET = 2_000_000


class CopyVertex(NamedTuple):
    base: frozenset
    copy: int

    def __str__(self):
        return f"{vertex_label(self.base)}#{self.copy}"


def _copy_patterns(d: int, kappa: int, n: int):
    """Ways to pick a nonempty copy set for each of d bases, at most n+1 copies in total."""
    sizes = [
        ms for ms in itertools.product(range(1, n + 2), repeat=d) if sum(ms) <= n + 1
    ]
    for ms in sizes:
        yield from itertools.product(*(itertools.combinations(range(kappa), m) for m in ms))


def _check_params(n, kappa):
    if kappa < 2:
        raise InvalidParameter(f"kappa must be >= 2, got {kappa}")
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")


@dataclass(frozen=True, eq=False)
class NoebelingStep:
    source: SimplicialComplex
    n: int
    kappa: int
    result: SimplicialComplex

    @cached_property
    def beta(self) -> SimplicialComplex:
        return beta(self.source)

    @cached_property
    def pi(self) -> VertexMap:
        return VertexMap(self.result, self.beta, {v: v.base for v in self.result.vertices})

    @cached_property
    def fibers(self) -> dict:
        """βK-vertex -> sorted copies over it."""
        out = {b: [] for b in self.beta.vertices}
        for v in self.result.vertices:
            out[v.base].append(v)
        for b in out:
            out[b].sort(key=lambda v: v.copy)
        return out


def noebeling_step(K: SimplicialComplex, n: int, kappa: int) -> NoebelingStep:
    """Maximal n-dimensional structure on kappa copies of βK making the projection simplicial."""
    _check_params(n, kappa)
    bK = beta(K)
    simplices = []
    for delta in bK.simplices:
        if len(delta) > n + 1:
            continue
        bases = sorted(delta, key=len)
        for pattern in _copy_patterns(len(bases), kappa, n):
            simplices.append(
                frozenset(CopyVertex(b, c) for b, cs in zip(bases, pattern) for c in cs)
            )
    vertices = frozenset(CopyVertex(b, c) for b in bK.vertices for c in range(kappa))
    return NoebelingStep(K, n, kappa, SimplicialComplex(vertices, frozenset(simplices)))


# --- closed-form sizes --------------------------------------------------------


def _stirling2(m, d):
    return sum((-1) ** j * math.comb(d, j) * (d - j) ** m for j in range(d + 1)) // math.factorial(d)


def beta_f_vector(f: tuple) -> tuple:
    """f-vector of βK from that of K; a chain of length d topped by a k-simplex is an
    ordered partition of its k+1 vertices into d blocks."""
    top = len(f)
    out = [0] * top
    for k, count in enumerate(f):
        for d in range(1, k + 2):
            out[d - 1] += count * math.factorial(d) * _stirling2(k + 1, d)
    return tuple(out)


def step_f_vector(f: tuple, n: int, kappa: int) -> tuple:
    """Closed-form f-vector of N^n_kappa(K) from the f-vector of K."""
    bf = beta_f_vector(f)
    out = [0] * (n + 1)
    for d, count in enumerate(bf, start=1):
        if d > n + 1:
            break
        for ms in itertools.product(range(1, n + 2), repeat=d):
            total = sum(ms)
            if total <= n + 1:
                out[total - 1] += count * math.prod(math.comb(kappa, m) for m in ms)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def tower_f_vectors(f0: tuple, n: int, kappa: int, depth: int) -> list:
    fs = [tuple(f0)]
    for _ in range(depth):
        fs.append(step_f_vector(fs[-1], n, kappa))
    return fs


def default_budget() -> int:
    env = os.environ.get("NOEBELING_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


# --- fibers and n-regularity ----------------------------------------------------


def fiber_vertices(assignment: Mapping, delta) -> list:
    delta = frozenset(delta)
    return sorted((v for v, b in assignment.items() if b in delta), key=vertex_label)


def fiber(step: NoebelingStep, delta) -> SimplicialComplex:
    delta = frozenset(delta)
    if delta not in step.beta.simplices:
        raise InvalidSimplex(f"{vertex_label(delta)} is not a simplex of βK")
    vs = [v for b in delta for v in step.fibers[b]]
    return step.result.induced(vs)


class FiberDefect(NamedTuple):
    delta: frozenset
    reason: str
    witness: frozenset | None = None


def fiber_defects(K: SimplicialComplex, L: SimplicialComplex, assignment: Mapping, n: int,
                  min_copies: int | None = None, first_only: bool = False) -> list:
    """Check every fiber of a quasi-simplicial map K -> L over β-simplices of L.

    A fiber must be nonempty, full up to dimension n, and (when ``min_copies`` is
    given) hold exactly ``min_copies`` vertices over each β-vertex.
    """
    bL = beta(L)
    by_base = {b: [] for b in bL.vertices}
    for v, b in assignment.items():
        b = as_beta_vertex(b, L)
        if b not in by_base:
            raise NotQuasiSimplicial(frozenset([v]), f"{vertex_label(v)} maps outside βL")
        by_base[b].append(v)
    defects = []
    if K.dim > n:
        big = next(s for s in K.sorted_simplices() if len(s) > n + 1)
        defects.append(FiberDefect(frozenset(), "dimension exceeds n", big))
        if first_only:
            return defects
    for b, vs in sorted(by_base.items(), key=lambda kv: vertex_label(kv[0])):
        if not vs:
            defects.append(FiberDefect(frozenset([b]), "empty fiber"))
        elif min_copies is not None and len(vs) != min_copies:
            defects.append(FiberDefect(frozenset([b]), f"fiber has {len(vs)} vertices, expected {min_copies}"))
        if defects and first_only:
            return defects
    for delta in bL.sorted_simplices():
        vs = [v for b in delta for v in by_base[b]]
        hole = is_full(K, vs, n)
        if hole is not None:
            defects.append(FiberDefect(delta, "fiber is not full", hole))
            if first_only:
                return defects
    return defects


def is_n_regular(p: VertexMap, n: int) -> bool:
    chk = check_map(p, "quasi")
    if not chk:
        raise NotQuasiSimplicial(chk.counterexample)
    return not fiber_defects(p.domain, p.codomain, p.assignment, n, first_only=True)


# --- towers --------------------------------------------------------------------


@dataclass(eq=False)
class Tower:
    """K_0 <- K_1 <- ... ; ``bonds[i-1]`` sends a vertex of K_i to a simplex of K_{i-1}."""

    seed: SimplicialComplex
    n: int
    kappa: int
    stages: list
    bonds: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    def stage(self, i: int) -> SimplicialComplex:
        if not 0 <= i <= self.depth:
            raise InvalidStage(f"stage {i} outside 0..{self.depth}")
        return self.stages[i]

    def bond(self, i: int) -> VertexMap:
        """p_i : K_i -> K_{i-1}, valued in β(K_{i-1})."""
        if not 1 <= i <= self.depth:
            raise InvalidStage(f"no bond into stage {i}")
        return VertexMap(self.stages[i], self.stages[i - 1], self.bonds[i - 1])

    def fibers(self, i: int) -> dict:
        out = {}
        for v, b in self.bonds[i - 1].items():
            out.setdefault(b, []).append(v)
        for b in out:
            out[b].sort(key=vertex_label)
        return out


def build_tower(K: SimplicialComplex, n: int, kappa: int, depth: int, budget: int | None = None) -> Tower:
    _check_params(n, kappa)
    if depth < 0:
        raise InvalidParameter("depth must be >= 0")
    budget = default_budget() if budget is None else budget
    estimates = tower_f_vectors(K.f_vector, n, kappa, depth)
    for f in estimates[1:]:
        if sum(f) > budget:
            raise BudgetExceeded(sum(f), budget)
    stages, bonds = [K], []
    for _ in range(depth):
        step = noebeling_step(stages[-1], n, kappa)
        stages.append(step.result)
        bonds.append({v: v.base for v in step.result.vertices})
    return Tower(K, n, kappa, stages, bonds)


# --- points at finite stages ------------------------------------------------------


@dataclass(frozen=True)
class FiniteStagePoint:
    stage: int
    coords: tuple  # sorted ((vertex, Fraction), ...), all weights > 0

    @classmethod
    def make(cls, stage: int, weights: Mapping) -> "FiniteStagePoint":
        w = {v: Fraction(x) for v, x in weights.items() if x != 0}
        if any(x < 0 for x in w.values()) or sum(w.values()) != 1:
            raise ValueError("barycentric weights must be nonnegative and sum to 1")
        return cls(stage, tuple(sorted(w.items(), key=lambda kv: vertex_label(kv[0]))))

    @classmethod
    def vertex(cls, stage: int, v) -> "FiniteStagePoint":
        return cls(stage, ((v, Fraction(1)),))

    @property
    def simplex(self) -> frozenset:
        return frozenset(v for v, _ in self.coords)

    @property
    def weights(self) -> dict:
        return dict(self.coords)

    def __str__(self):
        inner = ", ".join(f"{vertex_label(v)}:{w}" for v, w in self.coords)
        return f"<stage {self.stage}: {inner}>"


def push_weights(weights: Mapping, bond: Mapping) -> dict:
    """Affine image under a bond: a vertex goes to the barycenter of its base simplex."""
    out = {}
    for v, w in weights.items():
        base = bond[v]
        share = Fraction(w) / len(base)
        for u in base:
            out[u] = out.get(u, 0) + share
    return out


def project_point(t: Tower, x: FiniteStagePoint, target: int) -> FiniteStagePoint:
    if not 0 <= target <= x.stage <= t.depth:
        raise InvalidStage(f"cannot project stage {x.stage} to {target}")
    w = x.weights
    for k in range(x.stage, target, -1):
        w = push_weights(w, t.bonds[k - 1])
    return FiniteStagePoint.make(target, w)
