"""Finite abstract simplicial complexes and the combinatorics built on them.

Vertices are arbitrary hashable identifiers.  Simplices are frozensets of
vertices.  The barycentric subdivision uses the simplices of the original
complex as its vertices, so the carrier of a barycenter is the vertex itself.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping, NamedTuple

from .errors import InvalidGenerator, InvalidVertex

Vertex = Hashable
Simplex = frozenset


@lru_cache(maxsize=None)
def vertex_label(v) -> str:
    """Canonical string for a vertex; nested simplices print as ``{a,b}``."""
    if isinstance(v, frozenset):
        return "{" + ",".join(sorted(vertex_label(u) for u in v)) + "}"
    return str(v)


def simplex_key(s: Iterable) -> tuple:
    return (len(s), tuple(sorted(vertex_label(v) for v in s)))


def nonempty_subsets(s):
    items = tuple(s)
    for k in range(1, len(items) + 1):
        for c in itertools.combinations(items, k):
            yield frozenset(c)


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    vertices: frozenset
    simplices: frozenset

    @cached_property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.vertices == other.vertices and self.simplices == other.simplices

    def __hash__(self):
        return hash((self.vertices, self.simplices))

    def __contains__(self, simplex) -> bool:
        return frozenset(simplex) in self.simplices

    def __repr__(self):
        counts = "/".join(str(c) for c in self.f_vector)
        return f"SimplicialComplex(dim={self.dim}, f={counts})"

    @cached_property
    def f_vector(self) -> tuple:
        counts = [0] * (self.dim + 1)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return tuple(counts)

    def is_simplex(self, vs) -> bool:
        return frozenset(vs) in self.simplices

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=vertex_label)

    def sorted_simplices(self) -> list:
        return sorted(self.simplices, key=simplex_key)

    def faces(self, k: int) -> list:
        """Sorted list of k-dimensional simplices."""
        return sorted((s for s in self.simplices if len(s) == k + 1), key=simplex_key)

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(s for s in self.simplices if len(s) == 2)

    @cached_property
    def maximal_faces(self) -> tuple:
        cofaced = set()
        for s in self.simplices:
            if len(s) > 1:
                for v in s:
                    cofaced.add(s - {v})
        return tuple(sorted((s for s in self.simplices if s not in cofaced), key=simplex_key))

    @cached_property
    def adjacency(self) -> Mapping:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = tuple(e)
            adj[u].add(w)
            adj[w].add(u)
        return {v: frozenset(n) for v, n in adj.items()}

    @cached_property
    def cofaces(self) -> Mapping:
        """vertex -> simplices containing it (the combinatorial open star)."""
        star = {v: [] for v in self.vertices}
        for s in self.simplices:
            for v in s:
                star[v].append(s)
        return {v: frozenset(ss) for v, ss in star.items()}

    def hop_distances(self, source, limit: int | None = None) -> dict:
        """Hop counts from ``source``; with ``limit``, only vertices that close."""
        return _bfs(self, source, limit)

    def induced(self, vs) -> "SimplicialComplex":
        vs = frozenset(vs)
        return SimplicialComplex(vs, frozenset(s for s in self.simplices if s <= vs))

    def subcomplex(self, simplices) -> "SimplicialComplex":
        """Downward closure of ``simplices`` inside this complex."""
        closed = set()
        for s in simplices:
            s = frozenset(s)
            if s not in self.simplices:
                raise InvalidGenerator(f"{vertex_label(s)} is not a simplex")
            if s not in closed:
                closed.update(nonempty_subsets(s))
        return SimplicialComplex(frozenset(v for s in closed for v in s), frozenset(closed))

    def skeleton(self, k: int) -> "SimplicialComplex":
        return SimplicialComplex(self.vertices, frozenset(s for s in self.simplices if len(s) <= k + 1))


def _bfs(K: SimplicialComplex, source, limit=None) -> dict:
    dist = {source: 0}
    queue = deque([source])
    adj = K.adjacency
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def make_complex(vertices: Iterable, generators: Iterable[Iterable] = ()) -> SimplicialComplex:
    """Downward closure of ``generators`` plus every singleton of ``vertices``."""
    vertices = frozenset(vertices)
    simplices = {frozenset([v]) for v in vertices}
    for g in generators:
        g = frozenset(g)
        if not g:
            continue
        unknown = g - vertices
        if unknown:
            raise InvalidGenerator(f"generator references unknown vertices {sorted(map(vertex_label, unknown))}")
        if g not in simplices:
            simplices.update(nonempty_subsets(g))
    return SimplicialComplex(vertices, frozenset(simplices))


def full_complex(vertices: Iterable, n: int) -> SimplicialComplex:
    """The full n-simplex on ``vertices``: every subset of size <= n+1."""
    vs = tuple(vertices)
    simplices = frozenset(
        frozenset(c) for k in range(1, min(n + 1, len(vs)) + 1) for c in itertools.combinations(vs, k)
    )
    return SimplicialComplex(frozenset(vs), simplices)


def is_full(K: SimplicialComplex, vs: Iterable, n: int):
    """Return the first subset of ``vs`` of size <= n+1 that is not a simplex, or None."""
    vs = sorted(vs, key=vertex_label)
    for k in range(1, min(n + 1, len(vs)) + 1):
        for c in itertools.combinations(vs, k):
            if frozenset(c) not in K.simplices:
                return frozenset(c)
    return None


# --- barycentric subdivision ------------------------------------------------


def _chains(K: SimplicialComplex) -> set:
    memo = {}

    def down(s):
        # all strict chains whose maximal element is s
        if s in memo:
            return memo[s]
        out = [(s,)]
        if len(s) > 1:
            for k in range(1, len(s)):
                for c in itertools.combinations(tuple(s), k):
                    for tail in down(frozenset(c)):
                        out.append((s,) + tail)
        memo[s] = out
        return out

    return {frozenset(c) for s in K.simplices for c in down(s)}


class Subdivision(NamedTuple):
    complex: SimplicialComplex
    base: SimplicialComplex

    def carrier(self, v) -> frozenset:
        return v


def barycentric_subdivision(K: SimplicialComplex) -> Subdivision:
    """βK: vertices are the simplices of K, simplices are strict inclusion chains."""
    return Subdivision(SimplicialComplex(K.simplices, frozenset(_chains(K))), K)


def beta(K: SimplicialComplex) -> SimplicialComplex:
    return _beta_cached(K)


@lru_cache(maxsize=64)
def _beta_cached(K):
    return barycentric_subdivision(K).complex


def chain_min(delta) -> frozenset:
    return min(delta, key=len)


def chain_max(delta) -> frozenset:
    return max(delta, key=len)


def is_chain(simplices) -> bool:
    ordered = sorted(simplices, key=len)
    return all(a < b for a, b in zip(ordered, ordered[1:]))


# --- vertex maps --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VertexMap:
    """A total function on vertices.

    In ``quasi`` mode the values are vertices of β(codomain), i.e. simplices
    of the codomain; a bare codomain vertex ``v`` is read as ``{v}``.
    """

    domain: SimplicialComplex
    codomain: SimplicialComplex
    assignment: Mapping = field(default_factory=dict)

    def __call__(self, v):
        return self.assignment[v]

    def image(self, simplex) -> frozenset:
        return frozenset(self.assignment[v] for v in simplex)


class MapCheck(NamedTuple):
    ok: bool
    counterexample: frozenset | None = None

    def __bool__(self):
        return self.ok


def as_beta_vertex(value, K: SimplicialComplex) -> frozenset:
    if isinstance(value, frozenset) and value in K.simplices:
        return value
    if value in K.vertices:
        return frozenset([value])
    raise InvalidVertex(f"{vertex_label(value)} is neither a vertex nor a simplex of the codomain")


def check_map(f: VertexMap, mode: str = "simplicial") -> MapCheck:
    """Check simpliciality of ``f`` over every domain simplex."""
    missing = f.domain.vertices - set(f.assignment)
    if missing:
        v = min(missing, key=vertex_label)
        return MapCheck(False, frozenset([v]))
    if mode == "simplicial":
        for s in f.domain.sorted_simplices():
            if f.image(s) not in f.codomain.simplices:
                return MapCheck(False, s)
        return MapCheck(True)
    if mode in ("quasi", "quasi_simplicial"):
        cod = f.codomain
        for s in f.domain.sorted_simplices():
            try:
                img = {as_beta_vertex(f.assignment[v], cod) for v in s}
            except InvalidVertex:
                return MapCheck(False, s)
            if not is_chain(img):
                return MapCheck(False, s)
        return MapCheck(True)
    raise ValueError(f"unknown mode {mode!r}")


def beta_representation(f: VertexMap) -> VertexMap:
    """The same quasi-simplicial map, viewed as a plain map into β(codomain)."""
    cod = f.codomain
    return VertexMap(f.domain, beta(cod), {v: as_beta_vertex(w, cod) for v, w in f.assignment.items()})


def compose(g: VertexMap, f: VertexMap) -> VertexMap:
    """g after f."""
    return VertexMap(f.domain, g.codomain, {v: g.assignment[w] for v, w in f.assignment.items()})


# --- open stars and nerves ----------------------------------------------------


@dataclass(frozen=True)
class StarSet:
    """Open star of a set of vertices, decided through carriers only."""

    complex: SimplicialComplex
    centers: frozenset

    @cached_property
    def simplices(self) -> frozenset:
        return frozenset(s for s in self.complex.simplices if s & self.centers)

    def contains_simplex_interior(self, sigma) -> bool:
        return bool(frozenset(sigma) & self.centers)

    def intersects(self, other: "StarSet") -> bool:
        if self.centers & other.centers:
            return True
        adj = self.complex.adjacency
        return any(adj[u] & other.centers for u in self.centers)

    def contains_closed_simplex(self, delta) -> bool:
        """``delta`` is a simplex of βK, given as a chain of K-simplices."""
        return bool(chain_min(delta) & self.centers)

    def meets_closed_simplex(self, delta) -> bool:
        return bool(chain_max(delta) & self.centers)


def open_star(K: SimplicialComplex, v) -> StarSet:
    if v not in K.vertices:
        raise InvalidVertex(f"{vertex_label(v)} is not a vertex")
    return StarSet(K, frozenset([v]))


def open_star_of_subcomplex(K: SimplicialComplex, L: SimplicialComplex) -> StarSet:
    if not L.vertices <= K.vertices:
        raise InvalidVertex("subcomplex has vertices outside the complex")
    return StarSet(K, frozenset(L.vertices))


def nerve(family: Mapping) -> SimplicialComplex:
    """Nerve of an indexed family of sets (or StarSets)."""
    members = {}
    for idx, s in family.items():
        elems = s.simplices if isinstance(s, StarSet) else s
        for x in elems:
            members.setdefault(x, set()).add(idx)
    simplices = {frozenset([i]) for i in family}
    for idxs in {frozenset(m) for m in members.values()}:
        if idxs not in simplices:
            simplices.update(nonempty_subsets(idxs))
    return SimplicialComplex(frozenset(family), frozenset(simplices))


def star_cover(K: SimplicialComplex) -> dict:
    return {v: open_star(K, v) for v in K.vertices}


def find_isomorphism(K: SimplicialComplex, L: SimplicialComplex):
    """Simplicial isomorphism K -> L by backtracking, or None.  Small inputs only."""
    if K.f_vector != L.f_vector:
        return None
    kv = sorted(K.vertices, key=lambda v: (-len(K.cofaces[v]), vertex_label(v)))
    sig = lambda M, v: sorted(len(s) for s in M.cofaces[v])
    lsig = {w: sig(L, w) for w in L.vertices}
    assign, used = {}, set()

    def ok(v, w):
        for s in K.cofaces[v]:
            if all(u in assign or u == v for u in s):
                img = frozenset(w if u == v else assign[u] for u in s)
                if img not in L.simplices:
                    return False
        return True

    def rec(i):
        if i == len(kv):
            return True
        v = kv[i]
        sv = sig(K, v)
        for w in sorted(L.vertices - used, key=vertex_label):
            if lsig[w] == sv and ok(v, w):
                assign[v] = w
                used.add(w)
                if rec(i + 1):
                    return True
                del assign[v]
                used.discard(w)
        return False

    return dict(assign) if rec(0) else None


# --- path metric --------------------------------------------------------------


class ScaledPathMetric:
    """1-skeleton path metric with every edge of length ``scale``."""

    def __init__(self, complex: SimplicialComplex, scale=1):
        self.complex = complex
        self.scale = scale
        self._cache = {}

    # most queries are local, so try a short BFS before the full one
    LOCAL_RADIUS = 8

    def hops(self, u, w):
        if u not in self._cache:
            self._cache[u] = (self.complex.hop_distances(u, self.LOCAL_RADIUS), True)
        dist, truncated = self._cache[u]
        if w not in dist and truncated:
            dist = self.complex.hop_distances(u)
            self._cache[u] = (dist, False)
        return dist.get(w)

    def distance(self, u, w):
        for x in (u, w):
            if x not in self.complex.vertices:
                raise InvalidVertex(f"{vertex_label(x)} is not a vertex")
        h = self.hops(u, w)
        return math.inf if h is None else self.scale * h

    def hop_diameter(self, vs) -> int | float:
        vs = set(vs)
        adj = self.complex.adjacency
        best = 1 if len(vs) > 1 else 0
        for u in vs:
            for w in vs - adj[u] - {u}:
                # distance 2 is decided by a common neighbour, otherwise search
                if adj[u].isdisjoint(adj[w]):
                    h = self.hops(u, w)
                    if h is None:
                        return math.inf
                    best = max(best, h)
                else:
                    best = max(best, 2)
        return best

    def diameter(self, vs):
        h = self.hop_diameter(vs)
        return math.inf if h == math.inf else self.scale * h

    def closed_star_vertices(self, vs) -> frozenset:
        adj = self.complex.adjacency
        out = set(vs)
        for v in vs:
            out |= adj[v]
        return frozenset(out)

    def star_union_diameter(self, vs):
        """Diameter of the union of closed stars of ``vs`` (the convention for open sets)."""
        if not vs:
            return 0 * self.scale
        return self.diameter(self.closed_star_vertices(vs))


def path_distance(m: ScaledPathMetric, u, w):
    return m.distance(u, w)
