"""Refining lifts and the finite-stage universality loop.

A map Y -> X is carried as a StageMap: a simplicial map from some barycentric
subdivision of Y into a finite stage K_i.  ``refine_map`` pushes a map at stage
i to stage i+1 on one further subdivision of Y, keeping its stage-i shadow
close to the old map while separating points with fresh copies.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .complex import SimplicialComplex, nonempty_subsets, vertex_label
from .construction import Tower, project_point
from .covers import star_cover
from .errors import InsufficientCopies, InvalidParameter, SubdivisionBudgetExceeded
from .lifting import LiftProblem, Projection, StageMap, SubdivisionLevels, solve_lift
from .surd import Surd

log = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 200_000


def _closure(simplices) -> frozenset:
    out = set()
    for s in simplices:
        if s not in out:
            out.update(nonempty_subsets(s))
    return frozenset(out)


def _vertices(simplices) -> frozenset:
    return frozenset(v for s in simplices for v in s)


def closed_star(Y: SimplicialComplex, vs) -> frozenset:
    vs = frozenset(vs)
    return _closure(s for s in Y.simplices if s & vs)


def _search_spread(Ys, fixed, domains, ordered, capacity, constraints, node_limit):
    """Backtracking assignment of β-vertices with per-fiber capacities."""
    assign = dict(fixed)
    load = {}
    nodes = 0
    # simplices to check once their last vertex (in search order) is assigned
    pos = {y: k for k, y in enumerate(ordered)}
    due = {y: [] for y in ordered}
    for sigma in Ys.simplices:
        free = [y for y in sigma if y in pos]
        if free:
            due[max(free, key=pos.get)].append(sigma)

    def rec(k):
        nonlocal nodes
        if k == len(ordered):
            return True
        y = ordered[k]
        natural = domains[y][0]
        cands = sorted(domains[y], key=lambda b: (load.get(b, 0) - capacity(b), b != natural, vertex_label(b)))
        for b in cands:
            nodes += 1
            if nodes > node_limit:
                raise InsufficientCopies(f"spread search gave up after {node_limit} nodes")
            if load.get(b, 0) >= capacity(b):
                continue
            assign[y] = b
            if all(constraints(sigma, assign) for sigma in due[y]):
                load[b] = load.get(b, 0) + 1
                if rec(k + 1):
                    return True
                load[b] -= 1
            del assign[y]
        return False

    if not rec(0):
        return None
    return assign


def _search_order(Ys, start, free):
    """Free vertices component by component, breadth-first from the fixed part,
    so that a dead end is detected inside the component that caused it."""
    adj = Ys.adjacency
    start = frozenset(start)
    order, seen = [], set()
    for root in sorted(free, key=vertex_label):
        if root in seen:
            continue
        comp, stack = [], [root]
        seen.add(root)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in free and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comp_set = set(comp)
        seeds = sorted((y for y in comp if adj[y] & start), key=vertex_label) or [min(comp, key=vertex_label)]
        done = set(seeds)
        frontier = list(seeds)
        order.extend(seeds)
        while frontier:
            nxt = []
            for u in frontier:
                for w in sorted(adj[u], key=vertex_label):
                    if w in comp_set and w not in done:
                        done.add(w)
                        nxt.append(w)
            order.extend(nxt)
            frontier = nxt
    return order


@dataclass
class RefineReport:
    agrees_on_A: bool
    close: bool
    mesh_off_U: object
    mesh_off_A: object
    eps: Fraction
    level: int
    coarse_mesh_off_A: object = None

    @property
    def ok(self) -> bool:
        return self.agrees_on_A and self.close and self.mesh_off_U <= self.eps


def refine_map(t: Tower, f: StageMap, A=None, U=None, eps=Fraction(1), node_limit=DEFAULT_NODE_LIMIT):
    """Lift f from stage i to stage i+1 on the next subdivision of Y.

    ``A`` and ``U`` are sets of simplices of that next subdivision.  Returns
    ``(g, report)``; raises SubdivisionBudgetExceeded when the requested mesh
    cannot be met at this level.
    """
    i, s = f.stage, f.level + 1
    if i + 1 > t.depth:
        raise InvalidParameter(f"tower has no stage {i + 1}")
    Y = f.source
    Ys = Y.level(s)
    A = _closure(A or ())
    U = _closure(U) if U is not None else A
    Ki = t.stage(i)
    proj = Projection.of_tower(t, i + 1)
    B = _vertices(A)

    natural = {y: frozenset(f.weights_at(y, s)) for y in Ys.vertices}
    fixed = {}
    for y in B:
        w = f.weights_at(y, s)
        if len(set(w.values())) != 1:
            raise SubdivisionBudgetExceeded(
                f"f at {vertex_label(y)} is not a barycenter; exact agreement on A needs a finer domain for f"
            )
        fixed[y] = natural[y]
    free = [y for y in Ys.vertices if y not in B]
    domains = {}
    for y in free:
        near = frozenset().union(*(Ki.cofaces[v] for v in natural[y]))
        domains[y] = [natural[y]] + sorted(near - {natural[y]}, key=vertex_label)
    open_car = {sigma: f.open_carrier(sigma, s) for sigma in Ys.simplices}

    def constraints(sigma, assign):
        if not all(y in assign for y in sigma):
            return True
        imgs = {assign[y] for y in sigma}
        ordered = sorted(imgs, key=len)
        if not all(a < b for a, b in zip(ordered, ordered[1:])):
            return False
        return bool(ordered[-1] & open_car[sigma])

    b_count = {}
    for y in B:
        b_count[fixed[y]] = b_count.get(fixed[y], 0) + 1
    order = _search_order(Ys, B, set(free))
    G = None
    for reserve in (None, 1):
        def capacity(b, reserve=reserve):
            used = b_count.get(b, 0)
            return len(proj.fibers.get(b, ())) - (used if reserve is None else min(used, reserve))
        G = _search_spread(Ys, fixed, domains, order, capacity, constraints, node_limit)
        if G is not None:
            break
    if G is None:
        raise InsufficientCopies(f"no spread lift from level {s} into stage {i + 1} with kappa={t.kappa}")

    # copies on A: distinct where the fiber has room, shared otherwise
    off_load = {}
    for y in free:
        off_load[G[y]] = off_load.get(G[y], 0) + 1
    g_fixed, cursor = {}, {}
    for y in sorted(B, key=vertex_label):
        b = G[y]
        room = proj.fibers[b][: max(1, len(proj.fibers[b]) - off_load.get(b, 0))]
        k = cursor.get(b, 0)
        g_fixed[y] = room[k % len(room)]
        cursor[b] = k + 1
    Bc = SimplicialComplex(B, A)
    lift = solve_lift(LiftProblem(proj, Ys, Bc, g_fixed, G))
    g = StageMap(Y, s, i + 1, dict(lift.assignment))
    report = refinement_report(t, f, g, A, U, eps)
    return g, report


def _off_mesh(g: StageMap, region: frozenset, bond=None):
    """Preimage mesh of the stage cover, ignoring open stars inside ``region``.

    With ``bond`` (the bond into the previous stage) the cover measured is the
    coarser one: y lies over z when z is in the base of g(y).
    """
    Ys = g.domain
    metric = g.source.metric(g.level)
    fibres = {}
    for y, v in g.assignment.items():
        if any(sigma not in region for sigma in Ys.cofaces[y]):
            for z in (bond[v] if bond is not None else (v,)):
                fibres.setdefault(z, []).append(y)
    return max((metric.star_union_diameter(ys) for ys in fibres.values()), default=Fraction(0))


def closeness_failures(t: Tower, f: StageMap, g: StageMap) -> list:
    """Open simplices of g's domain where g's stage-f shadow and f share no star."""
    Ys = g.domain
    bad = []
    for sigma in Ys.sorted_simplices():
        img = g.open_carrier(sigma, g.level)
        w = {v: Fraction(1, len(img)) for v in img}
        shadow = project_point(t, _point(g.stage, w), f.stage).simplex
        if not shadow & f.open_carrier(sigma, g.level):
            bad.append(sigma)
    return bad


def _point(stage, weights):
    from .construction import FiniteStagePoint

    return FiniteStagePoint.make(stage, weights)


def refinement_report(t, f, g, A, U, eps) -> RefineReport:
    agrees = all(
        project_point(t, g.point(y), f.stage) == f.point(y, g.level) for y in _vertices(A)
    )
    return RefineReport(
        agrees_on_A=agrees,
        close=not closeness_failures(t, f, g),
        mesh_off_U=_off_mesh(g, U),
        mesh_off_A=_off_mesh(g, A),
        eps=Fraction(eps),
        level=g.level,
        coarse_mesh_off_A=_off_mesh(g, A, t.bonds[g.stage - 1]),
    )


# --- the universality loop ---------------------------------------------------------


def _stage0_witnesses(t: Tower, i: int) -> dict:
    """vertex v of K_i -> stage-0 vertices z with pi_0(ost v) inside ost z."""
    memo = {}

    def down(sigma, j):
        key = (sigma, j)
        if key not in memo:
            if j == 0:
                memo[key] = sigma
            else:
                bond = t.bonds[j - 1]
                memo[key] = down(frozenset().union(*(bond[u] for u in sigma)), j - 1)
        return memo[key]

    Ki = t.stage(i)
    out = {}
    for v, star in Ki.cofaces.items():
        common = None
        for sigma in star:
            c = down(sigma, i)
            common = c if common is None else common & c
        out[v] = common
    return out


@dataclass
class StageDiagnostics:
    stage: int
    level: int
    mesh: object  # g_i^{-1}(O_i) off R_i
    eps: Fraction
    close: bool
    agrees: bool
    r_vertices: int
    coarse_mesh: object = None  # g_i^{-1}(O_{i-1}) off R_i

    def line(self) -> str:
        ok = "ok" if self.close else "FAIL"
        return (f"stage {self.stage}: mesh={self.mesh} mesh_prev={self.coarse_mesh} "
                f"closeness={ok} R_i={self.r_vertices}")


@dataclass
class UniversalityResult:
    maps: list
    diagnostics: list = field(default_factory=list)
    regions: list = field(default_factory=list)

    @property
    def final(self) -> StageMap:
        return self.maps[-1]

    def report(self) -> str:
        return "".join(d.line() + "\n" for d in self.diagnostics)


def bad_region(t: Tower, f: StageMap, prev_region: frozenset, s: int) -> frozenset:
    """Simplices of level s, inside prev_region, whose st^2 under the cover of f's
    stage fits in no stage-0 open star; closed downward."""
    i = f.stage
    wit = _stage0_witnesses(t, i)
    cover = star_cover(t, i)
    bad = []
    for tau in prev_region:
        c = f.open_carrier(tau, s)
        st2 = cover.neighbourhood(c)
        common = None
        for v in st2:
            common = wit[v] if common is None else common & wit[v]
            if not common:
                break
        if not common:
            bad.append(tau)
    return _closure(bad)


def universality_run(t: Tower, f0: StageMap, depth: int, eps_schedule=None,
                     node_limit=DEFAULT_NODE_LIMIT) -> UniversalityResult:
    """Drive f0 (at stage 0) through ``depth`` refining lifts.

    At step i the region R_i where f0 must be kept is where st^2 of f0 under
    the previous stage cover fits in no element of the stage-0 star cover.
    """
    if f0.stage != 0:
        raise InvalidParameter("f0 must land in stage 0")
    if depth > t.depth:
        raise InvalidParameter(f"tower depth {t.depth} < requested {depth}")
    eps_schedule = eps_schedule or (lambda i: Fraction(1, i))
    Y = f0.source
    region = Y.level(f0.level).simplices
    res = UniversalityResult([f0], [], [region])
    f = f0
    for i in range(1, depth + 1):
        s = f.level + 1
        region = bad_region(t, f, Y.subdivide(region, s - 1, s), s)
        Ys = Y.level(s)
        nbhd = closed_star(Ys, _vertices(region))
        g, rep = refine_map(t, f, A=region, U=nbhd, eps=eps_schedule(i), node_limit=node_limit)
        diag = StageDiagnostics(i, s, rep.mesh_off_A, rep.eps, rep.close, rep.agrees_on_A, len(_vertices(region)),
                                rep.coarse_mesh_off_A)
        log.info(diag.line())
        res.maps.append(g)
        res.diagnostics.append(diag)
        res.regions.append(region)
        f = g
    return res


def trajectory(res: UniversalityResult, y):
    """Stage points of a final-level vertex under every map of the run."""
    s = res.final.level
    return [m.point(y, s) for m in res.maps]


def u_close_failures(t: Tower, f0: StageMap, g: StageMap) -> list:
    """Vertices of g's domain where g and f0 share no stage-0 open star."""
    bad = []
    for y in g.domain.sorted_vertices():
        a = project_point(t, g.point(y), 0).simplex
        if not a & f0.point(y, g.level).simplex:
            bad.append(y)
    return bad


# --- embedding certificate --------------------------------------------------------


@dataclass
class EmbeddingCertificate:
    radii: list
    diameters: dict  # target vertex -> [diam for each radius]
    star3: list  # (stage, worst diam, bound)
    resolution: Fraction
    lines: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(all(a >= b for a, b in zip(ds, ds[1:])) for ds in self.diameters.values())

    @property
    def separates(self) -> bool:
        return all(ds[-1] <= self.resolution for ds in self.diameters.values())

    @property
    def star3_ok(self) -> bool:
        return all(worst <= bound for _, worst, bound in self.star3)

    @property
    def passed(self) -> bool:
        return self.monotone and self.separates and self.star3_ok

    @property
    def empirical_constant(self):
        """Smallest c with diam g_i^{-1}(st^3 y) <= c / i at every checked stage."""
        return max((worst * stage for stage, worst, _ in self.star3), default=Fraction(0))


def embedding_certificate(t: Tower, maps, radii) -> EmbeddingCertificate:
    """Preimage diameters of shrinking balls around image vertices of the last map,
    plus the st^3 bound at each stage >= 1 of the supplied maps."""
    maps = list(maps) if isinstance(maps, (list, tuple)) else [maps]
    g = maps[-1]
    radii = sorted((Surd.coerce(r) for r in radii), reverse=True)
    Ki = t.stage(g.stage)
    scale = Surd.half_power(g.stage)
    ymetric = g.source.metric(g.level)
    preim = {}
    for y, v in g.assignment.items():
        preim.setdefault(v, []).append(y)
    # open ball of radius r = vertices fewer than r/scale hops away
    max_hops = []
    for r in radii:
        h = 0
        while scale * (h + 1) < r:
            h += 1
        max_hops.append(h if scale * h < r else -1)
    diameters = {}
    for v in sorted(preim, key=vertex_label):
        dist = Ki.hop_distances(v)
        row = []
        for h_max in max_hops:
            ball = [w for w, h in dist.items() if h <= h_max]
            ys = [y for w in ball for y in preim.get(w, ())]
            row.append(ymetric.diameter(ys) if ys else Fraction(0))
        diameters[v] = row
    star3 = []
    for m in maps:
        if m.stage < 1:
            continue
        Km = t.stage(m.stage)
        met = m.source.metric(m.level)
        pre = {}
        for y, v in m.assignment.items():
            pre.setdefault(v, []).append(y)
        adj = Km.adjacency
        worst = Fraction(0)
        for v in pre:
            ring = {v} | adj[v]
            ring2 = set(ring)
            for u in ring:
                ring2 |= adj[u]
            ys = [y for w in ring2 for y in pre.get(w, ())]
            worst = max(worst, met.star_union_diameter(ys))
        star3.append((m.stage, worst, Fraction(5, m.stage)))
    cert = EmbeddingCertificate(radii, diameters, star3, 2 * ymetric.scale)
    cert.lines = [
        f"radius {r}: max preimage diameter {max((d[k] for d in diameters.values()), default=0)}"
        for k, r in enumerate(radii)
    ] + [f"stage {i}: diam g^-1(st^3 y) <= {w} (bound {b})" for i, w, b in star3]
    return cert
