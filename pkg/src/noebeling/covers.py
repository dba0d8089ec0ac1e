"""Stage covers O_i by pulled-back open stars, their mesh, and refinement certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .complex import ScaledPathMetric, vertex_label
from .construction import FiniteStagePoint, Tower, project_point
from .errors import InvalidStage, PreconditionFailed, RefinementFailure
from .surd import Surd

# sum over i of 2 * 2**(-i/2) = 2 / (1 - 2**(-1/2)) = 4 + 2*sqrt(2)
MESH_SERIES_BOUND = Surd(4, 2)


@dataclass(eq=False)
class StarCover:
    tower: Tower
    stage: int

    def __post_init__(self):
        self.complex = self.tower.stage(self.stage)

    @property
    def elements(self) -> list:
        return self.complex.sorted_vertices()

    @cached_property
    def metric_scale(self) -> Surd:
        return Surd.half_power(self.stage)

    @cached_property
    def metric(self) -> ScaledPathMetric:
        return ScaledPathMetric(self.complex, self.metric_scale)

    def carrier(self, x: FiniteStagePoint) -> frozenset:
        if x.stage < self.stage:
            raise InvalidStage(f"point at stage {x.stage} is coarser than cover stage {self.stage}")
        return project_point(self.tower, x, self.stage).simplex

    def contains(self, v, x: FiniteStagePoint) -> bool:
        return v in self.carrier(x)

    def intersects(self, v, w) -> bool:
        return v == w or w in self.complex.adjacency[v]

    def neighbourhood(self, vs) -> frozenset:
        adj = self.complex.adjacency
        out = set(vs)
        for v in vs:
            out |= adj[v]
        return frozenset(out)


def star_cover(t: Tower, i: int) -> StarCover:
    if not 0 <= i <= t.depth:
        raise InvalidStage(f"stage {i} outside 0..{t.depth}")
    return StarCover(t, i)


def mesh(c: StarCover) -> Surd:
    """Largest closed-star diameter at stage i under the 2**(-i/2) path metric."""
    m = c.metric
    hops = max(m.hop_diameter(m.closed_star_vertices([v])) for v in c.complex.vertices)
    return c.metric_scale * hops


def star_of_point(c: StarCover, x: FiniteStagePoint, k: int = 1) -> frozenset:
    """Centers of the cover elements making up st^k x."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = c.carrier(x)
    for _ in range(k - 1):
        out = c.neighbourhood(out)
    return out


def in_star(c: StarCover, x: FiniteStagePoint, y: FiniteStagePoint, k: int = 1) -> bool:
    """Is y in st^k x?"""
    return bool(star_of_point(c, x, k) & c.carrier(y))


def small_steps_check(points: list, covers: list) -> bool:
    """Given x_{j+1} in st x_j under covers[j], check x_i in st^2 x_k under covers[k] for k <= i."""
    if len(points) != len(covers):
        raise ValueError("need one cover per point")
    for j in range(len(points) - 1):
        if not in_star(covers[j], points[j], points[j + 1]):
            raise PreconditionFailed(j, f"x_{j + 1} is not in the star of x_{j}")
    for k in range(len(points)):
        st2 = star_of_point(covers[k], points[k], 2)
        for i in range(k, len(points)):
            if not st2 & covers[k].carrier(points[i]):
                return False
    return True


@dataclass
class RefinementCertificate:
    stage: int
    pairs: dict = field(default_factory=dict)

    def lines(self) -> list:
        return [
            f"{vertex_label(v)} {vertex_label(w)} -> {vertex_label(z)}"
            for (v, w), z in sorted(self.pairs.items(), key=lambda kv: (vertex_label(kv[0][0]), vertex_label(kv[0][1])))
        ]

    def dump(self) -> str:
        return "".join(line + "\n" for line in self.lines())


def star_witnesses(t: Tower, i: int) -> dict:
    """For each vertex v of K_{i+1}: the vertices z of K_i with ost v inside p^{-1}(ost z).

    The open simplex of sigma projects into the open β-simplex p(sigma), whose
    points have carrier max p(sigma) = union of the bases; so z must lie in that
    union for every sigma containing v.
    """
    fine = t.stage(i + 1)
    bond = t.bonds[i]
    out = {}
    for v, star in fine.cofaces.items():
        common = None
        for sigma in star:
            top = frozenset().union(*(bond[u] for u in sigma))
            common = top if common is None else common & top
            if not common:
                break
        out[v] = common or frozenset()
    return out


def refines_squared(t: Tower, i: int) -> RefinementCertificate:
    """Certificate that O_{i+1} < O_i: every intersecting pair lies in one O_i element."""
    if not 0 <= i < t.depth:
        raise InvalidStage(f"need stages {i} and {i + 1}, tower depth is {t.depth}")
    fine = t.stage(i + 1)
    wit = star_witnesses(t, i)
    cert = RefinementCertificate(i)
    pairs = [(v, v) for v in fine.vertices]
    pairs += [tuple(sorted(e, key=vertex_label)) for e in fine.edges]
    for v, w in pairs:
        zs = wit[v] & wit[w]
        if not zs:
            raise RefinementFailure(f"no witness at stage {i} for {vertex_label(v)}, {vertex_label(w)}")
        cert.pairs[(v, w)] = min(zs, key=vertex_label)
    return cert


def verify_certificate(t: Tower, cert: RefinementCertificate) -> list:
    """Re-check each recorded pair against every simplex of both stars; returns failures."""
    fine = t.stage(cert.stage + 1)
    bond = t.bonds[cert.stage]
    memo = {}

    def escape(v, z):
        # a simplex of st v whose image misses the open star of z, if any
        if (v, z) not in memo:
            memo[v, z] = next((sigma for sigma in fine.cofaces[v]
                               if not any(z in bond[u] for u in sigma)), None)
        return memo[v, z]

    bad = []
    for (v, w), z in cert.pairs.items():
        sigma = escape(v, z) or escape(w, z)
        if sigma is not None:
            bad.append((v, w, z, sigma))
    return bad
