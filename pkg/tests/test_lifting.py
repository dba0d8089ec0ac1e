import random
from fractions import Fraction

import pytest

from noebeling.complex import make_complex, vertex_label
from noebeling.construction import noebeling_step
from noebeling.errors import (
    CarrierViolation,
    DimensionTooHigh,
    FiberMismatch,
    InsufficientCopies,
    MultiplicityTooHigh,
    NotCommuting,
)
from noebeling.lifting import (
    CarrierFn,
    LiftProblem,
    Projection,
    SubdivisionLevels,
    canonical_iso,
    carrier_extend,
    check_carrier,
    is_carried,
    is_isomorphism,
    lift_clauses,
    preimage_mesh,
    solve_lift,
    star_mesh,
)

from conftest import edge, simplex2, tower, triangle
from diagrams import random_carrier, random_diagram


@pytest.mark.parametrize("seed", range(25))
def test_random_lifts(seed):
    prob = random_diagram(random.Random(seed))
    lift = solve_lift(prob)
    assert lift_clauses(prob, lift) == {"simplicial": True, "commutes": True, "extends": True, "fresh": True}


def test_insufficient_copies():
    p = Projection.of_step(noebeling_step(edge(), 1, 2))
    A = make_complex("uvw", ["uv", "vw"])
    a = frozenset("a")
    prob = LiftProblem(p, A, make_complex([]), {}, {x: a for x in "uvw"})
    with pytest.raises(InsufficientCopies):
        solve_lift(prob)


def test_lift_rejects_bad_squares():
    p = Projection.of_step(noebeling_step(edge(), 1, 3))
    A = make_complex("uv", ["uv"])
    a, b = frozenset("a"), frozenset("b")
    wrong_copy = p.fibers[b][0]
    with pytest.raises(NotCommuting):
        LiftProblem(p, A, A.induced("u"), {"u": wrong_copy}, {"u": a, "v": a}).validate()
    tri = make_complex("uvw", ["uvw"])
    with pytest.raises(DimensionTooHigh):
        LiftProblem(p, tri, make_complex([]), {}, {x: a for x in "uvw"}).validate()


def relabelled(step, rng):
    """The same projection with every vertex renamed to an opaque shuffled string."""
    vs = sorted(step.result.vertices, key=vertex_label)
    names = [f"u{j:03d}" for j in range(len(vs))]
    rng.shuffle(names)
    ren = dict(zip(vs, names))
    K2 = make_complex(names, [[ren[v] for v in s] for s in step.result.simplices])
    return Projection(K2, step.source, {ren[v]: v.base for v in vs}, step.n)


@pytest.mark.parametrize("seed", range(5))
def test_canonical_iso(seed):
    step = noebeling_step(edge(), 1, 3)
    p1 = Projection.of_step(step)
    p2 = relabelled(step, random.Random(seed))
    h = canonical_iso(p1, p2)
    assert all(p2.assignment[h(v)] == p1.assignment[v] for v in p1.domain.vertices)
    assert is_isomorphism(h)


def test_canonical_iso_mismatch():
    p1 = Projection.of_step(noebeling_step(edge(), 1, 3))
    p2 = Projection.of_step(noebeling_step(edge(), 1, 4))
    with pytest.raises(FiberMismatch):
        canonical_iso(p1, p2)


@pytest.mark.parametrize("seed", range(10))
def test_carrier_extension(seed):
    rng = random.Random(seed)
    t = tower("edge")
    K = t.stage(1)
    W = random_carrier(rng, K)
    check_carrier(W, K, 1)
    assert W.is_one_to_one()
    known = {y: rng.choice(sorted(W.span(frozenset([y])), key=vertex_label))
             for y in W.Y.sorted_vertices() if rng.random() < 0.3}
    g = carrier_extend(W, K, 1, known)
    assert is_carried(g, W)
    assert all(g(y) == v for y, v in known.items())
    metric = SubdivisionLevels(W.Y).metric(0)
    assert preimage_mesh(g, metric) <= star_mesh(W, metric)


def test_carrier_errors():
    K = tower("edge").stage(1)
    Y = make_complex("pq", ["pq"])
    a0, b0 = sorted((v for v in K.vertices if len(v.base) == 1), key=vertex_label)[::3][:2]
    # copies over {a} and {b} are not adjacent
    W = CarrierFn(Y, {0: frozenset("p"), 1: frozenset("q")}, {0: a0, 1: b0})
    with pytest.raises(CarrierViolation):
        check_carrier(W, K, 1)
    ab = next(v for v in K.vertices if len(v.base) == 2)
    W3 = CarrierFn(Y, {0: frozenset("pq"), 1: frozenset("pq"), 2: frozenset("pq")}, {0: a0, 1: ab, 2: ab})
    with pytest.raises(MultiplicityTooHigh):
        check_carrier(W3, K, 1)


def test_subdivision_weights():
    Y = make_complex("pq", ["pq"])
    L = SubdivisionLevels(Y)
    # the level-2 vertex is the barycenter of the level-1 edge from p to the midpoint
    v = frozenset([frozenset("p"), frozenset("pq")])
    assert v in L.level(2).vertices
    assert L.weights(v, 2, 0) == {"p": Fraction(3, 4), "q": Fraction(1, 4)}
    assert L.metric(2).scale == Fraction(1, 4)
