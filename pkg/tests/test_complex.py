import itertools

import pytest
from hypothesis import given, settings, strategies as st

from noebeling.complex import (
    VertexMap,
    barycentric_subdivision,
    beta,
    check_map,
    find_isomorphism,
    full_complex,
    is_chain,
    is_full,
    make_complex,
    nerve,
    open_star,
    path_distance,
    ScaledPathMetric,
    star_cover,
    vertex_label,
)
from noebeling.errors import InvalidGenerator

from conftest import edge, simplex2, triangle


def test_downward_closure():
    K = make_complex("abc", ["abc"])
    assert K.f_vector == (3, 3, 1)
    assert frozenset("ab") in K


def test_unknown_vertex_in_generator():
    with pytest.raises(InvalidGenerator):
        make_complex("ab", ["abz"])


def test_isolated_vertices_kept():
    K = make_complex("abcd", ["ab"])
    assert K.f_vector == (4, 1)
    assert set(K.maximal_faces) == {frozenset("ab"), frozenset("c"), frozenset("d")}


def test_full_complex():
    F = full_complex(range(5), 2)
    assert F.f_vector == (5, 10, 10)
    assert is_full(F, range(5), 2) is None
    assert is_full(F, range(5), 3) == frozenset(range(4))


def test_labels_nest():
    v = frozenset([frozenset("a"), frozenset("ab")])
    assert vertex_label(v) == "{{a,b},{a}}"


def brute_chains(K):
    """Every nonempty set of simplices that is totally ordered by inclusion."""
    sims = list(K.simplices)
    out = set()
    for k in range(1, len(sims) + 1):
        for c in itertools.combinations(sims, k):
            if all(a < b or b < a for a, b in itertools.combinations(c, 2)):
                out.add(frozenset(c))
            # chains in a k-dim complex have at most dim+1 elements
        if k > K.dim + 1:
            break
    return out


@pytest.mark.parametrize("seed", [edge, triangle, simplex2])
def test_beta_is_chain_complex(seed):
    K = seed()
    bK = beta(K)
    assert bK.vertices == K.simplices
    assert set(bK.simplices) == brute_chains(K)


def test_beta_counts():
    assert beta(simplex2()).f_vector == (7, 12, 6)
    assert beta(triangle()).f_vector == (6, 6)


def test_subdivision_base_map():
    sd = barycentric_subdivision(simplex2())
    assert sd.base == simplex2()
    assert all(sd.carrier(s) in sd.base for s in sd.complex.vertices)


def test_check_map_modes():
    K = edge()
    L = make_complex("xy", ["xy"])
    f = VertexMap(K, L, {"a": "x", "b": "y"})
    assert check_map(f)
    P = make_complex("xyz", ["xy", "yz"])
    g = VertexMap(make_complex("ab", ["ab"]), P, {"a": "x", "b": "z"})
    bad = check_map(g)
    assert not bad and bad.counterexample == frozenset("ab")


def test_quasi_mode_uses_chains():
    # x and y are not comparable, {x} < {x,y} is
    L = make_complex("xy", ["xy"])
    K = edge()
    assert not check_map(VertexMap(K, L, {"a": "x", "b": "y"}), "quasi")
    assert check_map(VertexMap(K, L, {"a": "x", "b": frozenset("xy")}), "quasi")


def test_open_star_and_nerve():
    K = triangle()
    stars = star_cover(K)
    N = nerve(stars)
    # stars of a graph meet exactly along edges; no simplex holds all three
    assert N.f_vector == (3, 3)
    st = open_star(K, "a")
    assert st.intersects(open_star(K, "b"))


def test_nerve_of_star_cover_is_isomorphic():
    K = simplex2()
    N = nerve(star_cover(K))
    assert find_isomorphism(K, N) is not None


def test_path_metric():
    K = make_complex(range(5), [(i, i + 1) for i in range(4)])
    m = ScaledPathMetric(K, 1)
    assert path_distance(m, 0, 4) == 4
    assert m.hop_diameter(range(5)) == 4
    assert m.hop_diameter([1, 2, 3]) == 2


@settings(max_examples=40, deadline=None)
@given(st.sets(st.frozensets(st.integers(0, 5), min_size=1, max_size=3), min_size=1, max_size=6))
def test_beta_vertices_and_chain_invariant(gens):
    K = make_complex(range(6), gens)
    bK = beta(K)
    assert bK.vertices == K.simplices
    assert all(is_chain(c) for c in bK.simplices)
    assert bK.dim == K.dim


@settings(max_examples=40, deadline=None)
@given(st.sets(st.frozensets(st.integers(0, 6), min_size=1, max_size=3), min_size=1, max_size=8))
def test_hop_diameter_matches_bfs(gens):
    K = make_complex(range(7), gens)
    m = ScaledPathMetric(K, 1)
    vs = sorted(K.vertices)[:5]
    expected = 0
    for u, w in itertools.combinations(vs, 2):
        d = K.hop_distances(u).get(w)
        expected = float("inf") if d is None else max(expected, d)
    assert m.hop_diameter(vs) == expected
