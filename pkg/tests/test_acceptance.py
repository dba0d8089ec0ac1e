"""Acceptance criteria, one line each.

Run under pytest (lines are printed in the terminal summary) or directly:
    python3 tests/test_acceptance.py
"""

import os
import random
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from noebeling.complex import make_complex, vertex_label  # noqa: E402
from noebeling.construction import build_tower, fiber_defects, noebeling_step, tower_f_vectors  # noqa: E402
from noebeling.covers import mesh, refines_squared, small_steps_check, star_cover, verify_certificate  # noqa: E402
from noebeling.emit import degree_sequence, to_dot  # noqa: E402
from noebeling.errors import InsufficientCopies, RefinementFailure  # noqa: E402
from noebeling.lifting import (  # noqa: E402
    LiftProblem,
    Projection,
    StageMap,
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
from noebeling.surd import Surd  # noqa: E402
from noebeling.universality import (  # noqa: E402
    embedding_certificate,
    trajectory,
    u_close_failures,
    universality_run,
)

from conftest import SEEDS, edge, tower  # noqa: E402
from diagrams import random_carrier, random_diagram  # noqa: E402
from test_construction import brute_step  # noqa: E402

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
RESULTS = []


def record(number, title, ok, detail, seconds):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail} ({seconds:.1f}s)"
    RESULTS.append(line)
    print(line)
    return ok


def c1_fiber_fullness():
    cases = [("edge", 3), ("edge", 4), ("triangle", 3), ("triangle", 4), ("simplex2", 3), ("simplex2", 4)]
    checked, bad = 0, []
    for name, kappa in cases:
        t = tower(name, kappa=kappa, depth=2)
        for i in (1, 2):
            defects = fiber_defects(t.stage(i), t.stage(i - 1), t.bonds[i - 1], t.n, min_copies=kappa)
            checked += 1
            if defects:
                bad.append(f"{name} κ={kappa} stage {i}: {defects[0].reason}")
    return not bad, f"{checked} stage maps checked" + ("; " + "; ".join(bad) if bad else ", all fibers full, vertex fibers = κ")


def c2_uniqueness():
    step = noebeling_step(edge(), 1, 3)
    p1 = Projection.of_step(step)
    rng = random.Random(2)
    failures = 0
    for _ in range(20):
        ren = {}
        for b, vs in p1.fibers.items():
            perm = list(range(len(vs)))
            rng.shuffle(perm)
            for v, k in zip(vs, perm):
                ren[v] = f"{vertex_label(b)}~{k}"
        K2 = make_complex(ren.values(), [[ren[v] for v in s] for s in step.result.simplices])
        p2 = Projection(K2, step.source, {ren[v]: v.base for v in step.result.vertices}, 1)
        h = canonical_iso(p1, p2)
        commutes = all(p2.assignment[h(v)] == p1.assignment[v] for v in p1.domain.vertices)
        if not (commutes and is_isomorphism(h)):
            failures += 1
    return failures == 0, f"20 relabelings, {failures} failures"


def c3_counts():
    closed = tower_f_vectors((2, 1), 1, 3, 2)
    K1 = brute_step(edge(), 1, 3)
    K2 = brute_step(K1, 1, 3)
    built = [K.f_vector for K in tower("edge").stages]
    want = [(9, 27), (108, 594)]
    got = [closed[1], closed[2]]
    ok = got == want and [K1.f_vector, K2.f_vector] == want and built[1:] == want
    return ok, f"closed form {got}, enumeration {[K1.f_vector, K2.f_vector]}, built {built[1:]}"


def c4_refinement():
    total, problems = 0, []
    for name in SEEDS:
        t = tower(name)
        for i in (0, 1):
            try:
                cert = refines_squared(t, i)
            except RefinementFailure as exc:
                problems.append(f"{name} i={i}: {exc}")
                continue
            fine = t.stage(i + 1)
            if len(cert.pairs) != len(fine.vertices) + len(fine.edges) or verify_certificate(t, cert):
                problems.append(f"{name} i={i}: incomplete or invalid")
            total += len(cert.pairs)
    return not problems, f"{total} certified pairs" + ("; " + "; ".join(problems) if problems else ", zero RefinementFailure")


def c5_mesh():
    rows, ok = [], True
    for name, depth in [("edge", 2), ("triangle", 3), ("simplex2", 2)]:
        t = tower(name, depth=depth)
        ms = [mesh(star_cover(t, i)) for i in range(depth + 1)]
        ok &= all(m <= 2 * Surd.half_power(i) for i, m in enumerate(ms))
        rows.append(f"{name} " + ",".join(map(str, ms)))
    return ok, "; ".join(rows)


def c6_lifting():
    bad = 0
    for seed in range(100):
        prob = random_diagram(random.Random(1000 + seed), kappa=12)
        clauses = lift_clauses(prob, solve_lift(prob))
        bad += not all(clauses.values())
    p = Projection.of_step(noebeling_step(edge(), 1, 2))
    A = make_complex("uvw", ["uv", "vw"])
    prob = LiftProblem(p, A, make_complex([]), {}, {x: frozenset("a") for x in "uvw"})
    try:
        solve_lift(prob)
        raised = False
    except InsufficientCopies:
        raised = True
    return bad == 0 and raised, f"100 diagrams, {bad} clause failures; κ=2 InsufficientCopies raised: {raised}"


def c7_carrier():
    bad = 0
    K = tower("edge").stage(1)
    for seed in range(20):
        rng = random.Random(500 + seed)
        W = random_carrier(rng, K)
        check_carrier(W, K, 1)
        known = {y: rng.choice(sorted(W.span(frozenset([y])), key=vertex_label))
                 for y in W.Y.sorted_vertices() if rng.random() < 0.3}
        g = carrier_extend(W, K, 1, known)
        metric = SubdivisionLevels(W.Y).metric(0)
        if not (is_carried(g, W) and preimage_mesh(g, metric) <= star_mesh(W, metric)):
            bad += 1
    return bad == 0, f"20 instances, {bad} failures"


def c8_universality():
    t = tower("triangle", depth=3)
    ys = [f"y{k:02d}" for k in range(12)]
    Y = make_complex(ys, [(ys[k], ys[(k + 1) % 12]) for k in range(12)])
    levels = SubdivisionLevels(Y, 1)
    f0 = StageMap(levels, 0, 0, {ys[k]: "abc"[k // 4] for k in range(12)})
    res = universality_run(t, f0, 3)
    parts = {}
    coarse, fine = [], []
    for d in res.diagnostics:
        if d.r_vertices < len(levels.level(d.level).vertices):
            coarse.append(f"i={d.stage}: {d.coarse_mesh} vs {d.eps}")
            fine.append(d.mesh <= d.eps)
            parts.setdefault("mesh g^-1(O_{i-1}) off R_i", True)
            parts["mesh g^-1(O_{i-1}) off R_i"] &= d.coarse_mesh <= d.eps
    extra = f"O_(i-1) mesh {'; '.join(coarse)}; O_i mesh within bound: {all(fine)}"
    parts["closeness"] = all(d.close and d.agrees for d in res.diagnostics) and not u_close_failures(t, f0, res.final)
    g = res.final
    parts["injective"] = len(set(g.assignment.values())) == len(g.assignment)
    covers = [star_cover(t, i) for i in range(4)]
    parts["small steps"] = all(small_steps_check(trajectory(res, y), covers) for y in g.domain.vertices)
    cert = embedding_certificate(t, res.maps, [Surd.half_power(i) for i in range(4)])
    parts["balls shrink"] = cert.monotone and cert.separates
    parts["st^3 <= 5/i"] = cert.star3_ok
    detail = ", ".join(f"{k} {'ok' if v else 'FAIL'}" for k, v in parts.items())
    worst = "; ".join(f"i={i}: {w} vs {b}" for i, w, b in cert.star3)
    return all(parts.values()), f"{detail} [{extra}] [st^3 {worst}; empirical c={cert.empirical_constant}]"


def c9_figure():
    t = tower("edge")
    ok, notes = True, []
    for i in range(3):
        with open(os.path.join(GOLDEN, f"edge_stage_{i}.dot"), encoding="utf-8") as fh:
            same = fh.read() == to_dot(t.stage(i), f"stage_{i}")
        ok &= same
        notes.append(f"stage {i} {'identical' if same else 'DIFFERS'}")
    K1 = brute_step(edge(), 1, 3)
    K2 = brute_step(K1, 1, 3)
    deg_ok = degree_sequence(t.stage(1)) == degree_sequence(K1) and degree_sequence(t.stage(2)) == degree_sequence(K2)
    notes.append(f"degree sequences {'match' if deg_ok else 'DIFFER'}")
    return ok and deg_ok, ", ".join(notes)


CRITERIA = [
    (1, "fiber fullness", c1_fiber_fullness, 60),
    (2, "uniqueness up to fiberwise isomorphism", c2_uniqueness, None),
    (3, "edge tower counts", c3_counts, None),
    (4, "refinement certificates", c4_refinement, None),
    (5, "mesh decay", c5_mesh, None),
    (6, "lifting", c6_lifting, None),
    (7, "carrier extension", c7_carrier, None),
    (8, "universality at desk scale", c8_universality, 300),
    (9, "figure reproduction", c9_figure, None),
]


def run(number):
    _, title, fn, limit = CRITERIA[number - 1]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        ok, detail = False, f"{detail}; runtime {elapsed:.1f}s over {limit}s"
    return record(number, title, ok, detail, elapsed)


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number):
    assert run(number), RESULTS[-1]


if __name__ == "__main__":
    results = [run(c[0]) for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
