"""DOT and SVG drawings of tower stages.

DOT is the canonical artifact: one node per vertex, one edge per 1-simplex,
both in label order.  The SVG layout is cosmetic: seed vertices sit on a
circle, and the copies of a stage-i vertex sit on a small circle around the
barycenter of their base in the stage-(i-1) drawing.
"""

import math
from xml.sax.saxutils import escape

from .complex import SimplicialComplex, nonempty_subsets, vertex_label
from .construction import Tower
from .errors import UnsupportedDimension

SEED_RADIUS = 100.0


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(K: SimplicialComplex, name: str = "K") -> str:
    lines = [f"graph {_quote(name)} {{", "  node [shape=point];"]
    for v in sorted(vertex_label(v) for v in K.vertices):
        lines.append(f"  {_quote(v)} [label={_quote(v)}];")
    edges = sorted(tuple(sorted(vertex_label(v) for v in e)) for e in K.edges)
    for a, b in edges:
        lines.append(f"  {_quote(a)} -- {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def degree_sequence(K: SimplicialComplex) -> list:
    return sorted((len(K.adjacency[v]) for v in K.vertices), reverse=True)


# --- layout ----------------------------------------------------------------------


def seed_layout(K: SimplicialComplex) -> dict:
    vs = K.sorted_vertices()
    if len(vs) == 1:
        return {vs[0]: (0.0, 0.0)}
    return {
        v: (SEED_RADIUS * math.cos(math.pi + 2 * math.pi * j / len(vs)),
            SEED_RADIUS * math.sin(math.pi + 2 * math.pi * j / len(vs)))
        for j, v in enumerate(vs)
    }


def _barycenter(pos, simplex):
    pts = [pos[v] for v in simplex]
    return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def next_layout(K: SimplicialComplex, pos: dict, L: SimplicialComplex, bond: dict, kappa: int) -> dict:
    """Positions for stage L given positions for K and the bond L -> βK.

    Copies over a β-vertex σ of K go on a circle around the barycenter of σ whose
    radius is 1/3 of the shortest βK edge at that barycenter.
    """
    centre = {s: _barycenter(pos, s) for s in K.simplices}
    shortest = {}
    for s in K.simplices:
        for t in nonempty_subsets(s):
            if t != s:
                d = _dist(centre[s], centre[t])
                for u in (s, t):
                    shortest[u] = min(shortest.get(u, d), d)
    out = {}
    for v in L.sorted_vertices():
        base = frozenset(bond[v]) if isinstance(bond[v], frozenset) else frozenset([bond[v]])
        cx, cy = centre[base]
        r = shortest.get(base, SEED_RADIUS) / 3
        angle = 2 * math.pi * v.copy / kappa - math.pi / 2
        out[v] = (cx + r * math.cos(angle), cy + r * math.sin(angle))
    return out


def tower_layout(t: Tower, stage: int) -> dict:
    pos = seed_layout(t.stage(0))
    for i in range(1, stage + 1):
        pos = next_layout(t.stage(i - 1), pos, t.stage(i), t.bonds[i - 1], t.kappa)
    return pos


def to_svg(t: Tower, stage: int) -> str:
    if t.n >= 2 or t.stage(stage).dim >= 2:
        raise UnsupportedDimension(f"svg layout needs a graph, tower has n={t.n}")
    K = t.stage(stage)
    pos = tower_layout(t, stage)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    margin = 10.0
    x0, y0 = min(xs) - margin, min(ys) - margin
    w, h = max(xs) - min(xs) + 2 * margin, max(ys) - min(ys) + 2 * margin
    dot_r = max(0.5, 3.0 / (1 + stage))
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0:.3f} {y0:.3f} {w:.3f} {h:.3f}">',
        f'<g stroke="black" stroke-width="{dot_r / 4:.3f}">',
    ]
    for e in sorted(K.edges, key=lambda e: sorted(vertex_label(v) for v in e)):
        a, b = sorted(e, key=vertex_label)
        (xa, ya), (xb, yb) = pos[a], pos[b]
        out.append(f'<line x1="{xa:.3f}" y1="{ya:.3f}" x2="{xb:.3f}" y2="{yb:.3f}"/>')
    out.append("</g>")
    out.append('<g fill="black">')
    for v in sorted(K.vertices, key=vertex_label):
        x, y = pos[v]
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{dot_r:.3f}"><title>{escape(vertex_label(v))}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
