"""JSON interchange for complexes, towers and maps.

Complexes are stored by their maximal faces; the downward closure is
recomputed on load.  Vertices are stored as their canonical labels, which
the parser below turns back into nested frozensets and copy vertices.
"""

import hashlib
import json
import os
from dataclasses import dataclass

from .complex import SimplicialComplex, VertexMap, make_complex, vertex_label
from .construction import CopyVertex, Tower
from .errors import DigestMismatch, InvalidVertex

FORMAT = "noebeling-tower/1"


# --- labels ----------------------------------------------------------------------


def parse_label(text: str):
    """Inverse of vertex_label for seed atoms, nested simplices and ``base#k`` copies."""
    value, pos = _parse(text, 0)
    if pos != len(text):
        raise InvalidVertex(f"trailing characters in label {text!r}")
    return value


def _parse(text, pos):
    if pos < len(text) and text[pos] == "{":
        items = []
        pos += 1
        while True:
            item, pos = _parse(text, pos)
            items.append(item)
            if pos >= len(text):
                raise InvalidVertex(f"unclosed brace in {text!r}")
            if text[pos] == "}":
                pos += 1
                break
            if text[pos] != ",":
                raise InvalidVertex(f"unexpected {text[pos]!r} in {text!r}")
            pos += 1
        value = frozenset(items)
    else:
        start = pos
        while pos < len(text) and text[pos] not in "{},#":
            pos += 1
        if pos == start:
            raise InvalidVertex(f"empty atom in {text!r}")
        value = text[start:pos]
    while pos < len(text) and text[pos] == "#":
        start = pos = pos + 1
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise InvalidVertex(f"missing copy index in {text!r}")
        if not isinstance(value, frozenset):
            raise InvalidVertex(f"copy of a non-simplex in {text!r}")
        value = CopyVertex(value, int(text[start:pos]))
    return value, pos


# --- complexes -------------------------------------------------------------------


def complex_to_dict(K: SimplicialComplex) -> dict:
    return {
        "vertices": [vertex_label(v) for v in K.sorted_vertices()],
        "maximal_faces": sorted(
            (sorted(vertex_label(v) for v in s) for s in K.maximal_faces),
            key=lambda f: (len(f), f),
        ),
    }


def complex_from_dict(d: dict) -> SimplicialComplex:
    faces = d.get("maximal_faces", d.get("simplices", []))
    vertices = {str(v) for v in d.get("vertices", [])}
    vertices.update(str(v) for f in faces for v in f)
    lookup = {v: parse_label(v) for v in vertices}
    return make_complex(lookup.values(), [[lookup[str(v)] for v in f] for f in faces])


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def write_json(path, obj) -> str:
    text = dumps(obj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return sha256_text(text)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_complex(path, K: SimplicialComplex) -> str:
    return write_json(path, complex_to_dict(K))


def read_complex(path) -> SimplicialComplex:
    return complex_from_dict(read_json(path))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# --- maps ------------------------------------------------------------------------


def _value_to_json(w):
    if isinstance(w, frozenset) and not isinstance(w, CopyVertex):
        return sorted(vertex_label(u) for u in w)
    return vertex_label(w)


def _value_from_json(w):
    if isinstance(w, list):
        return frozenset(parse_label(u) for u in w)
    return parse_label(w)


def assignment_to_list(assignment) -> list:
    """Sorted ``[vertex, value]`` pairs; simplex values become label lists."""
    rows = [[vertex_label(v), _value_to_json(w)] for v, w in assignment.items()]
    return sorted(rows, key=lambda r: r[0])


def assignment_from_list(rows) -> dict:
    return {parse_label(v): _value_from_json(w) for v, w in rows}


def map_to_dict(f: VertexMap) -> dict:
    return {"assignment": assignment_to_list(f.assignment)}


# --- towers ----------------------------------------------------------------------


@dataclass
class Manifest:
    path: str
    data: dict

    @property
    def root(self) -> str:
        return os.path.dirname(os.path.abspath(self.path))

    def file(self, name: str) -> str:
        return os.path.join(self.root, name)


def write_tower(t: Tower, out_dir, seed_name: str = "seed") -> str:
    """Write stage and bond files plus manifest.json; returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    stages = []
    for i, K in enumerate(t.stages):
        name = f"stage_{i}.json"
        digest = write_complex(os.path.join(out_dir, name), K)
        stages.append({
            "index": i,
            "file": name,
            "sha256": digest,
            "f_vector": list(K.f_vector),
            "vertices": len(K.vertices),
            "edges": len(K.edges),
        })
    bonds = []
    for i in range(1, t.depth + 1):
        name = f"bond_{i}.json"
        digest = write_json(os.path.join(out_dir, name), {
            "source_stage": i,
            "target_stage": i - 1,
            "assignment": assignment_to_list(t.bonds[i - 1]),
        })
        bonds.append({"index": i, "file": name, "sha256": digest})
    manifest = {
        "format": FORMAT,
        "seed": seed_name,
        "n": t.n,
        "kappa": t.kappa,
        "depth": t.depth,
        "stages": stages,
        "bonds": bonds,
    }
    path = os.path.join(out_dir, "manifest.json")
    write_json(path, manifest)
    return path


def load_manifest(path) -> Manifest:
    return Manifest(path, read_json(path))


def check_digests(m: Manifest) -> None:
    for entry in m.data["stages"] + m.data["bonds"]:
        actual = sha256_file(m.file(entry["file"]))
        if actual != entry["sha256"]:
            raise DigestMismatch(f"{entry['file']}: expected {entry['sha256']}, found {actual}")


def refresh_digests(path) -> None:
    """Recompute the manifest digests and counts after editing stage or bond files."""
    m = load_manifest(path)
    for entry in m.data["stages"]:
        K = read_complex(m.file(entry["file"]))
        entry.update(sha256=sha256_file(m.file(entry["file"])), f_vector=list(K.f_vector),
                     vertices=len(K.vertices), edges=len(K.edges))
    for entry in m.data["bonds"]:
        entry["sha256"] = sha256_file(m.file(entry["file"]))
    write_json(path, m.data)


def read_tower(path, verify_digests: bool = True, max_stage: int | None = None) -> Tower:
    m = load_manifest(path)
    if verify_digests:
        check_digests(m)
    entries = m.data["stages"]
    if max_stage is not None:
        entries = entries[: max_stage + 1]
    stages = [read_complex(m.file(e["file"])) for e in entries]
    bonds = [
        assignment_from_list(read_json(m.file(e["file"]))["assignment"])
        for e in m.data["bonds"][: len(stages) - 1]
    ]
    return Tower(stages[0], m.data["n"], m.data["kappa"], stages, bonds)


def read_stage(path, i: int) -> SimplicialComplex:
    m = load_manifest(path)
    check_digests(m)
    return read_complex(m.file(m.data["stages"][i]["file"]))

