"""Command-line driver: build, verify, draw and probe towers."""

import argparse
import logging
import os
import random
import sys
from dataclasses import dataclass

from . import io
from .complex import SimplicialComplex, check_map, vertex_label
from .construction import build_tower, default_budget, fiber_defects
from .covers import mesh, refines_squared, small_steps_check, star_cover, verify_certificate
from .emit import to_dot, to_svg
from .errors import BudgetExceeded, DigestMismatch, InvalidParameter, NoebelingError, RefinementFailure
from .lifting import StageMap, SubdivisionLevels
from .surd import Surd
from .universality import embedding_certificate, trajectory, u_close_failures, universality_run

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    seed_complex: str
    n: int = 1
    kappa: int = 3
    depth: int = 1
    budget: int = 0
    rng_seed: int = 0
    output_dir: str = "tower"

    def __post_init__(self):
        if self.budget <= 0:
            self.budget = default_budget()
        if self.n < 1:
            raise InvalidParameter("n must be >= 1")
        if self.kappa < 2:
            raise InvalidParameter("kappa must be >= 2")
        if self.depth < 0:
            raise InvalidParameter("depth must be >= 0")


# --- tower -----------------------------------------------------------------------


def cmd_tower(cfg: RunConfig) -> str:
    """Build and write a tower; returns the manifest path."""
    seed = io.read_complex(cfg.seed_complex)
    t = build_tower(seed, cfg.n, cfg.kappa, cfg.depth, cfg.budget)
    name = os.path.splitext(os.path.basename(cfg.seed_complex))[0]
    return io.write_tower(t, cfg.output_dir, name)


# --- verify ----------------------------------------------------------------------


@dataclass
class Check:
    stage: int
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        tail = f"  {self.detail}" if self.detail else ""
        return f"stage {self.stage}: {self.name:<16} {status}{tail}"


def verify_tower(manifest_path) -> list:
    """Fiber lemma, bond quasi-simpliciality, refinement and mesh for every stage."""
    t = io.read_tower(manifest_path)
    checks = []
    for i, K in enumerate(t.stages):
        if i >= 1:
            checks.extend(_verify_bond(t, i))
        if i < t.depth:
            checks.append(_verify_refinement(t, i))
        m = mesh(star_cover(t, i))
        bound = 2 * Surd.half_power(i)
        checks.append(Check(i, "mesh", m <= bound, f"mesh={m} bound={bound}"))
    return checks


def _verify_bond(t, i) -> list:
    out = []
    K, L = t.stage(i), t.stage(i - 1)
    dim_ok = K.dim <= t.n
    out.append(Check(i, "dimension", dim_ok, f"dim={K.dim} n={t.n}"))
    chk = check_map(t.bond(i), "quasi")
    detail = "" if chk else f"NotQuasiSimplicial at {vertex_label(chk.counterexample)}"
    out.append(Check(i, "quasi-simplicial", bool(chk), detail))
    try:
        defects = fiber_defects(K, L, t.bonds[i - 1], t.n, min_copies=t.kappa)
    except NoebelingError as exc:
        out.append(Check(i, "fibers", False, str(exc)))
        return out
    detail = ""
    if defects:
        d = defects[0]
        witness = f" missing {vertex_label(d.witness)}" if d.witness else ""
        detail = f"{len(defects)} defect(s); first over {vertex_label(d.delta)}: {d.reason}{witness}"
    out.append(Check(i, "fibers", not defects, detail))
    return out


def _verify_refinement(t, i) -> Check:
    try:
        cert = refines_squared(t, i)
    except RefinementFailure as exc:
        return Check(i, "refinement", False, str(exc))
    bad = verify_certificate(t, cert)
    detail = f"{len(cert.pairs)} pairs" if not bad else f"{len(bad)} bad pairs"
    return Check(i, "refinement", not bad, detail)


# --- universality ----------------------------------------------------------------


def random_simplicial_map(Y: SimplicialComplex, K: SimplicialComplex, rng: random.Random) -> dict:
    """Greedy random simplicial map Y -> K, falling back to a constant map."""
    order = Y.sorted_vertices()
    targets = K.sorted_vertices()
    for _ in range(20):
        rng.shuffle(order)
        f = {}
        for y in order:
            options = [
                v for v in targets
                if all(frozenset(f[u] for u in s if u in f) | {v} in K.simplices
                       for s in Y.cofaces[y])
            ]
            if not options:
                break
            f[y] = rng.choice(options)
        else:
            return f
    return {y: targets[0] for y in Y.vertices}


def read_space(path, seed: SimplicialComplex, rng_seed: int):
    data = io.read_json(path)
    Y = io.complex_from_dict(data)
    if "map" in data:
        f0 = {io.parse_label(y): io.parse_label(v) for y, v in data["map"].items()}
    else:
        f0 = random_simplicial_map(Y, seed, random.Random(rng_seed))
    return Y, f0


def cmd_universality(manifest_path, space_path, depth: int, rng_seed: int = 0,
                     budget: int | None = None, out_dir: str | None = None):
    """Run the refinement driver; returns (all_ok, report text)."""
    m = io.load_manifest(manifest_path)
    if depth > m.data["depth"]:
        seed = io.read_complex(m.file(m.data["stages"][0]["file"]))
        t = build_tower(seed, m.data["n"], m.data["kappa"], depth, budget)
    else:
        t = io.read_tower(manifest_path, max_stage=depth)
    Y, f0_map = read_space(space_path, t.stage(0), rng_seed)
    if Y.dim > t.n:
        raise InvalidParameter(f"dim Y = {Y.dim} exceeds n = {t.n}")
    levels = SubdivisionLevels(Y, 1)
    f0 = StageMap(levels, 0, 0, f0_map)
    if not check_map(f0.as_vertex_map(t.stage(0))):
        raise InvalidParameter("initial map is not simplicial")
    res = universality_run(t, f0, depth)
    lines = [res.report().rstrip("\n")] if res.diagnostics else ["no refinement stages"]
    ok = all(d.close and d.agrees for d in res.diagnostics)
    for d in res.diagnostics:
        if d.r_vertices < len(levels.level(d.level).vertices):
            # the stated bound uses O_{i-1}; the lift itself controls O_i
            stage_ok = d.coarse_mesh <= d.eps
            ok &= stage_ok
            lines.append(f"stage {d.stage}: mesh g^-1(O_{d.stage - 1}) off R_i {d.coarse_mesh} <= {d.eps} "
                         f"{'PASS' if stage_ok else 'FAIL'}; mesh g^-1(O_{d.stage}) off R_i {d.mesh}")
    g = res.final
    injective = len(set(g.assignment.values())) == len(g.assignment)
    lines.append(f"injective on {len(g.assignment)} vertices: {'PASS' if injective else 'FAIL'}")
    covers = [star_cover(t, i) for i in range(depth + 1)]
    steps = all(small_steps_check(trajectory(res, y), covers) for y in g.domain.vertices)
    lines.append(f"small steps: {'PASS' if steps else 'FAIL'}")
    far = u_close_failures(t, f0, g)
    lines.append(f"stage-0 closeness: {'PASS' if not far else 'FAIL'}")
    cert = embedding_certificate(t, res.maps, [Surd.half_power(i) for i in range(depth + 1)])
    lines.extend(cert.lines)
    lines.append(f"st^3 empirical constant: {cert.empirical_constant}")
    lines.append(f"certificate: {'PASS' if cert.passed else 'FAIL'}")
    ok = ok and (injective or depth == 0) and steps and not far and cert.passed
    text = "\n".join(lines) + "\n"
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(text)
        io.write_json(os.path.join(out_dir, "final_map.json"), {
            "stage": g.stage,
            "level": g.level,
            "assignment": io.assignment_to_list(g.assignment),
        })
    return ok, text


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noebeling", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tower", help="build a tower and write its manifest")
    t.add_argument("--seed", required=True, help="seed complex (JSON)")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--kappa", type=int, required=True)
    t.add_argument("--depth", type=int, required=True)
    t.add_argument("--budget", type=int, default=0, help="max simplices per stage")
    t.add_argument("--out", default="tower", help="output directory")

    v = sub.add_parser("verify", help="re-check a written tower")
    v.add_argument("manifest")

    e = sub.add_parser("emit", help="draw one stage")
    e.add_argument("manifest")
    e.add_argument("--stage", type=int, required=True)
    e.add_argument("--format", choices=["dot", "svg"], default="dot")
    e.add_argument("--output", "-o", help="file to write (default stdout)")

    u = sub.add_parser("universality", help="refine a map of a test complex into the tower")
    u.add_argument("--seed", required=True, help="tower manifest")
    u.add_argument("--space", required=True, help="test complex Y (JSON, optional 'map')")
    u.add_argument("--depth", type=int, required=True)
    u.add_argument("--rng-seed", type=int, default=0)
    u.add_argument("--budget", type=int, default=0)
    u.add_argument("--out", help="directory for report.txt and final_map.json")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "tower":
            cfg = RunConfig(args.seed, args.n, args.kappa, args.depth, args.budget, 0, args.out)
            path = cmd_tower(cfg)
            for s in io.load_manifest(path).data["stages"]:
                print(f"stage {s['index']}: f={'/'.join(map(str, s['f_vector']))}")
            print(path)
            return 0
        if args.command == "verify":
            checks = verify_tower(args.manifest)
            for c in checks:
                print(c.line())
            return 0 if all(c.ok for c in checks) else 1
        if args.command == "emit":
            if args.format == "dot":
                text = to_dot(io.read_stage(args.manifest, args.stage), f"stage_{args.stage}")
            else:
                text = to_svg(io.read_tower(args.manifest, max_stage=args.stage), args.stage)
            if args.output:
                with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.command == "universality":
            budget = args.budget if args.budget > 0 else None
            ok, text = cmd_universality(args.seed, args.space, args.depth, args.rng_seed, budget, args.out)
            sys.stdout.write(text)
            return 0 if ok else 1
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DigestMismatch as exc:
        print(f"digest mismatch: {exc}", file=sys.stderr)
        return 3
    except NoebelingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
