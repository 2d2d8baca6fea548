"""Command line front end.

Every subcommand prints one JSON record (``schema: certify/v1``) on stdout or to
``--report``. Exit codes: 0 success, 1 a checked theorem failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import plotting
from .base import (CayleySpec, DegreeNotRealizable, build_cayley_complex, complete_partite_spec,
                   equivalence_classes, face_generators, incidence_graph, tau_lambda_formulas,
                   truncate_to_degree, verify_structured, window_spec)
from .base.bounds import as_json
from .base.groups import parse_generators, parse_group
from .certify import (SCHEMA, bipartite_lambda2, bounded_outdegree_orientation, degree_product_check,
                      eml_bound, measure_une, naive_triangle_face_count, orientation_check, record,
                      skeletonize, small_set_skeleton_lambda, top_eigenvalue, triangle_expander_tau,
                      triangle_face_count, validate_exponents, validate_parameters)
from .enumeration import DEFAULT_EXHAUSTIVE_BUDGET, default_workers, iter_subsets, sample_subsets, size_plan
from .gadget import (GadgetCertificate, GadgetParams, GadgetSearchError, equal_buckets, replay_certificate,
                     validate_family, sample_biregular, search_good_gadget)
from .graph import (LEFT, RIGHT, FormatError, SymmetricGraph, VertexSet, parse_complex, parse_graph,
                    write_complex, write_graph)
from .grassmann import building_bipartite, building_complex, link_lambda2_formula
from .product import BatchOracle, analyze_collisions, edges_into_low_diagnostic, line_product


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class Failures(list):
    """Asserted checks that did not hold: (invariant, witness) pairs."""

    def add(self, invariant: str, witness):
        self.append({"invariant": invariant, "witness": witness})


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (Fraction, Path)):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read(path, flag: str) -> bytes:
    p = Path(path)
    if not p.exists() or p.is_dir():
        raise UsageError(flag, f"file not found: {path}")
    return p.read_bytes()


def _int_list(text: str | None, flag: str) -> list[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return sorted({int(x) for x in text.replace(",", " ").split()})
    except ValueError:
        raise UsageError(flag, f"expected a comma separated index list, got {text!r}") from None


# base sources ---------------------------------------------------------------

def _preset(text: str, flag: str) -> CayleySpec:
    try:
        name, k, m = text.split(":")
        k, m = int(k), int(m)
    except ValueError:
        raise UsageError(flag, f"expected NAME:K:M, got {text!r}") from None
    makers = {"complete": complete_partite_spec, "window": window_spec}
    if name not in makers:
        raise UsageError(flag, f"unknown preset {name!r} (choose from {', '.join(sorted(makers))})")
    try:
        return makers[name](k, m)
    except ValueError as exc:
        raise UsageError(flag, str(exc)) from None


def load_base(desc: dict, root: Path = Path(".")) -> dict:
    """Build the complex and its structured incidence graph from a source description.

    ``desc`` keys: ``source`` in cayley|building|complex, plus ``preset`` or
    ``group``/``gens`` (cayley), ``k``/``q`` (building), ``path`` (complex), and an
    optional ``degree`` for Cayley truncation.
    """
    src = desc.get("source")
    spec, gens, info = None, None, {"source": src}
    if src == "cayley":
        if desc.get("preset"):
            spec = _preset(desc["preset"], "--preset")
            info["preset"] = desc["preset"]
        else:
            if not desc.get("group") or not desc.get("gens"):
                raise UsageError("--group", "a Cayley source needs --preset or both --group and --gens")
            try:
                group = parse_group(_read(root / desc["group"], "--group"))
                parts = parse_generators(_read(root / desc["gens"], "--gens"))
                spec = CayleySpec(group, tuple(tuple(p) for p in parts))
            except (FormatError, ValueError) as exc:
                raise UsageError("--gens", str(exc)) from None
            info["group_sha256"] = _sha((root / desc["group"]).read_bytes())
            info["gens_sha256"] = _sha((root / desc["gens"]).read_bytes())
        gens = face_generators(spec)
        info["face_generators"] = len(gens)
        if desc.get("degree"):
            classes = equivalence_classes(gens, spec)
            try:
                gens = truncate_to_degree(classes, int(desc["degree"]), len(gens), spec.k)
            except DegreeNotRealizable as exc:
                raise UsageError("--degree", str(exc)) from None
            info["degree"] = int(desc["degree"])
        complex = build_cayley_complex(spec, gens)
        sb = incidence_graph(complex, gens, spec)
    elif src == "building":
        k, q = int(desc["k"]), int(desc["q"])
        try:
            complex = building_complex(k, q)
        except ValueError as exc:
            raise UsageError("--flag-complex", str(exc)) from None
        sb = incidence_graph(complex)
        info.update(k=k, q=q)
    elif src == "complex":
        try:
            complex = parse_complex(_read(root / desc["path"], "--complex"))
        except FormatError as exc:
            raise UsageError("--complex", str(exc)) from None
        sb = incidence_graph(complex)
        info["complex_sha256"] = _sha((root / desc["path"]).read_bytes())
    else:
        raise UsageError("--preset", f"unknown base source {src!r}")
    info.update(k=complex.k, vertices=complex.n, faces=len(complex.faces), D=sb.D)
    return {"spec": spec, "gens": gens, "complex": complex, "sb": sb, "info": info}


def _add_base_args(p, required: bool = True):
    g = p.add_argument_group("base source")
    g.add_argument("--preset", help="Cayley preset NAME:K:M with NAME in complete|window")
    g.add_argument("--group", help="group table file (GTF v1)")
    g.add_argument("--gens", help="generator partition file")
    g.add_argument("--complex", help="clique complex file (CXF v1)")
    g.add_argument("--flag-complex", metavar="K:Q", help="flag complex of F_q^k")
    g.add_argument("--degree", type=int, help="truncate a Cayley source to this degree")
    p.set_defaults(_base_required=required)


def _base_desc(args) -> dict | None:
    chosen = [f for f, v in (("--preset", args.preset), ("--group", args.group),
                             ("--complex", args.complex), ("--flag-complex", args.flag_complex)) if v]
    if len(chosen) > 1:
        raise UsageError(chosen[1], f"conflicts with {chosen[0]}")
    if not chosen:
        if args._base_required:
            raise UsageError("--preset", "a base source is required (--preset, --group/--gens, "
                                         "--complex or --flag-complex)")
        return None
    if args.degree and not (args.preset or args.group):
        raise UsageError("--degree", "truncation needs a Cayley source")
    if args.preset:
        return {"source": "cayley", "preset": args.preset, "degree": args.degree}
    if args.group:
        return {"source": "cayley", "group": args.group, "gens": args.gens, "degree": args.degree}
    if args.complex:
        return {"source": "complex", "path": args.complex}
    try:
        k, q = (int(x) for x in args.flag_complex.split(":"))
    except ValueError:
        raise UsageError("--flag-complex", f"expected K:Q, got {args.flag_complex!r}") from None
    return {"source": "building", "k": k, "q": q}


def _write(path, data: bytes | str, flag: str) -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(data.encode() if isinstance(data, str) else data)
    except OSError as exc:
        raise UsageError(flag, str(exc)) from None
    return p


def _load_graph(path, flag: str):
    try:
        return parse_graph(_read(path, flag))
    except FormatError as exc:
        raise UsageError(flag, str(exc)) from None


# subcommands -------------------------------------------------------------------

def cmd_building(args, fails: Failures) -> dict:
    k, q = args.k, args.q
    if (args.i is None) != (args.j is None):
        raise UsageError("--j" if args.j is None else "--i", "give both --i and --j, or neither")
    try:
        if args.i is None:
            c = building_complex(k, q)
            _write(args.out, write_complex(c), "--out")
            return record("building", {"k": k, "q": q, "object": "flag-complex", "parts": c.k,
                                       "vertices": c.n, "faces": len(c.faces), "out": str(args.out)})
        g = building_bipartite(k, q, args.i, args.j)
    except ValueError as exc:
        raise UsageError("--i", str(exc)) from None
    _write(args.out, write_graph(g), "--out")
    formula = link_lambda2_formula(k, q, args.i, args.j)
    spec = bipartite_lambda2(g, args.seed)
    if abs(spec.lambda_2 - formula) > 1e-6:
        fails.add("link second eigenvalue formula", {"numeric": spec.lambda_2, "formula": formula})
    return record("building", {
        "k": k, "q": q, "i": args.i, "j": args.j, "object": "incidence",
        "n_left": g.n_left, "n_right": g.n_right, "edges": g.m,
        "left_degree": int(g.degrees(LEFT)[0]), "right_degree": int(g.degrees(RIGHT)[0]),
        "lambda2_formula": formula, "spectrum": spec.to_dict(), "out": str(args.out)})


def cmd_cayley(args, fails: Failures) -> dict:
    desc = _base_desc(args)
    if desc["source"] != "cayley":
        raise UsageError("--preset", "cayley needs --preset or --group/--gens")
    base = load_base(desc)
    spec = base["spec"]
    classes = equivalence_classes(base["gens"], spec)
    _write(args.out, write_complex(base["complex"]), "--out")
    return record("cayley", {**base["info"], "group_order": spec.group.order,
                             "generator_part_sizes": [len(p) for p in spec.generator_parts],
                             "class_sizes": sorted(len(c) for c in classes), "out": str(args.out)})


def cmd_incidence(args, fails: Failures) -> dict:
    base = load_base(_base_desc(args))
    sb = base["sb"]
    _write(args.out, write_graph(sb.graph), "--out")
    out = {**base["info"], "out": str(args.out), "structure": verify_structured(sb).to_dict(),
           "special_set_counts": [{"a": a, "b": b, "s": len(f)} for (a, b), f in sorted(sb.special_sets.items())]}
    if args.structured_out:
        _write(args.structured_out, dumps(sb.to_dict()), "--structured-out")
        out["structured_out"] = str(args.structured_out)
    return record("incidence", out)


def cmd_truncate(args, fails: Failures) -> dict:
    desc = _base_desc(args)
    if desc["source"] != "cayley":
        raise UsageError("--preset", "truncate needs a Cayley source")
    if not args.degree:
        raise UsageError("--degree", "truncate needs --degree")
    base = load_base(desc)
    gens, c = base["gens"], base["complex"]
    deg = c.vertex_degrees()
    bad = [int(v) for v in np.flatnonzero(deg != args.degree)]
    if bad:
        fails.add("every vertex lies in exactly D truncated faces", {"vertices": bad[:20]})
    _write(args.out, dumps({"k": c.k, "degree": args.degree,
                            "face_generators": [list(s.elements) for s in gens]}), "--out")
    out = {**base["info"], "selected": [list(s.elements) for s in gens], "out": str(args.out),
           "vertex_degrees_ok": not bad}
    if args.complex_out:
        _write(args.complex_out, write_complex(c), "--complex-out")
        out["complex_out"] = str(args.complex_out)
    return record("truncate", out)


def _families(args, D_L, D_R):
    if args.families:
        try:
            fam = json.loads(_read(args.families, "--families"))
            return tuple(fam.get("right", ())), tuple(fam.get("left", ()))
        except (json.JSONDecodeError, AttributeError) as exc:
            raise UsageError("--families", f"bad JSON: {exc}") from None
    if args.buckets:
        return (equal_buckets(D_R, args.buckets),), (equal_buckets(D_L, args.buckets),)
    return (), ()


def cmd_gadget_search(args, fails: Failures) -> dict:
    workers = args.workers
    if args.replay:
        try:
            cert = GadgetCertificate.from_dict(json.loads(_read(args.replay, "--replay")))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise UsageError("--replay", str(exc)) from None
        rep = replay_certificate(cert, workers)
        if not rep["match"]:
            fails.add("certificate replay reproduces stored ratios", rep)
        return record("gadget-replay", rep)
    for flag, v in (("--DL", args.DL), ("--DR", args.DR), ("--dL", args.dL), ("--dR", args.dR)):
        if v is None:
            raise UsageError(flag, "required unless --replay is given")
    right, left = _families(args, args.DL, args.DR)
    try:
        params = GadgetParams(args.DL, args.DR, args.dL, args.dR, right, left, args.shrink,
                              args.subset_cap, args.bucket_cap, args.samples, args.seed,
                              not args.multigraph)
        for fam in params.right_families:
            validate_family(fam, args.DR, True)
        for fam in params.left_families:
            validate_family(fam, args.DL, True)
    except ValueError as exc:
        raise UsageError("--families" if args.families else ("--buckets" if args.buckets else "--dL"),
                         str(exc)) from None
    try:
        cert = search_good_gadget(params, args.max_tries, workers)
    except GadgetSearchError as exc:
        return record("gadget-search", {"pass": False, "params": params.to_dict(),
                                        "message": str(exc), "tries": exc.tries})
    out = {"pass": True, "try_index": cert.try_index, "params": params.to_dict(),
           "worst": cert.tries[-1]}
    if args.out:
        _write(args.out, cert.to_json() + "\n", "--out")
        out["certificate"] = str(args.out)
    if args.gadget_out:
        _write(args.gadget_out, write_graph(cert.gadget), "--gadget-out")
        out["gadget"] = str(args.gadget_out)
    if args.out_dir:
        d = Path(args.out_dir)
        prof = cert.checks["H"]["lossless"]["per_size"]
        plotting.write_csv(d / "lossless.csv", prof, ["size", "mode", "count", "min_ratio", "witness"])
        plotting.plot_profile(d / "lossless.png", prof, label="min |N(S)|/(d_L|S|)",
                              reference=params.shrink, title="lossless profile of H")
        out["artifacts"] = ["lossless.csv", "lossless.png"]
    return record("gadget-search", out)


def _gadget_from_args(args):
    if args.gadget and args.certificate:
        raise UsageError("--certificate", "conflicts with --gadget")
    if args.gadget:
        return _load_graph(args.gadget, "--gadget")
    if args.certificate:
        try:
            return GadgetCertificate.from_dict(json.loads(_read(args.certificate, "--certificate"))).gadget
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise UsageError("--certificate", str(exc)) from None
    raise UsageError("--gadget", "line-product needs --gadget or --certificate")


def _check_collisions(inst, side, sizes_cap, budget, samples, seed, tau, delta, fails: Failures,
                      workers=None) -> dict:
    """Blue/red oracle and multiplicity bound over all (or sampled) seed sets on one side."""
    oracle = BatchOracle(inst, side)
    n = oracle.view.g_left.n_outer
    rng = np.random.default_rng([seed, 0 if side == LEFT else 1])
    plan = size_plan(n, range(1, min(sizes_cap, n) + 1), budget, samples)
    per_size = []
    for s, mode, count in plan:
        chunks = iter_subsets(n, s, max_rows=4096) if mode == "exhaustive" \
            else sample_subsets(rng, n, s, count, batch=4096)
        checked, bad_un, bad_mult, pairs = 0, 0, 0, 0
        for rows in chunks:
            res = oracle.run(rows, tau, delta)
            checked += len(rows)
            pairs += res["pairs_checked"]
            neq = np.flatnonzero(res["blue_unique"] != res["un_z"])
            over = np.flatnonzero(res["worst_excess"] > 0)
            if len(neq) and not bad_un:
                fails.add("blue unique count equals unique neighbors of Z",
                          {"side": side, "S": rows[neq[0]].tolist()})
            if len(over) and not bad_mult:
                fails.add("collision multiplicity within special-set mass",
                          {"side": side, "S": rows[over[0]].tolist()})
            bad_un += len(neq)
            bad_mult += len(over)
        per_size.append({"size": s, "mode": mode, "sets": checked, "pairs_checked": pairs,
                         "blue_unique_mismatches": bad_un, "multiplicity_violations": bad_mult})
    return {"side": side, "per_size": per_size,
            "all_families_found": all(oracle.in_family)}


def cmd_line_product(args, fails: Failures) -> dict:
    base = load_base(_base_desc(args))
    sb = base["sb"]
    gadget = _gadget_from_args(args)
    try:
        inst = line_product(sb, sb, gadget)
    except ValueError as exc:
        raise UsageError("--gadget" if args.gadget else "--certificate", str(exc)) from None
    breg = inst.biregularity
    if not breg.ok:
        fails.add("Z is (k d_L, k d_R)-biregular", breg.to_dict())
    _write(args.out, write_graph(inst.z), "--out")
    out = {"base": base["info"], "z": {"n_left": inst.z.n_left, "n_right": inst.z.n_right,
                                      "edges": inst.z.m, "biregular": breg.ok},
           "out": str(args.out)}
    params = {"tau": args.tau, "delta": args.delta, "lambda": args.lam}
    if args.seed_set is not None:
        S = _int_list(args.seed_set, "--seed-set")
        n = inst.z.n_left if args.side == LEFT else inst.z.n_right
        if S and (S[0] < 0 or S[-1] >= n):
            raise UsageError("--seed-set", f"indices must lie in [0, {n})")
        rep = analyze_collisions(inst, VertexSet.of(args.side, S), args.tau, args.delta, args.lam)
        _assert_report(rep, fails)
        out["collisions"] = rep.to_dict()
        out["edges_into_low"] = edges_into_low_diagnostic(rep, inst.k, args.delta)
    if args.check_size_cap:
        out["oracle_checks"] = [
            _check_collisions(inst, side, args.check_size_cap, args.budget, args.samples, args.seed,
                              args.tau, args.delta, fails)
            for side in (LEFT, RIGHT)]
    out["params"] = params
    return record("line-product", out)


def _assert_report(rep, fails: Failures):
    if not rep.obs_un_blue_holds:
        fails.add("blue unique count equals unique neighbors of Z",
                  {"side": rep.side, "S": rep.S, "blue_unique": rep.blue_unique_count, "un_z": rep.un_z_count})
    if not rep.multiplicity_bound_holds:
        bad = [c for c in rep.multiplicity_checks if not c["ok"]]
        fails.add("collision multiplicity within special-set mass", {"side": rep.side, "S": rep.S, "pair": bad[0]})
    if not rep.skeleton_ok:
        fails.add("collision graph inside the skeleton", {"side": rep.side, "S": rep.S})


def cmd_certify_une(args, fails: Failures) -> dict:
    z = _load_graph(args.graph, "--graph")
    prof = measure_une(z, args.side, args.size_cap, args.samples, args.seed, args.budget, args.workers)
    out = dict(prof)
    if args.out_dir:
        d = Path(args.out_dir)
        plotting.write_csv(d / f"une_{args.side}.csv", prof["profile"],
                           ["size", "mode", "count", "min_unique", "min_ratio", "witness"])
        plotting.plot_profile(d / f"une_{args.side}.png", prof["profile"],
                              title=f"unique-neighbor profile ({args.side})")
        out["artifacts"] = [f"une_{args.side}.csv", f"une_{args.side}.png"]
    return record("une", out)


def cmd_certify_triangles(args, fails: Failures) -> dict:
    base = load_base(_base_desc(args))
    c = base["complex"]
    out = {"base": base["info"]}
    if args.U is not None:
        U = _int_list(args.U, "--U")
        if U and (U[0] < 0 or U[-1] >= c.n):
            raise UsageError("--U", f"indices must lie in [0, {c.n})")
        rep = triangle_face_count(c, U)
        total, per = naive_triangle_face_count(c, U)
        if total != rep.faces_with_triangle or per != rep.triangles:
            fails.add("triangle count matches the naive count", {"U": U})
        out["count"] = rep.to_dict()
    tau = triangle_expander_tau(c, args.samples, args.size_cap, args.seed, args.budget)
    out["tau"] = tau
    if c.k >= 3:
        out["formula"] = as_json(tau_lambda_formulas(c.k))
    if args.out_dir:
        d = Path(args.out_dir)
        plotting.write_csv(d / "triangles.csv", tau["per_size"],
                           ["size", "mode", "count", "max_faces", "ratio", "witness"])
        out["artifacts"] = ["triangles.csv"]
    return record("triangles", out)


def _skeleton_sets(skel, n_sets, size_cap, seed):
    rng = np.random.default_rng(seed)
    rows = []
    for t in range(n_sets if skel.n else 0):
        s = int(rng.integers(1, min(size_cap, skel.n) + 1))
        U = sorted(rng.choice(skel.n, size=s, replace=False).tolist())
        r = small_set_skeleton_lambda(skel, U, seed)
        rows.append({**r, "U": U})
    return rows


def _skeleton_stage(skel, n_sets, size_cap, seed, fails: Failures, out_dir=None) -> dict:
    top = top_eigenvalue(skel, seed) if skel.n else None
    rows = _skeleton_sets(skel, n_sets, size_cap, seed)
    lam_top = top.lambda_max if top else 0.0
    for r in rows:
        if r["lambda_U"] > lam_top * (1 + 1e-9) + 1e-9:
            fails.add("induced top eigenvalue at most the full top eigenvalue (interlacing)",
                      {"U": r["U"], "lambda_U": r["lambda_U"], "lambda_max": lam_top})
            break
    orient = orientation_check(skel, seed)
    if not orient["pass"]:
        fails.add("peeling orientation outdegree at most ceil(lambda_max)", orient)
    out = {"n": skel.n, "edges": len(skel.edges), "spectrum": top.to_dict() if top else None,
           "sets": len(rows), "size_cap": size_cap,
           "max_lambda_U": max((r["lambda_U"] for r in rows), default=0.0),
           "max_ratio_to_bound": max((r["lambda_U"] / r["comparison_bound"] for r in rows
                                      if r["comparison_bound"] > 0), default=None),
           "orientation": orient}
    if out_dir is not None:
        d = Path(out_dir)
        plotting.write_csv(d / "skeleton_sets.csv", rows,
                           ["size", "lambda_U", "lambda2_skeleton", "d_max", "comparison_bound", "U"])
        arts = ["skeleton_sets.csv"]
        if rows:
            plotting.plot_skeleton_sets(d / "skeleton_sets.png", rows, title="small-set skeleton eigenvalues")
            arts.append("skeleton_sets.png")
        if 0 < skel.n <= 2000:
            ev = np.linalg.eigvalsh(skel.adjacency_matrix())
            plotting.plot_spectrum(d / "skeleton_spectrum.png", ev,
                                   {"lambda_max": float(ev[-1]), "lambda_2": float(ev[-2]) if skel.n > 1 else 0.0},
                                   title="skeleton spectrum")
            arts.append("skeleton_spectrum.png")
        out["artifacts"] = arts
    return out


def _size_cap(n, size_cap, eta):
    cap = max(1, math.floor(eta * n)) if eta else n
    return max(1, min(size_cap, cap)) if size_cap else cap


def cmd_certify_skeleton(args, fails: Failures) -> dict:
    if args.graph:
        if _base_desc(args) is not None:
            raise UsageError("--graph", "conflicts with the base source flags")
        skel = skeletonize(_load_graph(args.graph, "--graph"), "middle")
        info = {"graph": str(args.graph)}
    else:
        desc = _base_desc(args)
        if desc is None:
            raise UsageError("--graph", "give --graph or a base source")
        base = load_base(desc)
        skel = skeletonize(base["sb"], "middle")
        info = base["info"]
    cap = _size_cap(skel.n, args.size_cap, args.eta)
    out = _skeleton_stage(skel, args.sets, cap, args.seed, fails, args.out_dir)
    return record("skeleton", {"base": info, "eta": args.eta, **out})


def _eml_stage(g, pairs, seed, lam, fails: Failures) -> dict:
    spec = bipartite_lambda2(g, seed)
    lam = spec.lambda_2 if lam is None else lam
    rng = np.random.default_rng(seed)
    contained, worst = 0, None
    for _ in range(pairs):
        a = int(rng.integers(0, g.n_left + 1))
        b = int(rng.integers(0, g.n_right + 1))
        A = VertexSet.of(LEFT, rng.choice(g.n_left, a, replace=False).tolist())
        B = VertexSet.of(RIGHT, rng.choice(g.n_right, b, replace=False).tolist())
        r = eml_bound(g, A, B, lam)
        if r["contained"]:
            contained += 1
        elif worst is None:
            worst = {"A": list(A.members), "B": list(B.members), **r}
    if worst is not None:
        fails.add("mixing-lemma interval contains e(A,B)", worst)
    return {"lambda": lam, "spectrum": spec.to_dict(), "pairs": pairs, "contained": contained,
            "pass": contained == pairs, "first_violation": worst}


def cmd_eml(args, fails: Failures) -> dict:
    g = _load_graph(args.graph, "--graph")
    dl, dr = g.degrees(LEFT), g.degrees(RIGHT)
    if g.m == 0 or dl.min() != dl.max() or dr.min() != dr.max():
        raise UsageError("--graph", "the mixing-lemma check needs a biregular graph")
    if args.A is not None or args.B is not None:
        A, B = _int_list(args.A, "--A"), _int_list(args.B, "--B")
        lam = bipartite_lambda2(g, args.seed).lambda_2 if args.lam is None else args.lam
        r = eml_bound(g, VertexSet.of(LEFT, A), VertexSet.of(RIGHT, B), lam)
        if not r["contained"]:
            fails.add("mixing-lemma interval contains e(A,B)", {"A": A, "B": B, **r})
        return record("eml", {"graph": str(args.graph), "A": A, "B": B, **r})
    return record("eml", {"graph": str(args.graph), **_eml_stage(g, args.pairs, args.seed, args.lam, fails)})


def cmd_orient(args, fails: Failures) -> dict:
    out = {}
    if args.graph:
        if _base_desc(args) is not None:
            raise UsageError("--graph", "conflicts with the base source flags")
        g = _load_graph(args.graph, "--graph")
        edges = sorted({(int(l), g.n_left + int(r)) for l, r in g.edges})
        sym = SymmetricGraph(g.n_left + g.n_right, tuple(edges))
        dp = degree_product_check(g, args.seed)
        if not dp["pass"]:
            fails.add("(d1-1)(d2-1) <= lambda^2", dp)
        out["degree_product"] = dp
        out["graph"] = str(args.graph)
    else:
        desc = _base_desc(args)
        if desc is None:
            raise UsageError("--graph", "give --graph or a base source")
        base = load_base(desc)
        sym = skeletonize(base["sb"], "middle")
        out["base"] = base["info"]
    chk = orientation_check(sym, args.seed)
    if not chk["pass"]:
        fails.add("peeling orientation outdegree at most ceil(lambda_max)", chk)
    out["orientation"] = chk
    if args.arcs_out:
        arcs = bounded_outdegree_orientation(sym)["arcs"]
        _write(args.arcs_out, "".join(f"{a} {b}\n" for a, b in arcs), "--arcs-out")
        out["arcs_out"] = str(args.arcs_out)
    return record("orient", out)


def _frac(text, flag):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(flag, f"not a rational number: {text!r}") from None


def cmd_validate_params(args, fails: Failures) -> dict:
    k = args.k
    if args.exponents or args.from_formulas:
        vals = {"D": args.D_exp, "tau": args.tau_exp, "lambda": args.lambda_exp,
                "s_min": args.s_min_exp, "s_max": args.s_max_exp}
        if args.from_formulas:
            if k < 3:
                raise UsageError("--k", "the exponent formulas need k >= 3")
            f = tau_lambda_formulas(k)
            lo, hi = f["s_exponent_range"]
            fill = {"D": f["D_exponent"], "tau": f["tau_exponent"], "lambda": f["lambda_exponent"],
                    "s_min": lo, "s_max": hi}
            vals = {key: (vals[key] if vals[key] is not None else fill[key]) for key in vals}
        flags = {"D": "--D-exp", "tau": "--tau-exp", "lambda": "--lambda-exp",
                 "s_min": "--s-min-exp", "s_max": "--s-max-exp"}
        for key, v in vals.items():
            if v is None:
                raise UsageError(flags[key], "required in exponent mode (or pass --from-formulas)")
        vals = {key: _frac(str(v), flags[key]) for key, v in vals.items()}
        d_exp = None
        if args.d_exp is not None:
            d_exp = [_frac(x, "--d-exp") for x in args.d_exp.split(",")]
        rep = validate_exponents(k, vals["D"], vals["tau"], vals["lambda"], vals["s_min"],
                                 vals["s_max"], d_exp)
        rep["inputs"] = {key: str(v) for key, v in vals.items()}
        return record("validate-params", rep)
    needed = {"--dL": args.dL, "--dR": args.dR, "--D": args.D, "--tau": args.tau,
              "--lambda": args.lam, "--s-min": args.s_min, "--s-max": args.s_max, "--delta": args.delta}
    for flag, v in needed.items():
        if v is None:
            raise UsageError(flag, "required in numeric mode (or pass --exponents)")
    if min(args.D, args.tau, args.lam) <= 0 or args.D <= 1:
        raise UsageError("--D", "D, tau and lambda must be positive and D > 1")
    rep = validate_parameters(k, args.q, args.dL, args.dR, args.D, args.tau, args.lam,
                              args.s_min, args.s_max, args.delta)
    return record("validate-params", rep)


# pipeline ------------------------------------------------------------------

PIPELINE_DEFAULTS = {
    "gadget": {"d_L": 2, "d_R": 2, "shrink": 0.9, "subset_cap": 8, "bucket_cap": 8,
               "sample_count": 2000, "max_tries": 20, "simple": True, "use_special_sets": True},
    "product": {"tau": 1.0, "delta": 0.1, "lambda": 1.0},
    "certify": {"une_size_cap": 4, "une_samples": 2000, "triangle_size_cap": 4,
                "triangle_samples": 2000, "skeleton_sets": 100, "skeleton_size_cap": 8, "eta": 0.1,
                "collision_size_cap": 3, "collision_samples": 2000, "eml_pairs": 200,
                "exhaustive_budget": DEFAULT_EXHAUSTIVE_BUDGET},
}


def load_config(path) -> tuple[dict, Path]:
    raw = _read(path, "--config")
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError("--config", f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("--config", "top level must be an object")
    if "seed" not in cfg or not isinstance(cfg["seed"], int):
        raise UsageError("--config", "an integer 'seed' is mandatory")
    if "base" not in cfg:
        raise UsageError("--config", "missing 'base' section")
    unknown = set(cfg) - {"seed", "base", "gadget", "product", "certify", "out_dir"}
    if unknown:
        raise UsageError("--config", f"unknown keys: {', '.join(sorted(unknown))}")
    merged = {"seed": cfg["seed"], "base": cfg["base"]}
    for sec, defaults in PIPELINE_DEFAULTS.items():
        given = cfg.get(sec, {})
        bad = set(given) - set(defaults)
        if bad:
            raise UsageError("--config", f"unknown keys in '{sec}': {', '.join(sorted(bad))}")
        merged[sec] = {**defaults, **given}
    if "out_dir" in cfg:
        merged["out_dir"] = cfg["out_dir"]
    return merged, Path(path).resolve().parent


def _families_from_base(sb, n):
    fams, skipped = [], []
    for (a, b), fam in sorted(sb.special_sets.items()):
        if a == b or not fam:
            continue
        fam = tuple(tuple(x) for x in fam)
        try:
            validate_family(fam, n, True)
        except ValueError as exc:
            skipped.append({"a": a, "b": b, "reason": str(exc)})
            continue
        if fam not in fams:
            fams.append(fam)
    return fams, skipped


def run_pipeline(cfg: dict, root: Path, out_dir: Path, workers: int | None, fails: Failures) -> dict:
    seed = cfg["seed"]
    gcfg, pcfg, ccfg = cfg["gadget"], cfg["product"], cfg["certify"]
    budget = ccfg["exhaustive_budget"]
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {}

    def emit(name, data: bytes | str):
        data = data.encode() if isinstance(data, str) else data
        (out_dir / name).write_bytes(data)
        artifacts[name] = {"sha256": _sha(data)}

    def figure(name):
        artifacts[name] = {"sha256": None}

    # base
    base = load_base(cfg["base"], root)
    sb, complex = base["sb"], base["complex"]
    emit("complex.cxf", write_complex(complex))
    emit("base.bgf", write_graph(sb.graph))
    emit("base_structured.json", dumps(sb.to_dict()))
    structure = verify_structured(sb).to_dict()

    # gadget
    D = sb.D
    fams, skipped = _families_from_base(sb, D) if gcfg["use_special_sets"] else ([], [])
    try:
        params = GadgetParams(D, D, gcfg["d_L"], gcfg["d_R"], tuple(fams), tuple(fams), gcfg["shrink"],
                              gcfg["subset_cap"], gcfg["bucket_cap"], gcfg["sample_count"], seed,
                              gcfg["simple"], budget)
    except ValueError as exc:
        raise UsageError("--config", f"gadget: {exc}") from None
    try:
        cert = search_good_gadget(params, gcfg["max_tries"], workers)
        gadget, certified = cert.gadget, True
        emit("gadget_certificate.json", cert.to_json() + "\n")
        gadget_out = {"certified": True, "try_index": cert.try_index, "worst": cert.tries[-1],
                      "lossless_profile": cert.checks["H"]["lossless"]["per_size"]}
    except GadgetSearchError as exc:
        gadget, certified = sample_biregular(D, D, gcfg["d_L"], gcfg["d_R"], [seed, 0], gcfg["simple"]), False
        gadget_out = {"certified": False, "message": str(exc), "tries": exc.tries,
                      "fallback_seed": [seed, 0]}
    emit("gadget.bgf", write_graph(gadget))
    gadget_out.update(params=params.to_dict(), families=len(fams), families_skipped=skipped)
    if certified:
        prof = gadget_out["lossless_profile"]
        emit_csv = plotting.write_csv(out_dir / "gadget_lossless.csv", prof,
                                      ["size", "mode", "count", "min_ratio", "witness"])
        artifacts["gadget_lossless.csv"] = {"sha256": _sha(emit_csv.read_bytes())}
        plotting.plot_profile(out_dir / "gadget_lossless.png", prof, label="min |N(S)|/(d_L|S|)",
                              reference=gcfg["shrink"], title="gadget lossless profile")
        figure("gadget_lossless.png")

    # product
    inst = line_product(sb, sb, gadget)
    breg = inst.biregularity
    if not breg.ok:
        fails.add("Z is (k d_L, k d_R)-biregular", breg.to_dict())
    emit("z.bgf", write_graph(inst.z))
    tau, delta, lam = pcfg["tau"], pcfg["delta"], pcfg["lambda"]
    oracle = [_check_collisions(inst, side, ccfg["collision_size_cap"], budget, ccfg["collision_samples"],
                                seed, tau, delta, fails) for side in (LEFT, RIGHT)]
    # one full report per side for the first vertex's neighborhood-sized seed set
    sample_reports = []
    for side in (LEFT, RIGHT):
        n = inst.z.n_left if side == LEFT else inst.z.n_right
        rng = np.random.default_rng([seed, 2, 0 if side == LEFT else 1])
        s = min(n, max(1, ccfg["collision_size_cap"]))
        S = sorted(rng.choice(n, s, replace=False).tolist())
        rep = analyze_collisions(inst, VertexSet.of(side, S), tau, delta, lam)
        _assert_report(rep, fails)
        diag = edges_into_low_diagnostic(rep, inst.k, delta)
        if not diag["identity_holds"]:
            fails.add("e(S,U_low) + e(S,U_high) = k|S|", {"side": side, "S": S})
        sample_reports.append({"side": side, "S": S, "u_low": len(rep.u_low), "u_high": len(rep.u_high),
                               "e_C_total": rep.e_C_total, "e_C_low": rep.e_C_low,
                               "u_sat": rep.u_sat, "blue_unique": rep.blue_unique_count,
                               "un_z": rep.un_z_count, "edges_into_low": diag})
        emit(f"collisions_{side}.json", dumps(rep.to_dict()))
    dp_z = degree_product_check(inst.z, seed)
    if not dp_z["pass"]:
        fails.add("(d1-1)(d2-1) <= lambda^2", {"graph": "z", **dp_z})

    # certify
    une = {}
    for side in (LEFT, RIGHT):
        prof = measure_une(inst.z, side, ccfg["une_size_cap"], ccfg["une_samples"], seed, budget, workers)
        une[side] = prof
        p = plotting.write_csv(out_dir / f"une_{side}.csv", prof["profile"],
                               ["size", "mode", "count", "min_unique", "min_ratio", "witness"])
        artifacts[p.name] = {"sha256": _sha(p.read_bytes())}
        plotting.plot_profile(out_dir / f"une_{side}.png", prof["profile"],
                              title=f"unique-neighbor profile of Z ({side})")
        figure(f"une_{side}.png")
    k = complex.k
    d_L, d_R = inst.gadget_degrees
    for side, prof in une.items():
        deg = k * (d_L if side == LEFT else d_R)
        prof["normalized_global_min"] = prof["global_min_ratio"] / deg if deg else None

    tri = triangle_expander_tau(complex, ccfg["triangle_samples"], ccfg["triangle_size_cap"], seed, budget)
    skel = skeletonize(sb, "middle")
    cap = _size_cap(skel.n, ccfg["skeleton_size_cap"], ccfg["eta"])
    skeleton = _skeleton_stage(skel, ccfg["skeleton_sets"], cap, seed, fails, out_dir)
    for name in skeleton.pop("artifacts", []):
        artifacts[name] = {"sha256": _sha((out_dir / name).read_bytes()) if name.endswith(".csv") else None}
    eml = _eml_stage(sb.graph, ccfg["eml_pairs"], seed, None, fails)
    dp_base = degree_product_check(sb.graph, seed)
    if not dp_base["pass"]:
        fails.add("(d1-1)(d2-1) <= lambda^2", {"graph": "base", **dp_base})
    s_vals = [len(f) for (a, b), f in sb.special_sets.items() if a != b and f]
    params_check = None
    if s_vals and D > 1:
        params_check = validate_parameters(k, None, d_L, d_R, D, tau, lam, min(s_vals), max(s_vals), delta)

    body = {
        "config": {key: v for key, v in cfg.items() if key != "out_dir"},
        "base": {**base["info"], "structure": structure},
        "gadget": gadget_out,
        "product": {"z": {"n_left": inst.z.n_left, "n_right": inst.z.n_right, "edges": inst.z.m,
                          "biregular": breg.ok, "degrees": [k * d_L, k * d_R]},
                    "params": {"tau": tau, "delta": delta, "lambda": lam},
                    "oracle_checks": oracle, "sample_reports": sample_reports,
                    "degree_product": dp_z},
        "certify": {"une": une, "triangles": tri, "skeleton": skeleton, "eml": eml,
                    "degree_product_base": dp_base, "parameters": params_check},
        "artifacts": [{"path": name, **meta} for name, meta in sorted(artifacts.items())],
        "failures": list(fails),
    }
    return body


def cmd_pipeline(args, fails: Failures) -> dict:
    cfg, root = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out = args.out_dir or cfg.get("out_dir")
    if not out:
        raise UsageError("--out-dir", "an output directory is required (flag or 'out_dir' in config)")
    out_dir = Path(out) if args.out_dir or Path(out).is_absolute() else root / out
    workers = args.workers
    body = run_pipeline(cfg, root, out_dir, workers, fails)
    text = dumps(body)
    report = {"schema": SCHEMA, "kind": "pipeline", "body": body, "body_sha256": _sha(text.encode()),
              "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    (out_dir / "report.json").write_text(dumps(report))
    return {"schema": SCHEMA, "kind": "pipeline", "report": str(out_dir / "report.json"),
            "body_sha256": report["body_sha256"], "failures": len(fails)}


# parser -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="expforge", description="Build and certify unique-neighbor expanders "
                                             "from clique complexes and small gadgets.")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: $EXPFORGE_WORKERS or 1)")
    p.add_argument("--report", help="write the JSON record here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--workers", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--report", default=argparse.SUPPRESS)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("building", help="spherical building incidence graph or flag complex")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_building)

    sp = sub.add_parser("cayley", help="Cayley clique complex from a group and generator partition")
    common(sp)
    _add_base_args(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_cayley)

    sp = sub.add_parser("incidence", help="structured face-vertex incidence graph")
    common(sp)
    _add_base_args(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--structured-out")
    sp.set_defaults(func=cmd_incidence)

    sp = sub.add_parser("truncate", help="select face generators of an exact degree")
    common(sp)
    _add_base_args(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--complex-out")
    sp.set_defaults(func=cmd_truncate)

    sp = sub.add_parser("gadget-search", help="seeded search for a good gadget, or certificate replay")
    common(sp)
    sp.add_argument("--DL", type=int)
    sp.add_argument("--DR", type=int)
    sp.add_argument("--dL", type=int)
    sp.add_argument("--dR", type=int)
    sp.add_argument("--buckets", type=int, default=0, help="equal buckets on both sides")
    sp.add_argument("--families", help='JSON {"right": [[...]], "left": [[...]]}')
    sp.add_argument("--shrink", type=float, default=0.9)
    sp.add_argument("--subset-cap", type=int, default=8)
    sp.add_argument("--bucket-cap", type=int, default=8)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--max-tries", type=int, default=20)
    sp.add_argument("--multigraph", action="store_true", help="keep parallel edges")
    sp.add_argument("--out", help="certificate JSON")
    sp.add_argument("--gadget-out", help="gadget BGF")
    sp.add_argument("--out-dir", help="lossless profile CSV and figure")
    sp.add_argument("--replay", help="replay a stored certificate")
    sp.set_defaults(func=cmd_gadget_search)

    sp = sub.add_parser("line-product", help="assemble Z and run collision diagnostics")
    common(sp)
    _add_base_args(sp)
    sp.add_argument("--gadget")
    sp.add_argument("--certificate")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed-set", help="comma separated seed vertices")
    sp.add_argument("--side", choices=[LEFT, RIGHT], default=LEFT)
    sp.add_argument("--tau", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--check-size-cap", type=int, default=0,
                    help="run the batch oracle over seed sets up to this size")
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--budget", type=int, default=DEFAULT_EXHAUSTIVE_BUDGET)
    sp.set_defaults(func=cmd_line_product)

    sp = sub.add_parser("certify-une", help="unique-neighbor expansion profile")
    common(sp)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--side", choices=[LEFT, RIGHT], default=LEFT)
    sp.add_argument("--size-cap", type=int, default=4)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--budget", type=int, default=DEFAULT_EXHAUSTIVE_BUDGET)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_certify_une)

    sp = sub.add_parser("certify-triangles", help="triangle-face counts and empirical tau")
    common(sp)
    _add_base_args(sp)
    sp.add_argument("--U", help="count faces for this vertex set")
    sp.add_argument("--size-cap", type=int, default=4)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--budget", type=int, default=DEFAULT_EXHAUSTIVE_BUDGET)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_certify_triangles)

    sp = sub.add_parser("certify-skeleton", help="small-set skeleton eigenvalues")
    common(sp)
    _add_base_args(sp, required=False)
    sp.add_argument("--graph", help="bipartite graph; skeleton taken on its right side")
    sp.add_argument("--sets", type=int, default=100)
    sp.add_argument("--size-cap", type=int, default=8)
    sp.add_argument("--eta", type=float, default=0.1)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_certify_skeleton)

    sp = sub.add_parser("eml", help="bipartite mixing-lemma containment")
    common(sp)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--pairs", type=int, default=500)
    sp.add_argument("--A")
    sp.add_argument("--B")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.set_defaults(func=cmd_eml)

    sp = sub.add_parser("orient", help="peeling orientation and degree-product check")
    common(sp)
    _add_base_args(sp, required=False)
    sp.add_argument("--graph", help="bipartite graph, oriented as an undirected graph")
    sp.add_argument("--arcs-out")
    sp.set_defaults(func=cmd_orient)

    sp = sub.add_parser("validate-params", help="parameter preconditions, numeric or as q-exponents")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--q", type=float)
    sp.add_argument("--dL", type=float)
    sp.add_argument("--dR", type=float)
    sp.add_argument("--D", type=float)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--s-min", type=float)
    sp.add_argument("--s-max", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--exponents", action="store_true", help="compare exponents of q exactly")
    sp.add_argument("--from-formulas", action="store_true",
                    help="fill missing exponents from the k-dependent formulas")
    sp.add_argument("--D-exp")
    sp.add_argument("--tau-exp")
    sp.add_argument("--lambda-exp")
    sp.add_argument("--s-min-exp")
    sp.add_argument("--s-max-exp")
    sp.add_argument("--d-exp", help="degree exponent, or 'dL,dR'")
    sp.set_defaults(func=cmd_validate_params)

    sp = sub.add_parser("pipeline", help="base -> gadget -> product -> certify, one report")
    sp.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--report", default=argparse.SUPPRESS)
    sp.add_argument("--config", required=True)
    sp.add_argument("--out-dir")
    sp.add_argument("--seed", type=int, help="override the config seed")
    sp.set_defaults(func=cmd_pipeline)
    return p


def _unknown_flag(parser, argv) -> str | None:
    """First option token not known to the top level or the chosen subcommand."""
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known = set(parser._option_string_actions)
    for tok in argv:
        if tok in subs.choices:
            known |= set(subs.choices[tok]._option_string_actions)
            break
    for tok in argv:
        if tok.startswith("--") and tok != "--" and tok.split("=", 1)[0] not in known:
            return tok.split("=", 1)[0]
    return None


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    bad = _unknown_flag(parser, argv)
    if bad is not None:
        parser.print_usage(sys.stderr)
        print(f"expforge: error: unrecognized argument: {bad}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers is None:
        args.workers = default_workers()
    elif args.workers < 1:
        print("expforge: error: --workers: must be at least 1", file=sys.stderr)
        return 2
    fails = Failures()
    try:
        rec = args.func(args, fails)
    except UsageError as exc:
        print(f"expforge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if "schema" not in rec:
        rec = record(args.command, rec)
    if fails:
        rec["failures"] = list(fails)
    text = dumps(rec)
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    for f in fails:
        print(f"expforge {args.command}: check failed: {f['invariant']}; witness: "
              f"{json.dumps(f['witness'], default=_default)[:400]}", file=sys.stderr)
    return 1 if fails else 0


if __name__ == "__main__":
    sys.exit(main())
