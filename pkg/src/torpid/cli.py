"""Command-line entry point: ``torpid <subcommand> --graph hypercube:3 ...``.

Every subcommand prints one JSON document (or CSV where noted) to stdout or
``--out``.  Errors go to stderr as JSON with exit codes 2 (guard exceeded),
3 (invalid input) and 4 (structural-property failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from fractions import Fraction

from torpid import approximation as ap
from torpid import bounds as bd
from torpid import colouring as co
from torpid import dynamics as dy
from torpid import graph as gr
from torpid import heights as ht
from torpid.errors import GuardExceeded, InvalidInput, StructuralPropertyError, TorpidError

EXIT_OK, EXIT_GUARD, EXIT_INVALID, EXIT_STRUCTURAL = 0, 2, 3, 4


def parse_graph_arg(spec: str, seed: int) -> gr.BipartiteGraph:
    """``family:p1,p2`` or a path to a graph file."""
    if os.path.exists(spec):
        return gr.load_graph(spec)
    family, _, params = spec.partition(":")
    if family not in gr.FAMILIES:
        raise InvalidInput(f"{spec!r} is neither a graph family nor an existing file")
    try:
        values = [int(x) for x in params.split(",") if x.strip()]
    except ValueError:
        raise InvalidInput(f"graph parameters must be integers: {params!r}") from None
    if family == "random_regular" and len(values) == 2:
        values.append(seed)
    return gr.build_graph(family, *values)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


def _labels(G, mask_or_set) -> list[str]:
    items = gr.bits_of(mask_or_set) if isinstance(mask_or_set, int) else mask_or_set
    return [G.label(v) for v in sorted(items)]


# -- subcommands ------------------------------------------------------------


def cmd_graph(args, G) -> dict:
    exp = gr.bipartite_expansion(G, cap=args.expansion_cap)
    ell, edge, indep = gr.locality_witness(G, cap=args.locality_cap)
    return {
        "graph": G.name,
        "n": G.n,
        "d": G.d,
        "n_even": G.n_even,
        "edges": G.n_edges,
        "delta": exp.delta,
        "vacuous": exp.vacuous,
        "delta_witness": None if exp.witness is None else exp.witness.labels(G),
        "ell": ell,
        "ell_witness": {"edge": _labels(G, edge), "independent_set": _labels(G, indep)},
        "perfect_matching": gr.has_perfect_matching(G),
    }


def cmd_count(args, G) -> dict:
    back = co.count_colourings(G, 3, max_vertices=args.guard_vertices)
    dec = co.count_via_decomposition(G, cap=args.pair_cap)
    out = {"graph": G.name, "backtracking": back, "decomposition": dec, "agree": back == dec}
    out["class_sizes"] = [co.class_sizes(G, r, args.guard_vertices).as_dict() for r in args.rho]
    cb = co.verify_component_bound(G, cap=args.pair_cap)
    out["component_bound"] = {"max_comp": cb.max_comp, "bound": cb.bound, "holds": cb.holds}
    return out


def _matrix(args, G, q=None) -> dy.TransitionMatrix:
    spec = dy.ChainSpec(q=q or args.q, variant=args.variant)
    return dy.build_transition_matrix(G, spec, max_states=args.guard_states)


def cmd_mix(args, G) -> dict:
    T = _matrix(args, G)
    ergodic = dy.check_ergodic(T)
    out = {
        "graph": G.name,
        "q": T.q,
        "variant": T.variant,
        "states": T.n,
        "row_stochastic": T.row_sums_exact(),
        "detailed_balance": dy.check_detailed_balance(T),
        "ergodic": ergodic,
        "tau": None,
        "tv_curve": [],
    }
    if ergodic:
        res = dy.exact_mixing_time(T, max_t=args.max_steps, dense_cap=args.dense_cap)
        out.update(tau=res.tau, tv_curve=res.tv_curve, near_threshold=res.near_threshold)
    return out


def cmd_conductance(args, G) -> dict:
    T = _matrix(args, G, q=3)
    rho = args.rho[0]
    cut = dy.heavy_cut(G, T, rho)
    verdict = dy.verify_bottleneck_condition(T, cut)
    out = {
        "graph": G.name,
        "rho": co.as_fraction(rho),
        "states": T.n,
        "cut": {
            "pi_A": cut.pi_A,
            "pi_M": cut.pi_M,
            "blocking": verdict.ok,
            "witness": None if verdict.ok else [list(T.states[i]) for i in verdict.witness],
            "dfj_bound": None,
        },
        "tau": None,
    }
    if verdict.ok and cut.pi_A <= Fraction(1, 2) and cut.Mset:
        bound = dy.dfj_lower_bound(T, cut)
        out["cut"]["dfj_bound"] = bound
    if dy.check_ergodic(T) and T.n <= args.dense_cap:
        tau = dy.exact_mixing_time(T, max_t=args.max_steps, dense_cap=args.dense_cap).tau
        out["tau"] = tau
        if out["cut"]["dfj_bound"] is not None:
            out["bound_below_tau"] = out["cut"]["dfj_bound"] < tau
    return out


def _start_colouring(args, G) -> co.Colouring:
    if args.start_file:
        with open(args.start_file) as fh:
            return co.parse_colouring(G, fh.read(), args.q)
    side = gr.SIDE_NAMES.index(args.start_side)
    return co.extreme_colouring(G, colour=args.start_colour, side=side, q=args.q)


def cmd_simulate(args, G):
    spec = dy.ChainSpec(q=args.q, variant=args.variant)
    start = _start_colouring(args, G)
    rho = args.rho[0]
    stats = dy.simulate_trajectory(G, start, spec, args.steps, args.seed, rho=rho)
    if args.trajectory:
        with open(args.trajectory, "w", newline="") as fh:
            fh.write(stats.to_csv())
    if args.format == "csv":
        return stats.to_csv()
    out = {
        "graph": G.name,
        "seed": args.seed,
        "steps": stats.steps,
        "rho": co.as_fraction(rho),
        "start_phase": "".join(stats.rows[0][1:4]) if stats.rows else None,
        "first_balanced": stats.first_balanced,
        "occupancy": dict(sorted(stats.occupancy.items())),
        "final": list(stats.final.colours),
    }
    if args.runs:
        out["escape"] = dy.escape_statistics(G, spec, rho, start, args.seed, args.runs, args.max_steps)
    return out


def cmd_heights(args, G) -> dict:
    root = G.vertex(args.root)
    out: dict = {"graph": G.name, "root": G.label(root)}
    out["level_structure_witness"] = (
        None if (w := ht.level_structure_witness(G, root)) is None else _labels(G, w)
    )
    if args.colouring:
        with open(args.colouring) as fh:
            chi = co.parse_colouring(G, fh.read(), 3)
        f = ht.phi_inverse(G, chi, root)
        path = ht.ergodicity_path(G, chi, root)
        out["heights"] = {G.label(v): f[v] for v in range(G.n)}
        out["path"] = [[G.label(v), a, b] for v, a, b in ht.path_moves(path)]
        return out
    cols = [c for c in co.enumerate_colourings(G, 3, args.guard_vertices) if c[root] == 0]
    lengths = []
    valid = True
    for chi in cols:
        f = ht.phi_inverse(G, chi, root)
        if ht.phi(G, f) != chi:
            valid = False
        path = ht.ergodicity_path(G, chi, root)
        lengths.append(len(path) - 1)
        valid = valid and all(co.is_proper(G, c) for c in path)
        ht.path_moves(path)  # raises unless every step is a single-site change
    out["colourings_at_root"] = len(cols)
    if G.n <= args.height_enum_cap:
        out["height_functions"] = sum(1 for _ in ht.enumerate_height_functions(G, root))
    out["round_trip_and_paths_ok"] = valid
    out["path_length"] = {
        "max": max(lengths),
        "mean": statistics.fmean(lengths),
        "bound": sum(G.distances(root)),
    }
    if G.bits == 3:
        fz = ht.frozen_four_colouring()
        out["frozen_four_colouring"] = {G.label(v): fz[v] for v in range(G.n)}
        out["is_frozen"] = ht.is_frozen(G, fz, 4)
    return out


def cmd_approx(args, G) -> dict:
    census = ap.h_class_census(G, cap=args.pair_cap)
    out: dict = {
        "graph": G.name,
        "census": [{"params": list(p.as_tuple()), "count": c} for p, c in census.items()],
    }
    trivial_ok = trivial_total = 0
    for side in (gr.EVEN, gr.ODD):
        for sub in co.submasks(G.class_mask(side)):
            A = gr.VertexSet.from_mask(side, sub)
            trivial_total += 1
            trivial_ok += bool(ap.is_approximation(G, A, ap.trivial_approximation(G, A)))
    out["trivial_approximation"] = {"valid": trivial_ok, "checked": trivial_total}
    failures = []
    size_failures = 0
    checked = 0
    for e, o in co.compatible_pairs(G, args.pair_cap):
        sx = ap.Sextuple.trivial(G, e, o)
        params = ap.h_params_bits(G, e, o)
        size_failures += not ap.check_size_inequalities(sx, params, G.d)
        target = ap.containment_targets(G, sx, params, args.pair_cap)
        for flags in ap.BranchFlags.all():
            checked += 1
            if not target <= ap.reconstruct_candidates(G, sx, params, flags):
                failures.append({"pair": [_labels(G, e), _labels(G, o)], "flags": vars(flags)})
    out["reconstruction"] = {"checked": checked, "superset_failures": failures, "superset_ok": not failures}
    out["size_inequality_failures"] = size_failures
    return out


def cmd_bounds(args, G) -> dict:
    rho = args.rho[0]
    out: dict = {
        "rho": rho,
        "rho_star": bd.rho_star(),
        "entropy_plus_rho": bd.binary_entropy(rho) + rho,
    }
    out["alpha"] = bd.alpha_of(rho) if bd.entropy_margin(rho) > 0 else None
    out["chernoff"] = bd.chernoff_sweep(args.max_M)
    if G is not None:
        exp = gr.bipartite_expansion(G, cap=args.expansion_cap)
        delta, ell, d, N = float(exp.delta), gr.locality(G, args.locality_cap), G.d, G.n
    else:
        delta, ell, d, N = args.delta, args.ell, args.d, args.N
    if None in (delta, ell, d, N):
        raise InvalidInput("bounds needs --graph or all of --delta --ell --d --N")
    params = bd.BoundParameters(
        rho, delta, ell, d, N, C1=args.C1, C1p=args.C1p, C2=args.C2, C=args.C,
        c=args.c, cp=args.cp, d0=args.d0
    )
    out["measured"] = {"delta": delta, "ell": ell, "d": d, "N": N}
    out["theorem_exponents"] = bd.theorem_bounds(params)
    return out


COMMANDS = {
    "graph": cmd_graph,
    "count": cmd_count,
    "mix": cmd_mix,
    "conductance": cmd_conductance,
    "simulate": cmd_simulate,
    "heights": cmd_heights,
    "approx": cmd_approx,
    "bounds": cmd_bounds,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="family:params (hypercube:3, even_cycle:6, complete_bipartite:3, torus:4,2, random_regular:8,3) or a graph file")
    common.add_argument("--q", type=int, default=3)
    common.add_argument("--rho", type=float, action="append", help="repeatable; default 0.2")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=1000)
    common.add_argument("--max-steps", type=int, default=10**6)
    common.add_argument("--guard-states", type=int, default=dy.DEFAULT_MAX_STATES)
    common.add_argument("--guard-vertices", type=int, default=co.DEFAULT_MAX_VERTICES)
    common.add_argument("--pair-cap", type=int, default=co.DEFAULT_PAIR_CLASS_CAP)
    common.add_argument("--dense-cap", type=int, default=dy.DEFAULT_DENSE_CAP)
    common.add_argument("--expansion-cap", type=int, default=gr.DEFAULT_EXPANSION_CAP)
    common.add_argument("--locality-cap", type=int, default=gr.DEFAULT_LOCALITY_CAP)
    common.add_argument("--variant", choices=(dy.PLAIN, dy.RESTRICTED), default=dy.PLAIN)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="torpid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "simulate":
            p.add_argument("--start-colour", type=int, default=0)
            p.add_argument("--start-side", choices=gr.SIDE_NAMES, default="E")
            p.add_argument("--start-file")
            p.add_argument("--runs", type=int, default=0, help="escape-time runs (streams seed^i)")
            p.add_argument("--trajectory", help="also write the trajectory CSV here")
        elif name == "heights":
            p.add_argument("--root", default="0")
            p.add_argument("--colouring", help="colouring file; report its heights and path")
            p.add_argument("--height-enum-cap", type=int, default=8)
        elif name == "bounds":
            for flag, typ in (("--delta", float), ("--ell", int), ("--d", int), ("--N", int),
                              ("--C1", float), ("--C1p", float), ("--C2", float), ("--C", float),
                              ("--c", float), ("--cp", float),
                              ("--d0", int)):
                p.add_argument(flag, type=typ)
            p.add_argument("--max-M", type=int, default=200)
    return parser


def _csv_of(name: str, result) -> str:
    """CSV rendering: class sizes for ``count``, else one key,value row per field."""
    if isinstance(result, str):
        return result
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if name == "count":
        w.writerow(["colour", "balanced", "e_heavy", "o_heavy"])
        for c in result["class_sizes"][0]["colours"]:
            w.writerow([c["colour"], c["balanced"], c["e_heavy"], c["o_heavy"]])
        return buf.getvalue()
    w.writerow(["key", "value"])
    for k, v in result.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, default=_jsonable, separators=(",", ":"))
        w.writerow([k, "" if v is None else _jsonable(v) if isinstance(v, Fraction) else v])
    return buf.getvalue()


def _validate(args) -> None:
    if not 0 <= args.seed < 2**64:
        raise InvalidInput("--seed must be a 64-bit unsigned integer")
    for name in ("guard_states", "guard_vertices", "pair_cap", "dense_cap", "expansion_cap", "locality_cap", "max_steps"):
        if getattr(args, name) <= 0:
            raise InvalidInput(f"--{name.replace('_', '-')} must be positive")
    if args.steps < 0:
        raise InvalidInput("--steps must be non-negative")


def _fail(code: int, kind: str, exc: Exception, witness=None) -> int:
    err = {"error": kind, "message": str(exc)}
    if witness is not None:
        err["witness"] = witness
    sys.stderr.write(dump_json(err))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not args.rho:
        args.rho = [0.2]
    G = None
    try:
        _validate(args)
        if args.command == "bounds" and not args.graph:
            pass
        elif not args.graph:
            raise InvalidInput("--graph is required")
        else:
            G = parse_graph_arg(args.graph, args.seed)
        result = COMMANDS[args.command](args, G)
        text = _csv_of(args.command, result) if args.format == "csv" else (
            result if isinstance(result, str) else dump_json(result)
        )
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except GuardExceeded as exc:
        return _fail(EXIT_GUARD, "guard_exceeded", exc, {"what": exc.what, "size": exc.size, "limit": exc.limit})
    except StructuralPropertyError as exc:
        w = exc.witness
        if G is not None and isinstance(w, tuple):
            w = [G.label(v) for v in w]
        return _fail(EXIT_STRUCTURAL, "structural_property", exc, w)
    except (TorpidError, ValueError, OSError) as exc:
        return _fail(EXIT_INVALID, "invalid_input", exc)


if __name__ == "__main__":
    sys.exit(main())
