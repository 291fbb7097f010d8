"""Command-line front end.

Exit codes: 0 on success, 2 when a hard inequality check fails, 1 on usage
or input errors.  Reports go to the ``--out`` file; stdout gets a short
summary.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import distortion as dist
from . import inequalities as ineq
from .families import FAMILIES, build_family, parse_spec, schreier_graph
from .graph import GraphError, Multigraph, all_pairs_distances, diameter, max_degree
from .spectral import Convention, eigen_residual, lambda1_p2_exact, lambda1_variational
from .volume import check_prop6, rho_best, rho_exact, rho_lower_ballcount, rho_upper_witness


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temp file in the same directory."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def parse_levels(text: str) -> list[int]:
    """``"3"``, ``"1..8"`` or ``"2,4,6"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            levels = list(range(int(lo), int(hi) + 1))
        else:
            levels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad level range '{text}'") from None
    if not levels:
        raise UsageError(f"empty level range '{text}'")
    return levels


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list '{text}'") from None
    if not vals:
        raise UsageError("empty number list")
    return vals


def load_graph(args) -> Multigraph:
    sources = [args.family is not None, args.graph is not None, args.spec is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --family, --graph, --spec")
    if args.graph is not None:
        with open(args.graph) as fh:
            g = Multigraph.from_json(fh.read())
        return Multigraph.from_edges(g.vertex_count, g.edges, g.labels, g.transitive, os.path.basename(args.graph))
    if args.level is None:
        raise UsageError("--level is required with --family or --spec")
    if args.spec is not None:
        with open(args.spec) as fh:
            spec = parse_spec(fh.read())
        return schreier_graph(spec, args.level, name=f"{os.path.basename(args.spec)}-{args.level}")
    if args.family not in FAMILIES:
        raise GraphError(f"unknown family '{args.family}'")
    return build_family(args.family, args.level)


def _graph_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="built-in family: " + ", ".join(FAMILIES))
    p.add_argument("--level", type=int)
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--spec", help="wreath recursion spec file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sdl", description="Spectral gap, volume distribution and distortion of graph families.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a graph file")
    _graph_source(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("spectral", help="spectral gap for one or more p")
    _graph_source(p)
    p.add_argument("--p", default="2")
    p.add_argument("--convention", choices=[c.value for c in Convention], default="eq3")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("distortion", help="realized distortion of an embedding")
    _graph_source(p)
    p.add_argument("--method", choices=["bourgain", "lattice", "local"], default="bourgain")
    p.add_argument("--embedding", help="evaluate this embedding file instead")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("rho", help="volume distribution")
    _graph_source(p)
    p.add_argument("--eps", default="0.5")
    p.add_argument("--method", choices=["best", "exact", "lower", "upper"], default="best")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check one inequality")
    _graph_source(p)
    p.add_argument("--ineq", choices=["thm3", "eq6", "eq8", "prop6"], required=True)
    p.add_argument("--eps", default="0.5,0.6666666666666666")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="family sweep table")
    p.add_argument("--family", required=True)
    p.add_argument("--levels", required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--eps", default="0.5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)

    p = sub.add_parser("embed", help="write an embedding file")
    _graph_source(p)
    p.add_argument("--method", choices=["bourgain", "lattice", "local"], default="bourgain")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


# -- subcommands ------------------------------------------------------------------


def cmd_gen(args) -> int:
    g = load_graph(args)
    write_atomic(args.out, g.to_json())
    print(f"{g.name or 'graph'}: {g.vertex_count} vertices, {len(g.edges)} edge entries -> {args.out}")
    return 0


def cmd_spectral(args) -> int:
    g = load_graph(args)
    conv = Convention(args.convention)
    out = []
    for p in parse_floats(args.p):
        if p == 2:
            res = lambda1_p2_exact(g, conv)
        else:
            res = lambda1_variational(g, p, conv, restarts=args.restarts, seed=args.seed)
        out.append({"p": p, "convention": conv.value, "lambda": res.value, "method": res.method, "residual": res.residual})
        print(f"p={p:g} {conv.value} lambda={res.value:.12g} ({res.method})")
    if args.out:
        write_atomic(args.out, _dump({"graph": g.name, "results": out}))
    return 0


def _make_embedding(args, g, d):
    if args.method == "lattice":
        if not args.family == "hanoi":
            raise UsageError("the lattice embedding exists for --family hanoi only")
        return dist.pascal_planar_embedding(args.level, args.p)
    if args.method == "local":
        return dist.local_opt_distortion(g, d, args.p, args.dim, args.seed)[1]
    return dist.bourgain_embedding(g, d, args.p, args.seed)


def cmd_distortion(args) -> int:
    g = load_graph(args)
    d = all_pairs_distances(g)
    if args.embedding:
        with open(args.embedding) as fh:
            emb = dist.Embedding.from_json(fh.read())
        method = "file"
    else:
        emb = _make_embedding(args, g, d)
        method = args.method
    if emb.coords.shape[0] != g.vertex_count:
        raise GraphError("embedding does not have one point per vertex")
    rep = dist.realized_distortion(d, emb, method, args.seed)
    print(f"{method} p={emb.p:g}: realized={rep.realized:.12g}")
    if args.out:
        write_atomic(args.out, _dump({
            "graph": g.name, "method": method, "p": emb.p, "seed": args.seed,
            "expansion": rep.expansion, "contraction": rep.contraction, "realized": rep.realized,
        }))
    return 0


def cmd_rho(args) -> int:
    g = load_graph(args)
    d = all_pairs_distances(g)
    fn = {"best": rho_best, "exact": rho_exact, "lower": rho_lower_ballcount, "upper": rho_upper_witness}[args.method]
    out = []
    for eps in parse_floats(args.eps):
        r = fn(g, d, eps)
        out.append({"eps": eps, "lower": r.lower, "upper": r.upper, "method": r.method,
                    "witness": list(r.witness) if r.witness is not None else None})
        print(f"eps={eps:g} rho in [{r.lower:.12g}, {r.upper:.12g}] ({r.method})")
    if args.out:
        write_atomic(args.out, _dump({"graph": g.name, "results": out}))
    return 0


def _thm3_reports(args, g):
    d = all_pairs_distances(g)
    delta, k = diameter(d), max_degree(g)
    lam = lambda1_p2_exact(g, Convention.EQ3).value
    ubs = [dist.realized_distortion(d, dist.bourgain_embedding(g, d, 2.0, args.seed)).realized]
    if args.family == "hanoi" and args.level <= ineq.DEFAULT_LATTICE_LEVEL_MAX:
        ubs.append(dist.realized_distortion(d, dist.pascal_planar_embedding(args.level, 2.0)).realized)
    reports = []
    for eps in parse_floats(args.eps):
        rho = rho_best(g, d, eps).lower
        if rho <= 0:
            print(f"eps={eps:g}: rho = 0, check skipped")
            continue
        reports.append(ineq.theorem3_check(g.name, 2.0, eps, lam, rho, min(ubs), delta, k))
    return reports


def cmd_verify(args) -> int:
    g = load_graph(args)
    if args.ineq == "thm3":
        reports = _thm3_reports(args, g)
    elif args.ineq == "eq6":
        reports = [ineq.eq6_check(g)]
    elif args.ineq == "eq8":
        reports = [ineq.eq8_check(g)]
    else:
        reports = [check_prop6(g, all_pairs_distances(g))]
    for r in reports:
        print(r.line())
    if args.out:
        write_atomic(args.out, _dump([
            {"inequality": r.inequality, "graph": r.graph, "lhs": r.lhs, "rhs": r.rhs, "passed": r.passed,
             "hard": r.hard, "notes": r.notes, "params": r.params}
            for r in reports
        ]))
    return 2 if any(r.hard and not r.passed for r in reports) else 0


def row_dict(row, ps, epss) -> dict:
    cols = ineq.csv_columns(ps, epss)
    vals = [row.family, row.n, row.V, row.delta, row.k, row.lambda_p2_op, row.lambda_p2_eq3]
    vals += [row.lambda_eq3.get(p) for p in ps if p != 2]
    vals += [row.rho.get(e) for e in epss]
    vals += [";".join(row.rho_method.get(e, "") for e in epss)]
    vals += [row.dist_lb, row.dist_ub_lattice, row.dist_ub_bourgain, row.thm3_pass, row.eq6_pass, row.eq8_pass]
    return dict(zip(cols, vals))


def cmd_sweep(args) -> int:
    if args.family not in FAMILIES:
        raise GraphError(f"unknown family '{args.family}'")
    levels = parse_levels(args.levels)
    ps, epss = parse_floats(args.p), parse_floats(args.eps)
    rows = ineq.family_sweep(args.family, levels, ps, epss, args.seed, args.restarts)
    slope = ineq.bourgain_slope(rows)
    if args.format == "csv":
        text = ineq.sweep_csv(rows, ps, epss)
    else:
        text = _dump({"rows": [row_dict(r, ps, epss) for r in rows], "bourgain_slope": slope})
    write_atomic(args.out, text)
    failed = [r for row in rows for r in row.reports if r.hard and not r.passed]
    slope_txt = "n/a" if slope is None else f"{slope:.4g}"
    print(f"{args.family}: {len(rows)} rows -> {args.out}; bourgain slope vs log2|V| = {slope_txt}; "
          f"{'all checks pass' if not failed else f'{len(failed)} FAILED'}")
    for r in failed:
        print(r.line())
    return 2 if failed else 0


def cmd_embed(args) -> int:
    g = load_graph(args)
    d = all_pairs_distances(g)
    emb = _make_embedding(args, g, d)
    write_atomic(args.out, emb.to_json())
    print(f"{args.method} embedding, dim {emb.dim} -> {args.out}")
    return 0


COMMANDS = {
    "gen": cmd_gen, "spectral": cmd_spectral, "distortion": cmd_distortion, "rho": cmd_rho,
    "verify": cmd_verify, "sweep": cmd_sweep, "embed": cmd_embed,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GraphError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
