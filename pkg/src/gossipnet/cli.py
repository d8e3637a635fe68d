"""Command-line interface.

Subcommands: audience, global-audience, generate, ingest, subsample,
stats, sweep, threshold.  Every stochastic command takes --seed
(default 0); identical invocations produce byte-identical output.
GOSSIPNET_THREADS caps worker threads for per-edge tables (0 = auto).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from ._kernels import derive_seed
from .audience import (
    GossipParams,
    audience_table,
    global_audience_analytic,
    global_audience_mc,
    percolation_threshold,
)
from .generators import GenConfig, MODELS, WEIGHT_MODES, generate as generate_graph
from .graph import local_clustering, node_embeddedness
from .ingest import edge_list_text, parse_edge_list, subsample
from .stats import summarize, sweep


def worker_count() -> int:
    raw = os.environ.get("GOSSIPNET_THREADS", "1")
    try:
        v = int(raw)
    except ValueError:
        return 1
    if v == 0:
        return os.cpu_count() or 1
    return max(1, v)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _format_rows(header: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        import json

        return (
            json.dumps([dict(zip(header, row)) for row in rows], indent=2, sort_keys=True)
            + "\n"
        )
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            cells.append(f"{v:.10g}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _load_graph(path: str):
    return parse_edge_list(path)


def _internal_id(g, orig: int, what: str) -> int:
    try:
        return g.id_map()[orig]
    except KeyError:
        raise ValueError(f"{what} id {orig} not present in the graph") from None


def _cmd_audience(args) -> int:
    g = _load_graph(args.graph)
    params = GossipParams(p=args.p, trials=args.trials, seed=args.seed)
    header = ["i", "j", "k_i", "c_i", "m_ij", "n_ij", "stderr", "method"]
    orig = g.orig_ids
    if args.edges is None:
        if args.actor is None or args.recipient is None:
            raise ValueError("provide --actor and --recipient, or --edges")
        i = _internal_id(g, args.actor, "actor")
        j = _internal_id(g, args.recipient, "recipient")
        rows = audience_table(g, params, method=args.method, edges=[(i, j)],
                              workers=worker_count())
    else:
        if args.edges == "all":
            edges = None
        elif args.edges.startswith("random:"):
            import numpy as np

            count = int(args.edges.split(":", 1)[1])
            und = g.edges()
            rng = np.random.default_rng(derive_seed(args.seed, 0x65646765))
            pick = rng.integers(und.shape[0], size=count)
            flip = rng.random(count) < 0.5
            edges = [
                (int(und[e, 1]), int(und[e, 0])) if f else (int(und[e, 0]), int(und[e, 1]))
                for e, f in zip(pick, flip)
            ]
        else:
            raise ValueError("--edges must be 'all' or 'random:K'")
        rows = audience_table(g, params, method=args.method, edges=edges,
                              workers=worker_count())
    out_rows = [
        (int(orig[r.i]), int(orig[r.j]), r.k_i, r.c_i, r.m_ij, r.value, r.stderr, r.method)
        for r in rows
    ]
    out_rows.sort(key=lambda t: (t[0], t[1]))
    _emit(_format_rows(header, out_rows, args.format), args.out)
    return 0


def _cmd_global_audience(args) -> int:
    g = _load_graph(args.graph)
    if args.nodes == "all":
        nodes = range(g.node_count)
    elif args.nodes.startswith("random:"):
        import numpy as np

        count = int(args.nodes.split(":", 1)[1])
        rng = np.random.default_rng(derive_seed(args.seed, 0x6e6f6465))
        nodes = [int(v) for v in rng.integers(g.node_count, size=count)]
    else:
        raise ValueError("--nodes must be 'all' or 'random:K'")
    header = ["i", "k_i", "c_i", "m_i", "n_i", "stderr", "method"]
    rows = []
    orig = g.orig_ids
    for i in nodes:
        k = g.degree(i)
        if k == 0:
            continue
        c = local_clustering(g, i)
        m = node_embeddedness(g, i)
        if args.method == "analytic":
            est = global_audience_analytic(k, c, args.p, args.q)
        else:
            est = global_audience_mc(
                g,
                i,
                GossipParams(p=args.p, q=args.q, trials=args.trials,
                             seed=derive_seed(args.seed, i)),
            )
        rows.append((int(orig[i]), k, c, m, est.value, est.stderr, est.method))
    rows.sort(key=lambda t: t[0])
    _emit(_format_rows(header, rows, args.format), args.out)
    return 0


def _cmd_generate(args) -> int:
    cfg = GenConfig(
        model=args.model,
        n=args.n,
        k=args.k,
        p=args.p,
        weight_mode=args.weight_mode,
        alpha=args.alpha,
        beta=args.beta,
        sigma=args.sigma,
        trials=args.trials,
        seed=args.seed,
    )
    g = generate_graph(cfg)
    header = {
        "source": f"gossipnet generate --model {cfg.model}",
        "seed": cfg.seed,
        "N": cfg.n,
        "k": cfg.k,
        "p": cfg.p,
    }
    _emit(edge_list_text(g, header), args.out)
    return 0


def _cmd_ingest(args) -> int:
    g = parse_edge_list(args.input, max_edges=args.max_edges)
    header = {"source": args.input, "seed": args.seed, "N": g.node_count,
              "k": f"{2 * g.edge_count / g.node_count:.10g}"}
    _emit(edge_list_text(g, header), args.out)
    if not args.quiet:
        print(f"parsed {g.node_count} nodes, {g.edge_count} edges", file=sys.stderr)
    return 0


def _cmd_subsample(args) -> int:
    if args.tba_preset:
        cfg = GenConfig(
            model="tba",
            n=args.n,
            k=2 * args.k,
            p=args.p,
            weight_mode=args.weight_mode,
            seed=args.seed,
        )
        g = generate_graph(cfg)
        source = f"gossipnet subsample --tba-preset (k generated at {2 * args.k})"
    elif args.graph:
        g = _load_graph(args.graph)
        source = args.graph
    else:
        raise ValueError("provide --graph or --tba-preset")
    sub = subsample(g, args.n, args.k, seed=args.seed)
    header = {"source": source, "seed": args.seed, "N": sub.node_count,
              "k": f"{2 * sub.edge_count / sub.node_count:.10g}"}
    _emit(edge_list_text(sub, header), args.out)
    return 0


def _cmd_stats(args) -> int:
    g = _load_graph(args.graph)
    params = None
    if args.p is not None:
        params = GossipParams(p=args.p, q=args.q, trials=args.trials, seed=args.seed)
    audience_edges = None
    if args.audience_edges and args.audience_edges != "all":
        if not args.audience_edges.startswith("random:"):
            raise ValueError("--audience-edges must be 'all' or 'random:K'")
        audience_edges = int(args.audience_edges.split(":", 1)[1])
    report = summarize(
        g,
        params=params,
        method=args.method,
        audience_edges=audience_edges,
        workers=worker_count(),
    )
    if args.format == "json":
        _emit(report.to_json() + "\n", args.out)
    else:
        d = report.to_dict()
        rows = _flatten({k: v for k, v in d.items() if k != "degree_histogram"})
        text = "stat,value\n" + "\n".join(
            f"{k},{format(v, '.10g') if isinstance(v, float) else v}" for k, v in rows
        ) + "\n"
        _emit(text, args.out)
    return 0


def _flatten(d: dict, prefix: str = "") -> list[tuple]:
    rows: list[tuple] = []
    for key in sorted(d):
        v = d[key]
        if isinstance(v, dict):
            rows.extend(_flatten(v, f"{prefix}{key}."))
        else:
            rows.append((f"{prefix}{key}", v))
    return rows


def _cmd_sweep(args) -> int:
    models = args.models.split(",")
    values = []
    for tok in args.values.split(","):
        values.append(float(tok) if args.axis == "p" else int(tok))
    base = GenConfig(
        model=models[0],
        n=args.n,
        k=args.k,
        p=args.p,
        weight_mode=args.weight_mode,
        seed=args.seed,
    )
    params = None
    if args.audience_p is not None:
        params = GossipParams(p=args.audience_p, trials=args.trials, seed=args.seed)
    result = sweep(
        models,
        args.axis,
        values,
        base,
        seeds=args.seeds,
        params=params,
        audience_edges=args.audience_edges,
    )
    _emit(result.to_csv(), args.out)
    return 0


def _cmd_threshold(args) -> int:
    g = _load_graph(args.graph)
    pc = percolation_threshold(
        g, trials=args.trials, pairs=args.pairs, tol=args.tol, seed=args.seed
    )
    _emit(f"{pc:.10g}\n", args.out)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gossipnet",
        description="Expected gossip audiences, trust-weighted network growth, "
        "and structural statistics on social graphs.",
    )
    ap.add_argument("--version", action="version", version=f"gossipnet {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audience", help="expected audience n_ij for directed edges")
    p.add_argument("--graph", required=True)
    p.add_argument("--actor", type=int, default=None, help="actor node id (original)")
    p.add_argument("--recipient", type=int, default=None, help="recipient node id (original)")
    p.add_argument("--edges", default=None, help="'all' or 'random:K' for a table")
    p.add_argument("--p", type=float, required=True)
    p.add_argument(
        "--method",
        choices=("auto", "exact", "monte_carlo", "analytic", "small_p"),
        default="auto",
    )
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=_cmd_audience)

    p = sub.add_parser("global-audience", help="audience n_i of an undirected act")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--nodes", default="all", help="'all' or 'random:K'")
    p.add_argument("--method", choices=("analytic", "monte_carlo"), default="analytic")
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=_cmd_global_audience)

    p = sub.add_parser("generate", help="generate a network and write its edge list")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--weight-mode", choices=WEIGHT_MODES, default="analytic")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("ingest", help="parse and normalize an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--max-edges", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("subsample", help="community-based subsample to target N and k")
    p.add_argument("--graph", default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument(
        "--tba-preset",
        action="store_true",
        help="generate a trust-weighted graph at twice the target degree first",
    )
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--weight-mode", choices=WEIGHT_MODES, default="analytic")
    _add_common(p)
    p.set_defaults(func=_cmd_subsample)

    p = sub.add_parser("stats", help="structural summary of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, default=None, help="enable audience statistics")
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument(
        "--method",
        choices=("auto", "exact", "monte_carlo", "analytic", "small_p"),
        default="auto",
    )
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--audience-edges", default="all", help="'all' or 'random:K'")
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sweep", help="generate + summarize over a parameter grid")
    p.add_argument("--models", required=True, help="comma-separated model names")
    p.add_argument("--axis", choices=("n", "k", "p"), required=True)
    p.add_argument("--values", required=True, help="comma-separated grid values")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--weight-mode", choices=WEIGHT_MODES, default="analytic")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--audience-p", type=float, default=None)
    p.add_argument("--audience-edges", type=int, default=None)
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("threshold", help="pair-connectivity percolation threshold")
    p.add_argument("--graph", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--tol", type=float, default=0.01)
    _add_common(p)
    p.set_defaults(func=_cmd_threshold)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
