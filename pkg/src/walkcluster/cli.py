"""Command-line interface: generation, walks, embedding, clustering, sweeps."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import graph as graph_io
from .cluster import KmeansParams, cluster_embedding, kmeans
from .embed import EmbeddingMatrix, SgnsParams, read_embedding, train_sgns, \
    write_embedding
from .graph import Graph, SbmParams, generate_sbm, random_regular
from .metrics import score
from .pipeline import ExperimentConfig, run_pipeline, run_sweep
from .plots import emit_plot
from .spectral import build_edge_transition, build_vertex_transition, \
    check_doubly_stochastic, check_ergodicity, measure_mixing_empirical, \
    mixing_rates
from .walks import WalkCorpus, WalkParams, WalkPolicy, build_corpus, \
    read_corpus, write_corpus

POLICIES = {p.value: p for p in WalkPolicy}


def _cmd_generate(args) -> int:
    params = SbmParams(args.n, args.k, args.c, args.separation, seed=args.seed)
    g, labels = generate_sbm(params)
    graph_io.write_edge_list(g, args.out_edges)
    if args.out_labels:
        graph_io.write_labels(labels, args.out_labels)
    print(f"wrote graph with n={g.n} m={g.m} to {args.out_edges}")
    return 0


def _cmd_walk(args) -> int:
    g = graph_io.read_edge_list(args.edges)
    params = WalkParams(args.walks_per_node, args.length,
                        POLICIES[args.policy], seed=args.seed)
    corpus = build_corpus(g, params)
    write_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} sentences to {args.out}")
    return 0


def _cmd_embed(args) -> int:
    corpus = read_corpus(args.corpus)
    n = args.n if args.n is not None else corpus.max_node() + 1
    params = SgnsParams(args.dim, args.window, args.negatives, args.epochs,
                        args.lr_initial, args.lr_final, seed=args.seed)
    emb = train_sgns(corpus, n, params, workers=args.workers)
    write_embedding(emb, args.out)
    print(f"wrote {emb.n}x{emb.dim} embedding to {args.out}")
    return 0


def _cmd_cluster(args) -> int:
    emb = read_embedding(args.embeddings)
    if args.edges:
        g = graph_io.read_edge_list(args.edges)
        if g.n != emb.n:
            raise ValueError(f"embedding has {emb.n} rows but graph has "
                             f"{g.n} nodes")
        emb = EmbeddingMatrix(emb.vectors, g.degrees() > 0)
    params = KmeansParams(args.k, args.restarts, args.max_iters, args.tol,
                          seed=args.seed)
    result = cluster_embedding(emb, params)
    graph_io.write_labels(result.labels, args.out)
    print(f"wrote labels to {args.out} (sse={result.sse:.6g})")
    return 0


def _cmd_score(args) -> int:
    truth = graph_io.read_labels(args.true)
    pred = graph_io.read_labels(args.pred)
    mask = None
    if args.mask_isolated:
        if not args.edges:
            raise ValueError("--mask-isolated needs --edges to find "
                             "degree-0 nodes")
        mask = graph_io.read_edge_list(args.edges).degrees() > 0
    report = score(truth, pred, mask=mask)
    print("ccr,nmi")
    print(report.csv_row())
    return 0


def _cmd_pipeline(args) -> int:
    g = graph_io.read_edge_list(args.edges)
    walk = WalkParams(args.walks_per_node, args.length,
                      POLICIES[args.policy], seed=args.seed)
    embed = SgnsParams(args.dim, args.window, args.negatives, args.epochs,
                       args.lr_initial, args.lr_final, seed=args.seed + 1)
    cluster_params = KmeansParams(args.k, args.restarts, seed=args.seed + 2)
    truth = graph_io.read_labels(args.true) if args.true else None
    result = run_pipeline(g, args.k, walk, embed, cluster_params,
                          true_labels=truth,
                          mask_isolated=args.mask_isolated,
                          embed_workers=args.workers)
    if args.out_labels:
        graph_io.write_labels(result.labels, args.out_labels)
    stage = " ".join(f"{name}={sec:.2f}s"
                     for name, sec in result.stage_seconds.items())
    print(f"stages: {stage}")
    if result.report is not None:
        print("ccr,nmi")
        print(result.report.csv_row())
    return 0


def _cmd_sweep(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    written = run_sweep(config, args.out, workers=args.workers,
                        embed_workers=args.embed_workers)
    print(f"wrote {written} new rows to {args.out}")
    return 0


def _cmd_spectral(args) -> int:
    if args.edges:
        g = graph_io.read_edge_list(args.edges)
    elif args.regular_n and args.regular_d:
        g = random_regular(args.regular_n, args.regular_d, seed=args.seed)
    else:
        raise ValueError("provide --edges or both --regular-n and --regular-d")
    doc: dict = {"n": g.n, "m": g.m,
                 "min_degree": int(g.degrees().min()) if g.n else 0,
                 "max_degree": int(g.degrees().max()) if g.n else 0}
    vertex = build_vertex_transition(g)
    ergo = check_ergodicity(vertex)
    doc["vertex_chain"] = {"irreducible": ergo.irreducible,
                           "aperiodic": ergo.aperiodic}
    if g.min_degree() >= 1:
        begrudging = build_edge_transition(g, WalkPolicy.BEGRUDGING)
        ok, dev = check_doubly_stochastic(begrudging)
        doc["begrudging_chain"] = {"doubly_stochastic": ok,
                                   "max_deviation": dev}
    degs = g.degrees()
    if g.m and degs.min() == degs.max():
        report = mixing_rates(g, require_regular=True)
        doc["mixing"] = report.to_dict()
        if args.empirical:
            decay = measure_mixing_empirical(vertex, horizon=args.horizon)
            doc["mixing"]["empirical_rho"] = decay.fitted_rate
            edge_chain = build_edge_transition(g, WalkPolicy.BEGRUDGING)
            decay_nbt = measure_mixing_empirical(edge_chain,
                                                 horizon=args.horizon)
            doc["mixing"]["empirical_rho_nbt"] = decay_nbt.fitted_rate
    elif args.empirical and ergo.ergodic:
        doc["mixing"] = mixing_rates(g, require_regular=False,
                                     horizon=args.horizon).to_dict()
    text = json.dumps(doc, indent=2, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_plot(args) -> int:
    out = emit_plot(args.csv, args.x, args.out, panel_by=args.panel_by)
    print(f"wrote {out}")
    return 0


def _add_embed_flags(parser, dim_default=50, window_default=8):
    parser.add_argument("--dim", type=int, default=dim_default)
    parser.add_argument("--window", type=int, default=window_default)
    parser.add_argument("--negatives", type=int, default=5)
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--lr-initial", type=float, default=0.025)
    parser.add_argument("--lr-final", type=float, default=0.0001)
    parser.add_argument("--workers", type=int, default=1,
                        help="embedding worker threads (>1 is non-deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkcluster",
        description="Graph clustering via random-walk node embeddings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a planted-partition graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--separation", "--lam", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-edges", required=True)
    p.add_argument("--out-labels")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("walk", help="generate a walk corpus")
    p.add_argument("--edges", required=True)
    p.add_argument("--policy", choices=sorted(POLICIES), default="begrudging")
    p.add_argument("--walks-per-node", type=int, default=10)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_walk)

    p = sub.add_parser("embed", help="train embeddings from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--n", type=int, help="node count (default: max id + 1)")
    p.add_argument("--seed", type=int, default=0)
    _add_embed_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("cluster", help="k-means on an embedding file")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--edges", help="mark degree-0 nodes untrained before "
                                   "fitting")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("score", help="CCR and NMI of predicted labels")
    p.add_argument("--true", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--mask-isolated", action="store_true")
    p.add_argument("--edges")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("pipeline", help="walks + embedding + k-means")
    p.add_argument("--edges", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--true")
    p.add_argument("--policy", choices=sorted(POLICIES), default="begrudging")
    p.add_argument("--walks-per-node", type=int, default=20)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--mask-isolated", action="store_true")
    _add_embed_flags(p, window_default=5)
    p.add_argument("--out-labels")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("sweep", help="run an experiment sweep to CSV")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="override config seed")
    p.add_argument("--trials", type=int, help="override config trials")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--embed-workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("spectral", help="stochasticity checks and mixing rates")
    p.add_argument("--edges")
    p.add_argument("--regular-n", type=int)
    p.add_argument("--regular-d", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--empirical", action="store_true",
                   help="also measure decay rates from the chain itself")
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("plot", help="render a sweep CSV as an SVG chart")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--panel-by")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
