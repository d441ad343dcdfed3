"""Walks -> embedding -> k-means pipeline, plus sweep harness with CSV output."""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cluster import KmeansParams, cluster_embedding
from .embed import EmbeddingMatrix, SgnsParams, train_sgns
from .graph import Graph, SbmParams, generate_sbm
from .metrics import MetricsReport, score
from .walks import WalkParams, WalkPolicy, build_corpus

RESULT_COLUMNS = ("arm", "n", "k", "c", "lambda", "l", "r", "w", "trial",
                  "ccr", "nmi", "wall_time_seconds")


@dataclass
class PipelineResult:
    labels: np.ndarray
    report: MetricsReport | None
    stage_seconds: dict[str, float]
    embedding: EmbeddingMatrix


def run_pipeline(g: Graph, k: int, walk: WalkParams, embed: SgnsParams,
                 cluster: KmeansParams, true_labels: np.ndarray | None = None,
                 mask_isolated: bool = False,
                 embed_workers: int = 1) -> PipelineResult:
    """Cluster a graph into k communities from walk-trained embeddings."""
    if k < 2:
        raise ValueError("pipeline needs k >= 2")
    if cluster.k != k:
        cluster = KmeansParams(k, cluster.restarts, cluster.max_iters,
                               cluster.tol, cluster.seed)
    stages: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = build_corpus(g, walk)
    stages["walk"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    emb = train_sgns(corpus, g.n, embed, workers=embed_workers)
    stages["embed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = cluster_embedding(emb, cluster)
    stages["cluster"] = time.perf_counter() - t0

    report = None
    if true_labels is not None:
        mask = g.degrees() > 0 if mask_isolated else None
        report = score(true_labels, result.labels, mask=mask)
    return PipelineResult(result.labels, report, stages, emb)


@dataclass(frozen=True)
class ArmConfig:
    """One algorithm arm of a sweep; walk_lengths is itself sweepable."""

    name: str
    policy: WalkPolicy
    walks_per_node: int
    walk_lengths: tuple[int, ...]
    window: int


DEFAULT_ARMS = (
    ArmConfig("BT", WalkPolicy.SIMPLE, 10, (60,), 8),
    ArmConfig("NBT", WalkPolicy.BEGRUDGING, 20, (10,), 5),
)


@dataclass
class ExperimentConfig:
    n_values: tuple[int, ...] = (1000,)
    k_values: tuple[int, ...] = (2,)
    c_values: tuple[float, ...] = (10.0,)
    separation_values: tuple[float, ...] = (0.9,)
    arms: tuple[ArmConfig, ...] = DEFAULT_ARMS
    dim: int = 50
    negatives: int = 5
    epochs: int = 5
    lr_initial: float = 0.025
    lr_final: float = 0.0001
    restarts: int = 10
    max_iters: int = 300
    tol: float = 1e-6
    trials: int = 1
    seed: int = 0
    mask_isolated: bool = False
    record_timing: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        sbm = raw.get("sbm", {})
        sep = sbm.get("separation", sbm.get("lambda", [0.9]))
        arms = []
        for spec_arm in raw.get("arms", []):
            lengths = spec_arm["walk_length"]
            if isinstance(lengths, (int, float)):
                lengths = [lengths]
            arms.append(ArmConfig(
                spec_arm["name"], WalkPolicy(spec_arm["policy"]),
                int(spec_arm["walks_per_node"]),
                tuple(int(x) for x in lengths), int(spec_arm["window"])))
        embed = raw.get("embed", {})
        cluster = raw.get("cluster", {})
        return cls(
            n_values=tuple(int(x) for x in sbm.get("n", [1000])),
            k_values=tuple(int(x) for x in sbm.get("k", [2])),
            c_values=tuple(float(x) for x in sbm.get("c", [10.0])),
            separation_values=tuple(float(x) for x in sep),
            arms=tuple(arms) or DEFAULT_ARMS,
            dim=int(embed.get("dim", 50)),
            negatives=int(embed.get("negatives", 5)),
            epochs=int(embed.get("epochs", 5)),
            lr_initial=float(embed.get("lr_initial", 0.025)),
            lr_final=float(embed.get("lr_final", 0.0001)),
            restarts=int(cluster.get("restarts", 10)),
            max_iters=int(cluster.get("max_iters", 300)),
            tol=float(cluster.get("tol", 1e-6)),
            trials=int(raw.get("trials", 1)),
            seed=int(raw.get("seed", 0)),
            mask_isolated=bool(raw.get("mask_isolated", False)),
            record_timing=bool(raw.get("record_timing", True)),
        )

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class SweepCell:
    arm: ArmConfig
    n: int
    k: int
    c: float
    separation: float
    walk_length: int
    trial: int

    def key(self) -> tuple:
        return (self.arm.name, self.n, self.k, repr(self.c),
                repr(self.separation), self.walk_length,
                self.arm.walks_per_node, self.arm.window, self.trial)

    def key_string(self) -> str:
        return "|".join(str(part) for part in self.key())


def _cells(config: ExperimentConfig) -> list[SweepCell]:
    cells = []
    for n in config.n_values:
        for k in config.k_values:
            for c in config.c_values:
                for sep in config.separation_values:
                    for arm in config.arms:
                        for length in arm.walk_lengths:
                            for trial in range(config.trials):
                                cells.append(SweepCell(arm, n, k, c, sep,
                                                       length, trial))
    return cells


def _cell_seeds(master_seed: int, cell: SweepCell) -> tuple[int, int, int, int]:
    digest = hashlib.sha256(cell.key_string().encode()).digest()
    words = np.frombuffer(digest[:16], dtype=np.uint32)
    root = np.random.SeedSequence(entropy=[master_seed, *words.tolist()])
    return tuple(int(child.generate_state(1)[0]) for child in root.spawn(4))


def run_cell(config: ExperimentConfig, cell: SweepCell,
             embed_workers: int = 1) -> "ResultRow":
    graph_seed, walk_seed, embed_seed, cluster_seed = _cell_seeds(config.seed,
                                                                  cell)
    t0 = time.perf_counter()
    g, truth = generate_sbm(SbmParams(cell.n, cell.k, cell.c, cell.separation,
                                      seed=graph_seed))
    result = run_pipeline(
        g, cell.k,
        WalkParams(cell.arm.walks_per_node, cell.walk_length,
                   cell.arm.policy, seed=walk_seed),
        SgnsParams(config.dim, cell.arm.window, config.negatives,
                   config.epochs, config.lr_initial, config.lr_final,
                   seed=embed_seed),
        KmeansParams(cell.k, config.restarts, config.max_iters, config.tol,
                     seed=cluster_seed),
        true_labels=truth, mask_isolated=config.mask_isolated,
        embed_workers=embed_workers)
    wall = time.perf_counter() - t0 if config.record_timing else 0.0
    assert result.report is not None
    return ResultRow(cell.arm.name, cell.n, cell.k, cell.c, cell.separation,
                     cell.walk_length, cell.arm.walks_per_node,
                     cell.arm.window, cell.trial, result.report.ccr,
                     result.report.nmi, wall)


@dataclass
class ResultRow:
    arm: str
    n: int
    k: int
    c: float
    separation: float
    walk_length: int
    walks_per_node: int
    window: int
    trial: int
    ccr: float
    nmi: float
    wall_time_seconds: float

    def key(self) -> tuple:
        return (self.arm, self.n, self.k, repr(self.c), repr(self.separation),
                self.walk_length, self.walks_per_node, self.window, self.trial)

    def to_csv(self) -> str:
        return ",".join([
            self.arm, str(self.n), str(self.k), repr(self.c),
            repr(self.separation), str(self.walk_length),
            str(self.walks_per_node), str(self.window), str(self.trial),
            repr(self.ccr), repr(self.nmi),
            f"{self.wall_time_seconds:.6f}",
        ])


def _existing_keys(path) -> set[tuple]:
    keys = set()
    try:
        fh = open(path)
    except FileNotFoundError:
        return keys
    with fh:
        header = fh.readline().strip()
        if header != ",".join(RESULT_COLUMNS):
            raise ValueError(f"{path} exists but is not a sweep results file")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != len(RESULT_COLUMNS):
                continue
            keys.add((parts[0], int(parts[1]), int(parts[2]),
                      repr(float(parts[3])), repr(float(parts[4])),
                      int(parts[5]), int(parts[6]), int(parts[7]),
                      int(parts[8])))
    return keys


def run_sweep(config: ExperimentConfig, out_path, workers: int = 1,
              embed_workers: int = 1) -> int:
    """Run all sweep cells, appending one CSV row per (cell, trial).

    Rows already present in the output file are skipped, so interrupted
    sweeps can resume. Cells may run on several worker threads; rows are
    still written in the canonical cell order so that identical configs
    produce identical files.
    """
    cells = [c for c in _cells(config)]
    done = _existing_keys(out_path)
    pending = [c for c in cells if c.key() not in done]
    new_file = not done
    try:
        with open(out_path) as fh:
            if not fh.readline():
                new_file = True
    except FileNotFoundError:
        new_file = True

    written = 0
    with open(out_path, "a") as fh:
        if new_file:
            fh.write(",".join(RESULT_COLUMNS) + "\n")
            fh.flush()
        if workers <= 1:
            for cell in pending:
                fh.write(run_cell(config, cell, embed_workers).to_csv() + "\n")
                fh.flush()
                written += 1
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_cell, config, cell, embed_workers)
                           for cell in pending]
                for future in futures:
                    fh.write(future.result().to_csv() + "\n")
                    fh.flush()
                    written += 1
    return written
