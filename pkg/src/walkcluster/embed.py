"""Skip-gram-with-negative-sampling embeddings trained from walk corpora.

The trainer streams (center, context) pairs from the sentences, ascending
log sigmoid(u_c . v_ctx) + sum_k log sigmoid(-u_c . v_neg_k) by plain SGD
with a linearly decaying learning rate. Negatives are drawn from the
corpus unigram distribution raised to the 3/4 power. The inner loop is
numba-compiled; with a single worker, training is bit-reproducible for a
fixed seed.

Internally all state is indexed by first-appearance rank of a node in the
corpus rather than by node id, so relabeling the nodes of a corpus
permutes the output rows and changes nothing else.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .walks import WalkCorpus

SIGMOID_CLAMP = 6.0


@dataclass(frozen=True)
class SgnsParams:
    dim: int = 50
    window: int = 8
    negatives: int = 5
    epochs: int = 5
    lr_initial: float = 0.025
    lr_final: float = 0.0001
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (self.lr_initial >= self.lr_final > 0):
            raise ValueError("need lr_initial >= lr_final > 0")


@dataclass
class EmbeddingMatrix:
    """Per-node vectors; rows of nodes absent from the corpus are untrained."""

    vectors: np.ndarray
    trained: np.ndarray
    epoch_losses: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def trained_rows(self) -> np.ndarray:
        return self.vectors[self.trained]


def sigmoid(x):
    """Logistic function with input magnitude clamped to SIGMOID_CLAMP."""
    return 1.0 / (1.0 + np.exp(-np.clip(x, -SIGMOID_CLAMP, SIGMOID_CLAMP)))


def pair_objective(u: np.ndarray, v_ctx: np.ndarray, v_negs: np.ndarray) -> float:
    """SGNS objective for one positive pair plus its negative samples."""
    val = np.log(sigmoid(float(u @ v_ctx)))
    for v_neg in np.atleast_2d(v_negs):
        val += np.log(sigmoid(-float(u @ v_neg)))
    return float(val)


def pair_gradients(u: np.ndarray, v_ctx: np.ndarray, v_negs: np.ndarray):
    """Analytic gradients of pair_objective w.r.t. u, v_ctx, and each v_neg."""
    v_negs = np.atleast_2d(v_negs)
    pos_coef = 1.0 - sigmoid(float(u @ v_ctx))
    grad_u = pos_coef * v_ctx
    grad_ctx = pos_coef * u
    grad_negs = np.empty_like(v_negs)
    for k, v_neg in enumerate(v_negs):
        neg_coef = -sigmoid(float(u @ v_neg))
        grad_u = grad_u + neg_coef * v_neg
        grad_negs[k] = neg_coef * u
    return grad_u, grad_ctx, grad_negs


@njit(cache=True, inline="always")
def _splitmix64(z):
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _next_uniform(state):
    # xorshift64*: returns (new_state, float64 in [0, 1)).
    state ^= state >> np.uint64(12)
    state ^= (state << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    state ^= state >> np.uint64(27)
    out = (state * np.uint64(0x2545F4914F6CDD1D)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return state, (out >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _pair_update(input_vecs, context_vecs, center, context, negs, n_negs,
                 alpha, scratch, track_loss):
    """One SGD ascent step on the pair objective; returns the pair loss.

    Context rows are updated with the pre-update center row and the center
    row with the accumulated pre-update context rows, so the step equals
    one exact gradient step at the current point.
    """
    dim = input_vecs.shape[1]
    loss = 0.0
    f = 0.0
    for d in range(dim):
        f += input_vecs[center, d] * context_vecs[context, d]
    if f > SIGMOID_CLAMP:
        f = SIGMOID_CLAMP
    elif f < -SIGMOID_CLAMP:
        f = -SIGMOID_CLAMP
    sig = 1.0 / (1.0 + np.exp(-f))
    if track_loss:
        loss -= np.log(sig)
    g = (1.0 - sig) * alpha
    for d in range(dim):
        scratch[d] = g * context_vecs[context, d]
    for d in range(dim):
        context_vecs[context, d] += g * input_vecs[center, d]
    for k in range(n_negs):
        neg = negs[k]
        f = 0.0
        for d in range(dim):
            f += input_vecs[center, d] * context_vecs[neg, d]
        if f > SIGMOID_CLAMP:
            f = SIGMOID_CLAMP
        elif f < -SIGMOID_CLAMP:
            f = -SIGMOID_CLAMP
        sig = 1.0 / (1.0 + np.exp(-f))
        if track_loss:
            loss -= np.log(1.0 - sig)
        g = -sig * alpha
        for d in range(dim):
            scratch[d] += g * context_vecs[neg, d]
        for d in range(dim):
            context_vecs[neg, d] += g * input_vecs[center, d]
    for d in range(dim):
        input_vecs[center, d] += scratch[d]
    return loss


@njit(cache=True, nogil=True)
def _train_sentences(input_vecs, context_vecs, tokens, offsets, s_lo, s_hi,
                     window, negatives, noise_cdf, lr_initial, lr_final,
                     pairs_before, total_pairs, rng_state, track_loss):
    n_ranks = noise_cdf.shape[0]
    scratch = np.empty(input_vecs.shape[1])
    negs = np.empty(negatives, dtype=np.int64)
    loss = 0.0
    pair_idx = pairs_before
    for s in range(s_lo, s_hi):
        start = offsets[s]
        end = offsets[s + 1]
        for p in range(start, end):
            center = tokens[p]
            q_lo = p - window
            if q_lo < start:
                q_lo = start
            q_hi = p + window
            if q_hi > end - 1:
                q_hi = end - 1
            for q in range(q_lo, q_hi + 1):
                if q == p:
                    continue
                context = tokens[q]
                alpha = lr_initial + (lr_final - lr_initial) * (pair_idx / total_pairs)
                if alpha < lr_final:
                    alpha = lr_final
                n_ok = 0
                for _k in range(negatives):
                    # redraw a negative that collides with the context;
                    # give up after a bounded number of tries (tiny corpora)
                    for _try in range(100):
                        rng_state, u01 = _next_uniform(rng_state)
                        r = np.searchsorted(noise_cdf, u01, side="right")
                        if r >= n_ranks:
                            r = n_ranks - 1
                        if r != context:
                            negs[n_ok] = r
                            n_ok += 1
                            break
                loss += _pair_update(input_vecs, context_vecs, center, context,
                                     negs, n_ok, alpha, scratch, track_loss)
                pair_idx += 1
    return loss


def _flatten(corpus: WalkCorpus) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.array([len(s) for s in corpus.sentences], dtype=np.int64)
    offsets = np.zeros(lengths.size + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    tokens = np.empty(offsets[-1], dtype=np.int64)
    at = 0
    for sentence in corpus.sentences:
        tokens[at:at + len(sentence)] = sentence
        at += len(sentence)
    return tokens, offsets


def _pairs_per_sentence(lengths: np.ndarray, window: int) -> np.ndarray:
    span = np.minimum(window, np.maximum(lengths - 1, 0))
    return 2 * (span * lengths - span * (span + 1) // 2)


def _mix_seed(seed: int, epoch: int, shard: int) -> np.uint64:
    # _splitmix64 returns a plain Python int when called from the
    # interpreter; keep everything wrapped back into uint64
    state = int(_splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
    state = int(_splitmix64(np.uint64(state ^ (epoch + 1))))
    state = int(_splitmix64(np.uint64(state ^ ((shard + 1) << 32 & 0xFFFFFFFFFFFFFFFF))))
    if state == 0:
        state = 0x9E3779B97F4A7C15
    return np.uint64(state)


def train_sgns(corpus: WalkCorpus, n: int, params: SgnsParams,
               workers: int = 1, track_loss: bool = False) -> EmbeddingMatrix:
    """Train node embeddings from a corpus; returns input vectors.

    With workers=1 the pair stream is processed in order and the result is
    deterministic. With workers>1 sentence shards are trained concurrently
    on shared arrays and racy lost updates are tolerated.
    """
    if not corpus.sentences:
        raise ValueError("corpus is empty")
    tokens, offsets = _flatten(corpus)
    if tokens.size and int(tokens.max()) >= n:
        raise ValueError(f"corpus refers to node {int(tokens.max())} "
                         f"but n={n}")
    if tokens.size and int(tokens.min()) < 0:
        raise ValueError("corpus contains negative node ids")

    # canonical node order: first appearance in the corpus
    uniq, first_pos = np.unique(tokens, return_index=True)
    rank_to_node = uniq[np.argsort(first_pos, kind="stable")]
    n_ranks = rank_to_node.size
    node_to_rank = np.full(n, -1, dtype=np.int64)
    node_to_rank[rank_to_node] = np.arange(n_ranks)
    ranked_tokens = node_to_rank[tokens]

    counts = np.bincount(ranked_tokens, minlength=n_ranks)
    noise = counts.astype(np.float64) ** 0.75
    noise_cdf = np.cumsum(noise)
    noise_cdf /= noise_cdf[-1]
    noise_cdf[-1] = 1.0

    rng = np.random.default_rng(params.seed)
    bound = 0.5 / params.dim
    input_vecs = rng.uniform(-bound, bound, size=(n_ranks, params.dim))
    context_vecs = np.zeros((n_ranks, params.dim))

    lengths = np.diff(offsets)
    pair_counts = _pairs_per_sentence(lengths, params.window)
    prefix_pairs = np.zeros(lengths.size + 1, dtype=np.int64)
    np.cumsum(pair_counts, out=prefix_pairs[1:])
    per_epoch = int(prefix_pairs[-1])
    total_pairs = max(1, per_epoch * params.epochs)

    num_sentences = lengths.size
    epoch_losses = np.zeros(params.epochs)
    for epoch in range(params.epochs):
        epoch_base = epoch * per_epoch
        if workers <= 1:
            epoch_losses[epoch] = _train_sentences(
                input_vecs, context_vecs, ranked_tokens, offsets,
                0, num_sentences, params.window, params.negatives, noise_cdf,
                params.lr_initial, params.lr_final, epoch_base, total_pairs,
                _mix_seed(params.seed, epoch, 0), track_loss)
        else:
            bounds = np.linspace(0, num_sentences, workers + 1).astype(np.int64)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(_train_sentences, input_vecs, context_vecs,
                                ranked_tokens, offsets, int(bounds[w]),
                                int(bounds[w + 1]), params.window,
                                params.negatives, noise_cdf,
                                params.lr_initial, params.lr_final,
                                epoch_base + int(prefix_pairs[bounds[w]]),
                                total_pairs, _mix_seed(params.seed, epoch, w),
                                track_loss)
                    for w in range(workers) if bounds[w] < bounds[w + 1]
                ]
                epoch_losses[epoch] = sum(f.result() for f in futures)

    vectors = np.zeros((n, params.dim))
    vectors[rank_to_node] = input_vecs
    if not np.all(np.isfinite(vectors)):
        raise FloatingPointError("training produced non-finite embeddings")
    trained = np.zeros(n, dtype=bool)
    trained[rank_to_node] = True
    losses = epoch_losses / max(1, per_epoch) if track_loss else None
    return EmbeddingMatrix(vectors, trained, losses)


def write_embedding(emb: EmbeddingMatrix, path) -> None:
    """Text format: header `n dim`, then `node_id x1 ... xdim` per row."""
    with open(path, "w") as fh:
        fh.write(f"{emb.n} {emb.dim}\n")
        for i in range(emb.n):
            row = " ".join(repr(float(x)) for x in emb.vectors[i])
            fh.write(f"{i} {row}\n")


def read_embedding(path) -> EmbeddingMatrix:
    """Read the text format; imported rows are all marked trained."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("embedding file must start with an 'n dim' header")
        n, dim = int(header[0]), int(header[1])
        vectors = np.zeros((n, dim))
        seen = np.zeros(n, dtype=bool)
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            i = int(parts[0])
            if len(parts) != dim + 1:
                raise ValueError(f"row for node {i} has {len(parts) - 1} values, "
                                 f"expected {dim}")
            vectors[i] = [float(x) for x in parts[1:]]
            seen[i] = True
    if not seen.all():
        raise ValueError("embedding file is missing rows for some nodes")
    return EmbeddingMatrix(vectors, np.ones(n, dtype=bool))
