"""Walk transition matrices and mixing-rate analysis.

The simple walk lives on vertices (row-stochastic P with P[u, v] = 1/d_u
on edges). Non-backtracking and begrudgingly backtracking walks are
first-order chains on the 2m directed edges: from edge (u, v) the next
edge is (v, y) with probability 1/(d_v - 1) for y != u, and the
begrudging variant adds a probability-1 return edge (v, u) when d_v = 1.
Both edge chains are doubly stochastic, so their stationary distribution
is uniform over directed edges, while the vertex chain's is degree
proportional.

For a d-regular graph with second-largest adjacency eigenvalue lam2, the
asymptotic per-step decay factors toward stationarity are lam2/d for the
simple walk and (lam2 + sqrt(lam2^2 - 4(d-1))) / (2(d-1)) for the
non-backtracking walk, read as a modulus when the square root turns
imaginary. Rates can also be measured empirically from the decay of
max |P^t(u, v) - pi(v)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components as _strong_components

from .graph import Graph
from .walks import WalkPolicy

DENSE_EIG_CUTOFF = 2000


# ---------------------------------------------------------------------------
# matrix construction
# ---------------------------------------------------------------------------

def adjacency_matrix(g: Graph) -> sp.csr_matrix:
    data = np.ones(g.indices.size)
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))


@dataclass
class VertexTransitionMatrix:
    """Row-stochastic simple-walk matrix; degree-0 rows are all zero."""

    matrix: sp.csr_matrix
    zero_rows: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape


def build_vertex_transition(g: Graph) -> VertexTransitionMatrix:
    degs = g.degrees()
    with np.errstate(divide="ignore"):
        inv = np.where(degs > 0, 1.0 / np.maximum(degs, 1), 0.0)
    data = np.repeat(inv, degs)
    matrix = sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))
    return VertexTransitionMatrix(matrix, np.flatnonzero(degs == 0))


@dataclass
class EdgeTransitionMatrix:
    """Walk chain over directed edges.

    Directed edge ids: the undirected edge {u, v} with u < v and rank e in
    sorted edge order owns ids 2e for (u, v) and 2e+1 for (v, u), so the
    reversal of edge i is always i XOR 1.
    """

    matrix: sp.csr_matrix
    mode: WalkPolicy
    tails: np.ndarray
    heads: np.ndarray

    @property
    def size(self) -> int:
        return self.tails.size


def directed_edge_endpoints(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    e = g.edges()
    tails = np.empty(2 * g.m, dtype=np.int64)
    heads = np.empty(2 * g.m, dtype=np.int64)
    tails[0::2], heads[0::2] = e[:, 0], e[:, 1]
    tails[1::2], heads[1::2] = e[:, 1], e[:, 0]
    return tails, heads


def directed_edge_ids(g: Graph, tails: np.ndarray, heads: np.ndarray) -> np.ndarray:
    """Ids of directed edges (tails[i], heads[i]) under the 2e/2e+1 layout."""
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    e = g.edges()
    keys = e[:, 0] * g.n + e[:, 1]
    lo = np.minimum(tails, heads)
    hi = np.maximum(tails, heads)
    rank = np.searchsorted(keys, lo * g.n + hi)
    if np.any(rank >= keys.size) or np.any(keys[rank] != lo * g.n + hi):
        raise ValueError("some (tail, head) pairs are not edges of the graph")
    return 2 * rank + (tails > heads)


def build_edge_transition(g: Graph, mode: WalkPolicy) -> EdgeTransitionMatrix:
    """Sparse 2m x 2m transition matrix of the requested edge chain."""
    if mode not in (WalkPolicy.NON_BACKTRACKING, WalkPolicy.BEGRUDGING):
        raise ValueError("edge chains exist for the non-backtracking and "
                         "begrudging policies only")
    degs = g.degrees()
    min_required = 2 if mode is WalkPolicy.NON_BACKTRACKING else 1
    bad = np.flatnonzero(degs < min_required)
    if bad.size:
        raise ValueError(f"node {int(bad[0])} has degree {int(degs[bad[0]])}; "
                         f"the {mode.value} edge chain needs minimum degree "
                         f"{min_required}")
    tails, heads = directed_edge_endpoints(g)
    two_m = tails.size

    # directed edges grouped by tail node (CSR-like layout)
    by_tail = np.argsort(tails, kind="stable")
    out_start = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(degs, out=out_start[1:])

    head_deg = degs[heads]
    starts = out_start[heads]
    reps = np.repeat(np.arange(two_m), head_deg)
    offs = np.arange(head_deg.sum()) - np.repeat(np.cumsum(head_deg) - head_deg,
                                                 head_deg)
    cols = by_tail[np.repeat(starts, head_deg) + offs]
    rows = reps
    deg_rep = np.repeat(head_deg, head_deg)

    backtrack = cols == (rows ^ 1)
    if mode is WalkPolicy.BEGRUDGING:
        keep = ~backtrack | (deg_rep == 1)
    else:
        keep = ~backtrack
    with np.errstate(divide="ignore"):
        weights = np.where(deg_rep == 1, 1.0, 1.0 / np.maximum(deg_rep - 1, 1))
    rows, cols, weights = rows[keep], cols[keep], weights[keep]
    matrix = sp.csr_matrix((weights, (rows, cols)), shape=(two_m, two_m))
    return EdgeTransitionMatrix(matrix, mode, tails, heads)


@dataclass
class LaplacianSet:
    """Combinatorial, symmetric-normalized, and random-walk Laplacians."""

    combinatorial: sp.csr_matrix
    sym: sp.csr_matrix
    rw: sp.csr_matrix


def build_laplacians(g: Graph) -> LaplacianSet:
    a = adjacency_matrix(g)
    degs = g.degrees().astype(np.float64)
    lap = sp.diags(degs) - a
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(degs > 0, 1.0 / np.sqrt(np.maximum(degs, 1)), 0.0)
    eye = sp.eye(g.n, format="csr")
    sym = eye - sp.diags(inv_sqrt) @ a @ sp.diags(inv_sqrt)
    rw = eye - build_vertex_transition(g).matrix
    return LaplacianSet(lap.tocsr(), sym.tocsr(), rw.tocsr())


def _as_sparse(matrix) -> sp.csr_matrix:
    if isinstance(matrix, (VertexTransitionMatrix, EdgeTransitionMatrix)):
        return matrix.matrix
    if sp.issparse(matrix):
        return matrix.tocsr()
    return sp.csr_matrix(np.asarray(matrix))


# ---------------------------------------------------------------------------
# chain diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ErgodicityReport:
    irreducible: bool
    aperiodic: bool

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


def _component_period(matrix: sp.csr_matrix, members: np.ndarray) -> int:
    """gcd of cycle lengths within one strongly connected component.

    BFS from one member assigns levels; every internal arc (u, v)
    contributes gcd(level[u] + 1 - level[v]). Returns 0 when the
    component has no internal arcs (no cycles at all).
    """
    inside = np.zeros(matrix.shape[0], dtype=bool)
    inside[members] = True
    level = {int(members[0]): 0}
    queue = [int(members[0])]
    period = 0
    indptr, indices = matrix.indptr, matrix.indices
    while queue:
        nxt = []
        for u in queue:
            for v in indices[indptr[u]:indptr[u + 1]]:
                v = int(v)
                if not inside[v]:
                    continue
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
                else:
                    period = math.gcd(period, level[u] + 1 - level[v])
        queue = nxt
    return abs(period)


def check_ergodicity(matrix) -> ErgodicityReport:
    """Irreducibility via strong connectivity; aperiodicity via cycle gcd.

    A chain is reported aperiodic when every strongly connected component
    has cycle gcd 1; states with no return path make it non-aperiodic.
    """
    m = _as_sparse(matrix)
    pattern = sp.csr_matrix((np.ones(m.nnz), m.indices, m.indptr),
                            shape=m.shape)
    n_comp, labels = _strong_components(pattern, directed=True,
                                        connection="strong")
    irreducible = n_comp == 1
    aperiodic = True
    for comp in range(n_comp):
        members = np.flatnonzero(labels == comp)
        if _component_period(m, members) != 1:
            aperiodic = False
            break
    return ErgodicityReport(irreducible, aperiodic)


def check_doubly_stochastic(matrix, tol: float = 1e-12) -> tuple[bool, float]:
    """True iff every row and column sum is within ``tol`` of 1."""
    m = _as_sparse(matrix)
    row_dev = np.abs(np.asarray(m.sum(axis=1)).ravel() - 1.0).max()
    col_dev = np.abs(np.asarray(m.sum(axis=0)).ravel() - 1.0).max()
    dev = float(max(row_dev, col_dev))
    return dev <= tol, dev


def stationary_distribution(matrix, tol: float = 1e-10,
                            max_iters: int = 500_000) -> np.ndarray:
    """Left fixed vector of an ergodic chain via power iteration.

    Iterates x <- x P with L1 normalization until the L1 residual drops
    below ``tol``.
    """
    m = _as_sparse(matrix)
    report = check_ergodicity(m)
    if not report.ergodic:
        raise ValueError("chain is not ergodic "
                         f"(irreducible={report.irreducible}, "
                         f"aperiodic={report.aperiodic})")
    mt = m.T.tocsr()
    x = np.full(m.shape[0], 1.0 / m.shape[0])
    for _ in range(max_iters):
        x_next = mt @ x
        x_next /= x_next.sum()
        if np.abs(x_next - x).sum() < tol:
            return x_next
        x = x_next
    raise RuntimeError(f"power iteration did not reach residual {tol} "
                       f"in {max_iters} iterations")


# ---------------------------------------------------------------------------
# eigenvalues and mixing rates
# ---------------------------------------------------------------------------

def second_eigenvalue(matrix, kind: str) -> float:
    """Second-largest eigenvalue of an adjacency or transition matrix.

    kind="adjacency": the matrix is symmetric; returns the signed
    second-largest eigenvalue.
    kind="transition": drops one eigenvalue closest to 1 and returns the
    largest remaining eigenvalue, signed when real, else its modulus.
    Dense solve below DENSE_EIG_CUTOFF, restarted Arnoldi/Lanczos above.
    """
    m = _as_sparse(matrix)
    if m.shape[0] < 2:
        raise ValueError("matrix dimension must be at least 2")
    if kind == "adjacency":
        if m.shape[0] < DENSE_EIG_CUTOFF:
            vals = np.linalg.eigvalsh(m.toarray())
            return float(vals[-2])
        vals = spla.eigsh(m.asfptype(), k=2, which="LA",
                          return_eigenvectors=False, tol=1e-10)
        return float(np.sort(vals)[0])
    if kind != "transition":
        raise ValueError("kind must be 'adjacency' or 'transition'")
    if m.shape[0] < DENSE_EIG_CUTOFF:
        vals = np.linalg.eigvals(m.toarray())
    else:
        k = min(8, m.shape[0] - 2)
        vals = spla.eigs(m.asfptype(), k=k, which="LM",
                         return_eigenvectors=False, tol=1e-10)
    drop = int(np.argmin(np.abs(vals - 1.0)))
    rest = np.delete(vals, drop)
    second = rest[int(np.argmax(np.abs(rest)))]
    if abs(second.imag) < 1e-9:
        return float(second.real)
    return float(abs(second))


def analytic_mixing_rates(lambda2: float, d: int) -> tuple[float, float, str]:
    """Regular-graph decay factors for the simple and non-backtracking walks.

    Returns (rate_simple, rate_nbt, regime). Below the 2*sqrt(d-1)
    threshold the non-backtracking root is complex and its modulus
    sqrt(d-1)/(d-1) is returned.
    """
    if d < 2:
        raise ValueError("analytic rates need degree >= 2")
    rho = lambda2 / d
    disc = lambda2 * lambda2 - 4.0 * (d - 1)
    if disc >= 0.0:
        rho_nbt = (lambda2 + math.sqrt(disc)) / (2.0 * (d - 1))
        regime = "at_or_above_threshold"
    else:
        rho_nbt = math.sqrt(d - 1.0) / (d - 1.0)
        regime = "below_threshold"
    return rho, rho_nbt, regime


@dataclass
class MixingReport:
    rho: float
    rho_nbt: float
    lambda2: float
    regime: str
    ratio: float
    degree: int | None = None
    lambda_bottom: float | None = None
    rho_modulus: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def mixing_rates(g: Graph, require_regular: bool = True,
                 horizon: int = 400) -> MixingReport:
    """Mixing report for a graph.

    On a regular graph the rates come from the closed-form eigenvalue
    expressions; otherwise (require_regular=False) both chains are run
    and the rates measured from their empirical decay.
    """
    degs = g.degrees()
    if g.m == 0:
        raise ValueError("graph has no edges")
    regular = int(degs.min()) == int(degs.max())
    a = adjacency_matrix(g)
    lam2 = second_eigenvalue(a, "adjacency")
    if regular:
        d = int(degs[0])
        rho, rho_nbt, regime = analytic_mixing_rates(lam2, d)
        vals = np.linalg.eigvalsh(a.toarray()) if g.n < DENSE_EIG_CUTOFF else None
        lam_bottom = float(vals[0]) if vals is not None else None
        rho_mod = max(abs(lam2), abs(lam_bottom)) / d if lam_bottom is not None else None
        return MixingReport(rho, rho_nbt, lam2, regime,
                            rho_nbt / rho if rho != 0 else math.inf,
                            degree=d, lambda_bottom=lam_bottom,
                            rho_modulus=rho_mod)
    if require_regular:
        raise ValueError(f"graph is not regular (degrees span "
                         f"{int(degs.min())}..{int(degs.max())})")
    vertex = measure_mixing_empirical(build_vertex_transition(g),
                                      horizon=horizon)
    edge = measure_mixing_empirical(
        build_edge_transition(g, WalkPolicy.BEGRUDGING), horizon=horizon)
    rho, rho_nbt = vertex.fitted_rate, edge.fitted_rate
    return MixingReport(rho, rho_nbt, lam2, "empirical",
                        rho_nbt / rho if rho != 0 else math.inf)


@dataclass
class MixingDecay:
    """max |P^t(u, v) - pi(v)| against t, plus rate estimates."""

    steps: np.ndarray
    deviations: np.ndarray
    stepwise_rates: np.ndarray = field(repr=False)
    fitted_rate: float = math.nan

    def __post_init__(self):
        if math.isnan(self.fitted_rate):
            self.fitted_rate = float(self.stepwise_rates[-1])


def measure_mixing_empirical(matrix, horizon: int = 200,
                             floor: float = 1e-12,
                             fit_window: int = 20) -> MixingDecay:
    """Track worst-case deviation from stationarity over ``horizon`` steps.

    Starts the chain from every state at once (rows of the identity) and
    fits log-deviation against t over the final window, which removes the
    constant prefactor that biases the raw deviation^(1/t) estimate.
    """
    m = _as_sparse(matrix)
    pi = stationary_distribution(m)
    mt = m.T.tocsr()
    x = np.eye(m.shape[0])
    steps, devs = [], []
    for t in range(1, horizon + 1):
        x = (mt @ x.T).T
        dev = float(np.abs(x - pi[None, :]).max())
        steps.append(t)
        devs.append(dev)
        if dev < floor:
            break
    steps_arr = np.array(steps)
    devs_arr = np.array(devs)
    usable = devs_arr > floor * 10
    stepwise = devs_arr ** (1.0 / steps_arr)
    idx = np.flatnonzero(usable)
    if idx.size >= 2:
        tail = idx[-min(fit_window, idx.size):]
        slope = np.polyfit(steps_arr[tail], np.log(devs_arr[tail]), 1)[0]
        fitted = float(np.exp(slope))
    else:
        fitted = float(stepwise[-1])
    return MixingDecay(steps_arr, devs_arr, stepwise, fitted)
