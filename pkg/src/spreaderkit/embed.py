"""Second-order graph embeddings trained by SGD with negative sampling.

Each SGD step samples an edge (u, v) uniformly, draws K noise vertices from
the out-degree^0.75 distribution, and ascends the log-sigmoid objective

    log s(vert_u . ctx_v) + sum_k log s(-vert_u . ctx_wk)

updating the vertex vector of u and the context vectors of v and the noise
vertices. The learning rate decays linearly with samples consumed down to a
floor of initial_lr * 1e-4. Vertex vectors are the exported features.

Training is single-threaded deterministic by default; with n_workers > 1
updates are applied racily over shared arrays (hogwild) and only statistical
convergence is guaranteed.
"""

from __future__ import annotations

import logging
import sys
import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import FollowGraph, alias_build, noise_distribution

log = logging.getLogger(__name__)

LR_FLOOR_RATIO = 1e-4


class ConfigError(ValueError):
    pass


@dataclass
class TrainConfig:
    dim: int = 16
    total_samples: int = 1_000_000
    negatives: int = 5
    initial_lr: float = 0.025
    seed: int = 0
    n_workers: int = 1

    def validate(self) -> None:
        if self.dim <= 0:
            raise ConfigError("dim must be positive")
        if self.total_samples <= 0:
            raise ConfigError("total_samples must be positive")
        if self.negatives <= 0:
            raise ConfigError("negatives must be positive")
        if self.initial_lr <= 0:
            raise ConfigError("initial_lr must be positive")
        if self.n_workers <= 0:
            raise ConfigError("n_workers must be positive")


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def edge_loss_and_grad(u_vec: np.ndarray, ctx_vecs: np.ndarray, labels: np.ndarray):
    """Loss and analytic gradients for one (edge, noise set) step.

    ``ctx_vecs`` holds the context vectors of the positive target (label 1)
    and the noise vertices (label 0), one row each. Returns
    (loss, grad_u, grad_ctx); loss is the negated log-sigmoid objective, so
    gradients point uphill in loss. Reference implementation in float64,
    used by the training kernel's correctness tests.
    """
    scores = ctx_vecs @ u_vec
    sig = sigmoid(scores)
    eps = 1e-300
    loss = -np.sum(labels * np.log(sig + eps) + (1 - labels) * np.log(1 - sig + eps))
    coef = sig - labels  # d loss / d score
    grad_u = ctx_vecs.T @ coef
    grad_ctx = np.outer(coef, u_vec)
    return loss, grad_u, grad_ctx


@njit(cache=True, nogil=True)
def _xorshift(state: np.uint64) -> np.uint64:
    state ^= state << np.uint64(13)
    state ^= state >> np.uint64(7)
    state ^= state << np.uint64(17)
    return state


@njit(cache=True, nogil=True)
def _sgd_chunk(vert, ctx, edge_src, edge_dst, noise_prob, noise_alias,
               n_samples, n_negatives, lr0, samples_done, decay_span,
               rng_state):
    """Run n_samples SGD steps; returns (summed loss, new rng state)."""
    m = edge_src.shape[0]
    n = noise_prob.shape[0]
    dim = vert.shape[1]
    state = rng_state
    total_loss = 0.0
    inv_2_64 = 1.0 / 18446744073709551616.0
    grad_u = np.empty(dim, dtype=np.float32)
    for s in range(n_samples):
        progress = (samples_done + s) / decay_span
        decayed = 1.0 - progress
        if decayed < LR_FLOOR_RATIO:
            decayed = LR_FLOOR_RATIO
        lr = lr0 * decayed

        state = _xorshift(state)
        e = np.int64(state % np.uint64(m))
        u = edge_src[e]
        for d in range(dim):
            grad_u[d] = 0.0
        for k in range(n_negatives + 1):
            if k == 0:
                target = edge_dst[e]
                label = 1.0
            else:
                state = _xorshift(state)
                i = np.int64(state % np.uint64(n))
                state = _xorshift(state)
                r = np.float64(state) * inv_2_64
                target = i if r < noise_prob[i] else noise_alias[i]
                label = 0.0
            score = 0.0
            for d in range(dim):
                score += np.float64(vert[u, d]) * np.float64(ctx[target, d])
            if score > 30.0:
                sig = 1.0
            elif score < -30.0:
                sig = 0.0
            else:
                sig = 1.0 / (1.0 + np.exp(-score))
            if label > 0.5:
                total_loss += -np.log(sig + 1e-12)
            else:
                total_loss += -np.log(1.0 - sig + 1e-12)
            g = np.float32(lr * (label - sig))
            for d in range(dim):
                grad_u[d] += g * ctx[target, d]
                ctx[target, d] += g * vert[u, d]
        for d in range(dim):
            vert[u, d] += grad_u[d]
    return total_loss, state


def _seed_state(seed: int, stream: int) -> np.uint64:
    # splitmix64 to spread nearby seeds into distinct xorshift states
    mask = (1 << 64) - 1
    z = (seed + (stream + 1) * 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    z = z ^ (z >> 31)
    return np.uint64(z | 1)


@dataclass
class TrainResult:
    vertex: np.ndarray  # (n_nodes, dim) float32
    context: np.ndarray
    chunk_losses: list  # running average loss per sample, per chunk
    n_untrained: int  # nodes with no out-edges (vertex vector never updated)


def train_line2(graph: FollowGraph, cfg: TrainConfig,
                n_chunks: int = 50, progress: bool = False) -> TrainResult:
    """Train second-order embeddings over the follower graph."""
    cfg.validate()
    if graph.n_edges == 0:
        raise ConfigError("graph has no edges")
    edge_src, edge_dst = graph.edge_array()
    noise = alias_build(noise_distribution(graph))

    rng = np.random.default_rng(cfg.seed)
    n, dim = graph.n_nodes, cfg.dim
    bound = 0.5 / dim
    vert = rng.uniform(-bound, bound, size=(n, dim)).astype(np.float32)
    ctx = np.zeros((n, dim), dtype=np.float32)

    n_untrained = int(np.sum(graph.out_degree() == 0))
    if n_untrained:
        log.info("embed: %d nodes have no out-edges; their vertex vectors "
                 "stay at initialization", n_untrained)

    chunk_losses: list[float] = []

    def run_worker(worker: int, samples: int, losses: list[float]) -> None:
        state = _seed_state(cfg.seed, worker)
        done = 0
        per_chunk = max(1, samples // n_chunks)
        while done < samples:
            take = min(per_chunk, samples - done)
            loss, state = _sgd_chunk(
                vert, ctx, edge_src, edge_dst, noise.prob, noise.alias,
                take, cfg.negatives, cfg.initial_lr, done, samples, state)
            # the kernel boxes the state as a Python int; re-wrap so values
            # above 2**63 - 1 don't overflow int64 on the next call
            state = np.uint64(state)
            done += take
            losses.append(loss / (take * (cfg.negatives + 1)))
            if progress and worker == 0:
                lr_now = cfg.initial_lr * max(1 - done / samples, LR_FLOOR_RATIO)
                print(f"embed: {done}/{samples} samples lr={lr_now:.6f} "
                      f"loss={losses[-1]:.4f}", file=sys.stderr)

    if cfg.n_workers == 1:
        run_worker(0, cfg.total_samples, chunk_losses)
    else:
        per = cfg.total_samples // cfg.n_workers
        shares = [per] * cfg.n_workers
        shares[0] += cfg.total_samples - per * cfg.n_workers
        loss_lists: list[list[float]] = [[] for _ in range(cfg.n_workers)]
        threads = [
            threading.Thread(target=run_worker, args=(w, shares[w], loss_lists[w]))
            for w in range(cfg.n_workers)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for chunk in zip(*[ls for ls in loss_lists if ls]):
            chunk_losses.append(float(np.mean(chunk)))

    if not np.all(np.isfinite(vert)) or not np.all(np.isfinite(ctx)):
        raise RuntimeError("training produced non-finite embeddings")
    return TrainResult(vertex=vert, context=ctx, chunk_losses=chunk_losses,
                       n_untrained=n_untrained)


def export_embeddings(matrix: np.ndarray, ids: list[str], path) -> None:
    """Stream the embedding matrix to CSV (header node_id,e0..e{dim-1})."""
    n, dim = matrix.shape
    if len(ids) != n:
        raise ValueError("id list length does not match matrix rows")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id," + ",".join(f"e{j}" for j in range(dim)) + "\n")
        for i in range(n):
            # unique=True emits the shortest exact-roundtrip representation
            # (of the float64 value, which is what import parses)
            row = ",".join(np.format_float_scientific(np.float64(x), unique=True)
                           for x in matrix[i])
            fh.write(f"{ids[i]},{row}\n")


def import_embeddings(path) -> tuple[np.ndarray, list[str]]:
    ids: list[str] = []
    rows: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[0] != "node_id" or header[1:] != [f"e{j}" for j in range(len(header) - 1)]:
            raise ValueError(f"{path}: unexpected embedding header")
        dim = len(header) - 1
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != dim + 1:
                raise ValueError(
                    f"{path}: line {lineno}: expected {dim} values, got {len(parts) - 1}")
            ids.append(parts[0])
            rows.append(np.asarray(parts[1:], dtype=np.float64))
    if not rows:
        raise ValueError(f"{path}: no embedding rows")
    return np.vstack(rows), ids
