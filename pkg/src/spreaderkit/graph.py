"""Compact directed graph storage (CSR) with alias-method samplers.

Node ids are dense 0..n-1 integers assigned in first-seen order; the
original string ids live in a sidecar list. The binary snapshot format is
documented in docs/graph_format.md.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"SKGR"
VERSION = 1


class GraphError(ValueError):
    pass


@dataclass
class AliasTable:
    """O(1) sampling from a discrete distribution (Vose's method)."""

    prob: np.ndarray  # float64 in [0,1]
    alias: np.ndarray  # int64

    def sample(self, rng: np.random.Generator) -> int:
        i = int(rng.integers(len(self.prob)))
        return i if rng.random() < self.prob[i] else int(self.alias[i])


def alias_build(weights) -> AliasTable:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or len(w) == 0:
        raise GraphError("alias_build: weights must be a nonempty 1-d array")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise GraphError("alias_build: weights must be finite and nonnegative")
    total = w.sum()
    if total <= 0:
        raise GraphError("alias_build: weights sum to zero")
    n = len(w)
    scaled = w * (n / total)
    prob = np.zeros(n)
    alias = np.zeros(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] - (1.0 - scaled[s])
        (small if scaled[l] < 1.0 else large).append(l)
    for i in large:
        prob[i] = 1.0
    for i in small:
        prob[i] = 1.0  # numerical leftovers
    return AliasTable(prob=prob, alias=alias)


def alias_sample(table: AliasTable, rng: np.random.Generator) -> int:
    return table.sample(rng)


class FollowGraph:
    """Immutable directed graph in CSR form.

    An edge (u, v) means u follows v; shares by v expose u.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, ids: list[str],
                 dropped_self_loops: int = 0):
        self.indptr = indptr
        self.indices = indices
        self.ids = ids
        self.id_of = {ext: i for i, ext in enumerate(ids)}
        self.dropped_self_loops = dropped_self_loops

    @property
    def n_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n_nodes)

    def successors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat (src, dst) arrays, one entry per edge, CSR order."""
        src = np.repeat(np.arange(self.n_nodes, dtype=np.int64), self.out_degree())
        return src, self.indices.astype(np.int64)

    def followers_of_map(self) -> dict[str, list[str]]:
        """followee external id -> list of follower external ids."""
        out: dict[str, list[str]] = {}
        for u in range(self.n_nodes):
            fu = self.ids[u]
            for v in self.successors(u):
                out.setdefault(self.ids[v], []).append(fu)
        return out

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            idblob = "\n".join(self.ids).encode("utf-8")
            fh.write(MAGIC)
            fh.write(struct.pack("<IQQQ", VERSION, self.n_nodes, self.n_edges,
                                 len(idblob)))
            fh.write(self.indptr.astype(np.int64).tobytes())
            fh.write(self.indices.astype(np.int64).tobytes())
            fh.write(idblob)

    @classmethod
    def load(cls, path) -> "FollowGraph":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != MAGIC:
                raise GraphError(f"{path}: not a graph snapshot (bad magic)")
            version, n, m, idlen = struct.unpack("<IQQQ", fh.read(28))
            if version != VERSION:
                raise GraphError(f"{path}: unsupported snapshot version {version}")
            indptr = np.frombuffer(fh.read(8 * (n + 1)), dtype=np.int64)
            indices = np.frombuffer(fh.read(8 * m), dtype=np.int64)
            ids = fh.read(idlen).decode("utf-8").split("\n") if idlen else []
        return cls(indptr=indptr.copy(), indices=indices.copy(), ids=ids)


def build_graph(edges: list[tuple[str, str]]) -> FollowGraph:
    """Build an immutable CSR graph from a deduplicated (follower, followee)
    edge list. Self-loops are dropped and counted."""
    if not edges:
        raise GraphError("build_graph: empty edge list")
    id_of: dict[str, int] = {}
    ids: list[str] = []

    def intern(ext: str) -> int:
        i = id_of.get(ext)
        if i is None:
            i = id_of[ext] = len(ids)
            ids.append(ext)
        return i

    src = []
    dst = []
    dropped = 0
    for a, b in edges:
        if a == b:
            dropped += 1
            continue
        src.append(intern(a))
        dst.append(intern(b))
    if not src:
        raise GraphError("build_graph: all edges were self-loops")
    src_arr = np.asarray(src, dtype=np.int64)
    dst_arr = np.asarray(dst, dtype=np.int64)
    n = len(ids)
    order = np.lexsort((dst_arr, src_arr))
    src_arr, dst_arr = src_arr[order], dst_arr[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src_arr + 1, 1)
    np.cumsum(indptr, out=indptr)
    return FollowGraph(indptr=indptr, indices=dst_arr, ids=ids,
                       dropped_self_loops=dropped)


def noise_distribution(graph: FollowGraph, power: float = 0.75) -> np.ndarray:
    """Degree-biased noise weights for negative sampling (out-degree^power)."""
    deg = graph.out_degree().astype(np.float64)
    return deg ** power
