"""Seeded two-block stochastic block model sampling and degree statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, TextIO

import numpy as np

__all__ = [
    "SbmParams",
    "Graph",
    "DegreeStats",
    "sample_sbm",
    "expected_stats",
    "degree_concentration",
    "write_edge_list",
    "read_edge_list",
]


class InvalidParameters(ValueError):
    """Raised when SBM parameters violate their constraints."""


@dataclass(frozen=True)
class SbmParams:
    """Parameters of a two-block SBM with equal block sizes.

    ``p`` is the intra-block connection probability, ``q`` the inter-block
    one.  ``p == q`` degenerates to an Erdos-Renyi graph; the difference
    statistic ``beta`` is then undefined and downstream classifiers expect a
    single outlier.
    """

    n: int
    p: float
    q: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise InvalidParameters(f"n must be an even integer >= 4, got {self.n}")
        for name, val in (("p", self.p), ("q", self.q)):
            if not (0.0 < val < 1.0):
                raise InvalidParameters(f"{name} must lie in (0,1), got {val}")
        if self.seed < 0:
            raise InvalidParameters("seed must be a nonnegative integer")

    @property
    def block_ratio(self) -> float:
        """(p-q)/(p+q), sign-folded; lies in [0,1)."""
        return abs(self.p - self.q) / (self.p + self.q)


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph with planted two-block labels.

    ``edges`` is a sorted tuple of (i, j) pairs with i < j.  Immutable after
    construction; safe to share across threads.
    """

    n: int
    edges: tuple
    labels: np.ndarray
    degrees: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.degrees is None:
            deg = np.zeros(self.n, dtype=np.int64)
            for i, j in self.edges:
                deg[i] += 1
                deg[j] += 1
            object.__setattr__(self, "degrees", deg)
        self.labels.setflags(write=False)
        self.degrees.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Dense n x n symmetric 0/1 adjacency matrix (built on demand)."""
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i, j] = 1.0
            a[j, i] = 1.0
        return a

    def adjacency_lists(self) -> list:
        nbrs = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return [sorted(v) for v in nbrs]

    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0


@dataclass(frozen=True)
class DegreeStats:
    """Mean-degree statistics of an SBM configuration.

    alpha = n(p+q)/2 - p is the expected degree; beta = n(p-q)/2 - p the
    expected in-minus-out degree difference (None when p == q, where it is
    undefined).  gamma = alpha - 1.  Deviation fields are filled by
    ``degree_concentration``.
    """

    alpha: float
    beta: Optional[float]
    gamma: float
    max_deviation: float = 0.0
    relative_deviation: float = 0.0
    concentrated: Optional[bool] = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise InvalidParameters(f"alpha must be positive, got {self.alpha}")


def expected_stats(params: SbmParams) -> DegreeStats:
    """Expected-degree statistics from the parameters alone.

    For q > p the sign convention beta = n(q-p)/2 + p is used so that beta
    stays positive; for p == q beta is undefined (returned as None).
    """
    n, p, q = params.n, params.p, params.q
    alpha = n * (p + q) / 2 - p
    if p > q:
        beta = n * (p - q) / 2 - p
    elif q > p:
        beta = n * (q - p) / 2 + p
    else:
        beta = None
    return DegreeStats(alpha=alpha, beta=beta, gamma=alpha - 1.0)


def sample_sbm(params: SbmParams) -> Graph:
    """Draw one SBM graph, deterministically in ``params``.

    Vertices 0..n/2-1 form block 0, the rest block 1.  Pairs (i, j), i < j,
    are visited in lexicographic order and each consumes exactly one uniform
    draw from a PCG64 stream seeded with ``params.seed``, so identical
    parameters give bit-identical edge sets.
    """
    n = params.n
    half = n // 2
    rng = np.random.Generator(np.random.PCG64(params.seed))

    # one uniform per pair, lexicographic (i, j) order
    iu, ju = np.triu_indices(n, k=1)
    u = rng.random(iu.size)
    same_block = (iu < half) == (ju < half)
    thresh = np.where(same_block, params.p, params.q)
    keep = u < thresh
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))

    labels = np.zeros(n, dtype=np.int8)
    labels[half:] = 1
    return Graph(n=n, edges=edges, labels=labels)


def degree_concentration(
    graph: Graph, stats: DegreeStats, threshold: float = 0.3
) -> DegreeStats:
    """Fill the degree-deviation fields of ``stats`` from an actual graph.

    Flags ``concentrated`` when max_i |d_i - alpha| <= threshold * alpha.
    """
    if graph.n == 0:
        raise InvalidParameters("graph must be nonempty")
    dev = float(np.max(np.abs(graph.degrees - stats.alpha)))
    rel = dev / stats.alpha
    return replace(
        stats,
        max_deviation=dev,
        relative_deviation=rel,
        concentrated=bool(rel <= threshold),
    )


def write_edge_list(graph: Graph, fh: TextIO, params: Optional[SbmParams] = None):
    """Plain-text edge list: header `n m seed p q`, a label line, one `i j` per edge."""
    seed = params.seed if params is not None else 0
    p = params.p if params is not None else math.nan
    q = params.q if params is not None else math.nan
    fh.write(f"{graph.n} {graph.num_edges} {seed} {p!r} {q!r}\n")
    fh.write("".join(str(int(b)) for b in graph.labels) + "\n")
    for i, j in graph.edges:
        fh.write(f"{i} {j}\n")


def read_edge_list(fh: TextIO) -> Graph:
    header = fh.readline().split()
    if len(header) != 5:
        raise InvalidParameters("bad edge-list header, expected `n m seed p q`")
    n, m = int(header[0]), int(header[1])
    label_line = fh.readline().strip()
    if len(label_line) != n or set(label_line) - {"0", "1"}:
        raise InvalidParameters("label line must be n characters of 0/1")
    labels = np.array([int(c) for c in label_line], dtype=np.int8)
    edges = []
    for _ in range(m):
        i, j = map(int, fh.readline().split())
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise InvalidParameters(f"bad edge ({i}, {j})")
        edges.append((min(i, j), max(i, j)))
    edges = tuple(sorted(set(edges)))
    if len(edges) != m:
        raise InvalidParameters("duplicate edges in file")
    return Graph(n=n, edges=edges, labels=labels)
