"""Graph container, file formats, node statistics, and the SBM generator.

A graph is simple and undirected: dense 0-based node ids, unordered edges
with no self-loops, a float feature row per node, and optional integer
labels. Instances are immutable after construction; all mutating workflows
(attacks, purification) build new instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    BoundsError,
    ConfigError,
    DegenerateInputError,
    ParseError,
    ShapeError,
)

DISTINCTION_METRICS = ("cosine_distance", "l2")


def _canonical_edges(n, edges):
    seen = set()
    out = []
    for u, v in edges:
        u = int(u)
        v = int(v)
        if u == v:
            raise ParseError(f"self-loop on node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise BoundsError(f"edge ({u}, {v}) outside node range [0, {n})")
        if u > v:
            u, v = v, u
        if (u, v) not in seen:
            seen.add((u, v))
            out.append((u, v))
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with node features and optional labels."""

    n: int
    edges: tuple
    features: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        if self.n <= 0:
            raise ShapeError("graph needs at least one node")
        object.__setattr__(self, "edges", _canonical_edges(self.n, self.edges))
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim != 2 or feats.shape[0] != self.n:
            raise ShapeError(
                f"feature matrix must be ({self.n}, d); got {feats.shape}"
            )
        if not np.isfinite(feats).all():
            raise ShapeError("feature matrix contains non-finite values")
        feats = feats.copy()
        feats.flags.writeable = False
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labs = np.asarray(self.labels, dtype=int)
            if labs.shape != (self.n,):
                raise ShapeError(
                    f"labels must have length {self.n}; got {labs.shape}"
                )
            if labs.min(initial=0) < 0:
                raise BoundsError("labels must be non-negative")
            labs = labs.copy()
            labs.flags.writeable = False
            object.__setattr__(self, "labels", labs)

    @property
    def num_edges(self):
        return len(self.edges)

    @cached_property
    def degrees(self):
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        deg.flags.writeable = False
        return deg

    @cached_property
    def neighbor_sets(self):
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def adjacency(self):
        """Dense symmetric 0/1 adjacency matrix (float)."""
        a = np.zeros((self.n, self.n), dtype=float)
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def edge_array(self):
        """Edges as an (E, 2) int array; empty graphs give shape (0, 2)."""
        if not self.edges:
            return np.zeros((0, 2), dtype=int)
        return np.asarray(self.edges, dtype=int)

    def replace_edges(self, edges):
        """New graph with the same nodes/features/labels and different edges."""
        return Graph(self.n, tuple(edges), self.features, self.labels)


@dataclass(frozen=True)
class NodeStats:
    """Per-node structural and feature summaries.

    degree_centrality is degree / (n - 1); k is the neighbor count
    (equal to degree for simple graphs); f is the sum of feature
    distinctions between the node and each of its neighbors.
    """

    degree: np.ndarray
    degree_centrality: np.ndarray
    k: np.ndarray
    f: np.ndarray


def _validate_metric(metric):
    if metric not in DISTINCTION_METRICS:
        raise ConfigError(
            f"unknown distinction metric {metric!r}; expected one of {DISTINCTION_METRICS}"
        )


def feature_distinction(x, y, metric="cosine_distance"):
    """Distinction between two feature vectors.

    cosine_distance: 1 - cosine similarity, clipped to [0, 2]; a zero
    vector has similarity 0 by convention, hence distinction 1.
    l2: Euclidean distance.
    """
    _validate_metric(metric)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if metric == "l2":
        return float(np.linalg.norm(x - y))
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        return 1.0
    cos = float(np.dot(x, y) / (nx * ny))
    return float(np.clip(1.0 - cos, 0.0, 2.0))


def edge_distinctions(graph, metric="cosine_distance"):
    """Distinction value for every edge, aligned with graph.edges."""
    _validate_metric(metric)
    ea = graph.edge_array()
    if ea.shape[0] == 0:
        return np.zeros(0, dtype=float)
    fu = graph.features[ea[:, 0]]
    fv = graph.features[ea[:, 1]]
    if metric == "l2":
        return np.linalg.norm(fu - fv, axis=1)
    nu = np.linalg.norm(fu, axis=1)
    nv = np.linalg.norm(fv, axis=1)
    dots = np.einsum("ij,ij->i", fu, fv)
    denom = nu * nv
    cos = np.zeros(len(dots))
    ok = denom > 0.0
    cos[ok] = dots[ok] / denom[ok]
    return np.clip(1.0 - cos, 0.0, 2.0)


def node_stats(graph, metric="cosine_distance"):
    """Degree, degree centrality, neighbor count, and distinction sum per node."""
    deg = graph.degrees.astype(int)
    if graph.n > 1:
        centrality = deg / (graph.n - 1)
    else:
        centrality = np.zeros(graph.n)
    dist = edge_distinctions(graph, metric)
    f = np.zeros(graph.n)
    ea = graph.edge_array()
    if ea.shape[0]:
        np.add.at(f, ea[:, 0], dist)
        np.add.at(f, ea[:, 1], dist)
    return NodeStats(degree=deg, degree_centrality=centrality, k=deg.copy(), f=f)


# ---------------------------------------------------------------------------
# file formats: edges "u v" lines, features CSV without header, labels "u label"


def _data_lines(path):
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _read_id_pairs(path, what):
    pairs = []
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two fields for {what}", path=path, line=lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(
                f"non-integer field in {what} entry {parts!r}", path=path, line=lineno
            ) from None
        pairs.append((a, b, lineno))
    return pairs


def load_graph(edges_path, features_path, labels_path=None):
    """Load a graph from its three on-disk pieces.

    The feature file defines n (one CSV row per node, no header); edge and
    label ids must fall inside [0, n). Duplicate edges and both orientations
    collapse to one undirected edge. Self-loops are rejected.
    """
    try:
        feats = np.loadtxt(features_path, delimiter=",", dtype=float, ndmin=2,
                           comments="#")
    except ValueError as exc:
        raise ParseError(f"bad feature CSV: {exc}", path=features_path) from None
    if feats.size == 0:
        raise ParseError("feature file is empty", path=features_path)
    n = feats.shape[0]

    edges = []
    for u, v, lineno in _read_id_pairs(edges_path, "edge"):
        if u == v:
            raise ParseError(f"self-loop on node {u}", path=edges_path, line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise BoundsError(
                f"{edges_path}: edge ({u}, {v}) outside node range [0, {n}) "
                f"(line {lineno})"
            )
        edges.append((u, v))

    labels = None
    if labels_path is not None:
        filled = np.full(n, -1, dtype=int)
        for node, lab, lineno in _read_id_pairs(labels_path, "label"):
            if not 0 <= node < n:
                raise BoundsError(
                    f"{labels_path}: node {node} outside range [0, {n}) (line {lineno})"
                )
            if lab < 0:
                raise BoundsError(
                    f"{labels_path}: negative label for node {node} (line {lineno})"
                )
            if filled[node] >= 0:
                raise ParseError(
                    f"duplicate label for node {node}", path=labels_path, line=lineno
                )
            filled[node] = lab
        missing = np.flatnonzero(filled < 0)
        if missing.size:
            raise ShapeError(
                f"{labels_path}: labels cover {n - missing.size} of {n} nodes "
                f"(first missing id {missing[0]})"
            )
        labels = filled

    return Graph(n, tuple(edges), feats, labels)


def _format_float(x):
    # repr round-trips float64 exactly and is deterministic across runs
    return repr(float(x))


def save_graph(graph, out_dir):
    """Write edges.txt / features.csv / labels.txt (labels only if present).

    Output is byte-identical across runs for equal graphs: edges sorted
    ascending, floats via repr, LF line endings.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.txt", "w", encoding="utf-8", newline="\n") as fh:
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")
    with open(out / "features.csv", "w", encoding="utf-8", newline="\n") as fh:
        for row in graph.features:
            fh.write(",".join(_format_float(x) for x in row) + "\n")
    if graph.labels is not None:
        with open(out / "labels.txt", "w", encoding="utf-8", newline="\n") as fh:
            for node, lab in enumerate(graph.labels):
                fh.write(f"{node} {int(lab)}\n")
    return out


def load_graph_dir(in_dir):
    """Load a graph previously written by save_graph."""
    d = Path(in_dir)
    labels = d / "labels.txt"
    return load_graph(
        d / "edges.txt",
        d / "features.csv",
        labels if labels.exists() else None,
    )


# ---------------------------------------------------------------------------
# stochastic block model


@dataclass(frozen=True)
class SbmSpec:
    """Parameters for a planted-partition benchmark graph.

    Labels are the block ids (contiguous, as balanced as n allows).
    Features are the class's basis vector plus Gaussian noise.
    """

    n: int
    classes: int
    p_in: float
    p_out: float
    feature_dim: int = 16
    feature_noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.classes < 1:
            raise ConfigError("classes must be >= 1")
        if self.n < self.classes:
            raise ConfigError(f"n = {self.n} smaller than classes = {self.classes}")
        for name in ("p_in", "p_out"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} = {p} outside [0, 1]")
        if self.feature_dim < 1:
            raise ConfigError("feature_dim must be >= 1")
        if self.feature_noise < 0.0:
            raise ConfigError("feature_noise must be >= 0")


def _decode_triangular(indices, size):
    """Map pair indices to (u, v), u < v, for pairs ordered row-major:
    (0,1)..(0,size-1),(1,2)..; index k in row u starts at u*size - u(u+1)/2 - u."""
    rows = np.arange(size, dtype=np.int64)
    # row u holds size-1-u pairs and starts at sum_{t<u}(size-1-t)
    row_starts = rows * (size - 1) - (rows * (rows - 1)) // 2
    u = np.searchsorted(row_starts, indices, side="right") - 1
    v = u + 1 + (indices - row_starts[u])
    return u, v


def generate_sbm(spec):
    """Deterministic SBM draw: same spec and seed give an identical graph."""
    rng = np.random.default_rng(spec.seed)
    sizes = [spec.n // spec.classes] * spec.classes
    for i in range(spec.n % spec.classes):
        sizes[i] += 1
    starts = np.concatenate([[0], np.cumsum(sizes)])
    labels = np.repeat(np.arange(spec.classes), sizes)

    edges = []
    for bi in range(spec.classes):
        for bj in range(bi, spec.classes):
            p = spec.p_in if bi == bj else spec.p_out
            if bi == bj:
                npairs = sizes[bi] * (sizes[bi] - 1) // 2
            else:
                npairs = sizes[bi] * sizes[bj]
            if npairs == 0 or p == 0.0:
                continue
            count = int(rng.binomial(npairs, p))
            if count == 0:
                continue
            chosen = np.sort(rng.choice(npairs, size=count, replace=False))
            if bi == bj:
                us, vs = _decode_triangular(chosen, sizes[bi])
                us = us + starts[bi]
                vs = vs + starts[bi]
            else:
                us = chosen // sizes[bj] + starts[bi]
                vs = chosen % sizes[bj] + starts[bj]
            edges.extend(zip(us.tolist(), vs.tolist()))

    means = np.zeros((spec.classes, spec.feature_dim))
    for c in range(spec.classes):
        means[c, c % spec.feature_dim] = 1.0
    feats = means[labels] + spec.feature_noise * rng.standard_normal(
        (spec.n, spec.feature_dim)
    )
    return Graph(spec.n, tuple(edges), feats, labels)


def require_edges(graph):
    """Raise if the graph has no edges; several reductions need at least one."""
    if graph.num_edges == 0:
        raise DegenerateInputError("graph has no edges")
