"""Similarity-guided edge pruning with a per-node gain safeguard.

Candidate edges are ranked once, on the input graph, by a fused structural/
feature similarity (neighborhood Jaccard blended with feature cosine).
Walking the ranking from least similar, each edge is tentatively removed and
kept out only when both endpoints see a strict improvement in at least one
of their gain ratios (f/k or k/f); otherwise the edge is restored. A share
alpha of the candidate list is never examined, bounding the removal budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError
from .graph_core import DISTINCTION_METRICS, edge_distinctions

INCREASE_MARGIN = 1e-12


@dataclass(frozen=True)
class PurifyConfig:
    """Knobs for purify.

    alpha in (0, 1] is the fraction of the ranked candidate list left
    unexamined (1.0 disables pruning entirely). w_jaccard/w_cosine blend the
    two similarity channels. hop sets the neighborhood radius for the
    Jaccard channel. protect_isolation restores any removal that would
    leave an endpoint with no neighbors.
    """

    alpha: float = 0.85
    w_jaccard: float = 0.3
    w_cosine: float = 0.7
    hop: int = 2
    protect_isolation: bool = True
    metric: str = "cosine_distance"

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1]; got {self.alpha}")
        if self.w_jaccard < 0 or self.w_cosine < 0:
            raise ConfigError("similarity weights must be non-negative")
        if self.w_jaccard + self.w_cosine <= 0:
            raise ConfigError("at least one similarity weight must be positive")
        if self.hop < 1:
            raise ConfigError(f"hop must be >= 1; got {self.hop}")
        if self.metric not in DISTINCTION_METRICS:
            raise ConfigError(
                f"unknown metric {self.metric!r}; expected one of {DISTINCTION_METRICS}"
            )


@dataclass(frozen=True)
class PurifyReport:
    """What purify did: kept removals, restored candidates, and bookkeeping."""

    removed: tuple
    restored: tuple
    candidates_examined: int
    stop_reason: str
    similarity_min: float
    similarity_max: float
    similarity_mean: float

    def to_dict(self):
        return {
            "removed": [[int(u), int(v)] for u, v in self.removed],
            "restored": [[int(u), int(v)] for u, v in self.restored],
            "candidates_examined": int(self.candidates_examined),
            "stop_reason": self.stop_reason,
            "similarity": {
                "min": float(self.similarity_min),
                "max": float(self.similarity_max),
                "mean": float(self.similarity_mean),
            },
        }


def neighborhood_set(graph, node, hop=2):
    """Nodes within `hop` steps of node, excluding node itself."""
    if not 0 <= node < graph.n:
        raise ConfigError(f"node {node} outside range [0, {graph.n})")
    if hop < 1:
        raise ConfigError(f"hop must be >= 1; got {hop}")
    nbrs = graph.neighbor_sets
    seen = {node}
    frontier = {node}
    for _ in range(hop):
        frontier = set().union(*(nbrs[u] for u in frontier)) - seen if frontier else set()
        seen |= frontier
    seen.discard(node)
    return seen


def two_hop_set(graph, node):
    """Nodes at distance 1 or 2 from node."""
    return neighborhood_set(graph, node, hop=2)


def jaccard(set_a, set_b):
    """|intersection| / |union|; two empty sets give 0.0."""
    union = len(set_a | set_b)
    if union == 0:
        return 0.0
    return len(set_a & set_b) / union


def cosine(x, y):
    """Cosine similarity; any zero vector gives 0.0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return float(np.dot(x, y) / (nx * ny))


def fused_similarity(graph, w_jaccard=0.3, w_cosine=0.7, hop=2):
    """Per-edge similarity aligned with graph.edges:
    w_jaccard * jaccard(hop-neighborhoods) + w_cosine * cosine(features)."""
    if w_jaccard < 0 or w_cosine < 0:
        raise ConfigError("similarity weights must be non-negative")
    hoods = [neighborhood_set(graph, u, hop) for u in range(graph.n)]
    sims = np.zeros(graph.num_edges)
    feats = graph.features
    for i, (u, v) in enumerate(graph.edges):
        sims[i] = w_jaccard * jaccard(hoods[u], hoods[v]) + w_cosine * cosine(
            feats[u], feats[v]
        )
    return sims


def _channels(k, f):
    # gain ratios are defined only when both the neighbor count and the
    # distinction sum are positive; undefined channels are never compared
    if k > 0 and f > 0.0:
        return f / k, k / f
    return None, None


def _endpoint_improves(k_pre, f_pre, k_post, f_post):
    pre = _channels(k_pre, f_pre)
    post = _channels(k_post, f_post)
    improved = False
    comparable = False
    for a, b in zip(pre, post):
        if a is None or b is None:
            continue
        comparable = True
        if b > a + INCREASE_MARGIN:
            improved = True
    return comparable and improved


def purify(graph, config=None):
    """Prune low-similarity edges subject to the per-endpoint gain test.

    Returns (purified_graph, PurifyReport). The edge set of the result is a
    subset of the input's; features and labels are untouched. Deterministic:
    candidates are ordered by (similarity, min id, max id) ascending and the
    similarity ranking is computed once, on the input graph.
    """
    if config is None:
        config = PurifyConfig()
    if graph.num_edges == 0:
        raise DegenerateInputError("purify needs a graph with at least one edge")

    sims = fused_similarity(graph, config.w_jaccard, config.w_cosine, config.hop)
    dists = edge_distinctions(graph, config.metric)
    order = sorted(range(graph.num_edges), key=lambda i: (sims[i], graph.edges[i]))

    k = graph.degrees.astype(int).copy()
    f = np.zeros(graph.n)
    ea = graph.edge_array()
    np.add.at(f, ea[:, 0], dists)
    np.add.at(f, ea[:, 1], dists)

    initial = graph.num_edges
    threshold = config.alpha * initial
    removed = []
    restored = []
    examined = 0
    pos = 0
    while initial - pos > threshold and pos < initial:
        idx = order[pos]
        pos += 1
        examined += 1
        u, v = graph.edges[idx]
        d = float(dists[idx])
        if config.protect_isolation and (k[u] == 1 or k[v] == 1):
            restored.append((u, v))
            continue
        # removal shifts each endpoint's stats by exactly (-1 neighbor, -d)
        keep = _endpoint_improves(k[u], f[u], k[u] - 1, f[u] - d) and \
            _endpoint_improves(k[v], f[v], k[v] - 1, f[v] - d)
        if keep:
            removed.append((u, v))
            k[u] -= 1
            k[v] -= 1
            f[u] -= d
            f[v] -= d
        else:
            restored.append((u, v))

    stop_reason = "list_exhausted" if pos >= initial else "alpha_reached"
    removed_set = set(removed)
    new_edges = tuple(e for e in graph.edges if e not in removed_set)
    report = PurifyReport(
        removed=tuple(removed),
        restored=tuple(restored),
        candidates_examined=examined,
        stop_reason=stop_reason,
        similarity_min=float(sims.min()),
        similarity_max=float(sims.max()),
        similarity_mean=float(sims.mean()),
    )
    return graph.replace_edges(new_edges), report
