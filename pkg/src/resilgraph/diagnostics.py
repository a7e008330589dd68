"""Spectral and statistical fingerprints of a graph.

These are the quantities that move when a graph is adversarially rewired:
the singular-value profile (and numerical rank) of the adjacency matrix,
the distribution of per-edge feature distinctions, and degree
assortativity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError, ScaleError
from .graph_core import DISTINCTION_METRICS, edge_distinctions

DENSE_NODE_LIMIT = 5000


def singular_values(graph):
    """All adjacency singular values, descending. Dense; guarded by size."""
    if graph.n > DENSE_NODE_LIMIT:
        raise ScaleError(
            f"dense SVD limited to n <= {DENSE_NODE_LIMIT}; got n = {graph.n}"
        )
    return np.linalg.svd(graph.adjacency(), compute_uv=False)


def numerical_rank(graph, tol=1e-8):
    """Count of singular values above tol * sigma_max."""
    if tol <= 0:
        raise ConfigError(f"tol must be positive; got {tol}")
    sigma = singular_values(graph)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int((sigma > tol * sigma[0]).sum())


@dataclass(frozen=True)
class SmoothnessHistogram:
    """Distribution of per-edge feature distinctions."""

    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    metric: str


def smoothness_histogram(graph, bins=20, metric="cosine_distance"):
    """Histogram of edge distinctions; counts sum to the edge count.

    The cosine metric uses the fixed range [0, 2]; l2 uses [0, max] (with a
    unit fallback when every distinction is zero).
    """
    if bins < 1:
        raise ConfigError(f"bins must be >= 1; got {bins}")
    if metric not in DISTINCTION_METRICS:
        raise ConfigError(
            f"unknown metric {metric!r}; expected one of {DISTINCTION_METRICS}"
        )
    if graph.num_edges == 0:
        raise DegenerateInputError("smoothness histogram needs at least one edge")
    dist = edge_distinctions(graph, metric)
    if metric == "cosine_distance":
        hi = 2.0
    else:
        hi = float(dist.max()) or 1.0
    counts, edges = np.histogram(dist, bins=bins, range=(0.0, hi))
    return SmoothnessHistogram(
        bin_edges=edges, counts=counts, mean=float(dist.mean()), metric=metric
    )


def degree_assortativity(graph):
    """Pearson correlation of endpoint degrees over both edge orientations.

    None when undefined (no edges, or zero degree variance across edge
    endpoints, e.g. regular graphs).
    """
    if graph.num_edges == 0:
        return None
    ea = graph.edge_array()
    deg = graph.degrees
    x = np.concatenate([deg[ea[:, 0]], deg[ea[:, 1]]]).astype(float)
    y = np.concatenate([deg[ea[:, 1]], deg[ea[:, 0]]]).astype(float)
    vx = x.var()
    vy = y.var()
    if vx == 0.0 or vy == 0.0:
        return None
    cov = ((x - x.mean()) * (y - y.mean())).mean()
    return float(cov / np.sqrt(vx * vy))
