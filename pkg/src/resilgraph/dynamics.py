"""Condensation of graph perturbation state into low-dimensional summaries.

The reductions here compress a full graph into the handful of scalars that
drive the 1D/2D surrogate models: edge-weighted node averages, the condensed
topology/feature states, and the coupling-gain averages built from per-node
ratios of feature distinction to neighbor count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, asdict

import numpy as np

from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    ShapeError,
)
from .graph_core import node_stats, require_edges

logger = logging.getLogger(__name__)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class CondensedState:
    """Scalar condensation of a graph.

    x_gra/beta_gra summarize topology state and control strength; r_gra and
    q_gra are the degree- and distinction-weighted node-state averages;
    gamma_r_avg/gamma_q_avg are the normalized coupling gains; m_avg and
    c_avg are plain node means of degree centrality and distinction sum.
    """

    x_gra: float
    beta_gra: float
    r_gra: float
    q_gra: float
    gamma_r_avg: float
    gamma_q_avg: float
    m_avg: float
    c_avg: float

    def to_dict(self):
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class GammaSums:
    """Per-node coupling ratios.

    g_r[i] = f_i / k_i and g_q[i] = k_i / f_i wherever both the neighbor
    count k_i and the distinction sum f_i are positive. Other nodes are
    flagged in `defined` and carry NaN - they are skipped by consumers,
    never silently zeroed or floored.
    """

    g_r: np.ndarray
    g_q: np.ndarray
    defined: np.ndarray

    @property
    def undefined_count(self):
        return int((~self.defined).sum())


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step integration record: times (T,) and states (T, dim)."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if s.ndim != 2 or t.ndim != 1 or s.shape[0] != t.shape[0]:
            raise ShapeError(
                f"trajectory arrays disagree: times {t.shape}, states {s.shape}"
            )
        if t.size >= 2 and not (np.diff(t) > 0).all():
            raise ShapeError("trajectory times must increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)


def phi(graph, values):
    """Edge-weighted average of node values: sum_ij A_ij v_j / sum_ij A_ij.

    For an undirected graph this is the degree-weighted node mean.
    """
    require_edges(graph)
    v = np.asarray(values, dtype=float)
    if v.shape != (graph.n,):
        raise ShapeError(f"values must have shape ({graph.n},); got {v.shape}")
    if not np.isfinite(v).all():
        raise ShapeError("values contain non-finite entries")
    deg = graph.degrees
    return float(np.dot(deg, v) / deg.sum())


def condense_1d(graph):
    """Condensed topology state and control strength (x_gra, beta_gra).

    Both are degree-weighted node averages: of degree centrality and of
    degree itself.
    """
    require_edges(graph)
    deg = graph.degrees.astype(float)
    centrality = deg / (graph.n - 1) if graph.n > 1 else np.zeros(graph.n)
    total = deg.sum()
    x_gra = float(np.dot(deg, centrality) / total)
    beta_gra = float(np.dot(deg, deg) / total)
    return x_gra, beta_gra

def gamma_sums(graph, metric="cosine_distance"):
    """Per-node g_r = f/k and g_q = k/f with explicit undefined flags."""
    stats = node_stats(graph, metric)
    k = stats.k.astype(float)
    f = stats.f
    defined = (k > 0) & (f > 0)
    g_r = np.full(graph.n, np.nan)
    g_q = np.full(graph.n, np.nan)
    g_r[defined] = f[defined] / k[defined]
    g_q[defined] = k[defined] / f[defined]
    return GammaSums(g_r=g_r, g_q=g_q, defined=defined)


def summarize(graph, metric="cosine_distance"):
    """Full scalar condensation of one graph.

    Undefined nodes (no neighbors, or zero distinction sum) are skipped in
    the gain numerators; the denominators keep the whole-graph totals. Their
    count is logged.
    """
    require_edges(graph)
    stats = node_stats(graph, metric)
    x = stats.degree_centrality
    s = stats.degree.astype(float)
    f = stats.f
    k = stats.k.astype(float)

    total_f = f.sum()
    if total_f <= 0.0:
        raise DegenerateInputError(
            "every node has zero feature-distinction sum; gains are undefined"
        )
    total_k = k.sum()

    gs = gamma_sums(graph, metric)
    if gs.undefined_count:
        logger.info(
            "summarize: skipped %d node(s) with undefined gain ratios",
            gs.undefined_count,
        )
    d = gs.defined
    gamma_r_avg = float(gs.g_r[d].sum() / total_f)
    gamma_q_avg = float(gs.g_q[d].sum() / total_k)

    x_gra, beta_gra = condense_1d(graph)
    r_gra = float(np.dot(s, x) / s.sum())
    q_gra = float(np.dot(f, x) / total_f)
    return CondensedState(
        x_gra=x_gra,
        beta_gra=beta_gra,
        r_gra=r_gra,
        q_gra=q_gra,
        gamma_r_avg=gamma_r_avg,
        gamma_q_avg=gamma_q_avg,
        m_avg=float(x.mean()),
        c_avg=float(f.mean()),
    )


def accumulate(trajectory, component=0):
    """Trapezoidal time-integral of one state component."""
    if trajectory.times.size < 2:
        raise InsufficientDataError("need at least two samples to integrate")
    if not 0 <= component < trajectory.states.shape[1]:
        raise ShapeError(
            f"component {component} outside 0..{trajectory.states.shape[1] - 1}"
        )
    return float(_trapezoid(trajectory.states[:, component], trajectory.times))
