"""Budgeted structural attacks for robustness experiments.

The label-aware attack deletes intra-class edges and inserts absent
inter-class edges (the classic heterophily-injection recipe); the baseline
flips uniformly random pairs. Budgets are a fraction of the current edge
count. All sampling is without replacement and deterministic given the
seed; an exhausted candidate pool yields a partial attack plus a warning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

ATTACK_KINDS = ("dice", "random_flip")

# above this node count candidate pools are sampled by rejection instead of
# being enumerated densely
_ENUMERATION_LIMIT = 3000


@dataclass(frozen=True)
class AttackSpec:
    """kind, edge-budget ratio rap in [0, 1], seed, and the delete share."""

    kind: str
    rap: float
    seed: int = 0
    dice_delete_fraction: float = 0.5

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ConfigError(
                f"unknown attack kind {self.kind!r}; expected one of {ATTACK_KINDS}"
            )
        if not 0.0 <= self.rap <= 1.0:
            raise ConfigError(f"rap must lie in [0, 1]; got {self.rap}")
        if not 0.0 <= self.dice_delete_fraction <= 1.0:
            raise ConfigError(
                f"dice_delete_fraction must lie in [0, 1]; got {self.dice_delete_fraction}"
            )


def attack_budget(edge_count, rap):
    """Number of operations granted: round(rap * |E|)."""
    return int(round(rap * edge_count))


def _warn_partial(what, wanted, got):
    warnings.warn(
        f"attack exhausted the {what} pool: used {got} of {wanted} requested",
        RuntimeWarning,
        stacklevel=3,
    )


def _sample_pairs(rng, candidates, count):
    # candidates: (m, 2) int array of u < v pairs; keep the draw order
    if count >= len(candidates):
        return candidates
    idx = rng.choice(len(candidates), size=count, replace=False)
    return candidates[idx]


def _rejection_pairs(rng, n, count, accept, max_factor=60):
    """Sample `count` distinct u < v pairs passing `accept` by rejection."""
    chosen = []
    seen = set()
    attempts = 0
    limit = max_factor * max(count, 1)
    while len(chosen) < count and attempts < limit:
        attempts += 1
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        if u > v:
            u, v = v, u
        if (u, v) in seen or not accept(u, v):
            continue
        seen.add((u, v))
        chosen.append((u, v))
    return np.array(chosen, dtype=int).reshape(-1, 2)


def _absent_intermask_pairs(graph, inter):
    """Enumerate absent pairs u < v with mask[u, v] true (dense path)."""
    present = np.zeros((graph.n, graph.n), dtype=bool)
    ea = graph.edge_array()
    if ea.shape[0]:
        present[ea[:, 0], ea[:, 1]] = True
        present[ea[:, 1], ea[:, 0]] = True
    cand = np.triu(inter & ~present, k=1)
    us, vs = np.nonzero(cand)
    return np.stack([us, vs], axis=1)


def attack(graph, spec):
    """Apply the attack; returns (attacked_graph, log).

    The log lists one {"op": "del"|"add", "u": .., "v": ..} dict per
    operation, deletions before additions, in sampling order. Features and
    labels pass through unchanged; the result stays simple and undirected.
    """
    budget = attack_budget(graph.num_edges, spec.rap)
    rng = np.random.default_rng(spec.seed)
    if budget == 0:
        return graph, []
    if spec.kind == "dice":
        return _attack_dice(graph, spec, rng, budget)
    return _attack_random_flip(graph, spec, rng, budget)


def _attack_dice(graph, spec, rng, budget):
    if graph.labels is None:
        raise ConfigError("the label-aware attack needs a labeled graph")
    labels = graph.labels
    want_del = int(np.floor(budget * spec.dice_delete_fraction))
    want_add = budget - want_del

    ea = graph.edge_array()
    intra_idx = np.flatnonzero(labels[ea[:, 0]] == labels[ea[:, 1]])
    if want_del > intra_idx.size:
        _warn_partial("intra-class edge", want_del, intra_idx.size)
    dels = _sample_pairs(rng, ea[intra_idx], min(want_del, intra_idx.size))

    edge_set = set(graph.edges)
    if graph.n <= _ENUMERATION_LIMIT:
        inter = labels[:, None] != labels[None, :]
        pool = _absent_intermask_pairs(graph, inter)
        if want_add > len(pool):
            _warn_partial("absent inter-class pair", want_add, len(pool))
        adds = _sample_pairs(rng, pool, min(want_add, len(pool)))
    else:
        adds = _rejection_pairs(
            rng,
            graph.n,
            want_add,
            lambda u, v: labels[u] != labels[v] and (u, v) not in edge_set,
        )
        if len(adds) < want_add:
            _warn_partial("absent inter-class pair", want_add, len(adds))

    log = [{"op": "del", "u": int(u), "v": int(v)} for u, v in dels]
    log += [{"op": "add", "u": int(u), "v": int(v)} for u, v in adds]
    new_edges = edge_set - {(int(u), int(v)) for u, v in dels}
    new_edges |= {(int(u), int(v)) for u, v in adds}
    return graph.replace_edges(sorted(new_edges)), log


def _attack_random_flip(graph, spec, rng, budget):
    edge_set = set(graph.edges)
    total_pairs = graph.n * (graph.n - 1) // 2
    if budget > total_pairs:
        _warn_partial("node pair", budget, total_pairs)
    if graph.n <= _ENUMERATION_LIMIT:
        us, vs = np.triu_indices(graph.n, k=1)
        pool = np.stack([us, vs], axis=1)
        flips = _sample_pairs(rng, pool, min(budget, total_pairs))
    else:
        flips = _rejection_pairs(rng, graph.n, budget, lambda u, v: True)
        if len(flips) < budget:
            _warn_partial("node pair", budget, len(flips))

    log = []
    new_edges = set(edge_set)
    for u, v in flips:
        pair = (int(u), int(v))
        if pair in new_edges:
            new_edges.discard(pair)
            log.append({"op": "del", "u": pair[0], "v": pair[1]})
        else:
            new_edges.add(pair)
            log.append({"op": "add", "u": pair[0], "v": pair[1]})
    return graph.replace_edges(sorted(new_edges)), log
