"""Exact min-cost assignment of sentences to tag quotas.

The underlying graph is the classic transportation network: a source
feeds every sentence (capacity 1), sentences connect to tags they can
take (cost = scaled negative log-probability), and each tag drains into
the sink with capacity equal to its quota.  We run successive shortest
augmenting paths with node potentials, but Dijkstra operates on the
condensed tag graph (one node per tag, edge weights minimized over the
sentences currently assigned to the tag), which makes each augmentation
O(T^2 + T*N) with vectorized mins instead of a heap over N nodes.

Costs are taken as non-negative integers (the caller fixes the scaling);
all arithmetic stays exact in float64 far below 2^53.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleQuota
from .tags import ERROR_TAGS


@dataclass
class FlowSolution:
    assignment: np.ndarray  # tag index per sentence
    objective: float  # total cost in the caller's integer units
    potentials: np.ndarray  # final tag potentials (optimality certificate input)


def solve_quota_assignment(costs: np.ndarray, quotas: np.ndarray) -> FlowSolution:
    """Minimize total cost subject to exact per-tag quotas.

    ``costs``: (N, T) float64, np.inf for forbidden pairs, finite values
    integer-valued and >= 0.  ``quotas``: (T,) ints summing to N.
    Deterministic: ties resolve to the lowest sentence index and lowest
    tag index (tags are passed in lexical order).

    Raises InfeasibleQuota when some quota cannot be filled, reporting
    the starved tags.
    """
    costs = np.asarray(costs, dtype=float)
    n, t = costs.shape
    quotas = np.asarray(quotas, dtype=int)
    if quotas.sum() != n:
        raise ValueError(f"quotas sum to {quotas.sum()}, expected {n}")
    if np.any(quotas < 0):
        raise ValueError("negative quota")

    potentials = np.zeros(t)
    counts = np.zeros(t, dtype=int)
    members: list[list[int]] = [[] for _ in range(t)]
    assignment = np.full(n, -1, dtype=int)

    for s in range(n):
        if not np.isfinite(costs[s]).any():
            raise InfeasibleQuota(
                [tag for tag, q, c in zip(ERROR_TAGS[:t], quotas, counts) if c < q],
                f"sentence {s} has no feasible tag",
            )
        dist = costs[s] - potentials
        parent = np.full(t, -1, dtype=int)
        moved = np.full(t, -1, dtype=int)
        done = np.zeros(t, dtype=bool)
        target = -1
        while True:
            masked = np.where(done, np.inf, dist)
            u = int(masked.argmin())
            if not np.isfinite(masked[u]):
                starved = [tag for tag, q, c in zip(ERROR_TAGS[:t], quotas, counts) if c < q]
                raise InfeasibleQuota(starved)
            done[u] = True
            if counts[u] < quotas[u]:
                target = u
                break
            rows = members[u]
            if not rows:
                continue
            block = costs[rows]
            # Cost delta of moving each member of u to every other tag;
            # block[:, u] is finite for every member by construction.
            delta = block - block[:, u : u + 1]
            w = delta.min(axis=0)
            picks = delta.argmin(axis=0)
            cand = dist[u] + w + potentials[u] - potentials
            better = ~done & np.isfinite(cand) & (cand < dist)
            if better.any():
                dist = np.where(better, cand, dist)
                parent[better] = u
                for v in np.flatnonzero(better):
                    moved[v] = rows[picks[v]]

        reach = dist[target]
        potentials = np.where(done, potentials + np.minimum(dist, reach), potentials + reach)

        # Walk the augmenting path back, moving one sentence per hop.
        chain = [target]
        while parent[chain[-1]] != -1:
            chain.append(parent[chain[-1]])
        chain.reverse()  # first element is entered directly by sentence s
        entry = chain[0]
        for prev_tag, next_tag in zip(chain, chain[1:]):
            mover = int(moved[next_tag])
            members[prev_tag].remove(mover)
            members[next_tag].append(mover)
            assignment[mover] = next_tag
        members[entry].append(s)
        assignment[s] = entry
        counts[:] = [len(m) for m in members]

    objective = float(costs[np.arange(n), assignment].sum())
    return FlowSolution(assignment=assignment, objective=objective, potentials=potentials)


def reduced_costs_nonnegative(costs: np.ndarray, solution: FlowSolution, tol: float = 1e-6) -> bool:
    """Optimality certificate: no sentence has a cheaper tag under potentials.

    For every sentence s assigned to t0 and every feasible tag t,
    cost(s, t) - pi(t) >= cost(s, t0) - pi(t0) must hold.
    """
    reduced = costs - solution.potentials[None, :]
    assigned = reduced[np.arange(len(solution.assignment)), solution.assignment]
    best = reduced.min(axis=1)
    return bool(np.all(assigned <= best + tol))
