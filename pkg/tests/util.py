"""Independent oracles and small generators shared across tests.

Everything here deliberately avoids the library's own linear algebra:
components come from union-find, matchings from exhaustive search.
"""

from __future__ import annotations

import itertools

import numpy as np

from zigzagst.dyngraph import Snapshot


def union_find_components(cx) -> int:
    """Connected components of a complex's 1-skeleton via union-find."""
    parent = {v: v for v in cx.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in cx.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(v) for v in cx.vertices})


def _linf(a, b) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _diag(p) -> float:
    return (p[1] - p[0]) / 2.0


def brute_force_w1(d1, d2) -> float:
    """Minimum matching cost by exhaustive search over all pairings.

    Every injective partial matching between the two diagrams is tried;
    unmatched points pay their diagonal cost.
    """
    d1, d2 = list(d1), list(d2)
    base = sum(_diag(p) for p in d1) + sum(_diag(p) for p in d2)
    best = base
    n1, n2 = len(d1), len(d2)
    for k in range(1, min(n1, n2) + 1):
        for subset1 in itertools.combinations(range(n1), k):
            for subset2 in itertools.permutations(range(n2), k):
                cost = base
                for i, j in zip(subset1, subset2):
                    cost += _linf(d1[i], d2[j]) - _diag(d1[i]) - _diag(d2[j])
                best = min(best, cost)
    return best


def random_diagram(rng: np.random.Generator, t: int = 12, max_points: int = 10):
    """Random (birth, death) points inside the reachable window triangle."""
    n = int(rng.integers(0, max_points + 1))
    points = []
    for _ in range(n):
        b = float(rng.uniform(1.0, t))
        d = float(rng.uniform(b, t))
        points.append((b, d))
    return points


def perturb_diagram(rng: np.random.Generator, points, t: int = 12):
    """Jitter coordinates and occasionally drop or add a point."""
    out = []
    for b, d in points:
        if rng.random() < 0.15:
            continue
        b2 = float(np.clip(b + rng.uniform(-0.4, 0.4), 1.0, t))
        d2 = float(np.clip(d + rng.uniform(-0.4, 0.4), b2, t))
        out.append((b2, d2))
    if rng.random() < 0.3:
        b = float(rng.uniform(1.0, t))
        out.append((b, float(rng.uniform(b, t))))
    return out


def reverse_window(window):
    """Same snapshots in reverse chronological order, reindexed from 1."""
    return [
        Snapshot(i + 1, s.universe_size, s.nodes, dict(s.weights))
        for i, s in enumerate(reversed(window))
    ]
