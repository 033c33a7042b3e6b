"""Simplicial complexes of dimension at most two from weighted snapshots.

A simplex is a sorted tuple of one to three node ids.  Every builder in
this module produces a face-closed complex; homology is computed over
GF(2) by boundary-matrix rank, which keeps Betti numbers in exact
integer arithmetic.
"""

from __future__ import annotations

import enum
import heapq
import math
from typing import Callable, Iterable, Mapping

from . import gf2
from .dyngraph import Snapshot

Simplex = tuple[int, ...]

__all__ = [
    "Simplex",
    "SimplicialComplex",
    "FiltrationMode",
    "build_complex",
    "betti_numbers",
    "write_complex_dump",
    "read_complex_dump",
]


class SimplicialComplex:
    """Face-closed set of simplices of dimension <= 2 (immutable)."""

    __slots__ = ("vertices", "edges", "triangles", "_members")

    def __init__(self, simplices: Iterable[Simplex]):
        verts: set[Simplex] = set()
        edges: set[Simplex] = set()
        tris: set[Simplex] = set()
        for s in simplices:
            s = tuple(s)
            if not 1 <= len(s) <= 3:
                raise ValueError(f"simplex {s} has dimension outside 0..2")
            if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
                raise ValueError(f"simplex {s} is not sorted with distinct vertices")
            (verts, edges, tris)[len(s) - 1].add(s)
        for (u, v) in edges:
            if (u,) not in verts or (v,) not in verts:
                raise ValueError(f"edge {(u, v)} is missing a vertex face")
        for (u, v, w) in tris:
            for face in ((u, v), (u, w), (v, w)):
                if face not in edges:
                    raise ValueError(f"triangle {(u, v, w)} is missing face {face}")
        self.vertices: tuple[int, ...] = tuple(sorted(s[0] for s in verts))
        self.edges: tuple[Simplex, ...] = tuple(sorted(edges))
        self.triangles: tuple[Simplex, ...] = tuple(sorted(tris))
        self._members = verts | edges | tris

    @classmethod
    def from_graph(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "SimplicialComplex":
        """Clique (flag) complex of a graph, truncated at dimension 2."""
        vs = set(int(v) for v in vertices)
        es: set[Simplex] = set()
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for u, v in edges:
            if u == v:
                continue
            a, b = (u, v) if u < v else (v, u)
            if a not in vs or b not in vs:
                raise ValueError(f"edge {(a, b)} endpoint outside vertex set")
            es.add((a, b))
            adj[a].add(b)
            adj[b].add(a)
        simplices: list[Simplex] = [(v,) for v in vs]
        simplices.extend(es)
        for (a, b) in es:
            for c in adj[a] & adj[b]:
                if c > b:
                    simplices.append((a, b, c))
        return cls(simplices)

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(sorted(self._members, key=lambda s: (len(s), s)))

    def __contains__(self, simplex: Simplex) -> bool:
        return tuple(simplex) in self._members

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self._members == other._members

    def __hash__(self):
        return hash(frozenset(self._members))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self._members <= other._members

    def difference(self, other: "SimplicialComplex") -> set[Simplex]:
        return self._members - other._members


class FiltrationMode(enum.Enum):
    """Scale conventions for turning a snapshot into a complex."""

    WEIGHT_SUBLEVEL_CLIQUE = "weight-sublevel-clique"
    VIETORIS_RIPS = "vietoris-rips"
    WEIGHT_RANK_CLIQUE = "weight-rank-clique"
    POWER = "power"
    WEIGHTED_DEGREE_SUBLEVEL = "weighted-degree-sublevel"


def _dijkstra(source: int, adj: Mapping[int, list[tuple[int, float]]], cutoff: float) -> dict[int, float]:
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd <= cutoff and nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _bfs_hops(source: int, neighbors: Mapping[int, set[int]], cutoff: int) -> set[int]:
    seen = {source}
    frontier = [source]
    for _ in range(cutoff):
        nxt = []
        for u in frontier:
            for v in neighbors[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def build_complex(
    s: Snapshot,
    nu_star: float,
    mode: FiltrationMode = FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE,
    node_function: Callable[[int], float] | Mapping[int, float] | None = None,
) -> SimplicialComplex:
    """Complex of the snapshot at scale ``nu_star`` under ``mode``.

    Active snapshot nodes always appear as 0-simplices (except in the
    weighted-degree mode, where the node function filters them).  Every
    mode clique-expands its edge set up to triangles, so the output is
    face closed and monotone in ``nu_star``.

    ``node_function`` only applies to WEIGHTED_DEGREE_SUBLEVEL and
    defaults to the weighted degree; a mapping or callable over node ids
    may replace it (dataset-specific scales).
    """
    if not math.isfinite(nu_star):
        raise ValueError("nu_star must be finite")
    nodes = sorted(s.nodes)

    if mode is FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE:
        kept = [e for e, w in s.weights.items() if w <= nu_star]
        return SimplicialComplex.from_graph(nodes, kept)

    if mode is FiltrationMode.VIETORIS_RIPS:
        adj: dict[int, list[tuple[int, float]]] = {v: [] for v in nodes}
        for (u, v), w in s.weights.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        kept = []
        for u in nodes:
            dist = _dijkstra(u, adj, nu_star)
            kept.extend((u, v) for v, d in dist.items() if v > u and d <= nu_star)
        return SimplicialComplex.from_graph(nodes, kept)

    if mode is FiltrationMode.WEIGHT_RANK_CLIQUE:
        if nu_star < 0:
            raise ValueError("nu_star must be nonnegative in weight-rank mode")
        distinct = sorted({w for w in s.weights.values()}, reverse=True)
        m = len(distinct)
        scale = {w: (r + 1) / m for r, w in enumerate(distinct)}
        kept = [e for e, w in s.weights.items() if scale[w] <= nu_star]
        return SimplicialComplex.from_graph(nodes, kept)

    if mode is FiltrationMode.POWER:
        if nu_star < 0:
            raise ValueError("nu_star must be nonnegative in power mode")
        hops = int(math.floor(nu_star))
        neighbors = s.neighbors()
        kept = []
        for u in nodes:
            reach = _bfs_hops(u, neighbors, hops)
            kept.extend((u, v) for v in reach if v > u)
        return SimplicialComplex.from_graph(nodes, kept)

    if mode is FiltrationMode.WEIGHTED_DEGREE_SUBLEVEL:
        if node_function is None:
            values = s.weighted_degrees()
            f = values.__getitem__
        elif isinstance(node_function, Mapping):
            f = node_function.__getitem__
        else:
            f = node_function
        low = [v for v in nodes if f(v) <= nu_star]
        low_set = set(low)
        kept = [(u, v) for (u, v) in s.weights if u in low_set and v in low_set]
        return SimplicialComplex.from_graph(low, kept)

    raise ValueError(f"unknown filtration mode {mode!r}")


def betti_numbers(c: SimplicialComplex, p: int) -> int:
    """Rank of p-th GF(2) homology: dim ker boundary_p - rank boundary_{p+1}."""
    if p not in (0, 1):
        raise ValueError(f"p must be 0 or 1, got {p}")
    vpos = {v: i for i, v in enumerate(c.vertices)}
    epos = {e: i for i, e in enumerate(c.edges)}
    d1 = [(1 << vpos[u]) | (1 << vpos[v]) for (u, v) in c.edges]
    if p == 0:
        return len(c.vertices) - gf2.rank_of_columns(d1)
    d2 = [
        gf2.from_indices((epos[(u, v)], epos[(u, w)], epos[(v, w)]))
        for (u, v, w) in c.triangles
    ]
    cycles = len(c.edges) - gf2.rank_of_columns(d1)
    return cycles - gf2.rank_of_columns(d2)


def write_complex_dump(c: SimplicialComplex, path) -> None:
    """Debug dump: one simplex per line, vertices space-separated."""
    with open(path, "w", encoding="ascii") as fh:
        for s in c:
            fh.write(" ".join(str(v) for v in s) + "\n")


def read_complex_dump(path) -> SimplicialComplex:
    simplices = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                simplices.append(tuple(int(x) for x in line.split()))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return SimplicialComplex(simplices)
