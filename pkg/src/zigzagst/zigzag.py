"""Zigzag persistence over alternating snapshot/union complex sequences.

A window of T snapshots yields 2T-1 complexes: each snapshot includes
into the union with its successor, so arrows alternate direction.  The
interval decomposition of the induced GF(2) homology module is recovered
from generalized ranks of all contiguous segments (the rank of the
canonical limit-to-colimit map counts the intervals covering a segment),
which avoids any order-sensitive basis bookkeeping.  Births and deaths
land on a half-integer time grid stored exactly as doubled integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import gf2
from .dyngraph import Snapshot, union_graph
from .filtration import (
    FiltrationMode,
    Simplex,
    SimplicialComplex,
    betti_numbers,
    build_complex,
)

__all__ = [
    "HalfIndex",
    "DiagramPoint",
    "ZPD",
    "ArrowEvents",
    "ZigzagFiltration",
    "InclusionError",
    "EventOrderError",
    "build_zigzag",
    "compute_zigzag_persistence",
    "betti_consistency_check",
    "ConsistencyReport",
    "write_zpd_csv",
    "read_zpd_csv",
]


class InclusionError(ValueError):
    """A complex in the zigzag fails to include into its union."""


class EventOrderError(ValueError):
    """Arrow event lists are inconsistent with the stored complexes."""


@dataclass(frozen=True, order=True)
class HalfIndex:
    """Time on the grid {1, 3/2, 2, ...} stored exactly as 2t."""

    twice: int

    def __post_init__(self):
        if self.twice < 2:
            raise ValueError(f"half-index 2t = {self.twice} below the grid start")

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_union(self) -> bool:
        return self.twice % 2 == 1

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


@dataclass(frozen=True, order=True)
class DiagramPoint:
    """One interval of the decomposition, in homology dimension ``dim``."""

    dim: int
    birth: HalfIndex
    death: HalfIndex

    def __post_init__(self):
        if self.dim not in (0, 1):
            raise ValueError(f"dimension must be 0 or 1, got {self.dim}")
        if self.death < self.birth:
            raise ValueError(f"death {self.death} precedes birth {self.birth}")


@dataclass(frozen=True)
class ZPD:
    """Multiset of (dim, birth, death) points on the half-integer grid."""

    points: tuple[DiagramPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(self.points)))

    def pairs(self, dim: int) -> list[tuple[float, float]]:
        """(birth, death) values in one homology dimension."""
        return [(p.birth.value, p.death.value) for p in self.points if p.dim == dim]

    def count_alive(self, dim: int, twice: int) -> int:
        return sum(
            1 for p in self.points if p.dim == dim and p.birth.twice <= twice <= p.death.twice
        )

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ArrowEvents:
    """Simplices crossing one arrow: added into a union, or removed out."""

    forward: bool
    simplices: tuple[Simplex, ...]


@dataclass(frozen=True)
class ZigzagFiltration:
    """The 2T-1 complexes of a window plus per-arrow event lists."""

    complexes: tuple[SimplicialComplex, ...]
    events: tuple[ArrowEvents, ...]

    def __post_init__(self):
        if len(self.complexes) % 2 == 0 or not self.complexes:
            raise ValueError("a zigzag filtration has odd length 2T-1")
        if len(self.events) != len(self.complexes) - 1:
            raise ValueError("need exactly one event list per arrow")

    @property
    def window_length(self) -> int:
        return (len(self.complexes) + 1) // 2


def _arrow_name(arrow: int) -> str:
    """Human-readable arrow label; snapshots are numbered from 1."""
    k = arrow // 2 + 1
    if arrow % 2 == 0:
        return f"C(G_{k}) -> C(G_{k} u G_{k + 1})"
    return f"C(G_{k + 1}) -> C(G_{k} u G_{k + 1})"


def build_zigzag(
    window: Sequence[Snapshot],
    nu_star: float,
    mode: FiltrationMode = FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE,
    node_function: Callable[[int], float] | Mapping[int, float] | None = None,
) -> ZigzagFiltration:
    """Complexes and events of the alternating diagram for one window.

    Inclusions are verified on every arrow; modes whose complexes are not
    monotone under graph union (possible for rank or degree scales) raise
    InclusionError naming the failing arrow.
    """
    if not window:
        raise ValueError("window must contain at least one snapshot")
    snaps = list(window)
    complexes: list[SimplicialComplex] = []
    for i, s in enumerate(snaps):
        complexes.append(build_complex(s, nu_star, mode, node_function))
        if i + 1 < len(snaps):
            u = union_graph(s, snaps[i + 1])
            complexes.append(build_complex(u, nu_star, mode, node_function))
    events: list[ArrowEvents] = []
    for a in range(len(complexes) - 1):
        if a % 2 == 0:
            sub, sup, forward = complexes[a], complexes[a + 1], True
        else:
            sub, sup, forward = complexes[a + 1], complexes[a], False
        if not sub.is_subcomplex_of(sup):
            missing = sorted(sub.difference(sup), key=lambda s: (len(s), s))[:5]
            raise InclusionError(
                f"arrow {_arrow_name(a)} violates inclusion; missing simplices {missing}"
            )
        diff = sup.difference(sub)
        if forward:
            ordered = tuple(sorted(diff, key=lambda s: (len(s), s)))
        else:
            ordered = tuple(sorted(diff, key=lambda s: (-len(s), s)))
        events.append(ArrowEvents(forward, ordered))
    return ZigzagFiltration(tuple(complexes), tuple(events))


def _validate_events(zf: ZigzagFiltration) -> None:
    for a, ev in enumerate(zf.events):
        cur = {tuple(s) for s in zf.complexes[a]}
        nxt = {tuple(s) for s in zf.complexes[a + 1]}
        present = set(cur)
        if ev.forward:
            for s in ev.simplices:
                if s in present:
                    raise EventOrderError(f"arrow {a}: added simplex {s} already present")
                if len(s) > 1:
                    for i in range(len(s)):
                        face = s[:i] + s[i + 1 :]
                        if face not in present:
                            raise EventOrderError(
                                f"arrow {a}: simplex {s} added before its face {face}"
                            )
                present.add(s)
        else:
            for s in ev.simplices:
                if s not in present:
                    raise EventOrderError(f"arrow {a}: removed simplex {s} not present")
                for m in present:
                    if len(m) > len(s) and set(s) < set(m):
                        raise EventOrderError(
                            f"arrow {a}: simplex {s} removed before its coface {m}"
                        )
                present.discard(s)
        if present != nxt:
            raise EventOrderError(f"arrow {a}: events do not transform the complex correctly")


class _ComplexHom:
    """Homology bases of one complex with coordinate bookkeeping.

    Chains are gf2 bitsets over the complex's own sorted vertex/edge
    lists.  ``express`` rewrites a cycle in homology coordinates by
    reducing it against the tracked span of boundaries plus chosen
    representatives.
    """

    __slots__ = ("verts", "edges", "vpos", "epos", "reps", "_tb", "_slots")

    def __init__(self, cx: SimplicialComplex):
        self.verts = cx.vertices
        self.edges = cx.edges
        self.vpos = {v: i for i, v in enumerate(self.verts)}
        self.epos = {e: i for i, e in enumerate(self.edges)}

        tb0 = gf2.TrackedBasis(track=True)
        edge_cycles: list[int] = []
        for (u, v) in self.edges:
            added, combo = tb0.insert((1 << self.vpos[u]) | (1 << self.vpos[v]))
            if not added:
                edge_cycles.append(combo)
        reps0: list[int] = []
        slots0: list[int] = []
        for i in range(len(self.verts)):
            added, _ = tb0.insert(1 << i)
            if added:
                reps0.append(1 << i)
                slots0.append(tb0.n_inserted - 1)

        tb1 = gf2.TrackedBasis(track=True)
        for (u, v, w) in cx.triangles:
            tb1.insert(
                gf2.from_indices(
                    (self.epos[(u, v)], self.epos[(u, w)], self.epos[(v, w)])
                )
            )
        reps1: list[int] = []
        slots1: list[int] = []
        for z in edge_cycles:
            added, _ = tb1.insert(z)
            if added:
                reps1.append(z)
                slots1.append(tb1.n_inserted - 1)

        self.reps = (reps0, reps1)
        self._tb = (tb0, tb1)
        self._slots = (slots0, slots1)

    def betti(self, p: int) -> int:
        return len(self.reps[p])

    def express(self, p: int, chain: int) -> int:
        residual, combo = self._tb[p].reduce(chain)
        if residual:
            raise AssertionError("chain is not a cycle of this complex")
        out = 0
        for r, slot in enumerate(self._slots[p]):
            if (combo >> slot) & 1:
                out |= 1 << r
        return out

    def include_chain(self, p: int, sub: "_ComplexHom", chain: int) -> int:
        """Reindex a p-chain of a subcomplex into this complex's bits."""
        out = 0
        if p == 0:
            for i in gf2.bits_of(chain):
                out |= 1 << self.vpos[sub.verts[i]]
        else:
            for i in gf2.bits_of(chain):
                out |= 1 << self.epos[sub.edges[i]]
        return out


def _induced_map(p: int, sub: _ComplexHom, sup: _ComplexHom) -> list[int]:
    """Homology map of the inclusion: one super-coordinate column per sub basis vector."""
    return [sup.express(p, sup.include_chain(p, sub, rep)) for rep in sub.reps[p]]


def _echelon_insert(ech: dict[int, int], vec: int) -> int:
    """Reduce ``vec`` against a lowest-bit-pivot echelon, inserting if independent."""
    while vec:
        pv = (vec & -vec).bit_length() - 1
        hit = ech.get(pv)
        if hit is None:
            ech[pv] = vec
            return vec
        vec ^= hit
    return 0


def _interval_multiplicities(homs: Sequence[_ComplexHom], p: int) -> dict[tuple[int, int], int]:
    """Interval multiplicities via generalized ranks of segment restrictions.

    For every segment [a, b] of diagram positions, r[a, b] is the rank of
    the canonical limit-to-colimit map of the restricted module, which
    counts the interval summands covering the whole segment.  Interval
    multiplicities then follow by inclusion-exclusion over segment
    endpoints.  Ranks are monotone under widening, so each row stops at
    the first zero.

    Snapshots (even positions) are the sources of the diagram and unions
    (odd positions) the sinks.  For a fixed left end the code maintains,
    while the right end grows: the pair space K of (class at a, class at
    b) joined by a compatible chain, and an echelon of the colimit gluing
    relations laid out so that rows supported purely on position a are
    exposed (block a occupies the top bits).  The rank is then the number
    of left components of K that are independent modulo those rows.
    """
    q_count = len(homs)
    dims = [h.betti(p) for h in homs]
    arrow_maps: list[list[int]] = []
    for q in range(q_count - 1):
        if q % 2 == 0:
            arrow_maps.append(_induced_map(p, homs[q], homs[q + 1]))  # V_q -> V_{q+1}
        else:
            arrow_maps.append(_induced_map(p, homs[q + 1], homs[q]))  # V_{q+1} -> V_q
    ranks: dict[tuple[int, int], int] = {}
    for a in range(q_count):
        if dims[a] == 0:
            continue
        ranks[(a, a)] = dims[a]
        off: dict[int, int] = {}
        acc = 0
        for q in range(a + 1, q_count):
            off[q] = acc
            acc += dims[q]
        off[a] = acc  # block a on top so intersection rows are exposed
        relations: dict[int, int] = {}  # echelon of colimit gluing relations
        zero_rows: list[int] = []  # relation rows supported purely on block a
        pairs: list[tuple[int, int]] = [(1 << i, 1 << i) for i in range(dims[a])]
        for b in range(a + 1, q_count):
            cols = arrow_maps[b - 1]
            m_b = dims[b]
            if b % 2 == 1:
                # Forward arrow f: V_{b-1} -> V_b; push right components.
                ech: dict[int, int] = {}
                new_pairs = []
                for u, v in pairs:
                    comb = _echelon_insert(ech, (u << m_b) | gf2.matvec(cols, v))
                    if comb:
                        new_pairs.append((comb >> m_b, comb & ((1 << m_b) - 1)))
                pairs = new_pairs
                src, dst = b - 1, b
            else:
                # Backward arrow g: V_b -> V_{b-1}; take preimages of K.
                m_prev = dims[b - 1]
                tb = gf2.TrackedBasis(track=True)
                for u, v in pairs:
                    tb.insert((u << m_prev) | v)
                n_seed = tb.n_inserted
                new_pairs = []
                for i in range(dims[a] + m_b):
                    if i < dims[a]:
                        vec = (1 << i) << m_prev
                    else:
                        vec = cols[i - dims[a]]
                    added, combo = tb.insert(vec)
                    if not added:
                        units = combo >> n_seed
                        new_pairs.append((units & ((1 << dims[a]) - 1), units >> dims[a]))
                pairs = new_pairs
                src, dst = b, b - 1
            for i in range(dims[src]):
                rel = 1 << (off[src] + i)
                for j in gf2.bits_of(cols[i]):
                    rel ^= 1 << (off[dst] + j)
                row = _echelon_insert(relations, rel)
                if row and (row & -row).bit_length() - 1 >= off[a]:
                    zero_rows.append(row >> off[a])
            if not pairs:
                break
            ech = {}
            for z in zero_rows:
                _echelon_insert(ech, z)
            r = 0
            for u, _ in pairs:
                if _echelon_insert(ech, u):
                    r += 1
            if r == 0:
                break
            ranks[(a, b)] = r
    mult: dict[tuple[int, int], int] = {}
    for (a, b), r in ranks.items():
        m = (
            r
            - ranks.get((a - 1, b), 0)
            - ranks.get((a, b + 1), 0)
            + ranks.get((a - 1, b + 1), 0)
        )
        if m < 0:
            raise AssertionError("negative interval multiplicity")
        if m:
            mult[(a, b)] = m
    return mult


def compute_zigzag_persistence(zf: ZigzagFiltration, maxdim: int = 1) -> ZPD:
    """Interval decomposition of the zigzag module over GF(2).

    Births and deaths follow the half-grid convention: position 2k-1 of
    the diagram (a snapshot) is time k, position 2k (a union) is time
    k + 1/2; classes alive in the last complex die at time T.
    """
    if maxdim != 1:
        raise ValueError("only homology dimensions 0 and 1 are supported")
    _validate_events(zf)
    homs = [_ComplexHom(cx) for cx in zf.complexes]
    points = []
    for dim in (0, 1):
        for (birth_pos, death_pos), count in sorted(_interval_multiplicities(homs, dim).items()):
            points.extend(
                DiagramPoint(dim, HalfIndex(birth_pos + 2), HalfIndex(death_pos + 2))
                for _ in range(count)
            )
    return ZPD(tuple(points))


@dataclass(frozen=True)
class ConsistencyReport:
    """Bar counts versus independently computed Betti numbers."""

    violations: tuple[tuple[int, int, int, int], ...]  # (twice, dim, bars, betti)
    positions_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def betti_consistency_check(zf: ZigzagFiltration, zpd: ZPD) -> ConsistencyReport:
    """At every grid position the number of live bars must equal the Betti number."""
    violations = []
    for q, cx in enumerate(zf.complexes):
        twice = q + 2
        for dim in (0, 1):
            bars = zpd.count_alive(dim, twice)
            betti = betti_numbers(cx, dim)
            if bars != betti:
                violations.append((twice, dim, bars, betti))
    return ConsistencyReport(tuple(violations), len(zf.complexes))


_ZPD_HEADER = "p,twice_birth,twice_death"


def write_zpd_csv(zpd: ZPD, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_ZPD_HEADER + "\n")
        for pt in zpd.points:
            fh.write(f"{pt.dim},{pt.birth.twice},{pt.death.twice}\n")


def read_zpd_csv(path) -> ZPD:
    points = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line == _ZPD_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields")
            try:
                dim, b, d = (int(x) for x in parts)
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            points.append(DiagramPoint(dim, HalfIndex(b), HalfIndex(d)))
    return ZPD(tuple(points))
