import numpy as np
import pytest
from hypothesis import given, strategies as st

from zigzagst.dyngraph import Snapshot, union_graph
from zigzagst.filtration import (
    FiltrationMode,
    SimplicialComplex,
    betti_numbers,
    build_complex,
    read_complex_dump,
    write_complex_dump,
)
from util import union_find_components


def snap(edges, n=6, index=1, nodes=None):
    return Snapshot.from_edges(index, n, edges, nodes=nodes)


def cycle4(w=0.2):
    return snap([(0, 1, w), (1, 2, w), (2, 3, w), (0, 3, w)])


# --- SimplicialComplex ----------------------------------------------------------

def test_face_closure_enforced():
    with pytest.raises(ValueError):
        SimplicialComplex([(0, 1)])  # missing vertices
    with pytest.raises(ValueError):
        SimplicialComplex([(0,), (1,), (2,), (0, 1), (0, 2), (0, 1, 2)])  # missing edge


def test_simplices_sorted_and_dim_capped():
    with pytest.raises(ValueError):
        SimplicialComplex([(1, 0)])
    with pytest.raises(ValueError):
        SimplicialComplex([(0, 1, 2, 3)])


def test_from_graph_clique_expansion():
    cx = SimplicialComplex.from_graph([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    assert cx.triangles == ((0, 1, 2),)
    assert len(cx) == 3 + 3 + 1


def test_subcomplex_and_difference():
    small = SimplicialComplex.from_graph([0, 1], [(0, 1)])
    big = SimplicialComplex.from_graph([0, 1, 2], [(0, 1), (1, 2)])
    assert small.is_subcomplex_of(big)
    assert not big.is_subcomplex_of(small)
    assert big.difference(small) == {(2,), (1, 2)}


# --- build_complex per mode -----------------------------------------------------

def test_sublevel_clique_four_cycle_has_no_triangle():
    cx = build_complex(cycle4(), 0.5, FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE)
    assert len(cx.vertices) == 4 and len(cx.edges) == 4 and not cx.triangles


def test_sublevel_clique_triangle_expands():
    s = snap([(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.2)])
    cx = build_complex(s, 0.5, FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE)
    assert cx.triangles == ((0, 1, 2),)


def test_sublevel_threshold_excludes_heavy_edges():
    s = snap([(0, 1, 0.2), (1, 2, 0.9)])
    cx = build_complex(s, 0.5, FiltrationMode.WEIGHT_SUBLEVEL_CLIQUE)
    assert cx.edges == ((0, 1),)
    assert (2,) in cx  # active node stays as a vertex


def test_vietoris_rips_uses_path_distance():
    # path 0-1-2 with weights 0.3: d(0,2) = 0.6 <= 0.7 connects them
    s = snap([(0, 1, 0.3), (1, 2, 0.3)])
    cx = build_complex(s, 0.7, FiltrationMode.VIETORIS_RIPS)
    assert (0, 2) in cx and cx.triangles == ((0, 1, 2),)
    cx2 = build_complex(s, 0.4, FiltrationMode.VIETORIS_RIPS)
    assert (0, 2) not in cx2


def test_vietoris_rips_unreachable_never_connected():
    s = snap([(0, 1, 0.1)], nodes=[0, 1, 4])
    cx = build_complex(s, 100.0, FiltrationMode.VIETORIS_RIPS)
    assert (4,) in cx
    assert all(4 not in e for e in cx.edges)


def test_weight_rank_ranks_heaviest_first():
    s = snap([(0, 1, 0.9), (1, 2, 0.5), (2, 3, 0.1)])
    # three distinct weights: heaviest gets scale 1/3, lightest 1
    cx = build_complex(s, 1.0 / 3.0, FiltrationMode.WEIGHT_RANK_CLIQUE)
    assert cx.edges == ((0, 1),)
    cx_all = build_complex(s, 1.0, FiltrationMode.WEIGHT_RANK_CLIQUE)
    assert len(cx_all.edges) == 3
    with pytest.raises(ValueError):
        build_complex(s, -0.1, FiltrationMode.WEIGHT_RANK_CLIQUE)


def test_power_mode_hop_counts():
    s = snap([(0, 1, 0.9), (1, 2, 0.9)])
    cx1 = build_complex(s, 1.0, FiltrationMode.POWER)
    assert (0, 2) not in cx1
    cx2 = build_complex(s, 2.0, FiltrationMode.POWER)
    assert (0, 2) in cx2 and cx2.triangles == ((0, 1, 2),)
    with pytest.raises(ValueError):
        build_complex(s, -1.0, FiltrationMode.POWER)


def test_weighted_degree_sublevel_filters_nodes():
    s = snap([(0, 1, 0.6), (1, 2, 0.2)])
    # weighted degrees: 0 -> 0.6, 1 -> 0.8, 2 -> 0.2
    cx = build_complex(s, 0.7, FiltrationMode.WEIGHTED_DEGREE_SUBLEVEL)
    assert set(cx.vertices) == {0, 2}
    assert not cx.edges  # both kept edges touch node 1
    cx_all = build_complex(s, 1.0, FiltrationMode.WEIGHTED_DEGREE_SUBLEVEL)
    assert len(cx_all.edges) == 2


def test_weighted_degree_custom_node_function():
    s = snap([(0, 1, 0.6)])
    cx = build_complex(
        s, 0.5, FiltrationMode.WEIGHTED_DEGREE_SUBLEVEL, node_function={0: 0.1, 1: 0.9}
    )
    assert set(cx.vertices) == {0}


@given(st.integers(0, 2**30), st.sampled_from(list(FiltrationMode)))
def test_monotone_in_scale_and_face_closed(seed, mode):
    rng = np.random.default_rng(seed)
    edges = [
        (u, v, float(rng.uniform(0.05, 1.0)))
        for u in range(6)
        for v in range(u + 1, 6)
        if rng.random() < 0.45
    ]
    s = snap(edges, n=6, nodes=range(6))
    lo, hi = sorted(rng.uniform(0.0, 1.5, size=2))
    if mode is FiltrationMode.POWER:
        lo, hi = sorted(rng.integers(0, 4, size=2).astype(float))
    small = build_complex(s, float(lo), mode)
    large = build_complex(s, float(hi), mode)
    assert small.is_subcomplex_of(large)
    # face closure is revalidated by the constructor
    SimplicialComplex(list(large))


@given(st.integers(0, 2**30))
def test_union_inclusion_in_sublevel_mode(seed):
    rng = np.random.default_rng(seed)

    def random_snap(index):
        edges = [
            (u, v, float(rng.uniform(0.05, 1.0)))
            for u in range(5)
            for v in range(u + 1, 5)
            if rng.random() < 0.5
        ]
        return snap(edges, n=5, index=index)

    g1, g2 = random_snap(1), random_snap(2)
    nu = float(rng.uniform(0.1, 1.0))
    u = union_graph(g1, g2)
    assert build_complex(g1, nu).is_subcomplex_of(build_complex(u, nu))
    assert build_complex(g2, nu).is_subcomplex_of(build_complex(u, nu))


# --- betti numbers ----------------------------------------------------------------

def test_betti_examples():
    four_cycle = build_complex(cycle4(), 0.5)
    assert betti_numbers(four_cycle, 0) == 1
    assert betti_numbers(four_cycle, 1) == 1
    filled = build_complex(snap([(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.2)]), 0.5)
    assert betti_numbers(filled, 0) == 1
    assert betti_numbers(filled, 1) == 0
    two_edges = build_complex(snap([(0, 1, 0.2), (2, 3, 0.2)]), 0.5)
    assert betti_numbers(two_edges, 0) == 2
    assert betti_numbers(two_edges, 1) == 0
    with pytest.raises(ValueError):
        betti_numbers(filled, 2)


@given(st.integers(0, 2**30))
def test_betti0_matches_union_find(seed):
    rng = np.random.default_rng(seed)
    edges = [
        (u, v, float(rng.uniform(0.05, 1.0)))
        for u in range(8)
        for v in range(u + 1, 8)
        if rng.random() < 0.25
    ]
    s = snap(edges, n=8, nodes=range(8))
    cx = build_complex(s, float(rng.uniform(0.1, 1.0)))
    assert betti_numbers(cx, 0) == union_find_components(cx)


def test_complex_dump_roundtrip(tmp_path):
    cx = build_complex(snap([(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.2)]), 0.5)
    path = tmp_path / "complex.txt"
    write_complex_dump(cx, path)
    assert read_complex_dump(path) == cx
    text = path.read_text().splitlines()
    assert text[0] == "0" and text[-1] == "0 1 2"
