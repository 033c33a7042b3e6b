import numpy as np
from hypothesis import given, strategies as st

from zigzagst import gf2


def test_from_indices_and_bits_roundtrip():
    v = gf2.from_indices([0, 3, 17])
    assert list(gf2.bits_of(v)) == [0, 3, 17]
    assert gf2.from_indices([]) == 0


def test_matvec_xors_selected_columns():
    cols = [0b01, 0b10, 0b11]
    assert gf2.matvec(cols, 0b101) == 0b01 ^ 0b11
    assert gf2.matvec(cols, 0) == 0


def test_rank_small_matrices():
    assert gf2.rank_of_columns([0b1, 0b10, 0b11]) == 2
    assert gf2.rank_of_columns([0, 0]) == 0
    assert gf2.rank_of_columns([0b111]) == 1


def test_nullspace_members_multiply_to_zero():
    cols = [0b011, 0b101, 0b110, 0b111]
    kernel = gf2.nullspace_of_columns(cols)
    assert len(kernel) == len(cols) - gf2.rank_of_columns(cols)
    for combo in kernel:
        assert gf2.matvec(cols, combo) == 0


def test_tracked_basis_reports_exact_combinations():
    tb = gf2.TrackedBasis(track=True)
    vecs = [0b0011, 0b0110, 0b0101]  # third = first XOR second
    added0, _ = tb.insert(vecs[0])
    added1, _ = tb.insert(vecs[1])
    added2, combo = tb.insert(vecs[2])
    assert added0 and added1 and not added2
    assert combo == 0b111
    residual, combo = tb.reduce(0b0110)
    assert residual == 0
    assert gf2.matvec(vecs, combo) == 0b0110


@given(st.lists(st.integers(min_value=0, max_value=2**12 - 1), max_size=20))
def test_rank_matches_numpy_gf2_elimination(cols):
    dense = np.zeros((12, len(cols)), dtype=np.uint8)
    for j, c in enumerate(cols):
        for i in gf2.bits_of(c):
            dense[i, j] = 1
    # plain elimination oracle
    m = dense.copy()
    rank = 0
    for col in range(m.shape[1]):
        rows = np.nonzero(m[rank:, col])[0]
        if rows.size == 0:
            continue
        pivot = rank + rows[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    assert gf2.rank_of_columns(cols) == rank
