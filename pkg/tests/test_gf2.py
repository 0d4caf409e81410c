import numpy as np
import pytest

from entwit.gf2 import (
    BitMatrix,
    bits_of,
    compress,
    cross_submatrix,
    mask_of,
    nullspace,
    rank_gf2,
    rank_of_rows,
    row_reduce,
    solve_affine,
)
from entwit.exceptions import GraphError
from entwit.graphs import build_chain, build_complete


def parity(x):
    return bin(x).count("1") & 1


@pytest.fixture
def triangle():
    # rows 110, 011, 101: the third row is the sum of the first two
    return BitMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])


def test_from_rows_packs_column_j_into_bit_j():
    m = BitMatrix.from_rows([[1, 0, 1], [0, 1, 0]])
    assert m.rows == (0b101, 0b010)
    assert m.get(0, 2) == 1
    assert m.get(1, 0) == 0


def test_from_rows_rejects_ragged_input():
    with pytest.raises(ValueError):
        BitMatrix.from_rows([[1, 0], [1]])


def test_row_wider_than_declared_columns():
    with pytest.raises(ValueError):
        BitMatrix(1, 2, (0b100,))


def test_array_conversion_and_transpose():
    array = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    m = BitMatrix.from_array(array)
    assert (m.to_array() == array).all()
    assert (m.transpose().to_array() == array.T).all()
    assert m.transpose().transpose() == m


def test_render():
    assert BitMatrix.from_rows([[1, 0], [0, 1]]).render() == "10\n01"


def test_rank():
    assert rank_gf2(BitMatrix.from_rows(np.eye(4, dtype=int).tolist())) == 4
    assert rank_gf2(BitMatrix.from_rows([[1, 1], [1, 1]])) == 1
    assert rank_gf2(BitMatrix.zeros(3, 3)) == 0
    assert rank_of_rows([0b11, 0b110, 0b101]) == 2


def test_row_reduce(triangle):
    reduced = row_reduce(triangle)
    assert reduced.pivots == (0, 1)
    assert reduced.rank == 2
    assert reduced.rref.rows == (0b101, 0b110, 0)


def test_nullspace(triangle):
    basis = nullspace(triangle)
    assert basis.rows == (0b111,)
    for row in triangle.rows:
        assert parity(row & basis.rows[0]) == 0


def test_nullspace_of_full_rank_matrix_is_empty():
    assert nullspace(BitMatrix.from_rows([[1, 0], [0, 1]])).n_rows == 0


def test_solve_affine(triangle):
    rhs = 0b101  # M applied to x = 001
    x, free = solve_affine(triangle, rhs)
    assert free == (2,)
    for i, row in enumerate(triangle.rows):
        assert parity(row & x) == (rhs >> i) & 1


def test_solve_affine_inconsistent():
    with pytest.raises(ValueError):
        solve_affine(BitMatrix.from_rows([[1, 1], [1, 1]]), 0b01)


def test_mask_helpers():
    assert mask_of([0, 1, 3]) == 0b1011
    assert bits_of(0b1011) == [0, 1, 3]
    assert compress(0b1010, [1, 3]) == 0b11


def test_cross_submatrix():
    block = cross_submatrix(build_chain(3), [1])
    assert (block.n_rows, block.n_cols) == (1, 2)
    assert rank_gf2(block) == 1
    assert rank_gf2(cross_submatrix(build_complete(4), [0, 1])) == 1


def test_cross_submatrix_trivial_cut():
    with pytest.raises(GraphError):
        cross_submatrix(build_chain(3), [0, 1, 2])
    with pytest.raises(GraphError):
        cross_submatrix(build_chain(3), [])
    with pytest.raises(GraphError):
        cross_submatrix(build_chain(3), [5])


def eliminate_mod2(array):
    """Plain Gaussian elimination on a 0/1 array"""
    work = np.array(array, dtype=np.uint8) % 2
    rank = 0
    for col in range(work.shape[1]):
        hits = np.nonzero(work[rank:, col])[0]
        if len(hits) == 0:
            continue
        pivot = rank + hits[0]
        work[[rank, pivot]] = work[[pivot, rank]]
        for r in range(work.shape[0]):
            if r != rank and work[r, col]:
                work[r] ^= work[rank]
        rank += 1
        if rank == work.shape[0]:
            break
    return rank


@pytest.mark.parametrize("seed", range(20))
def test_rank_matches_elimination_and_transpose(seed):
    rng = np.random.default_rng(seed)
    shape = tuple(int(s) for s in rng.integers(1, 65, size=2))
    array = (rng.random(shape) < rng.uniform(0.05, 0.6)).astype(np.uint8)
    m = BitMatrix.from_array(array)
    assert rank_gf2(m) == eliminate_mod2(array)
    assert rank_gf2(m.transpose()) == rank_gf2(m)
    assert row_reduce(m).rank == rank_gf2(m)


def test_rank_of_degenerate_matrices():
    assert rank_gf2(BitMatrix.zeros(5, 7)) == 0
    assert rank_gf2(BitMatrix.from_rows([[1, 0, 1, 1]] * 4)) == 1
    assert rank_of_rows([0b0110, 0b0110, 0b1001, 0, 0b1111]) == 2
    assert rank_gf2(BitMatrix.from_rows([[1, 1], [1, 1], [0, 0]]).transpose()) == 1


def test_cross_submatrix_chain6_inner_pair():
    block = cross_submatrix(build_chain(6), [1, 2])
    assert block.to_array().tolist() == [[1, 0, 0, 0], [0, 1, 0, 0]]
    assert rank_gf2(block) == 2
