import numpy as np
import pytest

from fimhom.category import Grid, coset_inclusions, enumerate_hom, hom_count
from fimhom.free_sum import FreeSum, cover_matrix, family_h0, group_by_degree
from fimhom.linalg import PrimeField, Subspace, kernel_basis, matmul, rank
from fimhom.module import action_of, free_sum_module, orbit_columns


@pytest.fixture
def mixed(f3):
    """M(0,0)^2 ⊕ M(1,0) ⊕ M(0,1) on the (2,2) grid."""
    return FreeSum.on(Grid((2, 2)), f3, [(0, 0), (1, 0), (0, 0), (0, 1)])


def test_blocks_group_degrees_in_order(mixed):
    assert mixed.blocks == (((0, 0), 2), ((1, 0), 1), ((0, 1), 1))
    assert mixed.degrees() == ((0, 0), (0, 0), (1, 0), (0, 1))
    assert mixed.rank() == 4
    assert mixed.dim((0, 0)) == 2
    assert mixed.dim((1, 1)) == 2 + 1 + 1
    assert mixed.dim((2, 2)) == 2 + 2 + 2


def test_invalid_blocks_are_rejected(f2):
    with pytest.raises(ValueError):
        FreeSum(Grid((2,)), f2, (((0,), 1), ((0,), 1)))
    with pytest.raises(ValueError):
        FreeSum(Grid((2,)), f2, (((3,), 1),))
    with pytest.raises(ValueError):
        FreeSum(Grid((2,)), f2, (((1,), 0),))


def test_push_agrees_with_dense_action(mixed):
    V = free_sum_module(mixed)
    rng = np.random.default_rng(0)
    for r in [(0, 0), (1, 0), (1, 1)]:
        rows = rng.integers(0, 3, size=(3, mixed.dim(r)))
        for g in enumerate_hom(r, (2, 2))[:7]:
            expected = matmul(action_of(g, V), rows.T.copy(), mixed.field).T
            assert np.array_equal(mixed.push(rows, g), expected), g


def test_images_agree_with_orbit_columns(mixed):
    V = free_sum_module(mixed)
    rng = np.random.default_rng(1)
    d = (1, 0)
    vectors = rng.integers(0, 3, size=(2, mixed.dim(d)))
    for n in [(1, 0), (2, 1), (2, 2)]:
        expected = orbit_columns(V, {d: list(vectors)}, n)
        assert np.array_equal(mixed.images(vectors, d, n), expected), n


def test_images_are_empty_below_the_degree(mixed):
    out = mixed.images(np.ones((2, mixed.dim((1, 1))), dtype=np.int64), (1, 1), (2, 0))
    assert out.shape == (mixed.dim((2, 0)), 0)


def test_coset_inclusions_span_every_lower_morphism(f2):
    grid = Grid((3, 2))
    P = FreeSum(grid, f2, (((0, 0), 1), ((1, 1), 1)))
    V = free_sum_module(P)
    n = (3, 2)
    assert [len(coset_inclusions(n, i)) for i in range(2)] == [3, 2]
    assert coset_inclusions((0, 2), 0) == ()
    full = {m: Subspace.full(P.dim(m), f2) for m in grid.objects()}
    by_cosets = Subspace.from_rows(P.lower_image(full, n), P.dim(n), f2)
    rows = [action_of(f, V).T for r in grid.objects() if r != n for f in enumerate_hom(r, n)]
    by_all = Subspace.from_rows(np.vstack(rows), P.dim(n), f2)
    assert by_cosets == by_all


def test_family_h0_of_the_whole_sum_counts_blocks(mixed):
    full = {n: Subspace.full(mixed.dim(n), mixed.field) for n in mixed.objects()}
    dims, generators = family_h0(mixed, full)
    assert {n: d for n, d in dims.items() if d} == {(0, 0): 2, (1, 0): 1, (0, 1): 1}
    assert [n for n, _ in generators] == [(0, 0), (0, 0), (0, 1), (1, 0)]
    bare, none = family_h0(mixed, full, with_generators=False)
    assert bare == dims
    assert none == []


@pytest.mark.parametrize("p", [2, 3])
def test_cover_of_the_augmentation_kernel(p):
    """Kernel of M(0) -> k at 0: generated by one element in degree 1."""
    field = PrimeField(p)
    grid = Grid((4,))
    P = FreeSum(grid, field, (((0,), 1),))
    spaces = {n: Subspace.full(P.dim(n), field) if n != (0,) else Subspace.zero(1, field) for n in grid.objects()}
    dims, generators = family_h0(P, spaces)
    assert {n: d for n, d in dims.items() if d} == {(1,): 1}
    grouped = group_by_degree(generators)
    Q = FreeSum(grid, field, tuple((d, len(vs)) for d, vs in grouped.items()))
    for n in grid.objects():
        mat = cover_matrix(P, Q, grouped, n)
        assert mat.shape == (P.dim(n), Q.dim(n))
        assert rank(mat, field) == spaces[n].rank
        assert kernel_basis(mat, field, canonical=False).rank == Q.dim(n) - spaces[n].rank


def test_cover_matrix_checks_the_column_count(mixed):
    grouped = {(0, 0): [np.ones(2, dtype=np.int64)]}
    wrong = FreeSum(mixed.grid, mixed.field, (((0, 0), 2),))
    with pytest.raises(ValueError, match="columns"):
        cover_matrix(mixed, wrong, grouped, (1, 1))


def test_offsets_partition_the_fiber(mixed):
    offsets = mixed.offsets((2, 1))
    sizes = np.diff(offsets)
    assert sizes.tolist() == [2 * hom_count((0, 0), (2, 1)), hom_count((1, 0), (2, 1)), hom_count((0, 1), (2, 1))]
