"""Core grids, block decomposition, and the strided index maps."""

import numpy as np
import pytest

import meshdft as md
from helpers import rand_tensor


def test_shape_basics():
    s = md.ComputationShape(2, 3, 4)
    assert s.dims == (2, 3, 4)
    assert s.num_cores == 24
    for core in range(24):
        assert s.flat_id(s.coords(core)) == core
    assert s.flat_id((1, 2, 3)) == 23
    with pytest.raises(md.ArgumentError):
        md.ComputationShape(0, 1, 1)
    with pytest.raises(md.ArgumentError):
        s.flat_id((2, 0, 0))
    with pytest.raises(md.ArgumentError):
        s.coords(24)


def test_shape_parse():
    assert md.ComputationShape.parse("2x2x2").dims == (2, 2, 2)
    assert md.ComputationShape.parse("4").dims == (4, 1, 1)
    assert md.ComputationShape.parse("2x8").dims == (2, 8, 1)
    with pytest.raises(md.ArgumentError):
        md.ComputationShape.parse("2y2")
    with pytest.raises(md.ArgumentError):
        md.ComputationShape.parse("1x1x1x1")


def test_shape_lines_group_cores_along_one_dim():
    s = md.ComputationShape(2, 2, 2)
    assert s.lines(2) == [[0, 1], [2, 3], [4, 5], [6, 7]]
    assert s.lines(1) == [[0, 2], [1, 3], [4, 6], [5, 7]]
    assert s.lines(0) == [[0, 4], [1, 5], [2, 6], [3, 7]]
    # every core appears exactly once per dimension
    for d in range(3):
        flat = [c for line in s.lines(d) for c in line]
        assert sorted(flat) == list(range(8))
    with pytest.raises(md.ArgumentError):
        s.lines(3)


def test_global_to_local_examples():
    assert md.global_to_local(0, 2) == (0, 0)
    assert md.global_to_local(5, 2) == (1, 2)  # 5 = 2*2 + 1
    assert md.local_to_global(0, 0, 4) == 0
    assert md.local_to_global(1, 2, 2) == 5
    with pytest.raises(md.ArgumentError):
        md.global_to_local(-1, 2)
    with pytest.raises(md.ArgumentError):
        md.local_to_global(4, 0, 4)


@pytest.mark.parametrize("parts", [2, 4, 8])
def test_strided_maps_are_mutually_inverse(parts):
    for n in range(64):
        beta, offset = md.global_to_local(n, parts)
        assert md.local_to_global(beta, offset, parts) == n
    # bijectivity onto {0..15} for N=16, P=4
    if parts == 4:
        images = {md.local_to_global(b, l, 4) for b in range(4) for l in range(4)}
        assert images == set(range(16))


def test_decompose_single_core_holds_everything():
    x = rand_tensor((4, 6), seed=1)
    blocks, assignment = md.decompose(x, md.ComputationShape(1, 1, 1))
    assert len(blocks) == 1
    assert np.array_equal(blocks[0].to_complex(), x.to_complex())
    assert assignment.block_shape == (4, 6)


def test_decompose_vector_in_halves():
    x = md.ComplexTensor(np.arange(4, dtype=np.float64), np.zeros(4))
    blocks, _ = md.decompose(x, md.ComputationShape(2, 1, 1))
    assert np.array_equal(blocks[0].re, [0, 1])
    assert np.array_equal(blocks[1].re, [2, 3])


def test_decompose_gather_round_trip_3d():
    x = rand_tensor((8, 4, 2), seed=2)
    shape = md.ComputationShape(2, 2, 2)
    blocks, assignment = md.decompose(x, shape)
    assert len(blocks) == 8
    assert all(b.shape == (4, 2, 1) for b in blocks)
    back = md.gather_to_host(blocks, assignment)
    assert np.array_equal(back.to_complex(), x.to_complex())


def test_decompose_block_contents_follow_coordinates():
    x = rand_tensor((4, 4), seed=3)
    shape = md.ComputationShape(2, 2, 1)
    blocks, assignment = md.decompose(x, shape)
    core = shape.flat_id((1, 0, 0))
    assert np.array_equal(blocks[core].re, x.re[2:4, 0:2])
    assert assignment.block_slices(core) == (slice(2, 4), slice(0, 2))


def test_decompose_errors():
    x = rand_tensor((6,), seed=4)
    with pytest.raises(md.DecompositionError):
        md.decompose(x, md.ComputationShape(4, 1, 1))
    with pytest.raises(md.DecompositionError):
        md.decompose(x, md.ComputationShape(2, 2, 1))  # rank-1 data, p2 > 1
    with pytest.raises(md.ArgumentError):
        md.decompose(np.zeros(4), md.ComputationShape(1, 1, 1))


def test_gather_rejects_bad_blocks():
    x = rand_tensor((4,), seed=5)
    blocks, assignment = md.decompose(x, md.ComputationShape(2, 1, 1))
    with pytest.raises(md.AssemblyError):
        md.gather_to_host(blocks[:1], assignment)
    with pytest.raises(md.AssemblyError):
        md.gather_to_host([blocks[0], rand_tensor((3,), seed=6)], assignment)
    with pytest.raises(md.AssemblyError):
        md.gather_to_host([blocks[0], None], assignment)
    with pytest.raises(md.AssemblyError):
        md.gather_to_host([blocks[0], blocks[1].astype(np.float32)], assignment)


def test_slices_for_shape_single_core():
    v = md.build_uniform(8)
    out = md.slices_for_shape([v], md.ComputationShape(1, 1, 1))
    assert len(out) == 1
    assert np.array_equal(out[0][0].rows.to_complex(), v.to_complex())


def test_slices_for_shape_shares_rows_along_other_dims():
    v1, v2 = md.build_uniform(8), md.build_uniform(4)
    shape = md.ComputationShape(2, 2, 1)
    out = md.slices_for_shape([v1, v2], shape)
    for core in range(shape.num_cores):
        c1, c2, _ = shape.coords(core)
        s1, s2 = out[core]
        assert np.array_equal(s1.rows.re, v1.re[c1 * 4 : (c1 + 1) * 4])
        assert np.array_equal(s2.rows.re, v2.re[c2 * 2 : (c2 + 1) * 2])
    # cores with the same position along dim 0 hold identical dim-0 slices
    assert np.array_equal(out[0][0].rows.re, out[1][0].rows.re)


def test_slices_for_shape_union_reconstructs_nonuniform_matrix():
    rng = np.random.default_rng(9)
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    v = md.build_nonuniform(md.SamplePoints.explicit(z), 8)
    out = md.slices_for_shape([v], md.ComputationShape(4, 1, 1))
    rebuilt = np.concatenate([out[i][0].rows.to_complex() for i in range(4)], axis=0)
    assert np.array_equal(rebuilt, v.to_complex())


def test_slices_for_shape_errors():
    v = md.build_uniform(8)
    with pytest.raises(md.DecompositionError):
        md.slices_for_shape([v], md.ComputationShape(3, 1, 1))
    with pytest.raises(md.DecompositionError):
        md.slices_for_shape([v], md.ComputationShape(1, 2, 1))
    with pytest.raises(md.ArgumentError):
        md.slices_for_shape([v], (1, 1, 1))
