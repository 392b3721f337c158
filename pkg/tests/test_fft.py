"""The decimation engine: local FFT, gather, phase combination, full pipeline."""

import numpy as np
import pytest

import meshdft as md
from helpers import F32, rand_tensor, run_fft, err_vs


def cvec(values):
    values = np.asarray(values, dtype=np.complex128)
    return md.ComplexTensor(values.real, values.imag)


def test_bit_reversal_examples():
    assert list(md.bit_reversal_permutation(1)) == [0]
    assert list(md.bit_reversal_permutation(2)) == [0, 1]
    assert list(md.bit_reversal_permutation(8)) == [0, 4, 2, 6, 1, 5, 3, 7]
    with pytest.raises(md.ArgumentError):
        md.bit_reversal_permutation(6)


def test_local_fft_smallest_sizes():
    one = cvec([3.0 + 1.0j])
    assert np.array_equal(md.local_fft(one).to_complex(), [3.0 + 1.0j])
    a, b = 1.5 - 0.5j, 0.25 + 2.0j
    two = md.local_fft(cvec([a, b])).to_complex()
    assert np.allclose(two, [a + b, a - b], atol=1e-15)


@pytest.mark.parametrize("m", [4, 8, 32])
def test_local_fft_matches_numpy(m):
    x = rand_tensor((m,), seed=m)
    out = md.local_fft(x).to_complex()
    assert np.max(np.abs(out - np.fft.fft(x.to_complex()))) < 1e-12


def test_local_fft_along_any_axis():
    x = rand_tensor((4, 8, 2), seed=70)
    out = md.local_fft(x, axis=1).to_complex()
    assert np.max(np.abs(out - np.fft.fft(x.to_complex(), axis=1))) < 1e-12


def test_local_fft_f32_mode():
    x = rand_tensor((64,), seed=71)
    out = md.local_fft(x, mode=F32)
    assert out.dtype == np.float32
    ref = np.fft.fft(x.to_complex())
    assert np.linalg.norm(out.to_complex() - ref) / np.linalg.norm(ref) < 1e-5


def test_local_fft_rejects_non_power_of_two():
    with pytest.raises(md.DimensionError):
        md.local_fft(rand_tensor((6,), seed=72))


def test_local_fft_flops_formula():
    assert md.local_fft_flops(8) == 5 * 8 * 3
    assert md.local_fft_flops(8, rest=2) == 240
    assert md.local_fft_flops(1) == 0
    with pytest.raises(md.ArgumentError):
        md.local_fft_flops(12)


def test_gather_positions_both_regimes():
    assert md.gather_positions(1, 4) == (0,)
    assert md.gather_positions(2, 4) == (0, 1)  # blocks at least as long as the line
    assert md.gather_positions(4, 8) == (0, 1, 2, 3)
    # short blocks: line position c holds offset (c mod P/M)*M + c div (P/M)
    assert md.gather_positions(4, 2) == (0, 2, 1, 3)
    assert md.gather_positions(8, 1) == (0, 1, 2, 3, 4, 5, 6, 7)


def test_strided_gather_single_core_keeps_order():
    mesh = md.MeshSim(1)
    x = cvec(np.arange(4, dtype=np.float64))
    out = md.strided_gather(mesh, [x])
    assert np.array_equal(out[0].re, [0, 1, 2, 3])
    assert mesh.ledger.all_to_all_count == 1


def test_strided_gather_two_cores():
    mesh = md.MeshSim(2)
    blocks = [cvec([0.0, 1.0, 2.0, 3.0]), cvec([4.0, 5.0, 6.0, 7.0])]
    out = md.strided_gather(mesh, blocks)
    # member 0 takes the even subsequence in local order l, member 1 the odd
    assert np.array_equal(out[0].re, [0, 2, 4, 6])
    assert np.array_equal(out[1].re, [1, 3, 5, 7])
    assert mesh.ledger.all_to_all_count == 1


def test_strided_gather_four_cores_long_blocks():
    mesh = md.MeshSim(4)
    x = np.arange(16, dtype=np.float64)
    blocks = [cvec(x[4 * i : 4 * i + 4]) for i in range(4)]
    out = md.strided_gather(mesh, blocks)
    for beta in range(4):
        assert np.array_equal(out[beta].re, x[beta::4])


def test_strided_gather_short_blocks_regime():
    # N=8 over 8 cores: single-element blocks, every line position ends up
    # holding exactly its own decimation offset
    mesh = md.MeshSim(8)
    x = np.arange(8, dtype=np.float64)
    out = md.strided_gather(mesh, [cvec([v]) for v in x])
    for beta in range(8):
        assert np.array_equal(out[beta].re, [beta])
    # N=8 over 4 cores: M=2 < P, positions hold offsets (0, 2, 1, 3)
    mesh = md.MeshSim(4)
    blocks = [cvec(x[2 * i : 2 * i + 2]) for i in range(4)]
    out = md.strided_gather(mesh, blocks)
    for pos, beta in enumerate(md.gather_positions(4, 2)):
        assert np.array_equal(out[pos].re, x[beta::4])


def test_strided_gather_validation():
    mesh = md.MeshSim(2)
    blocks = [cvec([0.0, 1.0, 2.0]), cvec([3.0, 4.0, 5.0])]
    with pytest.raises(md.DimensionError):
        md.strided_gather(mesh, blocks)  # extent 3 is not a power of two
    with pytest.raises(md.ArgumentError):
        md.strided_gather(mesh, blocks[:1], group=[0])


def test_phase_adjust_recombines_subsequence_ffts():
    rng = np.random.default_rng(80)
    n, parts = 8, 4
    m = n // parts
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    mesh = md.MeshSim(parts)
    sub_ffts = [md.local_fft(cvec(x[b::parts])) for b in range(parts)]
    phases = [md.build_phase_slice(n, parts, p) for p in range(parts)]
    out = md.phase_adjust(mesh, sub_ffts, phases)
    ref = np.fft.fft(x)
    for p in range(parts):
        assert np.max(np.abs(out[p].to_complex() - ref[p * m : (p + 1) * m])) < 1e-12
    assert mesh.ledger.permute_count == parts - 1


def test_phase_adjust_single_core_is_identity():
    mesh = md.MeshSim(1)
    x = rand_tensor((4,), seed=81)
    out = md.phase_adjust(mesh, [x], [md.build_phase_slice(4, 1, 0)])
    assert np.max(np.abs(out[0].to_complex() - x.to_complex())) < 1e-15


def test_plan_validation():
    shape = md.ComputationShape(2, 1, 1)
    plan = md.create_fft_plan(shape, (8,))
    assert plan.beta_maps[0] == (0, 1)
    with pytest.raises(md.PlanError) as err:
        md.create_fft_plan(shape, (6,))
    assert "must be a power of two" in str(err.value)
    with pytest.raises(md.PlanError):
        md.create_fft_plan(md.ComputationShape(3, 1, 1), (9,))
    with pytest.raises(md.PlanError):
        md.create_fft_plan(md.ComputationShape(1, 2, 1), (8,))


def test_forward_delta_and_tone():
    from meshdft.tensorio import gen_delta, gen_tone

    out, _, _ = run_fft(gen_delta((8,)), (2,))
    assert np.max(np.abs(out.to_complex() - 1.0)) < 1e-13
    # in-order output: a pure tone at frequency 3 peaks exactly at index 3
    for parts in (1, 2, 4, 8):
        out, _, _ = run_fft(gen_tone((8,), [3]), (parts,))
        spectrum = out.to_complex()
        assert np.argmax(np.abs(spectrum)) == 3
        assert abs(spectrum[3] - 8.0) < 1e-12


@pytest.mark.parametrize("parts", [1, 2, 4, 8])
def test_forward_matches_numpy_1d(parts):
    x = rand_tensor((16,), seed=parts)
    out, _, _ = run_fft(x, (parts,))
    ref = np.fft.fft(x.to_complex())
    assert np.linalg.norm(out.to_complex() - ref) / np.linalg.norm(ref) < 1e-12


def test_forward_short_block_regime_matches_numpy():
    x = rand_tensor((8,), seed=90)  # M=1 on 8 cores, M=2 on 4
    for parts in (4, 8):
        out, _, _ = run_fft(x, (parts,))
        ref = np.fft.fft(x.to_complex())
        assert np.linalg.norm(out.to_complex() - ref) / np.linalg.norm(ref) < 1e-12


def test_forward_matches_numpy_2d_and_3d():
    x2 = rand_tensor((8, 8), seed=91)
    out2, _, _ = run_fft(x2, (2, 2))
    ref2 = md.ComplexTensor.from_complex(np.fft.fft2(x2.to_complex()))
    assert err_vs(out2, ref2) < 1e-12
    x3 = rand_tensor((8, 8, 8), seed=92)
    out3, _, _ = run_fft(x3, (2, 2, 2))
    ref3 = md.ComplexTensor.from_complex(np.fft.fftn(x3.to_complex()))
    assert err_vs(out3, ref3) < 1e-12


def test_forward_ledger_matches_closed_form():
    from meshdft.reports import expected_ledger

    x = rand_tensor((8, 8, 8), seed=93)
    _, _, mesh = run_fft(x, (2, 2, 2))
    shape = md.ComputationShape(2, 2, 2)
    assert mesh.ledger.as_dict() == expected_ledger("fft", (8, 8, 8), shape, md.PrecisionMode.F64_REFERENCE)
    per = mesh.ledger.per_tag()
    for tag in ("dim1", "dim2", "dim3"):
        assert per[tag]["permute_count"] == 1
        assert per[tag]["all_to_all_count"] == 1


def test_forward_single_core_dim_still_records_gather():
    x = rand_tensor((8, 4), seed=94)
    _, _, mesh = run_fft(x, (1, 2))
    per = mesh.ledger.per_tag()
    assert per["dim1"]["all_to_all_count"] == 1
    assert per["dim1"]["permute_count"] == 0
    assert per["dim2"]["all_to_all_count"] == 1
    assert per["dim2"]["permute_count"] == 1


def test_forward_worker_count_is_invisible():
    x = rand_tensor((16, 8), seed=95)
    out1, blocks1, mesh1 = run_fft(x, (4, 2))
    out4, blocks4, mesh4 = run_fft(x, (4, 2), workers=4)
    assert np.array_equal(out1.to_complex(), out4.to_complex())
    for a, b in zip(blocks1, blocks4):
        assert np.array_equal(a.to_complex(), b.to_complex())
    assert mesh1.ledger.as_dict() == mesh4.ledger.as_dict()


def test_forward_f32_mode():
    x = rand_tensor((64,), seed=96)
    out, _, _ = run_fft(x, (4,), mode=F32)
    ref = np.fft.fft(x.to_complex())
    assert np.linalg.norm(out.to_complex() - ref) / np.linalg.norm(ref) < 1e-5


def test_forward_argument_errors():
    shape = md.ComputationShape(2, 1, 1)
    plan = md.create_fft_plan(shape, (8,))
    blocks, _ = md.decompose(rand_tensor((8,), seed=97), shape)
    with pytest.raises(md.ArgumentError):
        md.fft_forward(md.MeshSim(md.ComputationShape(4, 1, 1)), plan, blocks)
    with pytest.raises(md.DimensionError):
        md.fft_forward(md.MeshSim(shape), plan, blocks[:1])
