"""Small shared helpers: random inputs, end-to-end engine runs, oracle dispatch."""

import numpy as np

import meshdft as md

F64 = md.PrecisionMode.F64_REFERENCE
F32 = md.PrecisionMode.F32
BF16 = md.PrecisionMode.BF16_SPLIT3


def rand_tensor(extents, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    re = rng.uniform(-scale, scale, size=extents)
    im = rng.uniform(-scale, scale, size=extents)
    return md.ComplexTensor(re, im)


def run_kdft(x, dims, samples=None, mode=F64, workers=1, trace=None):
    """Decompose, transform, reassemble. Returns (global result, blocks, mesh)."""
    shape = md.ComputationShape(*dims)
    if samples is None:
        samples = tuple(int(n) for n in x.shape)
    plan = md.create_kdft_plan(shape, samples, mode)
    blocks, assignment = md.decompose(x, shape)
    mesh = md.MeshSim(shape)
    out = md.kdft_forward(mesh, plan, blocks, workers=workers, trace=trace)
    return md.gather_to_host(out, assignment), out, mesh


def run_fft(x, dims, mode=F64, workers=1):
    shape = md.ComputationShape(*dims)
    plan = md.create_fft_plan(shape, x.shape, mode)
    blocks, assignment = md.decompose(x, shape)
    mesh = md.MeshSim(shape)
    out = md.fft_forward(mesh, plan, blocks, workers=workers)
    return md.gather_to_host(out, assignment), out, mesh


def oracle(x, samples=None):
    if x.rank == 1:
        return md.direct_dft(x, samples[0] if samples else None)
    if x.rank == 2:
        return md.direct_dft_2d(x, samples)
    return md.direct_dft_3d(x, samples)


def err_vs(result, reference):
    return md.relative_l2_error(result, reference)
