"""Transform data sampled at arbitrary unit-circle points.

The matmul engine never assumes uniform spacing: the transform matrix is
just successive inverse powers of whatever points you hand it. Here we
scatter 16 points randomly on the unit circle, run the distributed engine
on 4 cores, and check it against the brute-force sum.
"""

import numpy as np

import meshdft as md

rng = np.random.default_rng(7)
n = 16

angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
samples = md.SamplePoints.explicit(np.exp(1j * angles))
print("sample angles (degrees):", np.round(np.degrees(angles), 1))

x = md.ComplexTensor(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))

shape = md.ComputationShape(4, 1, 1)
plan = md.create_kdft_plan(shape, (samples,), md.PrecisionMode.F64_REFERENCE)
blocks, assignment = md.decompose(x, shape)
mesh = md.MeshSim(shape)
out = md.gather_to_host(md.kdft_forward(mesh, plan, blocks), assignment)

ref = md.direct_dft(x, samples)
err = md.relative_l2_error(out, ref.values)
print(f"relative L2 error vs brute force: {err:.2e}")
assert err < 1e-12

# uniform spacing is the same machinery with the canonical points
uplan = md.create_kdft_plan(shape, (n,), md.PrecisionMode.F64_REFERENCE)
ublocks, uassign = md.decompose(x, shape)
uout = md.gather_to_host(md.kdft_forward(md.MeshSim(shape), uplan, ublocks), uassign)
fft_err = np.linalg.norm(uout.to_complex() - np.fft.fft(x.to_complex()))
print(f"with uniform points the result is the usual DFT (diff {fft_err:.2e})")
