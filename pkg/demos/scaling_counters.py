"""Strong-scaling sweep done on deterministic counters instead of clocks.

Wall-clock numbers depend on the machine; the ledger does not. Doubling
the core count halves the matmul engine's per-core contraction work
exactly. The decimation engine's local work shrinks slightly faster than
linear because each core's transform also gets shorter (the log factor),
which is why the table carries both the linear-scaling ideal and the
closed-form expectation.
"""

import math

import meshdft as md
from meshdft import reports
from meshdft.tensorio import gen_random

n = 1024
x = gen_random((n,), seed=0)

print(f"N = {n}, sweeping cores 2 -> 16")
print(f"{'cores':>5} {'kdft einsum/core':>17} {'fft local/core':>15}"
      f" {'linear ideal':>13} {'closed form':>12}")

baseline = None
for parts in (2, 4, 8, 16):
    shape = md.ComputationShape(parts, 1, 1)
    blocks, _ = md.decompose(x, shape)

    kmesh = md.MeshSim(shape)
    md.kdft_forward(kmesh, md.create_kdft_plan(shape, (n,), md.PrecisionMode.F64_REFERENCE), blocks)
    kdft_per_core = reports.per_core(kmesh.ledger.einsum_flops, parts)

    fmesh = md.MeshSim(shape)
    md.fft_forward(fmesh, md.create_fft_plan(shape, (n,)), blocks)
    fft_per_core = reports.per_core(fmesh.ledger.local_fft_flops, parts)

    if baseline is None:
        baseline = (fft_per_core, parts)
    ideal = baseline[0] * baseline[1] // parts
    closed = reports.fft_local_flops_per_core((n,), shape)
    print(f"{parts:>5} {kdft_per_core:>17} {fft_per_core:>15} {ideal:>13} {closed:>12}")

    assert kdft_per_core == reports.kdft_einsum_flops_per_core((n,), shape)
    assert fft_per_core == closed
    # exact cross-multiplied identity tying measured work to the linear ideal
    m_base = n // baseline[1]
    m_here = n // parts
    assert fft_per_core * int(math.log2(m_base)) == ideal * int(math.log2(m_here))

print()
print("kdft column halves exactly; fft column beats the linear ideal by the log ratio")
