"""Log-linear parallel transform: decimate, local FFT, phase combination.

Writing the frequency index as k and the sample index as n = P*l + b, the
transform factors into P independent M-point FFTs (M = N/P) over the
decimated subsequences, recombined with per-frequency phase factors:

    X_k = sum_b exp(-2j*pi*b*k/N) * F_b[k mod M]

Per distributed dimension the engine does exactly one all_to_all (moving
contiguous blocks into decimated subsequences), one local in-order radix-2
FFT, and a shift-by-one phase combination costing P-1 permutes.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .ctensor import ComplexTensor, PrecisionMode, reorder, scale_along_axis
from .decomposition import ComputationShape
from .errors import ArgumentError, DimensionError, PlanError
from .mesh import AllToAll, MeshSim, Permute, line_ring_pairs, ring_pairs
from .vandermonde import build_phase_slice


def _is_pow2(n):
    return isinstance(n, int) and n >= 1 and (n & (n - 1)) == 0


def bit_reversal_permutation(n):
    """Source indices for the standard radix-2 input reorder."""
    if not _is_pow2(n):
        raise ArgumentError(f"length must be a power of two, got {n!r}")
    bits = n.bit_length() - 1
    perm = np.zeros(n, dtype=np.int64)
    for i in range(n):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        perm[i] = r
    return perm


@lru_cache(maxsize=64)
def _twiddles(m, dtype_name):
    """Per-stage twiddle factors exp(-2j*pi*t/size) for t < size/2."""
    dtype = np.dtype(dtype_name)
    tables = {}
    size = 2
    while size <= m:
        t = np.arange(size // 2, dtype=np.float64)
        ang = 2.0 * np.pi * t / size
        tables[size] = (np.cos(ang).astype(dtype), (-np.sin(ang)).astype(dtype))
        size *= 2
    return tables


def local_fft(tensor, axis=0, mode=PrecisionMode.F64_REFERENCE):
    """In-order radix-2 decimation-in-time FFT along one axis.

    Input is bit-reverse reordered first, so output index k directly holds
    frequency k. Runs in float64 for the reference mode and float32
    otherwise (the split emulation applies to contractions, not butterflies).
    """
    if not isinstance(tensor, ComplexTensor):
        raise ArgumentError("local_fft expects a ComplexTensor")
    if not -tensor.rank <= axis < tensor.rank:
        raise DimensionError(f"axis {axis} out of range for rank {tensor.rank}")
    axis %= tensor.rank
    m = tensor.shape[axis]
    if not _is_pow2(m):
        raise DimensionError(f"extent {m} along axis {axis} is not a power of two")
    dtype = mode.real_dtype
    if m == 1:
        return tensor.astype(dtype)
    perm = bit_reversal_permutation(m)
    work = reorder(tensor, axis, perm)
    moved_shape = np.moveaxis(work.re, axis, 0).shape
    re = np.moveaxis(work.re, axis, 0).reshape(m, -1).astype(dtype).copy()
    im = np.moveaxis(work.im, axis, 0).reshape(m, -1).astype(dtype).copy()
    tables = _twiddles(m, dtype.name)
    size = 2
    while size <= m:
        half = size // 2
        w_re, w_im = tables[size]
        w_re = w_re[None, :, None]
        w_im = w_im[None, :, None]
        re3 = re.reshape(m // size, size, -1)
        im3 = im.reshape(m // size, size, -1)
        a_re = re3[:, :half].copy()
        a_im = im3[:, :half].copy()
        b_re = re3[:, half:]
        b_im = im3[:, half:]
        t_re = w_re * b_re - w_im * b_im
        t_im = w_re * b_im + w_im * b_re
        re3[:, :half] = a_re + t_re
        im3[:, :half] = a_im + t_im
        re3[:, half:] = a_re - t_re
        im3[:, half:] = a_im - t_im
        size *= 2
    out_re = np.moveaxis(re.reshape(moved_shape), 0, axis)
    out_im = np.moveaxis(im.reshape(moved_shape), 0, axis)
    return ComplexTensor(out_re, out_im)


def local_fft_flops(m, rest=1):
    """Real-op count of an m-point complex FFT applied to ``rest`` columns."""
    if not _is_pow2(m):
        raise ArgumentError(f"length must be a power of two, got {m!r}")
    return 5 * m * int(math.log2(m)) * int(rest)


def gather_positions(parts, block_extent):
    """Which decimation offset each line position holds after the gather."""
    if parts == 1:
        return (0,)
    m = block_extent
    if m >= parts:
        return tuple(range(parts))
    stride = parts // m
    return tuple((pos % stride) * m + pos // stride for pos in range(parts))


def _gather_groups(lines, parts, m):
    """all_to_all groups implementing the block-to-subsequence exchange."""
    groups = []
    for line in lines:
        if parts == 1 or m >= parts:
            groups.append(tuple(line))
        else:
            stride = parts // m
            for r in range(stride):
                groups.append(tuple(line[q * stride + r] for q in range(m)))
    return tuple(groups)


def _gather_reorder_perm(parts, m):
    # block slot s receives element P*(s mod M/P) + s div (M/P); after the
    # equal-chunk exchange, position q then holds subsequence q in order l
    step = m // parts
    s = np.arange(m, dtype=np.int64)
    return parts * (s % step) + s // step


@dataclass(frozen=True)
class FftPlan:
    """Twiddle/phase tables and decimation layout for each dimension."""

    shape: ComputationShape
    extents: tuple
    precision: PrecisionMode
    phase_blocks: dict
    beta_maps: dict

    @property
    def rank(self):
        return len(self.extents)


def create_fft_plan(shape, extents, precision=PrecisionMode.F64_REFERENCE):
    """Plan a power-of-two transform over the core grid."""
    if not isinstance(shape, ComputationShape):
        raise ArgumentError("shape must be a ComputationShape")
    if not isinstance(precision, PrecisionMode):
        raise ArgumentError("precision must be a PrecisionMode")
    extents = tuple(int(n) for n in extents)
    rank = len(extents)
    if not 1 <= rank <= 3:
        raise PlanError(f"need 1..3 dimensions, got {rank}")
    for d in range(rank, 3):
        if shape.dims[d] != 1:
            raise PlanError(
                f"rank-{rank} transform cannot use {shape.dims[d]} cores on dim {d}"
            )
    phase_blocks = {}
    beta_maps = {}
    for d in range(rank):
        n, p = extents[d], shape.dims[d]
        if not _is_pow2(n):
            raise PlanError(f"extent {n} on dim {d} must be a power of two")
        if not _is_pow2(p) or n % p != 0:
            raise PlanError(
                f"core count {p} on dim {d} must be a power of two dividing {n}"
            )
        for pos in range(p):
            phase_blocks[(d, pos)] = build_phase_slice(n, p, pos)
        beta_maps[d] = gather_positions(p, n // p)
    return FftPlan(
        shape=shape,
        extents=extents,
        precision=precision,
        phase_blocks=phase_blocks,
        beta_maps=beta_maps,
    )


def _phase_column(phase, b):
    return ComplexTensor(phase.re[:, b], phase.im[:, b])


def _phase_steps(core, x, axis, parts, pos, beta_map, phase, pairs, mode, tag):
    """Shift-by-one phase combination (generator); P-1 permutes."""
    held = beta_map[pos]
    acc = scale_along_axis(x, axis, _phase_column(phase, held), mode)
    core.add_flops("einsum", 4 * x.size, tag)
    for s in range(1, parts):
        x = yield Permute(pairs, x, tag=tag)
        held = beta_map[(pos + s) % parts]
        acc = acc.add(scale_along_axis(x, axis, _phase_column(phase, held), mode))
        core.add_flops("einsum", 4 * x.size, tag)
    return acc


def _check_blocks(plan, blocks):
    if len(blocks) != plan.shape.num_cores:
        raise DimensionError(
            f"expected {plan.shape.num_cores} blocks, got {len(blocks)}"
        )
    expected = tuple(
        n // p for n, p in zip(plan.extents, plan.shape.dims[: plan.rank])
    )
    for i, b in enumerate(blocks):
        if not isinstance(b, ComplexTensor) or b.shape != expected:
            raise DimensionError(f"block {i} must have shape {expected}")


def fft_forward(mesh, plan, blocks, workers=1):
    """Run the decimation-based transform; returns per-core frequency blocks.

    Output distribution matches the direct engine: block p covers contiguous
    frequency rows [p*N/P, (p+1)*N/P) along each distributed dimension.
    """
    if not isinstance(mesh, MeshSim) or mesh.shape != plan.shape:
        raise ArgumentError("mesh and plan must share the same computation shape")
    _check_blocks(plan, blocks)
    mode = plan.precision
    dtype = mode.real_dtype

    def program(core, x):
        x = x.astype(dtype)
        for d in range(plan.rank):
            parts = plan.shape.dims[d]
            n = plan.extents[d]
            m = n // parts
            pos = core.coords[d]
            tag = f"dim{d + 1}"
            groups = _gather_groups(plan.shape.lines(d), parts, m)
            if parts > 1 and m >= parts:
                x = reorder(x, d, _gather_reorder_perm(parts, m))
            x = yield AllToAll(groups, x, split_axis=d, tag=tag)
            x = local_fft(x, axis=d, mode=mode)
            core.add_flops("local_fft", local_fft_flops(m, x.size // m), tag)
            x = yield from _phase_steps(
                core, x, d, parts, pos, plan.beta_maps[d],
                plan.phase_blocks[(d, pos)], line_ring_pairs(plan.shape, d),
                mode, tag,
            )
        return x

    return mesh.run_spmd(program, blocks, workers=workers)


def strided_gather(mesh, blocks, group=None, axis=0, tag="gather"):
    """Standalone block-to-subsequence exchange over one ordered group.

    ``blocks[i]`` belongs to core ``group[i]`` and holds the i-th contiguous
    input block; afterwards member i holds the decimated subsequence
    ``gather_positions(P, M)[i]`` with local slots in transform order.
    Counts one all_to_all on the mesh ledger.
    """
    if group is None:
        group = list(range(mesh.num_cores))
    group = [int(c) for c in group]
    if sorted(group) != list(range(mesh.num_cores)):
        raise ArgumentError("group must enumerate every core of the mesh exactly once")
    parts = len(group)
    if len(blocks) != parts:
        raise DimensionError("need one block per group member")
    first = blocks[0]
    if not -first.rank <= axis < first.rank:
        raise DimensionError(f"axis {axis} out of range for rank {first.rank}")
    axis %= first.rank
    m = first.shape[axis]
    if parts > 1 and not (_is_pow2(parts) and _is_pow2(m)):
        raise DimensionError("group size and block extent must be powers of two")
    groups = _gather_groups([group], parts, m)
    values = [None] * mesh.num_cores
    for i, core in enumerate(group):
        b = blocks[i]
        if parts > 1 and m >= parts:
            b = reorder(b, axis, _gather_reorder_perm(parts, m))
        values[core] = b
    out = mesh.all_to_all_groups(groups, values, split_axis=axis, tag=tag)
    return [out[core] for core in group]


def phase_adjust(mesh, blocks, phase_slices, group=None, axis=0,
                 mode=PrecisionMode.F64_REFERENCE, tag="phase"):
    """Standalone phase combination: member i holds subsequence i's local FFT.

    ``phase_slices[i]`` is the (M, P) phase block for member i's output rows.
    Returns per-core combined frequency blocks aligned with ``group``;
    costs P-1 permutes.
    """
    if group is None:
        group = list(range(mesh.num_cores))
    group = [int(c) for c in group]
    if sorted(group) != list(range(mesh.num_cores)):
        raise ArgumentError("group must enumerate every core of the mesh exactly once")
    parts = len(group)
    if len(blocks) != parts or len(phase_slices) != parts:
        raise DimensionError("need one block and one phase slice per group member")
    beta_map = tuple(range(parts))
    pairs = ring_pairs(group)
    pos_of = {core: i for i, core in enumerate(group)}
    blocks_by_core = dict(zip(group, blocks))
    phase_by_core = dict(zip(group, phase_slices))

    def program(core, _):
        pos = pos_of[core.rank]
        x = blocks_by_core[core.rank].astype(mode.real_dtype)
        result = yield from _phase_steps(
            core, x, axis, parts, pos, beta_map,
            phase_by_core[core.rank].astype(mode.real_dtype), pairs, mode, tag,
        )
        return result

    results = mesh.run_spmd(program, [None] * parts)
    return [results[core] for core in group]
