"""Core grids and block decomposition of global tensors.

A computation shape (P1, P2, P3) arranges cores in a (possibly degenerate)
3-D grid. Tensors are split into equal contiguous blocks, one per core;
frequency-domain indices map to (core position, local offset) by the
decimation rule n = P*l + beta.
"""

from dataclasses import dataclass

import numpy as np

from .ctensor import ComplexTensor
from .errors import (
    ArgumentError,
    AssemblyError,
    DecompositionError,
    DimensionError,
)
from .vandermonde import slice_rows


@dataclass(frozen=True)
class ComputationShape:
    """Core counts along each tensor dimension; flat ids are row-major."""

    p1: int = 1
    p2: int = 1
    p3: int = 1

    def __post_init__(self):
        for p in (self.p1, self.p2, self.p3):
            if not isinstance(p, int) or p < 1:
                raise ArgumentError(f"core counts must be positive ints, got {p!r}")

    @property
    def dims(self):
        return (self.p1, self.p2, self.p3)

    @property
    def num_cores(self):
        return self.p1 * self.p2 * self.p3

    def flat_id(self, coords):
        coords = tuple(coords)
        if len(coords) != 3:
            raise ArgumentError(f"coords must have 3 entries, got {coords!r}")
        for c, p in zip(coords, self.dims):
            if not 0 <= c < p:
                raise ArgumentError(f"coords {coords} out of range for shape {self.dims}")
        return (coords[0] * self.p2 + coords[1]) * self.p3 + coords[2]

    def coords(self, flat):
        if not 0 <= flat < self.num_cores:
            raise ArgumentError(f"core id {flat} out of range")
        c3 = flat % self.p3
        c2 = (flat // self.p3) % self.p2
        c1 = flat // (self.p2 * self.p3)
        return (c1, c2, c3)

    def lines(self, dim):
        """Groups of flat core ids that vary only along ``dim``, ordered by position."""
        if dim not in (0, 1, 2):
            raise ArgumentError(f"dim must be 0, 1, or 2, got {dim!r}")
        out = []
        fixed_dims = [d for d in range(3) if d != dim]
        for a in range(self.dims[fixed_dims[0]]):
            for b in range(self.dims[fixed_dims[1]]):
                line = []
                for pos in range(self.dims[dim]):
                    coords = [0, 0, 0]
                    coords[dim] = pos
                    coords[fixed_dims[0]] = a
                    coords[fixed_dims[1]] = b
                    line.append(self.flat_id(coords))
                out.append(line)
        return out

    @classmethod
    def parse(cls, text):
        try:
            parts = [int(p) for p in str(text).lower().split("x")]
        except ValueError:
            raise ArgumentError(f"cannot parse shape {text!r}") from None
        if not 1 <= len(parts) <= 3:
            raise ArgumentError(f"shape must have 1..3 factors, got {text!r}")
        parts += [1] * (3 - len(parts))
        return cls(*parts)


def global_to_local(n, parts):
    """Frequency index -> (core position, local offset) under decimation n = P*l + b."""
    if not isinstance(parts, int) or parts < 1:
        raise ArgumentError(f"parts must be a positive int, got {parts!r}")
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ArgumentError(f"index must be a non-negative int, got {n!r}")
    return int(n) % parts, int(n) // parts


def local_to_global(beta, offset, parts):
    if not 0 <= beta < parts:
        raise ArgumentError(f"position {beta} out of range for {parts} parts")
    if offset < 0:
        raise ArgumentError(f"offset must be non-negative, got {offset!r}")
    return parts * int(offset) + int(beta)


@dataclass(frozen=True)
class BlockAssignment:
    """How a global tensor is split into per-core contiguous blocks."""

    global_shape: tuple
    shape: ComputationShape

    def __post_init__(self):
        rank = len(self.global_shape)
        if not 1 <= rank <= 3:
            raise DimensionError(f"rank must be 1..3, got {rank}")
        for d, n in enumerate(self.global_shape):
            if not isinstance(n, int) or n < 1:
                raise ArgumentError(f"global extents must be positive ints: {self.global_shape}")
            if n % self.shape.dims[d] != 0:
                raise DecompositionError(
                    f"extent {n} along dim {d} is not divisible by {self.shape.dims[d]} cores"
                )
        for d in range(rank, 3):
            if self.shape.dims[d] != 1:
                raise DecompositionError(
                    f"rank-{rank} tensor cannot be spread over {self.shape.dims[d]} cores on dim {d}"
                )

    @property
    def rank(self):
        return len(self.global_shape)

    @property
    def block_shape(self):
        return tuple(
            n // p for n, p in zip(self.global_shape, self.shape.dims[: self.rank])
        )

    def block_slices(self, core_id):
        coords = self.shape.coords(core_id)
        out = []
        for d in range(self.rank):
            b = self.block_shape[d]
            start = coords[d] * b
            out.append(slice(start, start + b))
        return tuple(out)


def decompose(tensor, shape):
    """Split a global tensor into one contiguous block per core.

    Returns (blocks, assignment) with blocks indexed by flat core id.
    """
    if not isinstance(tensor, ComplexTensor):
        raise ArgumentError("decompose expects a ComplexTensor")
    if not isinstance(shape, ComputationShape):
        raise ArgumentError("decompose expects a ComputationShape")
    assignment = BlockAssignment(tuple(int(n) for n in tensor.shape), shape)
    blocks = []
    for core in range(shape.num_cores):
        sl = assignment.block_slices(core)
        blocks.append(ComplexTensor(tensor.re[sl], tensor.im[sl]))
    return blocks, assignment


def slices_for_shape(matrices, shape):
    """Row-partition one transform matrix per dimension across the core grid.

    Returns a list indexed by flat core id; entry ``core`` is a tuple of
    VandermondeSlice, one per dimension, where the slice along dimension d
    depends only on the core's grid position along d. Cores that share a
    position hold identical slices.
    """
    if not isinstance(shape, ComputationShape):
        raise ArgumentError("slices_for_shape expects a ComputationShape")
    matrices = tuple(matrices)
    rank = len(matrices)
    if not 1 <= rank <= 3:
        raise DimensionError(f"expected 1..3 matrices, got {rank}")
    for d in range(rank, 3):
        if shape.dims[d] != 1:
            raise DecompositionError(
                f"rank-{rank} transform cannot be spread over {shape.dims[d]} cores on dim {d}"
            )
    per_dim = []
    for d, matrix in enumerate(matrices):
        try:
            per_dim.append(slice_rows(matrix, shape.dims[d], dim_index=d))
        except DimensionError as exc:
            raise DecompositionError(str(exc)) from exc
    out = []
    for core in range(shape.num_cores):
        coords = shape.coords(core)
        out.append(tuple(per_dim[d][coords[d]] for d in range(rank)))
    return out


def gather_to_host(blocks, assignment):
    """Inverse of :func:`decompose`: stitch per-core blocks into a global tensor."""
    if not isinstance(assignment, BlockAssignment):
        raise ArgumentError("gather_to_host expects a BlockAssignment")
    num = assignment.shape.num_cores
    if len(blocks) != num:
        raise AssemblyError(f"expected {num} blocks, got {len(blocks)}")
    expected = assignment.block_shape
    dtype = None
    for core, block in enumerate(blocks):
        if not isinstance(block, ComplexTensor):
            raise AssemblyError(f"block {core} missing or not a ComplexTensor")
        if block.shape != expected:
            raise AssemblyError(
                f"block {core} has shape {block.shape}, expected {expected}"
            )
        if dtype is None:
            dtype = block.dtype
        elif block.dtype != dtype:
            raise AssemblyError("blocks disagree on dtype")
    re = np.zeros(assignment.global_shape, dtype=dtype)
    im = np.zeros(assignment.global_shape, dtype=dtype)
    for core, block in enumerate(blocks):
        sl = assignment.block_slices(core)
        re[sl] = block.re
        im[sl] = block.im
    return ComplexTensor(re, im)
