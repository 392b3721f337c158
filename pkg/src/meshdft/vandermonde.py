"""Transform-matrix construction: uniform DFT matrices and nonuniform variants.

Row k of a transform matrix holds inverse powers of the k-th sample point
z_k, so ``V @ x`` evaluates X_k = sum_n x_n * z_k**(-n). On the unit circle
with uniformly spaced points this is exactly the DFT matrix.
"""

from dataclasses import dataclass

import numpy as np

from .ctensor import ComplexTensor
from .errors import ArgumentError, DimensionError


class SamplePoints:
    """Evaluation points z_k for the transform; uniform or caller-supplied."""

    __slots__ = ("points", "is_uniform")

    def __init__(self, points, is_uniform=False):
        points = np.asarray(points, dtype=np.complex128)
        if points.ndim != 1 or points.size == 0:
            raise ArgumentError("points must be a non-empty 1-D sequence")
        if not np.isfinite(points).all():
            raise ArgumentError("sample points must be finite")
        if np.any(points == 0):
            raise ArgumentError("sample points must be nonzero")
        points = np.array(points, copy=True)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "is_uniform", bool(is_uniform))

    def __setattr__(self, name, value):
        raise AttributeError("SamplePoints is immutable")

    def __len__(self):
        return self.points.size

    @classmethod
    def uniform(cls, n):
        if not isinstance(n, int) or n < 1:
            raise ArgumentError(f"n must be a positive int, got {n!r}")
        k = np.arange(n)
        return cls(np.exp(2j * np.pi * k / n), is_uniform=True)

    @classmethod
    def explicit(cls, values):
        return cls(values, is_uniform=False)


@dataclass(frozen=True)
class VandermondeSlice:
    """A contiguous row block of a transform matrix owned by one core."""

    rows: ComplexTensor
    core_index: int
    dim_index: int = 0

    @property
    def row_count(self):
        return self.rows.shape[0]


def build_uniform(n):
    """DFT matrix V[k][m] = exp(-2j*pi*k*m/n) with exponents reduced mod n."""
    if not isinstance(n, int) or n < 1:
        raise ArgumentError(f"n must be a positive int, got {n!r}")
    k = np.arange(n, dtype=np.int64)
    # reduce k*m mod n first so symmetric entries are bit-identical
    exponents = np.mod(np.outer(k, k), n)
    angles = 2.0 * np.pi * exponents / n
    return ComplexTensor(np.cos(angles), -np.sin(angles))


def build_nonuniform(samples, cols):
    """Transform matrix for arbitrary nonzero points: V[k][m] = z_k**(-m).

    Columns are produced by iterated division, so column m is exactly
    column m-1 divided by the point once more.
    """
    if not isinstance(samples, SamplePoints):
        samples = SamplePoints.explicit(samples)
    if not isinstance(cols, int) or cols < 1:
        raise ArgumentError(f"cols must be a positive int, got {cols!r}")
    z = samples.points
    v = np.empty((z.size, cols), dtype=np.complex128)
    v[:, 0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        inv = 1.0 / z
        for m in range(1, cols):
            v[:, m] = v[:, m - 1] * inv
    if not np.isfinite(v).all():
        raise ArgumentError("matrix overflowed; sample points too small for this size")
    return ComplexTensor(v.real, v.imag)


def matrix_for(samples, cols):
    """Build the transform matrix for the given sample points."""
    if samples.is_uniform and len(samples) == cols:
        return build_uniform(cols)
    return build_nonuniform(samples, cols)


def slice_rows(matrix, parts, dim_index=0):
    """Partition a matrix into ``parts`` contiguous row blocks, one per core."""
    if not isinstance(matrix, ComplexTensor) or matrix.rank != 2:
        raise ArgumentError("slice_rows expects a rank-2 ComplexTensor")
    if not isinstance(parts, int) or parts < 1:
        raise ArgumentError(f"parts must be a positive int, got {parts!r}")
    n = matrix.shape[0]
    if n % parts != 0:
        raise DimensionError(f"{n} rows do not split into {parts} equal blocks")
    rows_per = n // parts
    out = []
    for p in range(parts):
        block = ComplexTensor(
            matrix.re[p * rows_per : (p + 1) * rows_per],
            matrix.im[p * rows_per : (p + 1) * rows_per],
        )
        out.append(VandermondeSlice(rows=block, core_index=p, dim_index=dim_index))
    return out


def build_phase_slice(n, parts, part_index):
    """Per-core phase block [r][b] = exp(-2j*pi*b*(p*n/parts + r)/n).

    Row r corresponds to global frequency k = part_index*(n//parts) + r;
    column b is the phase factor attached to decimation offset b.
    """
    if not isinstance(n, int) or n < 1:
        raise ArgumentError(f"n must be a positive int, got {n!r}")
    if not isinstance(parts, int) or not 1 <= parts <= n or n % parts != 0:
        raise DimensionError(f"parts {parts} must divide n {n}")
    if not 0 <= part_index < parts:
        raise ArgumentError(f"part_index {part_index} out of range for {parts} parts")
    rows_per = n // parts
    k = part_index * rows_per + np.arange(rows_per, dtype=np.int64)
    b = np.arange(parts, dtype=np.int64)
    exponents = np.mod(np.outer(k, b), n)
    angles = 2.0 * np.pi * exponents / n
    return ComplexTensor(np.cos(angles), -np.sin(angles))
