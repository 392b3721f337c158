"""Brute-force reference transforms and error metrics.

This module is the measuring stick for everything else: it evaluates
X_k = sum_n x_n * z_k**(-n) one output at a time in float64, building the
power sequence per output point rather than any transform matrix, and it
deliberately imports nothing from the engine modules.
"""

from dataclasses import dataclass

import numpy as np

from .ctensor import ComplexTensor
from .errors import ArgumentError, DimensionError
from .vandermonde import SamplePoints


@dataclass(frozen=True)
class OracleResult:
    values: ComplexTensor
    max_abs: float


def _as_points(samples, n):
    if samples is None:
        samples = SamplePoints.uniform(n)
    if not isinstance(samples, SamplePoints):
        samples = SamplePoints.explicit(samples)
    return samples.points


def _power_row(z_k, n):
    # [1, z^-1, ..., z^-(n-1)] by repeated division (cumprod keeps the
    # sequential semantics; no matrix is ever materialized)
    row = np.empty(n, dtype=np.complex128)
    row[0] = 1.0
    if n > 1:
        row[1:] = np.cumprod(np.full(n - 1, 1.0 / z_k, dtype=np.complex128))
    return row


def direct_dft(x, samples=None):
    """O(n^2) reference transform of a rank-1 tensor."""
    if not isinstance(x, ComplexTensor) or x.rank != 1:
        raise DimensionError("direct_dft expects a rank-1 ComplexTensor")
    n = x.shape[0]
    z = _as_points(samples, n)
    if z.size != n:
        raise ArgumentError(f"need {n} sample points, got {z.size}")
    xc = x.to_complex()
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        out[k] = np.sum(xc * _power_row(z[k], n))
    values = ComplexTensor(out.real, out.imag)
    return OracleResult(values=values, max_abs=float(np.max(np.abs(out))))


def direct_dft_2d(x, samples=None):
    """Reference transform of a rank-2 tensor, one output point at a time."""
    if not isinstance(x, ComplexTensor) or x.rank != 2:
        raise DimensionError("direct_dft_2d expects a rank-2 ComplexTensor")
    n1, n2 = x.shape
    samples = samples or (None, None)
    z1 = _as_points(samples[0], n1)
    z2 = _as_points(samples[1], n2)
    if z1.size != n1 or z2.size != n2:
        raise ArgumentError("sample point counts must match tensor extents")
    xc = x.to_complex()
    out = np.empty((n1, n2), dtype=np.complex128)
    for k1 in range(n1):
        row1 = _power_row(z1[k1], n1)
        for k2 in range(n2):
            row2 = _power_row(z2[k2], n2)
            out[k1, k2] = np.sum(xc * row1[:, None] * row2[None, :])
    values = ComplexTensor(out.real, out.imag)
    return OracleResult(values=values, max_abs=float(np.max(np.abs(out))))


def direct_dft_3d(x, samples=None):
    """Reference transform of a rank-3 tensor.

    The full sum over all inputs runs per output point, so cost is O(n^2)
    in the total element count; intended for extents up to about 32.
    """
    if not isinstance(x, ComplexTensor) or x.rank != 3:
        raise DimensionError("direct_dft_3d expects a rank-3 ComplexTensor")
    n1, n2, n3 = x.shape
    samples = samples or (None, None, None)
    z1 = _as_points(samples[0], n1)
    z2 = _as_points(samples[1], n2)
    z3 = _as_points(samples[2], n3)
    if z1.size != n1 or z2.size != n2 or z3.size != n3:
        raise ArgumentError("sample point counts must match tensor extents")
    xc = x.to_complex()
    out = np.empty((n1, n2, n3), dtype=np.complex128)
    for k1 in range(n1):
        row1 = _power_row(z1[k1], n1)
        for k2 in range(n2):
            row2 = _power_row(z2[k2], n2)
            partial = xc * row1[:, None, None] * row2[None, :, None]
            for k3 in range(n3):
                row3 = _power_row(z3[k3], n3)
                out[k1, k2, k3] = np.sum(partial * row3[None, None, :])
    values = ComplexTensor(out.real, out.imag)
    return OracleResult(values=values, max_abs=float(np.max(np.abs(out))))


def relative_l2_error(result, reference):
    """||a - b||_2 / ||b||_2 over flattened tensors; plain ||a||_2 if b is zero."""
    if not isinstance(result, ComplexTensor) or not isinstance(reference, ComplexTensor):
        raise ArgumentError("relative_l2_error expects ComplexTensor operands")
    if result.shape != reference.shape:
        raise DimensionError(
            f"shape mismatch: {result.shape} vs {reference.shape}"
        )
    a = result.to_complex().ravel()
    b = reference.to_complex().ravel()
    denom = float(np.linalg.norm(b))
    diff = float(np.linalg.norm(a - b))
    if denom == 0.0:
        return diff
    return diff / denom
