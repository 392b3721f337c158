"""Complex tensors as split real/imaginary planes, plus the mixed-precision kernels.

Everything downstream (transform engines, collectives, oracles) moves data
around as pairs of real arrays. Complex arithmetic is spelled out as four
real products so the same code path can run in float64, float32, or the
three-term bfloat16 emulation.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ArgumentError, DimensionError

_REAL_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))

# bfloat16 is the top half of an IEEE float32: 1 sign, 8 exponent, 7 mantissa bits.
_BF16_MAX_BITS = np.uint32(0x7F7F)  # largest finite magnitude, 3.3895314e38
_BF16_INF_PATTERN = np.uint32(0x7F80)


class PrecisionMode(Enum):
    """Arithmetic mode for contractions and elementwise complex products."""

    F64_REFERENCE = "f64"
    F32 = "f32"
    BF16_SPLIT3 = "bf16split3"

    @property
    def real_dtype(self):
        return np.dtype(
            np.float64 if self is PrecisionMode.F64_REFERENCE else np.float32
        )

    @classmethod
    def parse(cls, name):
        aliases = {
            "f64": cls.F64_REFERENCE,
            "f64_reference": cls.F64_REFERENCE,
            "f32": cls.F32,
            "bf16": cls.BF16_SPLIT3,
            "bf16split3": cls.BF16_SPLIT3,
        }
        try:
            return aliases[str(name).lower()]
        except KeyError:
            raise ArgumentError(
                f"unknown precision mode {name!r}; expected one of f64, f32, bf16split3"
            ) from None


class ComplexTensor:
    """Immutable rank-1..3 complex tensor stored as two same-dtype real planes."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        re = np.asarray(re)
        im = np.asarray(im)
        if re.shape != im.shape:
            raise DimensionError(f"re/im shape mismatch: {re.shape} vs {im.shape}")
        if not 1 <= re.ndim <= 3:
            raise DimensionError(f"rank must be 1..3, got {re.ndim}")
        if re.dtype != im.dtype:
            raise ArgumentError(f"re/im dtype mismatch: {re.dtype} vs {im.dtype}")
        if re.dtype not in _REAL_DTYPES:
            raise ArgumentError(f"planes must be float32 or float64, got {re.dtype}")
        if not (np.isfinite(re).all() and np.isfinite(im).all()):
            raise ArgumentError("non-finite values in tensor planes")
        re = np.array(re, copy=True)
        im = np.array(im, copy=True)
        re.setflags(write=False)
        im.setflags(write=False)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexTensor is immutable")

    @classmethod
    def from_complex(cls, values, dtype=np.float64):
        values = np.asarray(values)
        return cls(values.real.astype(dtype), values.imag.astype(dtype))

    @classmethod
    def zeros(cls, shape, dtype=np.float64):
        return cls(np.zeros(shape, dtype=dtype), np.zeros(shape, dtype=dtype))

    @property
    def shape(self):
        return self.re.shape

    @property
    def rank(self):
        return self.re.ndim

    @property
    def size(self):
        return self.re.size

    @property
    def dtype(self):
        return self.re.dtype

    @property
    def nbytes(self):
        return self.re.nbytes + self.im.nbytes

    def to_complex(self):
        return self.re.astype(np.complex128) + 1j * self.im.astype(np.complex128)

    def astype(self, dtype):
        dtype = np.dtype(dtype)
        if dtype == self.dtype:
            return self
        return ComplexTensor(self.re.astype(dtype), self.im.astype(dtype))

    def conj(self):
        return ComplexTensor(self.re, -self.im)

    def add(self, other):
        if not isinstance(other, ComplexTensor):
            raise ArgumentError("can only add another ComplexTensor")
        if other.shape != self.shape:
            raise DimensionError(f"shape mismatch: {self.shape} vs {other.shape}")
        if other.dtype != self.dtype:
            raise ArgumentError(f"dtype mismatch: {self.dtype} vs {other.dtype}")
        return ComplexTensor(self.re + other.re, self.im + other.im)

    __add__ = add

    def scaled(self, factor):
        factor = self.dtype.type(factor)
        return ComplexTensor(self.re * factor, self.im * factor)

    def __repr__(self):
        return f"ComplexTensor(shape={self.shape}, dtype={self.dtype})"


# ---------------------------------------------------------------------------
# bfloat16 emulation
# ---------------------------------------------------------------------------


def _round_bits_to_bf16(bits32):
    # Round-to-nearest-even on the top 16 bits: add 0x7FFF plus the parity of
    # the kept LSB, then truncate. Finite inputs cannot wrap uint32.
    lsb = (bits32 >> np.uint32(16)) & np.uint32(1)
    return ((bits32 + np.uint32(0x7FFF) + lsb) >> np.uint32(16)).astype(np.uint16)


def bf16_array(values, saturate=False):
    """Round a float32 array to bfloat16-representable float32 values.

    With ``saturate=True`` finite inputs that would round to infinity clamp
    to the largest finite bfloat16 instead.
    """
    values = np.ascontiguousarray(values, dtype=np.float32)
    bits32 = values.view(np.uint32)
    top = _round_bits_to_bf16(bits32)
    if saturate:
        overflowed = ((top & np.uint16(0x7FFF)) >= _BF16_INF_PATTERN) & np.isfinite(values)
        if overflowed.any():
            sign = top & np.uint16(0x8000)
            top = np.where(overflowed, sign | np.uint16(_BF16_MAX_BITS), top)
    out = (top.astype(np.uint32) << np.uint32(16)).view(np.float32)
    return out.reshape(values.shape)


@dataclass(frozen=True)
class Bf16Value:
    """A single bfloat16 value carried as its 16-bit pattern."""

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= 0xFFFF:
            raise ArgumentError(f"bits out of range: {self.bits:#x}")

    @classmethod
    def from_float32(cls, value):
        value = np.float32(value)
        bits32 = np.frombuffer(value.tobytes(), dtype=np.uint32)[0]
        if not np.isfinite(value):
            # inf/nan already have all-ones exponents; pass the top half through
            return cls(int(bits32 >> np.uint32(16)))
        return cls(int(_round_bits_to_bf16(bits32)))

    def to_float32(self):
        bits32 = np.uint32(self.bits) << np.uint32(16)
        return np.frombuffer(bits32.tobytes(), dtype=np.float32)[0]

    def __float__(self):
        return float(self.to_float32())


def bf16_split(value, terms=3):
    """Split a finite float32 into ``terms`` bfloat16 values summing back to it.

    Each term is the saturating round of the running residual; residual
    subtraction is exact in float32 (the operands are always within a factor
    of two of each other), so the terms telescope.
    """
    if not isinstance(terms, int) or terms < 1:
        raise ArgumentError(f"terms must be a positive int, got {terms!r}")
    value = np.float32(value)
    if not np.isfinite(value):
        raise ArgumentError("cannot split a non-finite value")
    out = []
    residual = value
    for _ in range(terms):
        rounded = bf16_array(np.float32(residual).reshape(1), saturate=True)[0]
        out.append(Bf16Value.from_float32(rounded))
        residual = np.float32(residual - rounded)
    return out


def _split3(values):
    """Array form of the three-term split. Returns three float32 arrays."""
    t1 = bf16_array(values, saturate=True)
    r1 = (values - t1).astype(np.float32)
    t2 = bf16_array(r1, saturate=True)
    r2 = (r1 - t2).astype(np.float32)
    t3 = bf16_array(r2, saturate=True)
    return t1, t2, t3


# Partial products (i, j) with i + j <= 3, most significant first. Products are
# exact in float32 (7-bit mantissas); only the accumulation rounds.
_SPLIT_PRODUCT_ORDER = ((0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1))


def _matmul_split3(a, b):
    a_terms = _split3(a)
    b_terms = _split3(b)
    acc = None
    for i, j in _SPLIT_PRODUCT_ORDER:
        part = np.einsum("ij,jk->ik", a_terms[i], b_terms[j], optimize=False)
        acc = part if acc is None else acc + part
    return acc


def _mul_split3(x, y):
    """Elementwise (broadcasting) version of the split-product scheme."""
    x_terms = _split3(x)
    y_terms = _split3(y)
    acc = None
    for i, j in _SPLIT_PRODUCT_ORDER:
        part = x_terms[i] * y_terms[j]
        acc = part if acc is None else acc + part
    return acc


# ---------------------------------------------------------------------------
# Real and complex contraction kernels
# ---------------------------------------------------------------------------


def matmul_mixed(a, b, mode=PrecisionMode.F64_REFERENCE):
    """Real matrix product under the given precision mode.

    All modes use a fixed-order accumulation (no BLAS dispatch), so results
    are bit-reproducible for a given configuration.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"expected 2-D operands, got {a.ndim}-D and {b.ndim}-D")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if not isinstance(mode, PrecisionMode):
        raise ArgumentError(f"mode must be a PrecisionMode, got {mode!r}")
    if mode is PrecisionMode.F64_REFERENCE:
        return np.einsum(
            "ij,jk->ik", a.astype(np.float64), b.astype(np.float64), optimize=False
        )
    a32 = a.astype(np.float32)
    b32 = b.astype(np.float32)
    if mode is PrecisionMode.F32:
        return np.einsum("ij,jk->ik", a32, b32, optimize=False)
    return _matmul_split3(a32, b32)


def _real_product(x, y, mode):
    if mode is PrecisionMode.BF16_SPLIT3:
        return _mul_split3(x, y)
    return x * y


def contract(matrix, tensor, axis=0, mode=PrecisionMode.F64_REFERENCE):
    """Apply a complex matrix along one axis of a complex tensor.

    The contraction runs as four real matrix products recombined into the
    complex result; each product goes through :func:`matmul_mixed` so the
    precision mode applies uniformly.
    """
    if not isinstance(matrix, ComplexTensor) or not isinstance(tensor, ComplexTensor):
        raise ArgumentError("contract expects ComplexTensor operands")
    if matrix.rank != 2:
        raise DimensionError(f"matrix must be rank 2, got rank {matrix.rank}")
    if not -tensor.rank <= axis < tensor.rank:
        raise DimensionError(f"axis {axis} out of range for rank {tensor.rank}")
    axis %= tensor.rank
    k = tensor.shape[axis]
    if matrix.shape[1] != k:
        raise DimensionError(
            f"matrix columns {matrix.shape[1]} != tensor extent {k} along axis {axis}"
        )
    dtype = mode.real_dtype
    m_re = matrix.re.astype(dtype)
    m_im = matrix.im.astype(dtype)
    moved_shape = np.moveaxis(tensor.re, axis, 0).shape
    x_re = np.moveaxis(tensor.re, axis, 0).reshape(k, -1).astype(dtype)
    x_im = np.moveaxis(tensor.im, axis, 0).reshape(k, -1).astype(dtype)

    rr = matmul_mixed(m_re, x_re, mode)
    ii = matmul_mixed(m_im, x_im, mode)
    ri = matmul_mixed(m_re, x_im, mode)
    ir = matmul_mixed(m_im, x_re, mode)
    out_re = rr - ii
    out_im = ri + ir

    out_shape = (matrix.shape[0],) + moved_shape[1:]
    out_re = np.moveaxis(out_re.reshape(out_shape), 0, axis)
    out_im = np.moveaxis(out_im.reshape(out_shape), 0, axis)
    return ComplexTensor(out_re, out_im)


def scale_along_axis(tensor, axis, factors, mode=PrecisionMode.F64_REFERENCE):
    """Multiply elementwise by a rank-1 complex factor vector along ``axis``."""
    if not isinstance(tensor, ComplexTensor) or not isinstance(factors, ComplexTensor):
        raise ArgumentError("scale_along_axis expects ComplexTensor operands")
    if factors.rank != 1:
        raise DimensionError(f"factors must be rank 1, got rank {factors.rank}")
    if not -tensor.rank <= axis < tensor.rank:
        raise DimensionError(f"axis {axis} out of range for rank {tensor.rank}")
    axis %= tensor.rank
    if factors.shape[0] != tensor.shape[axis]:
        raise DimensionError(
            f"factor length {factors.shape[0]} != extent {tensor.shape[axis]}"
        )
    dtype = mode.real_dtype
    bshape = [1] * tensor.rank
    bshape[axis] = factors.shape[0]
    f_re = factors.re.astype(dtype).reshape(bshape)
    f_im = factors.im.astype(dtype).reshape(bshape)
    x_re = tensor.re.astype(dtype)
    x_im = tensor.im.astype(dtype)
    out_re = _real_product(x_re, f_re, mode) - _real_product(x_im, f_im, mode)
    out_im = _real_product(x_re, f_im, mode) + _real_product(x_im, f_re, mode)
    return ComplexTensor(out_re, out_im)


def reorder(tensor, axis, permutation):
    """Permute slices along one axis; ``permutation[i]`` is the source index."""
    if not isinstance(tensor, ComplexTensor):
        raise ArgumentError("reorder expects a ComplexTensor")
    if not -tensor.rank <= axis < tensor.rank:
        raise DimensionError(f"axis {axis} out of range for rank {tensor.rank}")
    axis %= tensor.rank
    perm = np.asarray(permutation)
    n = tensor.shape[axis]
    if perm.shape != (n,) or not np.issubdtype(perm.dtype, np.integer):
        raise ArgumentError(f"permutation must be {n} integers")
    if not np.array_equal(np.sort(perm), np.arange(n)):
        raise ArgumentError("permutation is not a bijection")
    return ComplexTensor(
        np.take(tensor.re, perm, axis=axis), np.take(tensor.im, perm, axis=axis)
    )
