"""Spectral containers, per-mode block operators, DFTs and circular convolution.

States are complex arrays laid out ``(n_fields, n_modes)``. Most functions also
accept extra leading batch axes, which the averaging code uses to evaluate all
kernel nodes at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ShapeError(ValueError):
    """Raised when array shapes do not agree."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic 1D grid on ``[0, length)``."""

    N: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")

    @property
    def x(self) -> np.ndarray:
        return self.length * np.arange(self.N) / self.N

    @property
    def k(self) -> np.ndarray:
        """Signed integer wavenumbers in DFT order; the Nyquist mode is +N/2."""
        j = np.arange(self.N)
        return np.where(j <= self.N // 2, j, j - self.N)

    @property
    def k_odd(self) -> np.ndarray:
        """Wavenumbers for odd-order derivatives, with the Nyquist mode zeroed.

        Keeps first derivatives of real fields real.
        """
        k = self.k.copy()
        k[self.N // 2] = 0
        return k

    @property
    def k_max(self) -> int:
        return self.N // 2


def _check_length(n: int, expected: int | None):
    if expected is not None and n != expected:
        raise ShapeError(f"length {n} does not match grid size {expected}")


def dft_forward(field: np.ndarray, N: int | None = None) -> np.ndarray:
    """Unnormalized forward DFT along the last axis."""
    field = np.asarray(field)
    _check_length(field.shape[-1], N)
    return np.fft.fft(field, axis=-1)


def dft_inverse(spectrum: np.ndarray, N: int | None = None) -> np.ndarray:
    """Inverse of :func:`dft_forward`, including the 1/N factor."""
    spectrum = np.asarray(spectrum)
    _check_length(spectrum.shape[-1], N)
    return np.fft.ifft(spectrum, axis=-1)


def circular_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``g_i = (1/N) sum_j a_j b_{(i-j) mod N}`` along the last axis.

    With the unnormalized forward DFT this sum is exactly the spectrum of the
    pointwise product of the two inverse transforms, which is how it is
    evaluated. Leading axes broadcast.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise ShapeError(f"convolution length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return np.fft.fft(np.fft.ifft(a, axis=-1) * np.fft.ifft(b, axis=-1), axis=-1)


@dataclass(frozen=True)
class SpectralState:
    """Immutable complex coefficient array indexed ``(field, mode)``."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2:
            raise ShapeError(f"SpectralState needs a 2D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("SpectralState contains non-finite entries")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def n_fields(self) -> int:
        return self.data.shape[0]

    @property
    def n_modes(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_physical(cls, fields: np.ndarray) -> "SpectralState":
        fields = np.atleast_2d(np.asarray(fields))
        return cls(dft_forward(fields))

    def to_physical(self) -> np.ndarray:
        return dft_inverse(self.data)

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        return conjugate_symmetry_defect(self.data) <= tol

    def __add__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.data + other.data)

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.data - other.data)

    def __mul__(self, alpha: complex) -> "SpectralState":
        return SpectralState(alpha * self.data)

    __rmul__ = __mul__


def conjugate_symmetry_defect(spectrum: np.ndarray) -> float:
    """max |x_j - conj(x_{-j mod N})| over the last axis."""
    spectrum = np.asarray(spectrum)
    mirrored = np.roll(spectrum[..., ::-1], 1, axis=-1)
    return float(np.max(np.abs(spectrum - np.conj(mirrored)), initial=0.0))


@dataclass(frozen=True)
class BlockOperator:
    """Block-diagonal operator: one ``m x m`` complex matrix per mode.

    ``blocks`` has shape ``(n_modes, m, m)``. Tagging an operator as
    skew-Hermitian validates ``B + B^H = 0`` on construction.
    """

    blocks: np.ndarray
    skew_hermitian: bool = field(default=False)

    def __post_init__(self):
        blocks = np.array(self.blocks, dtype=complex)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise ShapeError(f"blocks must be (n_modes, m, m), got {blocks.shape}")
        if self.skew_hermitian:
            defect = np.max(np.abs(blocks + np.conj(np.swapaxes(blocks, 1, 2))))
            if defect > 1e-12:
                raise ValueError(f"operator tagged skew-Hermitian has defect {defect:.3e}")
        blocks.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)

    @property
    def n_modes(self) -> int:
        return self.blocks.shape[0]

    @property
    def m(self) -> int:
        return self.blocks.shape[1]

    def __call__(self, x):
        return apply_block(self, x)

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        if other.blocks.shape != self.blocks.shape:
            raise ShapeError("cannot compose operators of different shapes")
        return BlockOperator(self.blocks @ other.blocks)

    def dense(self) -> np.ndarray:
        """Dense matrix acting on the field-major flattening of a state."""
        n, m = self.n_modes, self.m
        out = np.zeros((m * n, m * n), dtype=complex)
        for j in range(n):
            idx = np.arange(m) * n + j
            out[np.ix_(idx, idx)] = self.blocks[j]
        return out


def apply_blocks(blocks: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per-mode matrix-vector product for raw block arrays.

    ``blocks`` is ``(..., n_modes, m, m)`` and ``x`` is ``(..., m, n_modes)``;
    leading axes broadcast.
    """
    return np.einsum("...jfg,...gj->...fj", blocks, x)


def apply_block(op: BlockOperator, x):
    """Apply ``op`` mode by mode to a state (array or :class:`SpectralState`)."""
    as_state = isinstance(x, SpectralState)
    arr = x.data if as_state else np.asarray(x)
    if arr.shape[-2:] != (op.m, op.n_modes):
        raise ShapeError(
            f"state shape {arr.shape[-2:]} incompatible with operator ({op.m}, {op.n_modes})"
        )
    out = apply_blocks(op.blocks, arr)
    return SpectralState(out) if as_state else out
