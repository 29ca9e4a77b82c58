"""Downlink pilots, reception, one-bit quantization and the feedback wire format.

Wire format of a feedback payload: the T x N matrix over {+-1 +- j} is walked
row-major over (t, n); each entry emits its real-sign bit then its imag-sign
bit (1 for +1, 0 for -1). Bit k of the stream is bit ``k % 8`` (LSB first) of
byte ``k // 8``; the last byte is zero-padded in its high bits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError
from .numerics import InvalidDimensionError, RandomSource, dft_unitary


class FrameLengthError(ValueError):
    pass


class InvalidSymbolError(ValueError):
    pass


@dataclass(frozen=True)
class PilotMatrix:
    X: np.ndarray  # M x T, X = A_T @ Z
    P: float
    Z: np.ndarray  # M x T, entries +-sqrt(P/M)

    @property
    def M(self) -> int:
        return self.X.shape[0]

    @property
    def T(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FeedbackFrame:
    user: int
    T: int
    N: int
    payload: bytes

    @property
    def n_bits(self) -> int:
        return 2 * self.T * self.N

    def symbols(self) -> np.ndarray:
        return unpack_bits(self.payload, self.T, self.N)


def design_pilots(M: int, T: int, P: float, rng: RandomSource) -> PilotMatrix:
    if M < 1 or T < 1:
        raise InvalidDimensionError(f"need M, T >= 1, got M={M}, T={T}")
    if P <= 0:
        raise ConfigurationError(f"transmit power must be > 0, got {P}")
    Z = rng.signs((M, T)) * np.sqrt(P / M)
    X = dft_unitary(M) @ Z
    return PilotMatrix(X=X, P=float(P), Z=Z)


def downlink_receive(h: np.ndarray, x: PilotMatrix, rng: RandomSource) -> np.ndarray:
    """``Y = H X + noise`` with CN(0, 1) noise entries."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[1] != x.M:
        raise InvalidDimensionError(f"channel shape {h.shape} does not match {x.M} pilot rows")
    return h @ x.X + rng.noise((h.shape[0], x.T))


def quantize(z: np.ndarray) -> np.ndarray:
    """Per-component sign, with sign(0) = +1. Output alphabet is {+-1 +- j}."""
    z = np.asarray(z)
    re = np.where(np.real(z) >= 0, 1.0, -1.0)
    im = np.where(np.imag(z) >= 0, 1.0, -1.0)
    return re + 1j * im


def pack_bits(q: np.ndarray) -> bytes:
    q = np.asarray(q)
    re, im = np.real(q), np.imag(q)
    if not (np.all(np.abs(re) == 1.0) and np.all(np.abs(im) == 1.0)):
        raise InvalidSymbolError("every entry must be one of +-1 +- j")
    bits = np.stack([re > 0, im > 0], axis=-1).ravel()
    return np.packbits(bits.astype(np.uint8), bitorder="little").tobytes()


def unpack_bits(payload: bytes, T: int, N: int) -> np.ndarray:
    n_bits = 2 * T * N
    if len(payload) != (n_bits + 7) // 8:
        raise FrameLengthError(
            f"{T}x{N} frame needs {(n_bits + 7) // 8} bytes, got {len(payload)}"
        )
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    if np.any(bits[n_bits:]):
        raise FrameLengthError("nonzero padding bits")
    signs = np.where(bits[:n_bits] == 1, 1.0, -1.0).reshape(T, N, 2)
    return signs[..., 0] + 1j * signs[..., 1]


def receiver_feedback(y: np.ndarray, N: int, user: int = 0) -> FeedbackFrame:
    """Quantize the post-processed observation ``Y^H A_R`` (T x N) and pack it."""
    y = np.asarray(y)
    if y.ndim != 2 or y.shape[0] != N:
        raise InvalidDimensionError(f"expected {N} receive rows, got shape {y.shape}")
    q = quantize(y.conj().T @ dft_unitary(N))
    T = y.shape[1]
    return FeedbackFrame(user=user, T=T, N=N, payload=pack_bits(q))
