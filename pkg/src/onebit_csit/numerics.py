"""Dense complex-matrix helpers shared by the rest of the package."""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np


class InvalidDimensionError(ValueError):
    pass


class ZeroMatrixError(ValueError):
    pass


def dft_unitary(n: int) -> np.ndarray:
    """Unitary n-point DFT matrix, ``F[p, q] = exp(-2j*pi*p*q/n) / sqrt(n)``.

    The returned array is cached and read-only.
    """
    if n < 1:
        raise InvalidDimensionError(f"DFT size must be >= 1, got {n}")
    return _dft(int(n))


@lru_cache(maxsize=32)
def _dft(n: int) -> np.ndarray:
    k = np.arange(n)
    # reduce p*q mod n before the exponent so large n keeps full precision
    phase = np.outer(k, k) % n
    f = np.exp(-2j * np.pi * phase / n) / np.sqrt(n)
    f.flags.writeable = False
    return f


class EigResult(NamedTuple):
    vector: np.ndarray
    value: float
    converged: bool
    iterations: int


def top_eigvec(a: np.ndarray, tol: float = 1e-10, max_iter: int = 1000) -> EigResult:
    """Dominant eigenpair of a Hermitian PSD matrix by power iteration.

    The start vector is the column of ``a`` with the largest norm, which always
    lies in the range of ``a``. Iteration stops once
    ``||a v - rho v|| <= tol * rho`` with ``rho`` the Rayleigh quotient. If
    ``max_iter`` is exhausted the last iterate is returned with
    ``converged=False``.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    col_norms = np.linalg.norm(a, axis=0)
    j = int(np.argmax(col_norms))
    if col_norms[j] == 0.0:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return EigResult(v, 0.0, True, 0)

    v = a[:, j].astype(complex) / col_norms[j]
    rho = 0.0
    for it in range(1, max_iter + 1):
        av = a @ v
        rho = float(np.real(np.vdot(v, av)))
        if np.linalg.norm(av - rho * v) <= tol * abs(rho):
            return EigResult(v, rho, True, it)
        nrm = np.linalg.norm(av)
        if nrm == 0.0:
            return EigResult(v, rho, True, it)
        v = av / nrm
    rho = float(np.real(np.vdot(v, a @ v)))
    return EigResult(v, rho, False, max_iter)


def frobenius_normalize(a: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(a)
    if nrm == 0.0:
        raise ZeroMatrixError("cannot normalize an all-zero matrix")
    return a / nrm


def _mix_seed(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed (deterministic, order sensitive)."""
    ss = np.random.SeedSequence([int(p) & 0xFFFFFFFFFFFFFFFF for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RandomSource:
    """Seeded generator for every random draw in a simulation.

    Receiver noise comes from its own stream, so ``zero_noise=True`` (a test
    hook) silences it while every other draw stays identical to the noisy run
    with the same seed.
    """

    def __init__(self, seed: int, zero_noise: bool = False):
        self.seed = int(seed)
        self.zero_noise = zero_noise
        main, noise = np.random.SeedSequence(self.seed & 0xFFFFFFFFFFFFFFFF).spawn(2)
        self._gen = np.random.default_rng(main)
        self._noise = np.random.default_rng(noise)

    def spawn(self, *index: int) -> "RandomSource":
        return RandomSource(_mix_seed(self.seed, *index), zero_noise=self.zero_noise)

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]`` inclusive."""
        return int(self._gen.integers(low, high + 1))

    def sample_without_replacement(self, population: np.ndarray, k: int) -> np.ndarray:
        population = np.asarray(population)
        if k == 0:
            return population[:0].copy()
        return self._gen.choice(population, size=k, replace=False)

    def complex_normal(self, shape) -> np.ndarray:
        """i.i.d. CN(0, 1): real and imaginary parts each N(0, 1/2)."""
        z = self._gen.standard_normal(shape) + 1j * self._gen.standard_normal(shape)
        return z * np.sqrt(0.5)

    def noise(self, shape) -> np.ndarray:
        if self.zero_noise:
            return np.zeros(shape, dtype=complex)
        z = self._noise.standard_normal(shape) + 1j * self._noise.standard_normal(shape)
        return z * np.sqrt(0.5)

    def signs(self, shape) -> np.ndarray:
        """Equiprobable +-1 entries."""
        return np.where(self._gen.integers(0, 2, size=shape) == 1, 1.0, -1.0)
