"""Jointly sparse angular-domain channels.

Every user's channel ``H_i`` (N x M) is ``A_R @ Ha_i @ A_T^H`` where ``Ha_i``
has nonzero columns only on the user's support ``S_i`` (shared by all N rows),
and all supports contain a common set ``C``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError, ScenarioConfig
from .numerics import InvalidDimensionError, RandomSource, dft_unitary


@dataclass(frozen=True)
class SupportSet:
    user_supports: tuple[frozenset, ...]
    common: frozenset

    @property
    def K(self) -> int:
        return len(self.user_supports)

    def as_arrays(self) -> list[np.ndarray]:
        return [np.array(sorted(s), dtype=int) for s in self.user_supports]


@dataclass(frozen=True)
class ChannelSet:
    angular: tuple[np.ndarray, ...]  # Ha_i, N x M
    antenna: tuple[np.ndarray, ...]  # H_i = A_R Ha_i A_T^H
    supports: SupportSet

    @property
    def K(self) -> int:
        return len(self.angular)


def draw_supports(cfg: ScenarioConfig, rng: RandomSource) -> SupportSet:
    cfg.check_feasible()
    M = cfg.M
    everything = np.arange(M)
    if cfg.c == 0:
        common = np.array([], dtype=int)
    else:
        n_common = rng.integers(cfg.c, cfg.c + 1)
        common = np.sort(rng.sample_without_replacement(everything, n_common))
    rest = np.setdiff1d(everything, common)

    supports = []
    for _ in range(cfg.K):
        size = rng.integers(cfg.s - 2, cfg.s)
        if size < len(common):
            raise ConfigurationError(f"drawn |S_i|={size} is smaller than |C|={len(common)}")
        extra = rng.sample_without_replacement(rest, size - len(common))
        supports.append(frozenset(int(j) for j in np.concatenate([common, extra])))
    return SupportSet(tuple(supports), frozenset(int(j) for j in common))


def to_antenna_domain(h_a: np.ndarray, M: int, N: int) -> np.ndarray:
    h_a = np.asarray(h_a)
    if h_a.shape != (N, M):
        raise InvalidDimensionError(f"expected angular matrix of shape {(N, M)}, got {h_a.shape}")
    return dft_unitary(N) @ h_a @ dft_unitary(M).conj().T


def to_angular_domain(h: np.ndarray, M: int, N: int) -> np.ndarray:
    h = np.asarray(h)
    if h.shape != (N, M):
        raise InvalidDimensionError(f"expected channel of shape {(N, M)}, got {h.shape}")
    return dft_unitary(N).conj().T @ h @ dft_unitary(M)


def draw_channels(supports: SupportSet, cfg: ScenarioConfig, rng: RandomSource) -> ChannelSet:
    M, N = cfg.M, cfg.N
    a_r = dft_unitary(N)
    a_t_h = dft_unitary(M).conj().T
    angular, antenna = [], []
    for supp in supports.as_arrays():
        h_a = np.zeros((N, M), dtype=complex)
        h_a[:, supp] = rng.complex_normal((N, len(supp)))
        angular.append(h_a)
        antenna.append(a_r @ h_a @ a_t_h)
    return ChannelSet(tuple(angular), tuple(antenna), supports)


def dump_channels(channels: ChannelSet, cfg: ScenarioConfig) -> str:
    """JSON debug record: config, supports, and each Ha_i as row-major [re, im] pairs."""
    record = {
        "config": cfg.to_dict(),
        "common_support": sorted(channels.supports.common),
        "user_supports": [sorted(s) for s in channels.supports.user_supports],
        "angular": [
            [[float(z.real), float(z.imag)] for z in h.ravel()] for h in channels.angular
        ],
    }
    return json.dumps(record)
