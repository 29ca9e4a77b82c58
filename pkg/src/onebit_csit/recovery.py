"""Channel recovery from one-bit feedback.

Internally every user's channel is carried in the transposed angular form
``Hhat_i = (Ha_i)^H`` (M x N), so the measurement model reads
``Yhat_i = Q(Xhat @ Hhat_i + noise)`` with ``Xhat = X^H A_T`` (T x M), and the
sparsity lives on the rows of ``Hhat_i``.

Four estimators are provided:

* :func:`jbiht` -- joint binary iterative hard thresholding with a cross-user
  vote on the common support.
* :func:`biht_individual` -- the same iteration for a single user with no
  common-support step.
* :func:`jbiht_known_support` -- the iteration thresholded to given supports.
* :func:`genie_ls` -- least squares on the true support from unquantized data.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .airlink import FeedbackFrame, PilotMatrix, quantize
from .config import ConfigurationError
from .numerics import InvalidDimensionError, dft_unitary


class DegenerateResultError(ArithmeticError):
    pass


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class RecoveryInput:
    Yhat: np.ndarray  # K x T x N over {+-1 +- j}
    Xhat: np.ndarray  # T x M
    s: np.ndarray  # per-user support bound, shape (K,)
    c: int
    mu: float = 0.01
    max_iter: int = 200

    def __post_init__(self):
        if self.Yhat.ndim != 3 or self.Xhat.ndim != 2 or self.Yhat.shape[1] != self.Xhat.shape[0]:
            raise InvalidDimensionError(
                f"feedback shape {self.Yhat.shape} does not match sensing matrix {self.Xhat.shape}"
            )
        s = np.asarray(self.s, dtype=int).reshape(-1)
        if s.size == 1 and self.Yhat.shape[0] != 1:
            s = np.full(self.Yhat.shape[0], int(s[0]))
        object.__setattr__(self, "s", s)
        if s.shape != (self.K,):
            raise InvalidDimensionError(f"need one support bound per user, got {s.shape}")
        if np.any(s < 1) or np.any(s > self.M):
            raise ConfigurationError(f"support bounds must lie in [1, M={self.M}], got {s}")
        if self.c < 0 or self.c > s.min():
            raise ConfigurationError(f"need 0 <= c <= min s_i, got c={self.c}, s={s}")

    @property
    def K(self) -> int:
        return self.Yhat.shape[0]

    @property
    def T(self) -> int:
        return self.Xhat.shape[0]

    @property
    def M(self) -> int:
        return self.Xhat.shape[1]

    @property
    def N(self) -> int:
        return self.Yhat.shape[2]

    def user(self, i: int) -> "RecoveryInput":
        return replace(self, Yhat=self.Yhat[i : i + 1], s=self.s[i : i + 1], c=0)


@dataclass
class RecoveryResult:
    estimates: np.ndarray  # K x N x M antenna-domain channels, unit Frobenius norm each
    angular: np.ndarray  # K x M x N working-form estimates, before normalization
    supports: list[np.ndarray]
    common: np.ndarray
    iterations: int
    consistent: bool
    mismatches: int
    mismatch_history: list[int] = field(default_factory=list)


def preprocess(
    pilots: PilotMatrix,
    frames: Sequence[FeedbackFrame],
    s,
    c: int,
    mu: float = 0.01,
    max_iter: int = 200,
) -> RecoveryInput:
    if not frames:
        raise InvalidDimensionError("no feedback frames")
    N = frames[0].N
    for f in frames:
        if f.T != pilots.T or f.N != N:
            raise InvalidDimensionError(
                f"frame from user {f.user} is {f.T}x{f.N}, expected {pilots.T}x{N}"
            )
    Xhat = pilots.X.conj().T @ dft_unitary(pilots.M)
    Yhat = np.stack([f.symbols() for f in frames])
    return RecoveryInput(Yhat=Yhat, Xhat=Xhat, s=np.atleast_1d(s), c=c, mu=mu, max_iter=max_iter)


def consistency_check(h_est: np.ndarray, inp: RecoveryInput) -> int:
    """Number of entries (summed over users) where ``Q(Xhat h) != Yhat``.

    ``h_est`` holds the working-form estimates, shape K x M x N.
    """
    pred = quantize(np.matmul(inp.Xhat, h_est))
    return int(np.count_nonzero(pred != inp.Yhat))


def _top_mask(energy: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Column-wise top-k mask of an M x K energy array (ties to the lower index)."""
    order = np.argsort(-energy, axis=0, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(energy.shape[0])[:, None], axis=0)
    return rank < k[None, :]


def vote_common(candidates: np.ndarray, energy: np.ndarray, c: int) -> np.ndarray:
    """Pick the c indices selected by the most users.

    ``candidates`` is an M x K boolean mask of the per-user candidate
    supports and ``energy`` the M x K row energies. Ties are broken by larger
    total energy across users, then by lower index.
    """
    if c == 0:
        return np.array([], dtype=int)
    M = energy.shape[0]
    counts = candidates.sum(axis=1)
    total = energy.sum(axis=1)
    order = np.lexsort((np.arange(M), -total, -counts))
    return np.sort(order[:c])


def joint_supports(energy: np.ndarray, s: np.ndarray, c: int):
    """Candidate supports, common-support vote and re-selection for one iteration.

    ``energy`` is M x K. Returns ``(mask, common)`` where ``mask`` (M x K)
    marks each user's support and ``common`` is contained in all of them.
    """
    candidates = _top_mask(energy, s)
    common = vote_common(candidates, energy, c)
    if common.size == 0:
        return candidates, common
    e = energy.copy()
    e[common] = -np.inf
    mask = _top_mask(e, s - c)
    mask[common] = True
    return mask, common


def _finish(h: np.ndarray) -> np.ndarray:
    """Map M x K x N working-form estimates to unit-norm antenna-domain channels (K x N x M)."""
    M, K, N = h.shape
    a_r = dft_unitary(N)
    a_t = dft_unitary(M)
    # H_i = A_R Hhat_i^H A_T^H = (A_T Hhat_i A_R^H)^H
    out = np.empty((K, N, M), dtype=complex)
    for i in range(K):
        ant = (a_t @ h[:, i, :] @ a_r.conj().T).conj().T
        nrm = np.linalg.norm(ant)
        if nrm == 0.0:
            raise DegenerateResultError(f"estimate for user {i} is identically zero")
        out[i] = ant / nrm
    return out


def _iterate(inp: RecoveryInput, select) -> RecoveryResult:
    """Shared BIHT loop; ``select(energy)`` returns ``(mask, common)`` for M x K energies."""
    K, T, M, N = inp.K, inp.T, inp.M, inp.N
    Xh = inp.Xhat
    XhH = Xh.conj().T
    # all users side by side: column block i holds user i
    y = inp.Yhat.transpose(1, 0, 2).reshape(T, K * N)
    h = XhH @ y
    pred = quantize(Xh @ h)
    mask = np.ones((M, K), dtype=bool)
    common = np.array([], dtype=int)
    history = []
    mism = -1
    k = 0
    for k in range(1, inp.max_iter + 1):
        h = h - inp.mu * (XhH @ (pred - y))

        energy = np.sum(np.abs(h.reshape(M, K, N)) ** 2, axis=2)
        mask, common = select(energy)
        h = np.where(np.repeat(mask, N, axis=1), h, 0.0)

        pred = quantize(Xh @ h)
        mism = int(np.count_nonzero(pred != y))
        history.append(mism)
        if mism == 0:
            break

    h3 = h.reshape(M, K, N)
    return RecoveryResult(
        estimates=_finish(h3),
        angular=h3.transpose(1, 0, 2).copy(),
        supports=[np.flatnonzero(mask[:, i]) for i in range(K)],
        common=np.asarray(common, dtype=int),
        iterations=k,
        consistent=mism == 0,
        mismatches=mism,
        mismatch_history=history,
    )


def jbiht(inp: RecoveryInput) -> RecoveryResult:
    return _iterate(inp, lambda energy: joint_supports(energy, inp.s, inp.c))


def biht_individual(inp: RecoveryInput) -> RecoveryResult:
    """Single-user BIHT with row-group thresholding (no common-support step)."""
    if inp.K != 1:
        raise InvalidDimensionError(f"biht_individual takes one user, got K={inp.K}")
    return _iterate(inp, lambda energy: (_top_mask(energy, inp.s), np.array([], dtype=int)))


def biht_all(inp: RecoveryInput) -> RecoveryResult:
    """:func:`biht_individual` for every user in one batched loop.

    A consistent user is a fixed point of the iteration, so running users
    together until all are consistent yields the same estimates as running
    each alone.
    """
    return _iterate(inp, lambda energy: (_top_mask(energy, inp.s), np.array([], dtype=int)))


def jbiht_known_support(inp: RecoveryInput, supports: Sequence, common=()) -> RecoveryResult:
    if len(supports) != inp.K:
        raise InvalidDimensionError(f"need {inp.K} supports, got {len(supports)}")
    fixed = np.zeros((inp.M, inp.K), dtype=bool)
    for i, supp in enumerate(supports):
        idx = np.fromiter(supp, dtype=int)
        if idx.size == 0 or idx.min() < 0 or idx.max() >= inp.M:
            raise ConfigurationError(f"support {sorted(supp)} is empty or out of range")
        fixed[idx, i] = True
    common_arr = np.sort(np.fromiter(common, dtype=int))
    return _iterate(inp, lambda energy: (fixed, common_arr))


def genie_ls(y: np.ndarray, pilots: PilotMatrix, support) -> RecoveryResult:
    """Least squares on a known support from the unquantized received block ``y`` (N x T)."""
    y = np.asarray(y)
    N = y.shape[0]
    M, T = pilots.M, pilots.T
    if y.shape != (N, T):
        raise InvalidDimensionError(f"received block {y.shape} does not match T={T}")
    supp = np.sort(np.fromiter(support, dtype=int))
    if T < supp.size:
        raise ConfigurationError(f"T={T} is smaller than the support size {supp.size}")
    Xhat = pilots.X.conj().T @ dft_unitary(M)
    target = y.conj().T @ dft_unitary(N)  # T x N
    sub = Xhat[:, supp]
    coef, _, rank, _ = np.linalg.lstsq(sub, target, rcond=None)
    if rank < supp.size:
        raise SingularSystemError(f"restricted sensing matrix has rank {rank} < {supp.size}")
    h = np.zeros((M, 1, N), dtype=complex)
    h[supp, 0] = coef
    return RecoveryResult(
        estimates=_finish(h),
        angular=h.transpose(1, 0, 2).copy(),
        supports=[supp],
        common=supp,
        iterations=0,
        consistent=True,
        mismatches=0,
    )
