"""Beamforming SNR loss and the Monte Carlo experiment harness."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import airlink, channel, recovery
from .config import ConfigurationError, ScenarioConfig
from .numerics import RandomSource, top_eigvec

log = logging.getLogger(__name__)

ALGORITHMS = ("biht", "jbiht", "jbiht-oracle", "genie-ls")
SWEEPABLE = ("T", "c", "K", "N", "snr_db", "s", "trials")


class DegenerateChannelError(ValueError):
    pass


def optimal_precoder(h: np.ndarray) -> np.ndarray:
    """Unit-norm dominant eigenvector of ``H^H H``."""
    h = np.asarray(h)
    if not np.any(h):
        raise DegenerateChannelError("zero channel has no beamforming direction")
    return top_eigvec(h.conj().T @ h).vector


def snr_loss_db(h_true: np.ndarray, h_est: np.ndarray) -> float:
    """Beamforming gain lost by steering along ``h_est`` instead of ``h_true``, in dB.

    Returns ``inf`` when the estimated beam falls in the null space of the
    true channel.
    """
    return _loss(h_true, optimal_precoder(h_true), optimal_precoder(h_est))


def _loss(h_true, w, w_est):
    best = np.linalg.norm(h_true @ w) ** 2
    got = np.linalg.norm(h_true @ w_est) ** 2
    if got <= 0.0:
        return float("inf")
    return float(10.0 * np.log10(best / got))


@dataclass
class TrialOutcome:
    losses: dict  # algorithm -> (K,) dB losses; nan marks a failed run, inf a null-space beam
    support_hit: dict  # algorithm -> (K,) bool, estimated support contains the true one
    common_overlap: dict  # algorithm -> fraction of the true common support recovered
    iterations: dict = field(default_factory=dict)
    consistent: dict = field(default_factory=dict)

    def mean_loss(self, algo: str) -> float:
        """Mean over users with a finite loss; nan if there are none."""
        x = self.losses[algo]
        finite = x[np.isfinite(x)]
        return float(finite.mean()) if finite.size else float("nan")

    def invalid_count(self, algo: str) -> int:
        return int(np.count_nonzero(~np.isfinite(self.losses[algo])))


def trial_source(cfg: ScenarioConfig, trial_index: int, sweep_index: int = 0,
                 zero_noise: bool = False) -> RandomSource:
    """Per-trial generator: the master seed mixed with (sweep index, trial index)."""
    return RandomSource(cfg.seed, zero_noise=zero_noise).spawn(sweep_index, trial_index)


def _run_algorithm(algo, inp, pilots, ys, chans):
    K = inp.K
    if algo == "jbiht":
        return [recovery.jbiht(inp)]
    if algo == "jbiht-oracle":
        return [recovery.jbiht_known_support(inp, chans.supports.user_supports,
                                             chans.supports.common)]
    if algo == "biht":
        return [recovery.biht_all(inp)]
    if algo == "genie-ls":
        return [recovery.genie_ls(ys[i], pilots, chans.supports.user_supports[i])
                for i in range(K)]
    raise ValueError(f"unknown algorithm {algo!r}")


def run_trial(cfg: ScenarioConfig, trial_index: int, sweep_index: int = 0,
              algorithms=ALGORITHMS, zero_noise: bool = False) -> TrialOutcome:
    rng = trial_source(cfg, trial_index, sweep_index, zero_noise)
    supports = channel.draw_supports(cfg, rng)
    chans = channel.draw_channels(supports, cfg, rng)
    pilots = airlink.design_pilots(cfg.M, cfg.T, cfg.power, rng)
    ys = [airlink.downlink_receive(h, pilots, rng) for h in chans.antenna]
    frames = [airlink.receiver_feedback(y, cfg.N, user=i) for i, y in enumerate(ys)]
    inp = recovery.preprocess(pilots, frames, s=cfg.s, c=cfg.c, mu=cfg.mu, max_iter=cfg.max_iter)

    true_common = np.array(sorted(supports.common), dtype=int)
    w_true = [optimal_precoder(h) for h in chans.antenna]
    losses, hit, overlap, iters, consistent = {}, {}, {}, {}, {}
    for algo in algorithms:
        try:
            results = _run_algorithm(algo, inp, pilots, ys, chans)
        except (recovery.DegenerateResultError, recovery.SingularSystemError) as exc:
            log.warning("trial %d: %s failed: %s", trial_index, algo, exc)
            losses[algo] = np.full(cfg.K, np.nan)
            hit[algo] = np.zeros(cfg.K, dtype=bool)
            overlap[algo] = float("nan")
            continue
        est = np.concatenate([r.estimates for r in results])
        supp = [s for r in results for s in r.supports]
        losses[algo] = np.array([_loss(h, w, optimal_precoder(e))
                                 for h, w, e in zip(chans.antenna, w_true, est)])
        hit[algo] = np.array([set(supports.user_supports[i]) <= set(supp[i].tolist())
                              for i in range(cfg.K)])
        if true_common.size:
            # per-user estimators have no common estimate; use their support intersection
            est_common = (results[0].common if algo in ("jbiht", "jbiht-oracle")
                          else _intersect_all(supp))
            overlap[algo] = np.intersect1d(est_common, true_common).size / true_common.size
        else:
            overlap[algo] = float("nan")
        iters[algo] = max(r.iterations for r in results)
        consistent[algo] = all(r.consistent for r in results)
        log.debug("trial %d %s: mean loss %.3f dB, iterations %d, consistent %s",
                  trial_index, algo, np.nanmean(losses[algo]), iters[algo], consistent[algo])
    return TrialOutcome(losses, hit, overlap, iters, consistent)


def _intersect_all(supports):
    out = supports[0]
    for s in supports[1:]:
        out = np.intersect1d(out, s)
    return out


@dataclass
class ExperimentReport:
    param: str
    values: list
    means: dict  # algorithm -> list of mean dB loss per sweep value (nan if invalid)
    invalid_counts: dict  # algorithm -> list of excluded (trial, user) entries per value
    trials: list  # trial count per sweep value
    seed: int
    config: ScenarioConfig
    algorithms: tuple = ALGORITHMS

    def nonincreasing(self, algo: str, slack: float = 0.0) -> bool:
        m = np.asarray(self.means[algo])
        return bool(np.all(np.diff(m) <= slack))

    def valid(self) -> bool:
        return all(np.isfinite(v) for a in self.algorithms for v in self.means[a])


def _trial_task(args):
    cfg, trial_index, sweep_index, algorithms = args
    return run_trial(cfg, trial_index, sweep_index, algorithms)


def run_experiment(cfg: ScenarioConfig, param: str = "T", values=None,
                   algorithms=ALGORITHMS, jobs: int = 1) -> ExperimentReport:
    """Run ``trials`` independent trials at every sweep value and average."""
    if param not in SWEEPABLE:
        raise ConfigurationError(f"cannot sweep {param!r}; choose from {SWEEPABLE}")
    if values is None:
        values = [getattr(cfg, param)]
    algorithms = tuple(algorithms)

    points = []
    for v in values:
        try:
            point = replace(cfg, **{param: v})
            point.check_feasible()
        except ConfigurationError as exc:
            log.warning("%s=%s is infeasible: %s", param, v, exc)
            point = None
        points.append(point)

    tasks = [(p, t, k, algorithms) for k, p in enumerate(points) if p is not None
             for t in range(p.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        outcomes = [_trial_task(t) for t in tasks]

    means = {a: [] for a in algorithms}
    invalid = {a: [] for a in algorithms}
    trials = []
    pos = 0
    for p in points:
        if p is None:
            for a in algorithms:
                means[a].append(float("nan"))
                invalid[a].append(cfg.trials * cfg.K)
            trials.append(0)
            continue
        batch = outcomes[pos : pos + p.trials]
        pos += p.trials
        trials.append(p.trials)
        for a in algorithms:
            per_trial = np.array([o.mean_loss(a) for o in batch])
            ok = per_trial[np.isfinite(per_trial)]
            means[a].append(float(ok.mean()) if ok.size else float("nan"))
            invalid[a].append(sum(o.invalid_count(a) for o in batch))
        log.info("%s=%s: %s", param, getattr(p, param),
                 ", ".join(f"{a} {means[a][-1]:.3f} dB" for a in algorithms))

    return ExperimentReport(param, list(values), means, invalid, trials, cfg.seed, cfg, algorithms)
