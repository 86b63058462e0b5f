"""Monte-Carlo estimates of the fading statistics that the closed forms predict.

Trials are split over ``stream_count`` independent random streams. Stream i
is a Philox generator keyed by ``SeedSequence(master_seed, spawn_key=(i,))``,
so the estimate is a function of (master_seed, stream_count, trials) alone,
whether the streams run serially or on a thread pool. Per-stream partial
moments are merged in stream order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fading
from .errors import InvalidArgumentError
from .oracles import qam_ber_monte_carlo

DEFAULT_SEED = 20_240_601
_CHUNK = 1 << 18


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    master_seed: int = DEFAULT_SEED
    stream_count: int = 1
    confidence_sigma: float = 3.0
    max_workers: int | None = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1000:
            raise InvalidArgumentError(f"trials must be an integer >= 1000, got {self.trials}")
        if int(self.stream_count) != self.stream_count or self.stream_count < 1:
            raise InvalidArgumentError("stream_count must be a positive integer")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidArgumentError("master_seed must be a 64-bit unsigned integer")
        if not self.confidence_sigma > 0:
            raise InvalidArgumentError("confidence_sigma must be positive")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int

    def within(self, expected, sigma=3.0, std_error=None):
        """True if ``expected`` lies within ``sigma`` standard errors of the mean."""
        se = self.std_error if std_error is None else std_error
        return abs(self.mean - expected) <= sigma * se


def stream_generator(master_seed, index):
    """Independent generator for stream ``index`` of ``master_seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def partition(trials, stream_count):
    base, extra = divmod(trials, stream_count)
    return [base + (1 if i < extra else 0) for i in range(stream_count)]


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2).
    na, ma, sa = a
    nb, mb, sb = b
    if na == 0:
        return b
    if nb == 0:
        return a
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _stream_moments(statistic, master_seed, index, count):
    rng = stream_generator(master_seed, index)
    acc = (0, 0.0, 0.0)
    done = 0
    while done < count:
        n = min(_CHUNK, count - done)
        values = np.asarray(statistic(rng, n), dtype=float)
        mean = float(np.mean(values))
        m2 = float(np.sum((values - mean) ** 2))
        acc = _merge(acc, (n, mean, m2))
        done += n
    return acc


def run_statistic(statistic, cfg):
    """Mean and standard error of ``statistic(rng, n) -> array`` over ``cfg.trials`` draws."""
    sizes = partition(cfg.trials, cfg.stream_count)
    if cfg.stream_count == 1:
        parts = [_stream_moments(statistic, cfg.master_seed, 0, sizes[0])]
    else:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            futures = [pool.submit(_stream_moments, statistic, cfg.master_seed, i, n) for i, n in enumerate(sizes)]
            parts = [f.result() for f in futures]
    acc = (0, 0.0, 0.0)
    for part in parts:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    var = m2 / (n - 1) if n > 1 else 0.0
    return McEstimate(mean, math.sqrt(var / n), n)


def estimate_outage(params, lambda_t, gamma_th, cfg):
    """Fraction of draws with lambda_t |h|^2 < gamma_th; std error sqrt(p(1-p)/n)."""

    def stat(rng, n):
        return (lambda_t * fading.sample_power(params, rng, n) < gamma_th).astype(float)

    est = run_statistic(stat, cfg)
    p = est.mean
    return McEstimate(p, math.sqrt(p * (1.0 - p) / est.trials), est.trials)


def estimate_ergodic_rate(params, lambda_t, cfg):
    """Sample mean of log2(1 + lambda_t |h|^2)."""

    def stat(rng, n):
        return np.log2(1.0 + lambda_t * fading.sample_power(params, rng, n))

    return run_statistic(stat, cfg)


def estimate_mean_power(params, cfg):
    """Sample mean of |h|^2."""
    return run_statistic(lambda rng, n: fading.sample_power(params, rng, n), cfg)


def estimate_mean_snr(params, lambda_t, cfg):
    return run_statistic(lambda rng, n: lambda_t * fading.sample_power(params, rng, n), cfg)


def _stream_counts(params, points, master_seed, index, count):
    rng = stream_generator(master_seed, index)
    hits = np.zeros(points.size, dtype=np.int64)
    done = 0
    while done < count:
        n = min(_CHUNK, count - done)
        draws = np.sort(fading.sample_power(params, rng, n))
        hits += np.searchsorted(draws, points, side="right")
        done += n
    return hits


def estimate_cdf(params, points, cfg):
    """Empirical CDF of |h|^2 at each of ``points`` from one shared set of draws."""
    points = np.asarray(points, dtype=float).ravel()
    sizes = partition(cfg.trials, cfg.stream_count)
    with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
        futures = [pool.submit(_stream_counts, params, points, cfg.master_seed, i, n) for i, n in enumerate(sizes)]
        hits = sum(f.result() for f in futures)
    estimates = []
    for h in hits:
        p = int(h) / cfg.trials
        estimates.append(McEstimate(p, math.sqrt(p * (1.0 - p) / cfg.trials), cfg.trials))
    return estimates


def estimate_ber(params, lambda_t, qam_order, cfg, over_fading=True):
    """Simulated Gray-mapped M-QAM bit error rate at mean SNR scale ``lambda_t``.

    With ``over_fading`` False every symbol sees the mean SNR (AWGN).
    """
    rng = stream_generator(cfg.master_seed, 0)
    fading_params = params if over_fading else None
    scale = lambda_t if over_fading else lambda_t * params.mean_power
    ber, se = qam_ber_monte_carlo(rng, scale, qam_order, cfg.trials, fading_params)
    return McEstimate(ber, se, cfg.trials)
