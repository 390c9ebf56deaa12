"""Finite-size Monte Carlo estimate of the MCP throughput.

A trial draws i.i.d. virtual powers ``d_m`` for ``M`` cells and evaluates

    (1/M) log2 det(I + H D H^H),    [H]_{i,j} = alpha_{j-i},  D = diag(d)

with ``H`` truncated at the array ends (no wraparound). ``G = I + H D H^H``
is Hermitian positive definite with half-bandwidth ``l1 + l2``, so the
determinant comes from a banded Cholesky factor in ``O(M (l1 + l2)^2)``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cholesky_banded

from .errors import NumericalFailure

__all__ = [
    "SimConfig",
    "trial_rng",
    "gram_band",
    "logdet_rate",
    "sample_throughput",
    "estimate_throughput",
]

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """Number of cells ``M``, number of trials and a 64-bit base seed."""

    M: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed) & _SEED_MASK)

    def check(self, profile):
        if self.M < profile.width:
            raise ValueError(f"M={self.M} is narrower than the {profile.width}-tap profile")


def trial_rng(seed, trial_index):
    """Independent generator for one trial; depends only on ``(seed, trial_index)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & _SEED_MASK, int(trial_index)]))


def gram_band(profile, d):
    """Upper band storage of ``I + H diag(d) H^H`` as expected by ``cholesky_banded``.

    Row ``w - k`` holds the ``k``-th superdiagonal, right-aligned, where
    ``w = l1 + l2``.
    """
    d = np.asarray(d, dtype=float)
    M = d.size
    w = profile.l1 + profile.l2
    taps = np.asarray(profile.taps)
    # out-of-range cells contribute nothing
    dpad = np.concatenate([np.zeros(profile.l1), d, np.zeros(profile.l2)])
    ab = np.zeros((w + 1, M), dtype=complex)
    for k in range(min(w, M - 1) + 1):
        rows = np.arange(M - k)
        acc = np.zeros(M - k, dtype=complex)
        for l in range(-profile.l1, profile.l2 + 1):
            if not -profile.l1 <= l - k <= profile.l2:
                continue
            coef = taps[l + profile.l1] * np.conj(taps[l - k + profile.l1])
            acc += coef * dpad[rows + l + profile.l1]
        ab[w - k, k:] = acc
    ab[w] += 1.0
    return ab


def logdet_rate(profile, d):
    """``(1/M) log2 det(I + H diag(d) H^H)`` for one realization ``d``."""
    d = np.asarray(d, dtype=float)
    ab = gram_band(profile, d)
    try:
        factor = cholesky_banded(ab, lower=False, check_finite=False)
    except LinAlgError as exc:
        raise NumericalFailure(f"banded Cholesky failed for M={d.size}: {exc}") from exc
    diag = factor[-1].real
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise NumericalFailure("nonpositive pivot in banded Cholesky")
    return 2.0 * float(np.sum(np.log2(diag))) / d.size


def draw_powers(dist, M, rng):
    idx = rng.choice(len(dist.gains), size=M, p=dist.prob_array)
    return dist.gain_array[idx]


def sample_throughput(profile, dist, cfg, trial_index):
    cfg.check(profile)
    d = draw_powers(dist, cfg.M, trial_rng(cfg.seed, trial_index))
    return logdet_rate(profile, d)


def estimate_throughput(profile, dist, cfg, workers=None):
    """Mean and standard error of ``cfg.trials`` independent trials.

    Trials are reduced in index order, so the result does not depend on
    ``workers``. The standard error is ``nan`` for a single trial.
    """
    cfg.check(profile)
    indices = range(cfg.trials)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rates = list(pool.map(lambda t: sample_throughput(profile, dist, cfg, t), indices))
    else:
        rates = [sample_throughput(profile, dist, cfg, t) for t in indices]
    rates = np.asarray(rates)
    if cfg.trials == 1:
        return float(rates[0]), math.nan
    return float(rates.mean()), float(rates.std(ddof=1) / math.sqrt(cfg.trials))
