"""Virtual fading laws induced by user activity and power control.

With ``K`` users per cell, each active with probability ``1 - q``, the
throughput only depends on the per-cell virtual power
``sum_k e_k p_k`` (the squared virtual gain). Every scheme below maps
``(K, q, P)`` to a finite discrete law of that quantity.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

__all__ = [
    "ActivityModel",
    "VirtualGainDistribution",
    "binomial_pmf",
    "npc_distribution",
    "apc_distribution",
    "cpc_distribution",
    "distribution_for",
    "mean_gain",
    "SCHEMES",
]

SCHEMES = ("NPC", "APC", "CPC")
PRUNE_MASS = 1e-15
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ActivityModel:
    """Users per cell ``K``, non-activity probability ``q`` and cell power ``P`` (linear)."""

    K: int
    q: float
    P: float

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if not (self.P >= 0.0 and np.isfinite(self.P)):
            raise ValueError(f"P must be finite and nonnegative, got {self.P}")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "P", float(self.P))


@dataclass(frozen=True)
class VirtualGainDistribution:
    """Finite law of the squared virtual gain.

    ``gains`` and ``probs`` are parallel tuples sorted by gain. Use
    :meth:`from_atoms` to build one from arbitrary ``(gain, prob)`` pairs;
    it merges repeated gains, drops negligible masses and renormalizes.
    """

    gains: tuple
    probs: tuple
    scheme: str = "CUSTOM"

    def __post_init__(self):
        if len(self.gains) != len(self.probs) or not self.gains:
            raise ValueError("gains and probs must be nonempty and of equal length")
        g = np.asarray(self.gains, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("gains must be finite and nonnegative")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        if len(np.unique(g)) != len(g):
            raise ValueError("gains must be distinct")
        if self.scheme not in SCHEMES + ("CUSTOM",):
            raise ValueError(f"unknown scheme tag {self.scheme!r}")

    @classmethod
    def from_atoms(cls, atoms, scheme="CUSTOM"):
        merged = {}
        for gain, prob in atoms:
            gain, prob = float(gain), float(prob)
            merged[gain] = merged.get(gain, 0.0) + prob
        kept = sorted((g, p) for g, p in merged.items() if p >= PRUNE_MASS)
        if not kept:
            raise ValueError("distribution has no atom with nonnegligible mass")
        total = sum(p for _, p in kept)
        return cls(
            tuple(g for g, _ in kept),
            tuple(p / total for _, p in kept),
            scheme,
        )

    @classmethod
    def deterministic(cls, gain):
        return cls((float(gain),), (1.0,))

    @property
    def atoms(self):
        return list(zip(self.gains, self.probs))

    @property
    def gain_array(self):
        return np.asarray(self.gains, dtype=float)

    @property
    def prob_array(self):
        return np.asarray(self.probs, dtype=float)

    def is_deterministic(self):
        return len(self.gains) == 1

    def is_silent(self):
        """True when every atom with positive mass has zero gain."""
        return all(g == 0.0 for g in self.gains)

    def mass_at_zero(self):
        return sum(p for g, p in zip(self.gains, self.probs) if g == 0.0)

    def variance(self):
        g, p = self.gain_array, self.prob_array
        m = p @ g
        return float(p @ (g - m) ** 2)

    def expect(self, fn):
        """``E[fn(G)]`` for a vectorized ``fn``."""
        return float(self.prob_array @ fn(self.gain_array))


def binomial_pmf(K, success):
    """``P(L = 0..K)`` for ``L ~ Binomial(K, success)``, evaluated in the log domain."""
    L = np.arange(K + 1)
    log_pmf = (
        gammaln(K + 1)
        - gammaln(L + 1)
        - gammaln(K - L + 1)
        + xlogy(L, success)
        + xlog1py(K - L, -success)
    )
    return np.exp(log_pmf)


def npc_distribution(model):
    """No power control: every active user sends ``P/K``; gain ``L P / K``."""
    pmf = binomial_pmf(model.K, 1.0 - model.q)
    L = np.arange(model.K + 1)
    dist = VirtualGainDistribution.from_atoms(zip(L * model.P / model.K, pmf), "NPC")
    _check_power(dist, model)
    return dist


def apc_distribution(model):
    """Adaptive power control: active users share ``P``; gain is ``P`` unless the cell is silent."""
    silent = model.q ** model.K
    dist = VirtualGainDistribution.from_atoms([(0.0, silent), (model.P, 1.0 - silent)], "APC")
    _check_power(dist, model)
    return dist


def cpc_distribution(model):
    """Cognitive power control.

    Silent users relay the active users' messages coherently, so ``L > 0``
    active users yield virtual power ``(K - L + 1) P``; ``L = 0`` yields 0.
    The mean deliberately exceeds ``P``.
    """
    K, P = model.K, model.P
    pmf = binomial_pmf(K, 1.0 - model.q)
    L = np.arange(K + 1)
    power = np.where(L > 0, (K - L + 1) * P, 0.0)
    return VirtualGainDistribution.from_atoms(zip(power, pmf), "CPC")


def _check_power(dist, model):
    # a violation here means a constructor bug, not bad input
    if mean_gain(dist) > model.P * (1.0 + 1e-12):
        raise AssertionError(f"{dist.scheme} law breaks the cell power constraint")


_CONSTRUCTORS = {"NPC": npc_distribution, "APC": apc_distribution, "CPC": cpc_distribution}


def distribution_for(scheme, model):
    """Dispatch on a scheme name (case-insensitive)."""
    try:
        return _CONSTRUCTORS[scheme.upper()](model)
    except KeyError:
        raise ValueError(f"unknown power-control scheme {scheme!r}") from None


def mean_gain(dist):
    return float(dist.prob_array @ dist.gain_array)
