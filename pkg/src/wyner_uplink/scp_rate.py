"""Per-cell throughput with single-cell processing.

Each base station decodes its own cell and treats the other cells as
Gaussian noise, knowing who is active everywhere. The throughput is
``E[log2(1 + SINR)]`` with

    SINR = |alpha_0|^2 g_0 / (1 + sum_{l != 0} |alpha_l|^2 g_l)

and the ``g_l`` i.i.d. draws from the virtual-gain law.
"""

import math

import numpy as np

from .errors import SupportTooLarge

__all__ = ["scp_rate_exact", "scp_rate_mc", "scp_rate", "ENUMERATION_CAP", "MC_FALLBACK_SAMPLES"]

ENUMERATION_CAP = 10 ** 7
MC_FALLBACK_SAMPLES = 10 ** 6


def _split_taps(profile):
    power = np.abs(np.asarray(profile.taps)) ** 2
    own = power[profile.l1]
    interferers = np.delete(power, profile.l1)
    return float(own), interferers


def scp_rate_exact(profile, dist):
    """Exact expectation over the joint activity law of all taps.

    Raises
    ------
    SupportTooLarge
        If the product support exceeds ``ENUMERATION_CAP`` terms.
    """
    n_atoms = len(dist.gains)
    terms = n_atoms ** profile.width
    if terms > ENUMERATION_CAP:
        raise SupportTooLarge(f"{n_atoms}^{profile.width} = {terms} terms exceeds {ENUMERATION_CAP}")
    own, interferers = _split_taps(profile)
    g, p = dist.gain_array, dist.prob_array

    interference = np.zeros(1)
    weight = np.ones(1)
    for w in interferers:
        interference = (interference[:, None] + w * g[None, :]).ravel()
        weight = (weight[:, None] * p[None, :]).ravel()
    denom = 1.0 + interference

    total = 0.0
    for g0, p0 in zip(g, p):
        if g0 == 0.0 or p0 == 0.0:
            continue
        total += p0 * float(weight @ np.log1p(own * g0 / denom))
    return total / math.log(2.0)


def scp_rate_mc(profile, dist, samples, seed=0):
    """Monte Carlo estimate of the SCP rate.

    Returns
    -------
    (float, float)
        Sample mean of ``log2(1 + SINR)`` and its standard error.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    rng = np.random.default_rng(seed)
    own, interferers = _split_taps(profile)
    g, p = dist.gain_array, dist.prob_array
    draws = g[rng.choice(len(g), size=(profile.width, samples), p=p)]
    signal = own * draws[profile.l1]
    interference = interferers @ np.delete(draws, profile.l1, axis=0)
    rates = np.log1p(signal / (1.0 + interference)) / math.log(2.0)
    if np.ptp(rates) == 0.0:
        return float(rates[0]), 0.0
    stderr = float(np.std(rates, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return float(np.mean(rates)), stderr


def scp_rate(profile, dist, seed=0):
    """Exact SCP rate when enumerable, otherwise a ``MC_FALLBACK_SAMPLES`` estimate."""
    try:
        return scp_rate_exact(profile, dist)
    except SupportTooLarge:
        return scp_rate_mc(profile, dist, MC_FALLBACK_SAMPLES, seed)[0]
