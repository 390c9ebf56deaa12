"""Per-cell throughput with joint multicell processing.

The cellular uplink behaves like an ISI channel with flat fading ``A`` on
its output: with ``S(f)`` the filter PSD and ``gamma`` the SNR scale,

    I = int log2(1 + gamma beta S) df + E log2(1 + gamma nu |A|^2) - log2(1 + gamma beta nu)

where ``(beta, nu) > 0`` solve

    E[1 / (1 + gamma nu |A|^2)] = 1 / (1 + gamma beta nu) = int 1 / (1 + gamma beta S) df.

For on/off fading ``A ~ Bernoulli(1 - q_tilde)`` this collapses to a single
equation in ``beta`` and a binary divergence term, and for two-tap profiles
``beta`` has an explicit expression.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelProfile, log_integral, resolvent_integral
from .errors import DegenerateTaps, NoBracket, NoConvergence

__all__ = [
    "FixedPoint",
    "solve_fixed_point",
    "mcp_rate_general",
    "solve_beta_erasure",
    "mcp_rate_erasure",
    "relative_entropy_bernoulli",
    "sho_apc_beta_closed_form",
    "sho_apc_rate",
]

FIXED_POINT_TOL = 1e-10
ERASURE_TOL = 1e-12
MAX_ITER = 200
_BRACKET_EXPANSIONS = 60


@dataclass(frozen=True)
class FixedPoint:
    beta: float
    nu: float
    residual: float = 0.0


def _moments(dist, gamma, nu):
    """``E[1/(1+c g)]`` and ``E[g/(1+c g)]`` with ``c = gamma nu``."""
    g, p = dist.gain_array, dist.prob_array
    w = 1.0 / (1.0 + gamma * nu * g)
    return float(p @ w), float(p @ (g * w))


def _beta_of_nu(dist, gamma, nu):
    # (1/E0 - 1) / (gamma nu) rewritten as E1 / E0 to avoid cancellation at small nu
    e0, e1 = _moments(dist, gamma, nu)
    return e1 / e0, e0


def solve_fixed_point(profile, dist, gamma=1.0):
    """Solve for ``(beta, nu)`` by bisection on ``log(nu)``.

    For each trial ``nu`` the first equality fixes ``beta(nu)``; the outer
    residual ``E[1/(1+gamma nu |A|^2)] - resolvent_integral(gamma beta(nu))``
    is positive for small ``nu`` and negative for large ``nu``.

    Raises
    ------
    NoBracket
        No sign change found, e.g. all mass sits at zero gain.
    NoConvergence
        Residual still above tolerance after the iteration budget.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    def residual(log_nu):
        nu = math.exp(log_nu)
        beta, e0 = _beta_of_nu(dist, gamma, nu)
        return e0 - resolvent_integral(profile, gamma * beta)

    lo, hi = math.log(1e-12), 0.0
    f_lo, f_hi = residual(lo), residual(hi)
    for _ in range(_BRACKET_EXPANSIONS):
        if f_lo > 0:
            break
        lo -= math.log(10.0)
        f_lo = residual(lo)
    for _ in range(_BRACKET_EXPANSIONS):
        if f_hi < 0:
            break
        hi += math.log(10.0)
        f_hi = residual(hi)
    if not (f_lo > 0 and f_hi < 0):
        raise NoBracket(
            f"no sign change of the fixed-point residual on nu in "
            f"[{math.exp(lo):.3g}, {math.exp(hi):.3g}]"
        )

    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = residual(mid)
        if f_mid == 0:
            lo = hi = mid
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    log_nu = 0.5 * (lo + hi)
    nu = math.exp(log_nu)
    beta, _ = _beta_of_nu(dist, gamma, nu)
    res = abs(residual(log_nu))
    if res > FIXED_POINT_TOL:
        raise NoConvergence(f"fixed-point residual {res:.3e} after {MAX_ITER} bisections")
    return FixedPoint(beta, nu, res)


def mcp_rate_general(profile, dist, gamma=1.0):
    """MCP throughput in bits per channel use per cell.

    Cellular callers use ``gamma = 1`` with the cell power carried by
    ``dist``; on/off laws can equivalently use gains ``{0, 1}`` and
    ``gamma = P``.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0 or dist.is_silent():
        return 0.0
    if dist.is_deterministic():
        return log_integral(profile, gamma * dist.gains[0])
    fp = solve_fixed_point(profile, dist, gamma)
    fading_term = dist.expect(lambda g: np.log1p(gamma * fp.nu * g)) / math.log(2.0)
    return (
        log_integral(profile, gamma * fp.beta)
        + fading_term
        - math.log1p(gamma * fp.beta * fp.nu) / math.log(2.0)
    )


def _check_probability(name, value, open_interval=False):
    lo_ok = value > 0 if open_interval else value >= 0
    hi_ok = value < 1 if open_interval else value <= 1
    if not (lo_ok and hi_ok):
        raise ValueError(f"{name} out of range: {value}")


def solve_beta_erasure(profile, q_tilde, gamma):
    """Root of ``q_tilde / (1 - beta) = resolvent_integral(gamma beta)`` on ``[0, 1 - q_tilde]``.

    The left side increases and the right side decreases in ``beta``, so
    the bisection bracket always holds exactly one root.
    """
    _check_probability("q_tilde", q_tilde, open_interval=True)
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    lo, hi = 0.0, 1.0 - q_tilde
    # bisect down to adjacent floats, well past ERASURE_TOL
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if q_tilde / (1.0 - mid) < resolvent_integral(profile, gamma * mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _divergence_term(x, y):
    """``x log2(x / y)`` with ``0 log 0 = 0``."""
    if x == 0:
        return 0.0
    if y == 0:
        return math.inf
    return x * math.log2(x / y)


def relative_entropy_bernoulli(q_tilde, one_minus_beta):
    """Binary divergence ``d(q_tilde || 1 - beta)`` in bits.

    Equals the relative entropy between ``Bernoulli(1 - q_tilde)`` and
    ``Bernoulli(beta)``; ``inf`` when a positive mass meets a zero one.
    """
    _check_probability("q_tilde", q_tilde)
    _check_probability("one_minus_beta", one_minus_beta)
    return _erasure_divergence(q_tilde, 1.0 - one_minus_beta, one_minus_beta)


def _erasure_divergence(q_tilde, beta, one_minus_beta=None):
    if one_minus_beta is None:
        one_minus_beta = 1.0 - beta
    return _divergence_term(1.0 - q_tilde, beta) + _divergence_term(q_tilde, one_minus_beta)


def mcp_rate_erasure(profile, q_tilde, gamma):
    """MCP throughput for on/off fading that erases each output w.p. ``q_tilde``."""
    _check_probability("q_tilde", q_tilde)
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    if q_tilde == 1 or gamma == 0:
        return 0.0
    if q_tilde == 0:
        return log_integral(profile, gamma)
    beta = solve_beta_erasure(profile, q_tilde, gamma)
    return log_integral(profile, gamma * beta) + _erasure_divergence(q_tilde, beta)


def sho_apc_beta_closed_form(alpha0, alpha1, K, q, P):
    """Explicit ``beta`` for a two-tap profile under adaptive power control.

    Here the cell is silent with probability ``q**K`` and ``gamma = P``.

    Raises
    ------
    DegenerateTaps
        If ``q^{2K} P^2 (|a0|^2 - |a1|^2)^2 - 1`` vanishes; callers should
        fall back to :func:`solve_beta_erasure`.
    """
    _check_probability("q", q, open_interval=True)
    e0, e1 = abs(alpha0) ** 2, abs(alpha1) ** 2
    qk = q ** K
    q2k = qk * qk
    radicand = (
        2 * P * (e0 + e1)
        + P ** 2 * (e0 ** 2 + e1 ** 2)
        - 2 * P ** 2 * e0 * e1 * (1 - 2 * q2k)
        + 1
    )
    numerator = qk * math.sqrt(radicand) - q2k * P * (e0 + e1) - 1
    denominator = q2k * P ** 2 * (e0 - e1) ** 2 - 1
    if abs(denominator) < 1e-14:
        raise DegenerateTaps(
            f"closed-form denominator vanishes (q^K P ||a0|^2-|a1|^2| = 1) at K={K}, q={q}, P={P}"
        )
    return numerator / denominator


def sho_apc_rate(alpha0, alpha1, K, q, P):
    """Closed-form MCP rate of the two-tap model with adaptive power control."""
    _check_probability("q", q)
    if P < 0:
        raise ValueError(f"P must be nonnegative, got {P}")
    profile = ChannelProfile.sho(alpha0, alpha1)
    q_tilde = q ** K
    if q_tilde == 1 or P == 0:
        return 0.0
    if q_tilde == 0:
        return log_integral(profile, P, method="closed")
    try:
        beta = sho_apc_beta_closed_form(alpha0, alpha1, K, q, P)
    except DegenerateTaps:
        beta = solve_beta_erasure(profile, q_tilde, P)
    return log_integral(profile, P * beta, method="closed") + _erasure_divergence(q_tilde, beta)
