"""Uplink throughput of a linear cellular array with randomly active users.

Analytic multicell-processing rates (ISI channel with flat fading), the
single-cell-processing baseline, and a finite-size Monte Carlo log-det
oracle, under no, adaptive and cognitive power control.
"""

from .channel import ChannelProfile, log_integral, psd, resolvent_integral
from .errors import (
    ConfigError,
    DegenerateTaps,
    NoBracket,
    NoConvergence,
    NumericalFailure,
    RateError,
    SupportTooLarge,
)
from .mc_oracle import SimConfig, estimate_throughput, sample_throughput
from .mcp_rate import (
    FixedPoint,
    mcp_rate_erasure,
    mcp_rate_general,
    relative_entropy_bernoulli,
    sho_apc_beta_closed_form,
    sho_apc_rate,
    solve_beta_erasure,
    solve_fixed_point,
)
from .power_control import (
    ActivityModel,
    VirtualGainDistribution,
    apc_distribution,
    cpc_distribution,
    distribution_for,
    mean_gain,
    npc_distribution,
)
from .scp_rate import scp_rate, scp_rate_exact, scp_rate_mc

__version__ = "0.1.0"
