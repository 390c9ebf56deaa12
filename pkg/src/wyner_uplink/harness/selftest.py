"""Quick invariant checks runnable from an installed package (``wyner-uplink selftest``)."""

import itertools

from ..channel import ChannelProfile, log_integral, resolvent_integral
from ..mc_oracle import SimConfig, estimate_throughput
from ..mcp_rate import (
    mcp_rate_erasure,
    mcp_rate_general,
    sho_apc_beta_closed_form,
    solve_beta_erasure,
)
from ..power_control import ActivityModel, VirtualGainDistribution, distribution_for, mean_gain
from .sweep import PRESETS, check_orderings, run_sweep


def _closed_vs_quadrature():
    worst = 0.0
    for a1, x in itertools.product((0.0, 0.3, 1.0, 2.0), (0.1, 1.0, 10.0)):
        prof = ChannelProfile.sho(1.0, a1)
        worst = max(
            worst,
            abs(log_integral(prof, x, "closed") - log_integral(prof, x, "quadrature")),
            abs(resolvent_integral(prof, x, "closed") - resolvent_integral(prof, x, "quadrature")),
        )
    return worst < 1e-10, f"max deviation {worst:.2e}"


def _moments():
    worst = 0.0
    for K, q, P in itertools.product(range(1, 13), (0.0, 0.3, 0.7, 1.0), (0.5, 3.0)):
        model = ActivityModel(K, q, P)
        expected = {
            "NPC": P * (1 - q),
            "APC": P * (1 - q ** K),
            "CPC": P * (1 + K * q - (K + 1) * q ** K),
        }
        for scheme, value in expected.items():
            worst = max(worst, abs(mean_gain(distribution_for(scheme, model)) - value))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _erasure_consistency():
    worst = 0.0
    for qt, P, a1 in itertools.product((0.05, 0.3, 0.8), (0.5, 3.0, 30.0), (0.0, 0.5, 1.0)):
        prof = ChannelProfile.sho(1.0, a1)
        ref = mcp_rate_erasure(prof, qt, P)
        on_off = VirtualGainDistribution.from_atoms([(0.0, qt), (1.0, 1 - qt)])
        scaled = VirtualGainDistribution.from_atoms([(0.0, qt), (P, 1 - qt)])
        worst = max(
            worst,
            abs(ref - mcp_rate_general(prof, on_off, P)),
            abs(ref - mcp_rate_general(prof, scaled, 1.0)),
        )
    return worst < 1e-8, f"max deviation {worst:.2e}"


def _closed_form_beta():
    worst = 0.0
    for K, q, P, a1 in itertools.product((1, 3), (0.2, 0.6), (1.0, 10.0), (0.5, 1.0)):
        prof = ChannelProfile.sho(1.0, a1)
        worst = max(
            worst,
            abs(sho_apc_beta_closed_form(1.0, a1, K, q, P) - solve_beta_erasure(prof, q ** K, P)),
        )
    return worst < 1e-9, f"max deviation {worst:.2e}"


def _oracle_agreement():
    prof = ChannelProfile.sho(1.0, 0.5)
    dist = distribution_for("NPC", ActivityModel(5, 0.3, 10 ** 0.5))
    analytic = mcp_rate_general(prof, dist)
    mean, stderr = estimate_throughput(prof, dist, SimConfig(400, 20, 7))
    gap = abs(mean - analytic)
    return gap <= max(3 * stderr, 0.02 * analytic), f"gap {gap:.4f}, stderr {stderr:.4f}"


def _orderings():
    problems = []
    for name, spec in PRESETS.items():
        problems += [f"{name} {p}" for p in check_orderings(run_sweep(spec))]
    return not problems, problems[0] if problems else "all preset rows ordered"


CHECKS = {
    "SHO closed forms vs quadrature": _closed_vs_quadrature,
    "power-control moment identities": _moments,
    "erasure vs general rate": _erasure_consistency,
    "explicit beta vs bisection": _closed_form_beta,
    "analytic vs Monte Carlo": _oracle_agreement,
    "MCP/SCP and scheme orderings": _orderings,
}


def run_selftest(out):
    """Run every check, print one line each, return the number of failures."""
    failures = 0
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=out)
    return failures
