import math

import numpy as np
import pytest

from wyner_uplink.channel import ChannelProfile, log_integral
from wyner_uplink.mc_oracle import (
    SimConfig,
    estimate_throughput,
    gram_band,
    logdet_rate,
    sample_throughput,
    trial_rng,
)
from wyner_uplink.mcp_rate import mcp_rate_general
from wyner_uplink.power_control import ActivityModel, VirtualGainDistribution, distribution_for

from .oracles import P5DB, full_channel, logdet_bits_per_cell, reduced_channel


def random_profile(rng, max_width):
    width = int(rng.integers(1, max_width + 1))
    l1 = int(rng.integers(0, width))
    taps = rng.normal(size=width) + 1j * rng.normal(size=width)
    return ChannelProfile(l1, width - l1 - 1, tuple(taps))


def test_scalar_example():
    prof = ChannelProfile.flat(1.0)
    assert logdet_rate(prof, [2.5]) == pytest.approx(math.log2(3.5), abs=1e-15)
    cfg = SimConfig(1, 1, 0)
    assert sample_throughput(prof, VirtualGainDistribution.deterministic(2.5), cfg, 0) == pytest.approx(
        math.log2(3.5), abs=1e-15
    )


def test_silent_system_is_zero(sho):
    cfg = SimConfig(37, 3, 5)
    assert sample_throughput(sho, VirtualGainDistribution.deterministic(0.0), cfg, 2) == 0.0


def test_szego_limit(sho):
    # deterministic powers: Toeplitz log-det tends to the spectral integral
    cfg = SimConfig(512, 1, 0)
    rate = sample_throughput(sho, VirtualGainDistribution.deterministic(2.0), cfg, 0)
    assert abs(rate - log_integral(sho, 2.0)) < 0.01


def test_band_matches_dense():
    rng = np.random.default_rng(4)
    for _ in range(20):
        prof = random_profile(rng, 4)
        M = int(rng.integers(prof.width, 12))
        d = rng.exponential(size=M)
        H = reduced_channel(prof.taps, prof.l1, M)
        G = np.eye(M) + H @ np.diag(d) @ H.conj().T
        w = prof.l1 + prof.l2
        ab = gram_band(prof, d)
        for k in range(min(w, M - 1) + 1):
            assert np.allclose(ab[w - k, k:], np.diag(G, k), atol=1e-13)
        assert logdet_rate(prof, d) == pytest.approx(logdet_bits_per_cell(G), abs=1e-12)


def test_reduction_identity_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        M = int(rng.integers(1, 9))
        K = int(rng.integers(1, 4))
        prof = random_profile(rng, min(M, 4))
        e = rng.random((M, K)) < 0.6
        p = rng.dirichlet(np.ones(K), size=M) * rng.uniform(0.1, 5.0)
        H = full_channel(prof.taps, prof.l1, M, K)
        EQE = np.diag((e * p).ravel())
        full = logdet_bits_per_cell(np.eye(M) + H @ EQE @ H.conj().T)
        assert logdet_rate(prof, (e * p).sum(axis=1)) == pytest.approx(full, abs=1e-12)


def test_input_output_fading_equivalence():
    rng = np.random.default_rng(77)
    for _ in range(50):
        M = int(rng.integers(1, 9))
        prof = random_profile(rng, min(M, 4))
        d = rng.exponential(size=M) * (rng.random(M) < 0.7)
        H = reduced_channel(prof.taps, prof.l1, M)
        E = np.diag(np.sqrt(d))
        out = logdet_bits_per_cell(np.eye(M) + H @ E @ E.conj().T @ H.conj().T)
        inp = logdet_bits_per_cell(np.eye(M) + E.conj().T @ H.conj().T @ H @ E)
        assert out == pytest.approx(inp, abs=1e-12)


def test_estimate_agrees_with_analytic(sho):
    dist = distribution_for("APC", ActivityModel(5, 0.3, P5DB))
    analytic = mcp_rate_general(sho, dist)
    mean, stderr = estimate_throughput(sho, dist, SimConfig(400, 50, 17))
    assert abs(mean - analytic) <= max(3 * stderr, 0.02 * analytic)


def test_single_trial_reproduces_sample(sho):
    dist = distribution_for("NPC", ActivityModel(5, 0.3, 2.0))
    cfg = SimConfig(64, 1, 99)
    mean, stderr = estimate_throughput(sho, dist, cfg)
    assert mean == sample_throughput(sho, dist, cfg, 0)
    assert math.isnan(stderr)


def test_stderr_scaling(sho):
    # a single ratio of sample deviations has ~12% spread; use the median over seeds
    dist = distribution_for("NPC", ActivityModel(5, 0.3, P5DB))
    ratios = []
    for seed in range(8):
        _, se25 = estimate_throughput(sho, dist, SimConfig(100, 25, seed))
        _, se100 = estimate_throughput(sho, dist, SimConfig(100, 100, seed))
        ratios.append(se25 / se100)
    assert 1.6 <= np.median(ratios) <= 2.6


def test_trials_order_independent(sho):
    dist = distribution_for("CPC", ActivityModel(3, 0.4, 2.0))
    cfg = SimConfig(128, 12, 2**63 + 5)
    serial = estimate_throughput(sho, dist, cfg)
    assert estimate_throughput(sho, dist, cfg, workers=4) == serial
    forward = [sample_throughput(sho, dist, cfg, t) for t in range(12)]
    backward = [sample_throughput(sho, dist, cfg, t) for t in reversed(range(12))]
    assert forward == backward[::-1]
    a = trial_rng(cfg.seed, 3).random(4)
    b = trial_rng(cfg.seed, 4).random(4)
    assert not np.array_equal(a, b)


def test_finite_size_bias_shrinks_deterministic(sho):
    g = 2.0
    limit = log_integral(sho, g)
    gaps = [abs(sample_throughput(sho, VirtualGainDistribution.deterministic(g), SimConfig(M, 1), 0) - limit)
            for M in (50, 200, 800)]
    assert gaps[0] >= gaps[1] >= gaps[2]


def test_finite_size_bias_shrinks_random(sho):
    dist = distribution_for("APC", ActivityModel(5, 0.3, P5DB))
    analytic = mcp_rate_general(sho, dist)
    # equal cell-sample budgets keep the noise floor below the O(1/M) bias
    gaps = []
    for M in (50, 200, 800):
        mean, _ = estimate_throughput(sho, dist, SimConfig(M, 1_280_000 // M, 21))
        gaps.append(abs(mean - analytic))
    assert gaps[0] >= gaps[1] >= gaps[2]


def test_samples_nonnegative_finite():
    rng = np.random.default_rng(8)
    for t in range(30):
        prof = random_profile(rng, 5)
        dist = distribution_for(["NPC", "APC", "CPC"][t % 3], ActivityModel(4, 0.5, 10.0))
        r = sample_throughput(prof, dist, SimConfig(40, 1, t), t)
        assert r >= 0 and math.isfinite(r)


def test_config_validation(sho):
    with pytest.raises(ValueError):
        SimConfig(0, 1)
    with pytest.raises(ValueError):
        SimConfig(10, 0)
    wide = ChannelProfile(1, 1, (0.5, 1, 0.5))
    with pytest.raises(ValueError):
        sample_throughput(wide, VirtualGainDistribution.deterministic(1.0), SimConfig(2, 1), 0)


def test_mirrored_sho_profile():
    d = np.random.default_rng(0).exponential(size=30)
    a = ChannelProfile.sho(1.0, 0.5)
    b = ChannelProfile(1, 0, (0.5, 1.0))
    assert logdet_rate(a, d) == pytest.approx(logdet_rate(b, d[::-1]), abs=1e-12)
