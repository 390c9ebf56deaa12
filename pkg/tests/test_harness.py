import io
import math
from dataclasses import replace

import numpy as np
import pytest

from wyner_uplink.channel import ChannelProfile
from wyner_uplink.errors import ConfigError, NoConvergence
from wyner_uplink.harness import io as hio
from wyner_uplink.harness import sweep as hsweep
from wyner_uplink.harness.io import (
    CSV_HEADER,
    emit_csv,
    emit_gnuplot,
    load_config,
    parse_config,
    read_csv,
)
from wyner_uplink.harness.sweep import (
    PRESETS,
    SweepResult,
    SweepSpec,
    check_orderings,
    db_to_linear,
    per_active_user,
    preset,
    run_sweep,
)
from wyner_uplink.mc_oracle import SimConfig, estimate_throughput
from wyner_uplink.mcp_rate import mcp_rate_general, sho_apc_rate
from wyner_uplink.power_control import ActivityModel, distribution_for
from wyner_uplink.scp_rate import scp_rate_exact

HEADER_LINE = "sweep_param,sweep_value,scheme,processing,rate_bits,oracle_mean,oracle_stderr,per_active_user_rate"


def csv_text(result):
    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue()


def test_per_active_user():
    assert per_active_user(1.4, 5, 0.3) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ZeroDivisionError):
        per_active_user(1.0, 5, 1.0)


def test_db_convention():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(5.0) == pytest.approx(math.sqrt(10.0))


def test_header_exact():
    assert ",".join(CSV_HEADER) == HEADER_LINE
    assert csv_text(SweepResult()) == HEADER_LINE + "\n"


def test_fig3_row_count_and_roundtrip(tmp_path):
    result = run_sweep(preset("fig3"))
    assert len(result) == 21 * 3 * 2
    path = tmp_path / "fig3.csv"
    emit_csv(result, path)
    text = path.read_text(encoding="utf-8")
    assert text.count("\n") == 127
    parsed = read_csv(path)
    assert csv_text(parsed) == text
    for a, b in zip(result.rows, parsed.rows):
        assert (a.sweep_param, a.scheme, a.processing) == (b.sweep_param, b.scheme, b.processing)
        assert b.rate_bits == float(format(a.rate_bits, ".12g"))
        assert b.oracle_mean is None and b.per_active_user_rate is None


def test_csv_bytes_reproducible():
    spec = replace(preset("fig6"), grid=(0.0, 0.5), validate=SimConfig(60, 5, 11))
    assert csv_text(run_sweep(spec)) == csv_text(run_sweep(spec))
    assert csv_text(run_sweep(replace(spec, workers=3))) == csv_text(run_sweep(spec))


def test_emit_csv_reports_path(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv(SweepResult(), target)


def test_single_point_matches_direct_calls():
    prof = ChannelProfile.sho(1.0, 0.5)
    cfg = SimConfig(80, 4, 5)
    spec = SweepSpec("power_db", (7.0,), prof, K=4, q=0.2, validate=cfg, per_active_user=True)
    result = run_sweep(spec)
    model = ActivityModel(4, 0.2, db_to_linear(7.0))
    assert [(r.scheme, r.processing) for r in result.rows] == [
        (s, p) for s in ("NPC", "APC", "CPC") for p in ("MCP", "SCP")
    ]
    for row in result.rows:
        dist = distribution_for(row.scheme, model)
        if row.processing == "MCP":
            expected = (sho_apc_rate(1.0, 0.5, 4, 0.2, model.P) if row.scheme == "APC"
                        else mcp_rate_general(prof, dist))
            assert (row.oracle_mean, row.oracle_stderr) == estimate_throughput(prof, dist, cfg)
        else:
            expected = scp_rate_exact(prof, dist)
        assert row.rate_bits == expected
        assert row.per_active_user_rate == per_active_user(expected, 4, 0.2)


def test_oracle_fields_only_with_validation():
    plain = run_sweep(replace(preset("fig5"), grid=(2,)))
    assert all(r.oracle_mean is None and r.oracle_stderr is None for r in plain)
    checked = run_sweep(replace(preset("fig5"), grid=(2,), validate=SimConfig(50, 3, 1)))
    assert all(r.oracle_mean is not None and r.oracle_stderr is not None for r in checked)


def test_failed_rows_are_marked(monkeypatch):
    real = hsweep.mcp_rate_general

    def flaky(profile, dist, gamma=1.0):
        if dist.scheme == "NPC":
            raise NoConvergence("forced")
        return real(profile, dist, gamma)

    monkeypatch.setattr(hsweep, "mcp_rate_general", flaky)
    result = run_sweep(replace(preset("fig3"), grid=(0.0, 10.0)))
    failed = result.failed()
    assert len(failed) == 2
    assert all(r.scheme == "NPC" and r.processing == "MCP" for r in failed)
    assert all("NoConvergence" in r.error for r in failed)
    assert len(result) == 12
    assert ",NPC,MCP,,,," in csv_text(result)


def test_per_active_user_at_q1_marks_row():
    spec = SweepSpec("q", (0.5, 1.0), K=3, per_active_user=True, schemes=("APC",), processing=("MCP",))
    rows = run_sweep(spec).rows
    assert rows[0].error is None
    assert rows[1].error is not None and "ZeroDivisionError" in rows[1].error


def test_check_orderings_flags_violation():
    result = run_sweep(replace(preset("fig3"), grid=(5.0,)))
    assert check_orderings(result) == []
    bad = next(r for r in result.rows if r.scheme == "CPC" and r.processing == "MCP")
    bad.rate_bits = 0.0
    problems = check_orderings(result)
    assert any("MCP-CPC" in p for p in problems)


def test_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec("power_db", ())
    with pytest.raises(ConfigError):
        SweepSpec("power_db", (1.0, 1.0))
    with pytest.raises(ConfigError):
        SweepSpec("temperature", (1.0,))
    with pytest.raises(ConfigError):
        SweepSpec("K", (1.5, 2.0))
    with pytest.raises(ConfigError):
        SweepSpec("alpha1", (0.1,), profile=ChannelProfile.flat())
    with pytest.raises(ConfigError):
        SweepSpec("q", (0.1,), schemes=("XPC",))
    with pytest.raises(ConfigError):
        SweepSpec("q", (0.1,), K=0)
    with pytest.raises(ConfigError):
        preset("fig9")


CONFIG = """
# Fig. 3 style sweep, coarse
swept_parameter = power_db
grid = 0, 10, 20
alpha0 = 1
alpha1 = 0.5
K = 5
q = 0.3
schemes = NPC, CPC
processing = MCP
validate = 60, 4, 3
per_active_user = yes
workers = 2
"""


def test_parse_config():
    spec = parse_config(CONFIG)
    assert spec.swept_parameter == "power_db"
    assert spec.grid == (0.0, 10.0, 20.0)
    assert spec.profile == ChannelProfile.sho(1.0, 0.5)
    assert spec.schemes == ("NPC", "CPC")
    assert spec.processing == ("MCP",)
    assert spec.validate == SimConfig(60, 4, 3)
    assert spec.per_active_user and spec.workers == 2


def test_parse_config_taps_and_linspace(tmp_path):
    path = tmp_path / "wide.cfg"
    path.write_text("swept_parameter = q\ngrid_linspace = 0, 0.5, 6\ntaps = 0.3, 1, 0.2+0.1j\nl1 = 1\n")
    spec = load_config(path)
    assert spec.profile == ChannelProfile(1, 1, (0.3, 1, 0.2 + 0.1j))
    assert np.allclose(spec.grid, [0, 0.1, 0.2, 0.3, 0.4, 0.5])


@pytest.mark.parametrize(
    "text",
    [
        "grid = 1, 2",
        "swept_parameter = q\n",
        "swept_parameter = q\ngrid = 0.1\nbogus = 3",
        "swept_parameter = q\ngrid = 0.1\ngrid = 0.2",
        "swept_parameter = q\ngrid = a, b",
        "swept_parameter = q\ngrid = 0.1\nK = 2.5",
        "swept_parameter = q\ngrid = 0.1\nvalidate = 10",
        "swept_parameter = q\ngrid = 0.1\ntaps = 1, 0.5\nalpha1 = 0.2",
        "swept_parameter = q\ngrid = 0.1\nper_active_user = maybe",
        "swept_parameter = q\ngrid 0.1",
    ],
)
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="nope.cfg"):
        load_config(tmp_path / "nope.cfg")


def test_gnuplot_blocks():
    result = run_sweep(replace(preset("fig6"), grid=(0.0, 0.5, 1.0)))
    buf = io.StringIO()
    emit_gnuplot(result, buf)
    blocks = buf.getvalue().strip().split("\n\n\n")
    assert len(blocks) == 6
    first = blocks[0].splitlines()
    assert first[0] == "# index 0: MCP-NPC"
    assert len(first) == 4
    assert first[1].split()[0] == "0" and first[1].split()[2] == "NaN"


def test_fig4_per_active_user_increasing():
    result = run_sweep(preset("fig4"))
    for scheme in ("NPC", "APC", "CPC"):
        for proc in ("MCP", "SCP"):
            _, y = result.curve(scheme, proc, "per_active_user_rate")
            assert np.all(np.diff(y) >= 0)


def test_fig5_cpc_dominates():
    result = run_sweep(preset("fig5"))
    x, cpc = result.curve("CPC", "MCP")
    assert np.all(np.diff(cpc) >= 0)
    for scheme in ("NPC", "APC", "CPC"):
        for proc in ("MCP", "SCP"):
            if (scheme, proc) == ("CPC", "MCP"):
                continue
            _, other = result.curve(scheme, proc)
            assert np.all(cpc[x >= 2] > other[x >= 2])


def test_presets_are_valid_specs():
    assert set(PRESETS) == {"fig3", "fig4", "fig5", "fig6"}
    assert preset("fig4").per_active_user
    assert len(preset("fig3").grid) == 21
    assert preset("fig5").grid == tuple(range(1, 31))


def test_read_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        read_csv(io.StringIO("a,b,c\n"))


def test_format_number():
    assert hio.format_number(None) == ""
    assert hio.format_number(math.nan) == ""
    assert hio.format_number(1 / 3) == "0.333333333333"
    assert hio.format_number(5) == "5"
