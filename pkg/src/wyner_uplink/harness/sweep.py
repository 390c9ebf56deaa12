"""Parameter sweeps over power, activity, users per cell and interference."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import ChannelProfile
from ..errors import ConfigError, RateError
from ..mc_oracle import SimConfig, estimate_throughput
from ..mcp_rate import mcp_rate_general, sho_apc_rate
from ..power_control import SCHEMES, ActivityModel, distribution_for
from ..scp_rate import scp_rate, scp_rate_mc

__all__ = [
    "SWEEP_PARAMETERS",
    "PROCESSING",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "db_to_linear",
    "per_active_user",
    "evaluate_point",
    "run_sweep",
    "check_orderings",
    "PRESETS",
    "preset",
]

SWEEP_PARAMETERS = ("power_db", "q", "K", "alpha1")
PROCESSING = ("MCP", "SCP")
ORDER_TOL = 1e-9


def db_to_linear(power_db):
    return 10.0 ** (power_db / 10.0)


def per_active_user(rate, K, q):
    """Per-cell rate divided by the mean number of active users ``(1 - q) K``."""
    if q >= 1:
        raise ZeroDivisionError("no active users when q = 1")
    return rate / ((1.0 - q) * K)


@dataclass(frozen=True)
class SweepSpec:
    swept_parameter: str
    grid: tuple
    profile: ChannelProfile = field(default_factory=lambda: ChannelProfile.sho(1.0, 0.5))
    K: int = 5
    q: float = 0.3
    power_db: float = 5.0
    schemes: tuple = SCHEMES
    processing: tuple = PROCESSING
    validate: SimConfig = None
    per_active_user: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.swept_parameter not in SWEEP_PARAMETERS:
            raise ConfigError(
                f"swept_parameter must be one of {SWEEP_PARAMETERS}, got {self.swept_parameter!r}"
            )
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("grid must be strictly increasing")
        if self.swept_parameter == "K":
            if any(v != int(v) or v < 1 for v in grid):
                raise ConfigError("K grid values must be positive integers")
            grid = tuple(int(v) for v in grid)
        if self.swept_parameter == "q" and any(not 0 <= v <= 1 for v in grid):
            raise ConfigError("q grid values must lie in [0, 1]")
        if self.swept_parameter == "alpha1" and self.profile.l2 < 1:
            raise ConfigError("sweeping alpha1 needs a profile with a tap at offset +1")
        object.__setattr__(self, "grid", grid)
        schemes = tuple(s.upper() for s in self.schemes)
        processing = tuple(p.upper() for p in self.processing)
        if not schemes or any(s not in SCHEMES for s in schemes):
            raise ConfigError(f"schemes must be a nonempty subset of {SCHEMES}")
        if not processing or any(p not in PROCESSING for p in processing):
            raise ConfigError(f"processing must be a nonempty subset of {PROCESSING}")
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "processing", processing)
        try:
            ActivityModel(self.K, self.q, db_to_linear(self.power_db))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.validate is not None:
            try:
                self.validate.check(self.profile)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.workers < 1:
            raise ConfigError("workers must be positive")

    def point(self, value):
        """Profile and activity model at one grid value."""
        profile, K, q, power_db = self.profile, self.K, self.q, self.power_db
        if self.swept_parameter == "power_db":
            power_db = value
        elif self.swept_parameter == "q":
            q = value
        elif self.swept_parameter == "K":
            K = int(value)
        else:
            profile = profile.with_tap(1, value)
        return profile, ActivityModel(K, q, db_to_linear(power_db))


@dataclass
class SweepRow:
    sweep_param: str
    sweep_value: float
    scheme: str
    processing: str
    rate_bits: float
    oracle_mean: float = None
    oracle_stderr: float = None
    per_active_user_rate: float = None
    error: str = None


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def curve(self, scheme, processing, column="rate_bits"):
        """``(x, y)`` arrays for one scheme/processing pair in grid order."""
        rows = [r for r in self.rows if r.scheme == scheme and r.processing == processing]
        x = np.array([r.sweep_value for r in rows], dtype=float)
        y = np.array([np.nan if getattr(r, column) is None else getattr(r, column) for r in rows])
        return x, y

    def failed(self):
        return [r for r in self.rows if r.error is not None]


def _mcp(profile, dist, model, scheme):
    if scheme == "APC" and profile.is_sho():
        own = profile.tap(0)
        other = profile.tap(1) if profile.l2 == 1 else profile.tap(-1)
        return sho_apc_rate(own, other, model.K, model.q, model.P)
    return mcp_rate_general(profile, dist, 1.0)


def evaluate_point(spec, value):
    """All rows for one grid value, ordered by scheme then processing."""
    profile, model = spec.point(value)
    cfg = spec.validate
    rows = []
    for scheme in spec.schemes:
        for proc in spec.processing:
            row = SweepRow(spec.swept_parameter, value, scheme, proc, math.nan)
            try:
                dist = distribution_for(scheme, model)
                if proc == "MCP":
                    row.rate_bits = _mcp(profile, dist, model, scheme)
                    if cfg is not None:
                        row.oracle_mean, row.oracle_stderr = estimate_throughput(profile, dist, cfg)
                else:
                    row.rate_bits = scp_rate(profile, dist, seed=cfg.seed if cfg else 0)
                    if cfg is not None:
                        row.oracle_mean, row.oracle_stderr = scp_rate_mc(
                            profile, dist, cfg.M * cfg.trials, cfg.seed
                        )
                if spec.per_active_user:
                    row.per_active_user_rate = per_active_user(row.rate_bits, model.K, model.q)
            except (RateError, ZeroDivisionError) as exc:
                row.error = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


def run_sweep(spec):
    """Evaluate every grid point; rows come back in grid order regardless of ``workers``."""
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(lambda v: evaluate_point(spec, v), spec.grid))
    else:
        chunks = [evaluate_point(spec, v) for v in spec.grid]
    return SweepResult([row for chunk in chunks for row in chunk])


def check_orderings(result, tol=ORDER_TOL):
    """Violations of MCP >= SCP and CPC >= APC >= NPC (MCP), as readable strings."""
    table = {}
    for r in result.rows:
        if r.error is None:
            table[(r.sweep_value, r.scheme, r.processing)] = r.rate_bits
    problems = []
    for value in dict.fromkeys(r.sweep_value for r in result.rows):
        for scheme in SCHEMES:
            mcp = table.get((value, scheme, "MCP"))
            scp = table.get((value, scheme, "SCP"))
            if mcp is not None and scp is not None and mcp < scp - tol:
                problems.append(f"{value}: MCP-{scheme} {mcp:.12g} < SCP-{scheme} {scp:.12g}")
        for low, high in (("NPC", "APC"), ("APC", "CPC")):
            a = table.get((value, low, "MCP"))
            b = table.get((value, high, "MCP"))
            if a is not None and b is not None and b < a - tol:
                problems.append(f"{value}: MCP-{high} {b:.12g} < MCP-{low} {a:.12g}")
    return problems


def _grid(start, stop, count):
    return tuple(float(v) for v in np.round(np.linspace(start, stop, count), 12))


_SHO = ChannelProfile.sho(1.0, 0.5)

PRESETS = {
    # rate vs total cell power
    "fig3": SweepSpec("power_db", _grid(0, 20, 21), _SHO, K=5, q=0.3),
    # per-active-user rate vs non-activity probability
    "fig4": SweepSpec("q", _grid(0, 0.95, 20), _SHO, K=5, power_db=5.0, per_active_user=True),
    # rate vs users per cell
    "fig5": SweepSpec("K", tuple(range(1, 31)), _SHO, q=0.3, power_db=5.0),
    # rate vs inter-cell interference factor
    "fig6": SweepSpec("alpha1", _grid(0, 1, 21), _SHO, K=5, q=0.3, power_db=5.0),
}


def preset(name, **overrides):
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(spec, **overrides) if overrides else spec
