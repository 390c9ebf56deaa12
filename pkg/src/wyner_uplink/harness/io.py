"""CSV output, gnuplot data blocks and the sweep config file format.

Config files are flat ``key = value`` text; ``#`` starts a comment and list
values are comma separated::

    swept_parameter = power_db
    grid = 0, 5, 10, 15, 20
    alpha0 = 1
    alpha1 = 0.5
    K = 5
    q = 0.3
    power_db = 5
    schemes = NPC, APC, CPC
    processing = MCP, SCP
    validate = 400, 50, 1
    per_active_user = false
    workers = 1

``taps`` (with optional ``l1``) replaces ``alpha0``/``alpha1`` for wider
profiles, and ``grid_linspace = start, stop, count`` replaces ``grid``.
"""

import csv
import io
import math
import os

import numpy as np

from ..channel import ChannelProfile
from ..errors import ConfigError
from ..mc_oracle import SimConfig
from .sweep import SweepResult, SweepRow, SweepSpec

__all__ = [
    "CSV_HEADER",
    "format_number",
    "emit_csv",
    "read_csv",
    "emit_gnuplot",
    "parse_config",
    "load_config",
    "parse_validate",
]

CSV_HEADER = (
    "sweep_param",
    "sweep_value",
    "scheme",
    "processing",
    "rate_bits",
    "oracle_mean",
    "oracle_stderr",
    "per_active_user_rate",
)

_NUMERIC = CSV_HEADER[4:]


def format_number(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(value, ".12g")


def _row_fields(row):
    return [
        row.sweep_param,
        format_number(row.sweep_value),
        row.scheme,
        row.processing,
    ] + [format_number(getattr(row, name)) for name in _NUMERIC]


def _write(result, handle):
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in result.rows:
        writer.writerow(_row_fields(row))


def emit_csv(result, destination):
    """Write ``result`` to a path or an open text handle."""
    if hasattr(destination, "write"):
        _write(result, destination)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            _write(result, handle)
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {os.fspath(destination)}: {exc.strerror}") from exc


def _parse_number(text):
    return float(text) if text != "" else None


def read_csv(source):
    """Inverse of :func:`emit_csv` (error annotations are not stored)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8", newline="") as handle:
            text = handle.read()
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for fields in reader:
        param, value, scheme, proc, *numbers = fields
        rate, mean, stderr, pau = (_parse_number(x) for x in numbers)
        rows.append(
            SweepRow(param, float(value), scheme, proc, math.nan if rate is None else rate,
                     mean, stderr, pau)
        )
    return SweepResult(rows)


def emit_gnuplot(result, destination):
    """One data block per scheme/processing curve, separated by two blank lines.

    Columns: swept value, rate, oracle mean, oracle stderr, per-active-user
    rate (``NaN`` where absent). Select blocks with gnuplot's ``index``.
    """
    curves = list(dict.fromkeys((r.scheme, r.processing) for r in result.rows))
    lines = []
    for i, (scheme, proc) in enumerate(curves):
        if i:
            lines += ["", ""]
        lines.append(f"# index {i}: {proc}-{scheme}")
        for r in result.rows:
            if (r.scheme, r.processing) != (scheme, proc):
                continue
            cols = [r.sweep_value] + [getattr(r, name) for name in _NUMERIC]
            lines.append(" ".join(format_number(c) or "NaN" for c in cols))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as handle:
            handle.write(text)


def _split_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _floats(key, text):
    try:
        return [float(v) for v in _split_list(text)]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None


def _bool(key, text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def parse_validate(text):
    """``"M,trials,seed"`` (seed optional) to a :class:`SimConfig`."""
    parts = _split_list(text)
    if len(parts) not in (2, 3):
        raise ConfigError(f"validate expects M,trials[,seed], got {text!r}")
    try:
        numbers = [int(p) for p in parts]
        return SimConfig(*numbers)
    except ValueError as exc:
        raise ConfigError(f"validate: {exc}") from None


_KEYS = {
    "swept_parameter", "grid", "grid_linspace", "alpha0", "alpha1", "taps", "l1",
    "K", "q", "power_db", "schemes", "processing", "validate", "per_active_user", "workers",
}


def parse_config(text):
    """Build a :class:`SweepSpec` from config-file text."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value

    if "swept_parameter" not in entries:
        raise ConfigError("missing required key 'swept_parameter'")
    if ("grid" in entries) == ("grid_linspace" in entries):
        raise ConfigError("give exactly one of 'grid' or 'grid_linspace'")
    if "grid" in entries:
        grid = _floats("grid", entries["grid"])
    else:
        bounds = _floats("grid_linspace", entries["grid_linspace"])
        if len(bounds) != 3 or bounds[2] != int(bounds[2]) or bounds[2] < 1:
            raise ConfigError("grid_linspace expects start, stop, count")
        grid = list(np.round(np.linspace(bounds[0], bounds[1], int(bounds[2])), 12))

    try:
        if "taps" in entries:
            if "alpha0" in entries or "alpha1" in entries:
                raise ConfigError("use either 'taps' or 'alpha0'/'alpha1', not both")
            taps = [complex(t.replace(" ", "")) for t in _split_list(entries["taps"])]
            l1 = int(entries.get("l1", 0))
            profile = ChannelProfile(l1, len(taps) - l1 - 1, tuple(taps))
        else:
            profile = ChannelProfile.sho(
                complex(entries.get("alpha0", "1")), complex(entries.get("alpha1", "0.5"))
            )
        kwargs = dict(
            swept_parameter=entries["swept_parameter"],
            grid=tuple(grid),
            profile=profile,
            K=int(entries.get("K", 5)),
            q=float(entries.get("q", 0.3)),
            power_db=float(entries.get("power_db", 5.0)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "schemes" in entries:
        kwargs["schemes"] = tuple(_split_list(entries["schemes"]))
    if "processing" in entries:
        kwargs["processing"] = tuple(_split_list(entries["processing"]))
    if "validate" in entries:
        kwargs["validate"] = parse_validate(entries["validate"])
    if "per_active_user" in entries:
        kwargs["per_active_user"] = _bool("per_active_user", entries["per_active_user"])
    if "workers" in entries:
        try:
            kwargs["workers"] = int(entries["workers"])
        except ValueError:
            raise ConfigError(f"workers: expected an integer, got {entries['workers']!r}") from None
    return SweepSpec(**kwargs)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_config(handle.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {os.fspath(path)}: {exc.strerror}") from exc
