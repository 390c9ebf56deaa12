"""Sweeps, figure presets, CSV/config I/O and the command line."""

from .io import emit_csv, emit_gnuplot, load_config, parse_config, read_csv
from .sweep import (
    PRESETS,
    SweepResult,
    SweepRow,
    SweepSpec,
    check_orderings,
    db_to_linear,
    per_active_user,
    preset,
    run_sweep,
)
