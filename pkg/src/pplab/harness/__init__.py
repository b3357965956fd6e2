"""Experiment configs, sweeps, CSV/SVG output, verification suites and the CLI."""
from .config import ExperimentConfig, SellerEntry, load_config
from .output import CSV_HEADER, emit_csv, emit_plot, read_csv
from .sweep import SweepRow, run_sweep

__all__ = ["CSV_HEADER", "ExperimentConfig", "SellerEntry", "SweepRow", "emit_csv",
           "emit_plot", "load_config", "read_csv", "run_sweep"]
