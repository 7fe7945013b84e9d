"""Monte Carlo experiment drivers, reports and plots."""

from .plotting import plot_success_curve
from .report import ReportIOError, emit_report, load_result, to_csv, to_json
from .sweeps import (SweepConfig, SweepResult, SweepRow, TrialRecord, default_fractions,
                     parse_fractions, run_certificate_sweep, run_qrup_sweep,
                     run_recovery_sweep, run_sweep, trial_seed)

__all__ = [
    "SweepConfig", "SweepResult", "SweepRow", "TrialRecord", "ReportIOError",
    "default_fractions", "parse_fractions", "trial_seed", "run_sweep",
    "run_recovery_sweep", "run_certificate_sweep", "run_qrup_sweep",
    "emit_report", "load_result", "to_csv", "to_json", "plot_success_curve",
]
