"""
Sweep harness and figure-data generation.
"""

from .figures import analytic_table, fig2_tables, fig4_table, figure3_bundle
from .runner import evaluate_point, run_sweep, sensitivity_shells, sweep_frame

__all__ = [
    "analytic_table",
    "evaluate_point",
    "fig2_tables",
    "fig4_table",
    "figure3_bundle",
    "run_sweep",
    "sensitivity_shells",
    "sweep_frame",
]
