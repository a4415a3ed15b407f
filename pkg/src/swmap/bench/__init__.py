"""Benchmarks and the command-line harness."""

from .scaling import SCALING_HWC, bench_scaling, scaling_rows
from .table import bench_table, table_row
from .trace import bench_trace, solve_trace_csv, trace_rows
from .tune import TuneResult, bench_tune, compare
