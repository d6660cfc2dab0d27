"""Experiment orchestration: evaluation runs, comparisons, upscaling, timing."""

from .config import RunConfig, TimingSource, TrainingProvenance, load_config
from .evaluate import EvalReport, ImageEval, run_evaluation
from .compare import ComparisonReport, MetricPair, compare_runs
from .bench import BenchResult, TimingStats, bench_command
from .upscale import UpscaleResult, upscale_dir
from .report import emit_comparison, emit_report, parse_report
from .plots import PRPlot, emit_pr_plot, comparison_figure

__all__ = [
    "BenchResult",
    "ComparisonReport",
    "EvalReport",
    "ImageEval",
    "MetricPair",
    "PRPlot",
    "RunConfig",
    "TimingSource",
    "TimingStats",
    "TrainingProvenance",
    "UpscaleResult",
    "bench_command",
    "compare_runs",
    "comparison_figure",
    "emit_comparison",
    "emit_pr_plot",
    "emit_report",
    "load_config",
    "parse_report",
    "run_evaluation",
    "upscale_dir",
]
