"""
Pipelines behind the CLI subcommands.
"""
from src.orchestration.runner import PipelineRunner, RunOutcome, inner_box, xgrid_levels

__all__ = ["PipelineRunner", "RunOutcome", "inner_box", "xgrid_levels"]
