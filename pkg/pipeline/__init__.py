from .orchestrator import DatasetPipeline, PipelineConfig, PipelineError, run_pipeline

__all__ = ["DatasetPipeline", "PipelineConfig", "PipelineError", "run_pipeline"]
