from .schemas import PipelineConfig, load_config, parse_config, with_overrides
