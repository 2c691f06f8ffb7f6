"""
Analysis configuration - resource caps and worker counts
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class AnalysisConfig:
    """Limits shared by the explorer, the chain solver and the sampler"""
    frontier_cap: int = 1_000_000     # live states per explorer depth
    state_cap: int = 4096             # distinct chain states before giving up
    step_cap: int = 10_000            # steps per sampled run
    jobs: int = 1                     # worker threads
    parallel_threshold: int = 512     # smallest frontier worth fanning out

    def __post_init__(self):
        for name in ("frontier_cap", "state_cap", "step_cap", "jobs", "parallel_threshold"):
            value = getattr(self, name)
            if value < 1:
                raise ValueError(f"{name} must be at least 1, got {value}")

    def with_overrides(self, **overrides) -> "AnalysisConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_CONFIG = AnalysisConfig()
