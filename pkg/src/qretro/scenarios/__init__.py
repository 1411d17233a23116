from .base import (
    DEFAULT_SEED,
    Check,
    Param,
    ScenarioError,
    ScenarioReport,
    ScenarioSpec,
    get_scenario,
    registry,
    run_scenario,
)

# importing the modules registers the scenarios
from . import cat, etp_timing, heisenberg_past, s_wave, two_slit  # noqa: F401, E402

__all__ = ["DEFAULT_SEED", "Check", "Param", "ScenarioError",
           "ScenarioReport", "ScenarioSpec", "get_scenario", "registry",
           "run_scenario"]
