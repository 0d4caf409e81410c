"""CLI command modules"""

from .bounds import bounds_command
from .common import RunConfig, build_run_config
from .intactness import intactness_command
from .simulate import simulate_command
from .verify import verify_command

__all__ = [
    "RunConfig",
    "build_run_config",
    "bounds_command",
    "simulate_command",
    "verify_command",
    "intactness_command",
]
