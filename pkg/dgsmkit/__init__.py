"""
dgsmkit - Sobol' sensitivity indices, derivative-based global sensitivity
measures and the bounds linking them.
"""

__version__ = "0.1.0"

from .config import get_config, DgsmConfig, RunConfig
from .core.model import ModelSpec, DistributionSpec
from .core.qmc import SamplePlan
from .core.bounds import BoundsReport, assemble_report
from .core.engine import DgsmEngine
from .functions import default_registry

__all__ = [
    "get_config",
    "DgsmConfig",
    "RunConfig",
    "ModelSpec",
    "DistributionSpec",
    "SamplePlan",
    "BoundsReport",
    "assemble_report",
    "DgsmEngine",
    "default_registry",
]
