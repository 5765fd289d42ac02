"""
Core estimators: models, QMC plans, variance indices, DGSM and bounds.
"""

from .model import DistributionKind, DistributionSpec, ModelSpec, evaluate, gradient
from .qmc import SamplePlan, replicate_plans, sobol_points
from .variance import IndexEstimate, VarianceEstimate, estimate_indices, estimate_variance, oracle_indices
from .dgsm import DgsmSet, estimate_dgsm, oracle_dgsm
from .bounds import BoundsReport, ReportOptions, assemble_report

__all__ = [
    "DistributionKind",
    "DistributionSpec",
    "ModelSpec",
    "evaluate",
    "gradient",
    "SamplePlan",
    "replicate_plans",
    "sobol_points",
    "IndexEstimate",
    "VarianceEstimate",
    "estimate_indices",
    "estimate_variance",
    "oracle_indices",
    "DgsmSet",
    "estimate_dgsm",
    "oracle_dgsm",
    "BoundsReport",
    "ReportOptions",
    "assemble_report",
]
