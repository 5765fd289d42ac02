"""
Benchmark functions with analytic gradients and closed-form references.
"""

from dgsmkit.functions.base import AnalyticReference, TestFunction
from dgsmkit.functions.g_function import make_g_function
from dgsmkit.functions.hartmann import make_hartmann6
from dgsmkit.functions.linear import make_linear, make_linear_normal
from dgsmkit.functions.registry import (
    FunctionRegistry,
    RegistryError,
    UnknownFunctionError,
    default_registry,
)
from dgsmkit.functions.smooth_product import make_smooth_product
from dgsmkit.functions.tables import compare_with_reference

__all__ = [
    "AnalyticReference",
    "FunctionRegistry",
    "RegistryError",
    "TestFunction",
    "UnknownFunctionError",
    "compare_with_reference",
    "default_registry",
    "make_g_function",
    "make_hartmann6",
    "make_linear",
    "make_linear_normal",
    "make_smooth_product",
]
