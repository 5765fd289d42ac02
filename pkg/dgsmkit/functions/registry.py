"""
Name -> test-function factory registry used by the engine and the CLI.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from dgsmkit.core.model import ModelError
from dgsmkit.functions.base import TestFunction
from dgsmkit.functions.g_function import make_g_function
from dgsmkit.functions.hartmann import make_hartmann6
from dgsmkit.functions.linear import make_linear, make_linear_normal
from dgsmkit.functions.smooth_product import make_smooth_product

logger = logging.getLogger(__name__)

G_FUNCTION_8_A = [0.0, 1.0, 4.5, 9.0, 99.0, 99.0, 99.0, 99.0]


class RegistryError(Exception):
    """Raised when a function cannot be registered or built."""
    pass


class UnknownFunctionError(RegistryError):
    """Raised when a name is not in the registry."""
    pass


@dataclass
class FunctionEntry:
    """A registered factory and what the CLI shows about it."""
    name: str
    factory: Callable[..., TestFunction]
    description: str = ""
    params: dict[str, str] = field(default_factory=dict)  # parameter -> description
    defaults: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        sample = self.factory(**self.defaults)
        return {
            "name": self.name,
            "description": self.description,
            "dimension": sample.dimension,
            "params": dict(self.params),
            "defaults": dict(self.defaults),
            "analytic_reference": sample.has_reference,
        }


class FunctionRegistry:
    """
    Registry of test functions addressable by name.
    Example: registry.create("g-function", {"a": [0, 1]})
    """

    def __init__(self):
        self._entries: dict[str, FunctionEntry] = {}

    def register(
        self,
        name: str,
        factory: Callable[..., TestFunction],
        description: str = "",
        params: dict[str, str] | None = None,
        defaults: dict[str, Any] | None = None,
        replace: bool = False,
    ) -> None:
        if not name:
            raise RegistryError("function name must not be empty")
        if name in self._entries and not replace:
            raise RegistryError(f"function '{name}' is already registered")
        self._entries[name] = FunctionEntry(name, factory, description, dict(params or {}), dict(defaults or {}))
        logger.debug("Registered test function %s", name)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def names(self) -> list[str]:
        return list(self._entries)

    def get(self, name: str) -> FunctionEntry:
        if name not in self._entries:
            known = ", ".join(self._entries) or "none"
            raise UnknownFunctionError(f"unknown function '{name}' (registered: {known})")
        return self._entries[name]

    def create(self, name: str, params: dict[str, Any] | None = None) -> TestFunction:
        """Build a function; params override the entry's defaults."""
        entry = self.get(name)
        unknown = set(params or {}) - set(entry.params)
        if unknown:
            raise RegistryError(f"unknown parameter(s) for '{name}': {', '.join(sorted(unknown))}")
        merged = {**entry.defaults, **(params or {})}
        try:
            return entry.factory(**merged)
        except (TypeError, ValueError, ModelError) as e:
            raise RegistryError(f"cannot build '{name}' from {merged}: {e}") from e

    def describe(self) -> list[dict[str, Any]]:
        return [entry.to_dict() for entry in self._entries.values()]


def default_registry() -> FunctionRegistry:
    """Registry with every bundled benchmark."""
    registry = FunctionRegistry()
    registry.register(
        "g-function",
        lambda a: make_g_function(a),
        "Sobol' g-function prod (|4x_i-2| + a_i)/(1 + a_i)",
        {"a": "list of a_i >= 0, one per input"},
        {"a": G_FUNCTION_8_A},
    )
    registry.register(
        "linear",
        lambda a, b=None: make_linear(a, b),
        "a(z) x_1 + b(z) with affine a, b",
        {"a": "coefficients [a_0, a_1..a_(d-1)] of a(z)", "b": "coefficients [b_0, b_1..b_(d-1)] of b(z)"},
        {"a": [1.0], "b": [0.0]},
    )
    registry.register(
        "linear-normal",
        lambda a, means=None, sigmas=None: make_linear_normal(a, means, sigmas),
        "sum a_j x_j with Normal inputs",
        {"a": "coefficients", "means": "input means", "sigmas": "input standard deviations"},
        {"a": [1.0, 2.0], "sigmas": [1.0, 0.5]},
    )
    registry.register(
        "smooth-product",
        lambda c: make_smooth_product(c),
        "prod (1 + c_i (6x_i^2 - 6x_i + 1))",
        {"c": "list of coefficients c_i, one per input"},
        {"c": [1.0, 0.5, 0.25]},
    )
    registry.register(
        "hartmann6",
        lambda: make_hartmann6(),
        "6-d Hartmann function (standard constants)",
    )
    return registry
