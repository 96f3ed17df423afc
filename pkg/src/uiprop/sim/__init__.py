"""Simulated device backend: app models, the device state and bundled fixtures."""

from .device import CAPABILITY, DeviceState, UnknownPredicate
from .expr import ExprError, compile_expr
from .model import (
    AmbiguityError, AppModel, RefError, SchemaError, fixture_document,
    fixture_names, load_fixture, load_model,
)

__all__ = [
    "DeviceState", "UnknownPredicate", "CAPABILITY", "ExprError", "compile_expr",
    "AppModel", "SchemaError", "RefError", "AmbiguityError",
    "load_model", "load_fixture", "fixture_document", "fixture_names",
]
