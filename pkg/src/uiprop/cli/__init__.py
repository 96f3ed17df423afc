"""Script parsing and the ``uiprop`` command."""

from .main import main
from .parser import (
    Check, ParseDiagnostic, Script, gen_to_trace, parse_gen, parse_prop, parse_script,
    parse_trace,
)

__all__ = ["main", "ParseDiagnostic", "Script", "Check", "parse_script", "parse_gen",
           "parse_trace", "parse_prop", "gen_to_trace"]
