"""Hilbert-style proof scripts, calculi and the checker."""

from .calculi import CalculusSpec, builtin_calculi, calculus_from_json, calculus_to_json, get_calculus
from .checker import CheckResult, check_script, is_tautology, rename_script
from .fixtures import Fixture, fixture_corpus, get_fixture
from .script import ProofLine, ProofScript, ScriptSyntaxError, format_script, parse_script

__all__ = [
    "CalculusSpec", "CheckResult", "Fixture", "ProofLine", "ProofScript", "ScriptSyntaxError",
    "builtin_calculi", "calculus_from_json", "calculus_to_json", "check_script", "fixture_corpus",
    "format_script", "get_calculus", "get_fixture", "is_tautology", "parse_script", "rename_script",
]
