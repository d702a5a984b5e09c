"""MiniLang: the small deterministic object language corpus projects are written in."""

from .ast import Module
from .errors import (
    LexError,
    LinkError,
    ManifestError,
    MiniLangError,
    ParseError,
)
from .interpreter import Interpreter, TestOutcome, run_all_tests, run_test
from .lexer import Token, tokenize
from .parser import parse, parse_expression
from .printer import pretty_print
from .project import Project, load_project

__all__ = [
    "Interpreter",
    "LexError",
    "LinkError",
    "ManifestError",
    "MiniLangError",
    "Module",
    "ParseError",
    "Project",
    "TestOutcome",
    "Token",
    "load_project",
    "parse",
    "parse_expression",
    "pretty_print",
    "run_all_tests",
    "run_test",
    "tokenize",
]
