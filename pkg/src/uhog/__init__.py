"""Higher-order grammar engine: typed lambda terms, recursive grammars,
chart parsing with semantic attribution, context programs and partial
translation."""

__version__ = "0.1.0"

from .chart import ParseResult, parse
from .context import ContextState, entails, execute, interpret_sentence, interpret_text
from .dsl import bundled, load_grammar, parse_grammar
from .equivalence import equivalent, simplify
from .grammar import Grammar, emit_axioms, validate
from .robust import express, partial_parse, resolve_placeholders, translate
from .terms import normalize, typecheck

__all__ = ["ParseResult", "parse", "ContextState", "entails", "execute", "interpret_sentence",
           "interpret_text", "bundled", "load_grammar", "parse_grammar", "equivalent",
           "simplify", "Grammar", "emit_axioms", "validate", "express", "partial_parse",
           "resolve_placeholders", "translate", "normalize", "typecheck"]
