"""A kernel for a cubical language with strict observational equality.

The pieces, bottom to top:

* :mod:`xtt.syntax` — core terms, cubes, and the substitution calculus
* :mod:`xtt.dims` — decision procedure for dimension equality
* :mod:`xtt.semantics` — normalization by evaluation with Kan operations
* :mod:`xtt.conversion` — typed definitional equality (unicity, splitting)
* :mod:`xtt.typecheck` — bidirectional elaboration of surface syntax
* :mod:`xtt.surface` — lexer, parser, resolver, pretty-printer
* :mod:`xtt.naive` — independent substitution-based evaluator (oracle)
* :mod:`xtt.testkit` — generators, closure oracle, canonicity runner
* :mod:`xtt.cli` — the ``xtt`` command
"""

from .conversion import ConvConfig, conv_tm, conv_ty
from .diagnostics import Diagnostic, Span, XttError
from .dims import DimClasses, build_classes, consistent, decide_eq
from .semantics import normalize
from .surface import parse, parse_term, print_term, resolve
from .syntax import (
    alpha_eq, occurs_dim, subst_dim, subst_tm, Cube, Telescope, Term,
)
from .typecheck import Checker, Definition

__all__ = [
    "Checker", "ConvConfig", "Cube", "Definition", "Diagnostic",
    "DimClasses", "Span", "Telescope", "Term", "XttError", "alpha_eq",
    "build_classes", "consistent", "conv_tm", "conv_ty", "decide_eq",
    "normalize", "occurs_dim", "parse", "parse_term", "print_term",
    "resolve", "subst_dim", "subst_tm",
]

__version__ = "0.1.0"
