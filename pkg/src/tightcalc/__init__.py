"""Tight typing and exact step counting for CBN, CBV and the bang calculus."""

from .syntax import (
    Abs, App, Bang, Der, ESub, Term, Var, alpha_eq, free_vars, parse, pretty, subst_meta,
)

__all__ = [
    "Abs", "App", "Bang", "Der", "ESub", "Term", "Var",
    "alpha_eq", "free_vars", "parse", "pretty", "subst_meta",
]
