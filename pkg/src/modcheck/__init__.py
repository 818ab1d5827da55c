"""A proof checker for the lambda-Pi calculus modulo rewriting."""

from .checker import check, conv, elaborate, infer
from .errors import CheckError, FuelExhausted, Loc, ModError, ParseError
from .rewrite import DEFAULT_FUEL, Fuel, head_rewrite, match, snf, whnf
from .signature import Signature
from .syntax import parse_file, parse_term, print_file, print_term
from .term import TYPE, KIND, App, BVar, Const, Context, Lam, Pi, Sort, Term, alpha_eq, shift, subst

__version__ = "0.1.0"
