"""Types, terms, parser and printer."""
from .parser import (
    EXTENDED,
    HOLES,
    SOURCE,
    ParseError,
    Program,
    parse,
    parse_context,
    parse_gamma,
    parse_principal,
    parse_program,
    parse_term,
    parse_type,
)
from .printer import pretty, pretty_type
from .terms import *  # noqa: F401,F403
