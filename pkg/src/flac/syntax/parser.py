"""Recursive-descent parser for principals, types, terms and program headers."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, TypeVar

from ..delegations import Delegation, DelegationContext
from ..principals import BOT, TOP, ConfProj, Conj, Disj, IntegProj, Name, Principal, view, voice
from .terms import (
    ActsForT,
    App,
    Assume,
    Bind,
    Bracket,
    Case,
    Del,
    ForallT,
    FunT,
    Hole,
    Inj,
    Lam,
    Pair,
    ProdT,
    Proj,
    ProtCtx,
    SaysT,
    Sealed,
    Span,
    SumT,
    TApp,
    Term,
    TLam,
    Type,
    TyVar,
    UnitM,
    UnitT,
    UnitV,
    Var,
    Where,
    free_vars,
    rename_var,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {
    "unit", "says", "forall", "proj1", "proj2", "inj1", "inj2", "case", "of",
    "eta", "bind", "in", "assume", "top", "bot", "voice", "view",
    "sealed", "where", "ctx", "hole",
}
EXTENDED_KEYWORDS = {"sealed", "where", "ctx"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>\|>|->|<-|/\\|\\/|[\\\[\](){}<>,.:=|*+])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "ident" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, line, pos - line_start + 1))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


T = TypeVar("T")

SOURCE, HOLES, EXTENDED = "source", "holes", "extended"


class Parser:
    def __init__(self, text: str, mode: str = SOURCE):
        self.toks = tokenize(text)
        self.i = 0
        self.mode = mode

    # -- token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "kw")

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        name = self.tok.text
        self.i += 1
        return name

    def span(self) -> Span:
        return Span(self.tok.line, self.tok.col)

    def attempt(self, fn: Callable[[], T]) -> Optional[T]:
        saved = self.i
        try:
            return fn()
        except ParseError:
            self.i = saved
            return None

    def done(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after end of expression")

    def extended_only(self, what: str):
        allowed = self.mode == EXTENDED or (what == "hole" and self.mode == HOLES)
        if not allowed:
            raise self.error(f"{what} is not allowed in source programs")

    # -- principals -----------------------------------------------------------
    def principal(self) -> Principal:
        left = self.principal_conj()
        while self.at("\\/"):
            self.i += 1
            left = Disj(left, self.principal_conj())
        return left

    def principal_conj(self) -> Principal:
        left = self.principal_postfix()
        while self.at("/\\"):
            self.i += 1
            left = Conj(left, self.principal_postfix())
        return left

    def principal_postfix(self) -> Principal:
        p = self.principal_atom()
        while self.at("->") or self.at("<-"):
            p = ConfProj(p) if self.tok.text == "->" else IntegProj(p)
            self.i += 1
        return p

    def principal_atom(self) -> Principal:
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return Name(tok.text)
        if self.at("top"):
            self.i += 1
            return TOP
        if self.at("bot"):
            self.i += 1
            return BOT
        if self.at("voice") or self.at("view"):
            fn = voice if tok.text == "voice" else view
            self.i += 1
            self.expect("(")
            p = self.principal()
            self.expect(")")
            return fn(p)
        if self.at("("):
            self.i += 1
            p = self.principal()
            self.expect(")")
            return p
        raise self.error(f"expected a principal, found {tok.text or 'end of input'!r}")

    def bracketed_principal(self) -> Principal:
        self.expect("[")
        p = self.principal()
        self.expect("]")
        return p

    # -- types ------------------------------------------------------------------
    def type_(self) -> Type:
        if self.at("forall"):
            self.i += 1
            var = self.ident("type variable")
            pc = self.bracketed_principal()
            self.expect(".")
            return ForallT(var, pc, self.type_())
        left = self.type_sum()
        arrow = self.attempt(self._arrow_pc)
        if arrow is not None:
            return FunT(left, arrow, self.type_())
        return left

    def _arrow_pc(self) -> Principal:
        pc = self.bracketed_principal()
        self.expect("->")
        return pc

    def type_sum(self) -> Type:
        left = self.type_prod()
        while self.at("+"):
            self.i += 1
            left = SumT(left, self.type_prod())
        return left

    def type_prod(self) -> Type:
        left = self.type_says()
        while self.at("*"):
            self.i += 1
            left = ProdT(left, self.type_says())
        return left

    def type_says(self) -> Type:
        led = self.attempt(self._principal_led_type)
        if led is not None:
            return led
        return self.type_atom()

    def _principal_led_type(self) -> Type:
        p = self.principal()
        if self.at("says"):
            self.i += 1
            return SaysT(p, self.type_says())
        if self.at("|>"):
            self.i += 1
            return ActsForT(p, self.principal())
        raise self.error("not a principal-led type")

    def type_atom(self) -> Type:
        if self.at("unit"):
            self.i += 1
            return UnitT()
        if self.at("forall"):
            return self.type_()
        if self.tok.kind == "ident":
            return TyVar(self.ident())
        if self.at("("):
            self.i += 1
            t = self.type_()
            self.expect(")")
            return t
        raise self.error(f"expected a type, found {self.tok.text or 'end of input'!r}")

    def bracketed_type(self) -> Type:
        self.expect("[")
        t = self.type_()
        self.expect("]")
        return t

    # -- terms ------------------------------------------------------------------
    BINDER_START = ("\\", "/\\", "bind", "assume", "case")

    def term(self) -> Term:
        sp = self.span()
        if self.at("\\"):
            self.i += 1
            var = self.ident("variable")
            self.expect(":")
            ty = self.type_()
            pc = self.bracketed_principal()
            self.expect(".")
            return Lam(var, ty, pc, self.term(), span=sp)
        if self.at("/\\"):
            self.i += 1
            var = self.ident("type variable")
            pc = self.bracketed_principal()
            self.expect(".")
            return TLam(var, pc, self.term(), span=sp)
        if self.at("bind"):
            self.i += 1
            var = self.ident("variable")
            self.expect("=")
            bound = self.term()
            self.expect("in")
            return Bind(var, bound, self.term(), span=sp)
        if self.at("assume"):
            self.i += 1
            proof = self.term()
            self.expect("in")
            return Assume(proof, self.term(), span=sp)
        if self.at("case"):
            self.i += 1
            scrut = self.term()
            self.expect("of")
            var = self.ident("variable")
            self.expect(".")
            left = self.term()
            self.expect("|")
            var2 = self.ident("variable")
            self.expect(".")
            right = self.term()
            if var2 != var:
                # one binder serves both branches
                if var in free_vars(right):
                    raise self.error(f"case binder {var2!r} cannot be renamed to {var!r}")
                right = rename_var(right, var2, var)
            return Case(scrut, var, left, right, span=sp)
        e = self.app()
        while self.at("where"):
            self.extended_only("where")
            self.i += 1
            e = Where(e, self.atom(), span=sp)
        return e

    def app(self) -> Term:
        sp = self.span()
        e = self.prefix()
        while True:
            if self.at("["):
                e = TApp(e, self.bracketed_type(), span=sp)
            elif self.starts_atom():
                e = App(e, self.atom(), span=sp)
            else:
                return e

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return True
        return t.kind in ("sym", "kw") and t.text in ("unit", "(", "<", "{", "hole")

    def prefix_arg(self) -> Term:
        if any(self.at(k) for k in self.BINDER_START):
            return self.term()
        return self.prefix()

    def prefix(self) -> Term:
        sp = self.span()
        if self.at("proj1") or self.at("proj2"):
            index = 1 if self.tok.text == "proj1" else 2
            self.i += 1
            return Proj(index, self.prefix_arg(), span=sp)
        if self.at("inj1") or self.at("inj2"):
            index = 1 if self.tok.text == "inj1" else 2
            self.i += 1
            ty = self.bracketed_type()
            return Inj(index, self.prefix_arg(), ty, span=sp)
        if self.at("eta") or self.at("sealed") or self.at("ctx"):
            kw = self.tok.text
            if kw != "eta":
                self.extended_only(kw)
            self.i += 1
            label = self.bracketed_principal()
            body = self.prefix_arg()
            node = {"eta": UnitM, "sealed": Sealed, "ctx": ProtCtx}[kw]
            return node(label, body, span=sp)
        return self.atom()

    def atom(self) -> Term:
        sp = self.span()
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text, span=sp)
        if self.at("unit"):
            self.i += 1
            return UnitV(span=sp)
        if self.at("("):
            self.i += 1
            e = self.term()
            self.expect(")")
            return e
        if self.at("<"):
            self.i += 1
            deleg = self.attempt(self._delegation_body)
            if deleg is not None:
                return Del(deleg[0], deleg[1], span=sp)
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(">")
            return Pair(left, right, span=sp)
        if self.at("{"):
            self.extended_only("bracket")
            self.i += 1
            left = self.term()
            self.expect("|")
            right = self.term()
            self.expect("}")
            return Bracket(left, right, span=sp)
        if self.at("hole"):
            self.extended_only("hole")
            self.i += 1
            return Hole(self.bracketed_type(), span=sp)
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def _delegation_body(self) -> Tuple[Principal, Principal]:
        sup = self.principal()
        self.expect("|>")
        inf = self.principal()
        self.expect(">")
        return sup, inf

    # -- headers ----------------------------------------------------------------
    def delegation_list(self) -> DelegationContext:
        self.expect("[")
        ds = []
        while not self.at("]"):
            sup = self.principal()
            self.expect("|>")
            ds.append(Delegation(sup, self.principal()))
            if not self.at(","):
                break
            self.i += 1
        self.expect("]")
        return DelegationContext(tuple(ds))

    def gamma_list(self) -> List[Tuple[str, Type]]:
        self.expect("[")
        out = []
        while not self.at("]"):
            var = self.ident("variable")
            self.expect(":")
            out.append((var, self.type_()))
            if not self.at(","):
                break
            self.i += 1
        self.expect("]")
        return out


def _whole(text: str, rule: Callable[[Parser], T], mode: str = SOURCE) -> T:
    p = Parser(text, mode)
    if p.tok.kind == "eof":
        raise ParseError("empty input", 1, 1)
    out = rule(p)
    p.done()
    return out


def parse_term(text: str, mode: str = SOURCE) -> Term:
    return _whole(text, Parser.term, mode)


def parse_type(text: str) -> Type:
    return _whole(text, Parser.type_)


def parse_principal(text: str) -> Principal:
    return _whole(text, Parser.principal)


def parse_context(text: str) -> DelegationContext:
    text = text.strip()
    if not text.startswith("["):
        text = f"[{text}]"
    return _whole(text, Parser.delegation_list)


def parse_gamma(text: str) -> List[Tuple[str, Type]]:
    text = text.strip()
    if not text.startswith("["):
        text = f"[{text}]"
    return _whole(text, Parser.gamma_list)


def parse(text: str, mode: str = SOURCE):
    """Parse a term, falling back to a type, then a delegation context."""
    errors = []
    for fn in (lambda t: parse_term(t, mode), parse_type, parse_context):
        try:
            return fn(text)
        except ParseError as err:
            errors.append(err)
    raise errors[0]


@dataclass
class Program:
    """A ``.flac`` file: optional header lines followed by one term."""

    term: Term
    context: DelegationContext = field(default_factory=DelegationContext)
    pc: Optional[Principal] = None
    gamma: List[Tuple[str, Type]] = field(default_factory=list)
    pcmost: Optional[Principal] = None


_HEADER = re.compile(r"^\s*(context|pc|gamma|pcmost)\s*:(.*)$")


def parse_program(text: str, mode: str = SOURCE) -> Program:
    lines = text.splitlines()
    headers = {}
    body_start = len(lines)
    for k, raw in enumerate(lines):
        stripped = raw.split("--", 1)[0].strip()
        if not stripped:
            continue
        m = _HEADER.match(stripped)
        if not m:
            body_start = k
            break
        headers[m.group(1)] = (m.group(2), k + 1)
    body = "\n" * body_start + "\n".join(lines[body_start:])
    if not body.strip() or all(not l.split("--", 1)[0].strip() for l in lines[body_start:]):
        raise ParseError("program has no term", len(lines) or 1, 1)
    prog = Program(term=parse_term(body, mode))

    def header(key, fn):
        value, line = headers[key]
        try:
            return fn(value)
        except ParseError as err:
            raise ParseError(f"in {key} header: {err.message}", line, err.col) from None

    if "context" in headers:
        prog.context = header("context", parse_context)
    if "pc" in headers:
        prog.pc = header("pc", parse_principal)
    if "gamma" in headers:
        prog.gamma = header("gamma", parse_gamma)
    if "pcmost" in headers:
        prog.pcmost = header("pcmost", parse_principal)
    return prog
