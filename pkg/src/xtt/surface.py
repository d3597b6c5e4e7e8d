"""Concrete syntax: lexer, parser, name resolution, pretty-printer.

Files use extension ``.xtt``, UTF-8, line comments ``--``.  The grammar:

.. code-block:: text

    file    ::= def*
    def     ::= "def" IDENT group* ":" term "=" term
    group   ::= "(" IDENT+ ":" term ")"
    term    ::= binders "->" term | binders "*" sigma | sigma
    sigma   ::= spine ("*" sigma | "->" term)?          -- non-dependent sugar
    spine   ::= head (atom | "@" dim)*
    head    ::= atom
              | "fun" IDENT+ "=>" term
              | "<" IDENT ">" term
              | "Eq" "(" IDENT "." term ")" atom atom
              | "coe" IDENT "." atom dim dim atom
              | "hcom" atom dim dim atom system
              | "com" IDENT "." atom dim dim atom system
              | "if" ("(" IDENT "." term ")")? atom atom atom
              | "pair" atom atom
              | "fst" (ann3)? atom | "snd" (ann3)? atom
              | "app" ann3 atom atom
              | "papp" "(" IDENT "." term ")" atom dim
              | "tycase" atom "at" atom "{" branches "}"
              | "lift" NAT NAT atom
              | "let" IDENT (":" term)? "=" term "in" term
              | "U" NAT
    ann3    ::= "(" IDENT ":" term "." term ")"
    system  ::= "[" dim "=" "0" "=>" IDENT "." term
                "|" dim "=" "1" "=>" IDENT "." term "]"
    branches::= "pi" IDENT IDENT "=>" term "|" "sg" IDENT IDENT "=>" term
                "|" "eq" IDENT IDENT IDENT IDENT IDENT "=>" term
                "|" "bool" "=>" term "|" "univ" "=>" term
    atom    ::= IDENT | "tt" | "ff" | "bool" | "(" term ")"
    dim     ::= "0" | "1" | IDENT

Dimension names and term names live in separate namespaces.  The printer
emits fully annotated keyword forms by default, so printed core terms
resolve back (``resolve(parse(print(t)))`` is alpha-equal to ``t``);
``annotated=False`` gives the compact sugar for human consumption.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .diagnostics import Diagnostic, Span, XttError
from . import syntax as core
from .syntax import Dim, DimConst, DimVar, Term

__all__ = [
    "Span", "SurfaceTerm", "SDef", "parse", "parse_term", "resolve",
    "print_term", "print_dim",
    "SVar", "SUniv", "SBool", "STrue", "SFalse", "SPi", "SSg", "SEq",
    "SLift", "SLam", "SDimLam", "SApp", "SAnnApp", "SPair", "SFst", "SSnd",
    "SAnnFst", "SAnnSnd", "SPApp", "SAnnPApp", "SIf", "SCoe", "SHCom",
    "SCom", "STyCase", "SLet", "SDim",
]


# ---------------------------------------------------------------------------
# Surface AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SDim:
    name: Optional[str]  # None for a constant
    const: Optional[int]
    span: Span


class SurfaceTerm:
    __slots__ = ()


@dataclass(frozen=True)
class SVar(SurfaceTerm):
    name: str
    span: Span


@dataclass(frozen=True)
class SUniv(SurfaceTerm):
    level: int
    span: Span


@dataclass(frozen=True)
class SBool(SurfaceTerm):
    span: Span


@dataclass(frozen=True)
class STrue(SurfaceTerm):
    span: Span


@dataclass(frozen=True)
class SFalse(SurfaceTerm):
    span: Span


@dataclass(frozen=True)
class SPi(SurfaceTerm):
    var: str
    dom: SurfaceTerm
    cod: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SSg(SurfaceTerm):
    var: str
    dom: SurfaceTerm
    cod: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SEq(SurfaceTerm):
    dvar: str
    line: SurfaceTerm
    lhs: SurfaceTerm
    rhs: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SLift(SurfaceTerm):
    lo: int
    hi: int
    body: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SLam(SurfaceTerm):
    var: str
    body: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SDimLam(SurfaceTerm):
    dvar: str
    body: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SApp(SurfaceTerm):
    fn: SurfaceTerm
    arg: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SAnnApp(SurfaceTerm):
    var: str
    dom: SurfaceTerm
    cod: SurfaceTerm
    fn: SurfaceTerm
    arg: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SPair(SurfaceTerm):
    fst: SurfaceTerm
    snd: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SFst(SurfaceTerm):
    pair: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SSnd(SurfaceTerm):
    pair: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SAnnFst(SurfaceTerm):
    var: str
    dom: SurfaceTerm
    cod: SurfaceTerm
    pair: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SAnnSnd(SurfaceTerm):
    var: str
    dom: SurfaceTerm
    cod: SurfaceTerm
    pair: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SPApp(SurfaceTerm):
    fn: SurfaceTerm
    dim: SDim
    span: Span


@dataclass(frozen=True)
class SAnnPApp(SurfaceTerm):
    dvar: str
    line: SurfaceTerm
    fn: SurfaceTerm
    dim: SDim
    span: Span


@dataclass(frozen=True)
class SIf(SurfaceTerm):
    mvar: Optional[str]
    motive: Optional[SurfaceTerm]
    scrut: SurfaceTerm
    on_true: SurfaceTerm
    on_false: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SCoe(SurfaceTerm):
    dvar: str
    line: SurfaceTerm
    src: SDim
    dst: SDim
    arg: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SHCom(SurfaceTerm):
    ty: SurfaceTerm
    src: SDim
    dst: SDim
    cap: SurfaceTerm
    sys: SDim
    tvar0: str
    tube0: SurfaceTerm
    tvar1: str
    tube1: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SCom(SurfaceTerm):
    dvar: str
    line: SurfaceTerm
    src: SDim
    dst: SDim
    cap: SurfaceTerm
    sys: SDim
    tvar0: str
    tube0: SurfaceTerm
    tvar1: str
    tube1: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class STyCase(SurfaceTerm):
    level: Optional[int]  # scrutinee universe; inferred when omitted
    scrut: SurfaceTerm
    motive: SurfaceTerm
    pi_vars: Tuple[str, str]
    on_pi: SurfaceTerm
    sg_vars: Tuple[str, str]
    on_sg: SurfaceTerm
    eq_vars: Tuple[str, str, str, str, str]
    on_eq: SurfaceTerm
    on_bool: SurfaceTerm
    on_univ: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SLet(SurfaceTerm):
    var: str
    ann: Optional[SurfaceTerm]
    val: SurfaceTerm
    body: SurfaceTerm
    span: Span


@dataclass(frozen=True)
class SDef:
    name: str
    params: Tuple[Tuple[str, SurfaceTerm], ...]
    ret: SurfaceTerm
    body: SurfaceTerm
    span: Span


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

KEYWORDS = frozenset({
    "def", "fun", "coe", "hcom", "com", "tycase", "at", "pi", "sg", "eq",
    "bool", "univ", "tt", "ff", "if", "let", "in", "U", "Eq", "lift",
    "fst", "snd", "pair", "app", "papp",
})

_TOKEN_RE = re.compile(r"""
      (?P<ws>[ \t\r]+)
    | (?P<comment>--[^\n]*)
    | (?P<nl>\n)
    | (?P<arrow2>=>)
    | (?P<arrow>->)
    | (?P<num>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    | (?P<sym>[()\[\]{}<>|@=.:*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'kw', 'num', or the symbol text itself
    text: str
    span: Span


def _lex(src: str, filename: str) -> List[Token]:
    tokens: List[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            sp = Span(filename, line, col, line, col + 1)
            raise XttError(Diagnostic(sp, "E-PARSE",
                                      f"unexpected character {src[pos]!r}"))
        text = m.group(0)
        kind = m.lastgroup
        start_line, start_col = line, col
        if kind == "nl":
            line += 1
            col = 1
        else:
            col += len(text)
        pos = m.end()
        if kind in ("ws", "comment", "nl"):
            continue
        sp = Span(filename, start_line, start_col, line, col)
        if kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident",
                                text, sp))
        elif kind == "num":
            tokens.append(Token("num", text, sp))
        elif kind in ("arrow", "arrow2"):
            tokens.append(Token(text, text, sp))
        else:
            tokens.append(Token(text, text, sp))
    tokens.append(Token("eof", "", Span(filename, line, col, line, col)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: List[Token], filename: str):
        self.toks = tokens
        self.pos = 0
        self.filename = filename

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None,
           ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise self.err(f"expected {what or kind!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if not (t.kind == "kw" and t.text == word):
            raise self.err(f"expected {word!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def err(self, msg: str) -> XttError:
        return XttError(Diagnostic(self.peek().span, "E-PARSE", msg))

    def span_from(self, start: Span) -> Span:
        prev = self.toks[max(0, self.pos - 1)].span
        return Span(self.filename, start.line, start.col,
                    prev.end_line, prev.end_col)

    # -- names and dims ----------------------------------------------------

    def binder_name(self) -> str:
        t = self.peek()
        if t.kind == "ident":
            return self.next().text
        raise self.err(f"expected a binder name, found {t.text!r}")

    def dim(self) -> SDim:
        t = self.peek()
        if t.kind == "num" and t.text in ("0", "1"):
            self.next()
            return SDim(None, int(t.text), t.span)
        if t.kind == "ident":
            self.next()
            return SDim(t.text, None, t.span)
        raise self.err(f"expected a dimension (0, 1, or a name), found {t.text!r}")

    # -- terms ---------------------------------------------------------------

    def term(self) -> SurfaceTerm:
        start = self.peek().span
        # Binder groups: ( x y : A ) ... followed by -> or *
        if self.at("(") and self._looks_like_binder_group():
            groups = []
            while self.at("(") and self._looks_like_binder_group():
                self.next()
                names = [self.binder_name()]
                while self.peek().kind == "ident":
                    names.append(self.next().text)
                self.expect(":")
                dom = self.term()
                self.expect(")")
                groups.extend((nm, dom) for nm in names)
            if self.at("->"):
                self.next()
                cod = self.term()
                for nm, dom in reversed(groups):
                    cod = SPi(nm, dom, cod, self.span_from(start))
                return cod
            if self.at("*"):
                self.next()
                cod = self.sigma()
                out = cod
                for nm, dom in reversed(groups):
                    out = SSg(nm, dom, out, self.span_from(start))
                return out
            raise self.err("expected '->' or '*' after a binder group")
        return self.sigma_or_arrow()

    def _looks_like_binder_group(self) -> bool:
        # '(' IDENT+ ':'  — distinguishes a binder group from a paren term.
        k = 1
        if not self.at("ident", ahead=k):
            return False
        while self.at("ident", ahead=k):
            k += 1
        return self.at(":", ahead=k)

    def sigma_or_arrow(self) -> SurfaceTerm:
        start = self.peek().span
        t = self.sigma()
        if self.at("->"):
            self.next()
            cod = self.term()
            return SPi("_", t, cod, self.span_from(start))
        return t

    def sigma(self) -> SurfaceTerm:
        start = self.peek().span
        t = self.spine()
        if self.at("*"):
            self.next()
            rest = self.sigma()
            return SSg("_", t, rest, self.span_from(start))
        return t

    def spine(self) -> SurfaceTerm:
        start = self.peek().span
        head = self.head()
        while True:
            if self.at("@"):
                self.next()
                d = self.dim()
                head = SPApp(head, d, self.span_from(start))
            elif self._at_atom_start():
                arg = self.atom()
                head = SApp(head, arg, self.span_from(start))
            else:
                return head

    def _at_atom_start(self) -> bool:
        t = self.peek()
        if t.kind == "(":
            return True
        if t.kind == "ident":
            return True
        if t.kind == "kw" and t.text in ("tt", "ff", "bool"):
            return True
        return False

    def head(self) -> SurfaceTerm:
        t = self.peek()
        start = t.span
        if t.kind == "kw":
            w = t.text
            if w == "fun":
                self.next()
                names = [self.binder_name()]
                while self.peek().kind == "ident":
                    names.append(self.next().text)
                self.expect("=>")
                body = self.term()
                sp = self.span_from(start)
                for nm in reversed(names):
                    body = SLam(nm, body, sp)
                return body
            if w == "U":
                self.next()
                k = self.expect("num", "a universe level")
                return SUniv(int(k.text), self.span_from(start))
            if w == "Eq":
                self.next()
                self.expect("(")
                dv = self.binder_name()
                self.expect(".")
                line = self.term()
                self.expect(")")
                lhs = self.atom()
                rhs = self.atom()
                return SEq(dv, line, lhs, rhs, self.span_from(start))
            if w == "coe":
                self.next()
                dv = self.binder_name()
                self.expect(".")
                line = self.atom()
                r = self.dim()
                s = self.dim()
                arg = self.atom()
                return SCoe(dv, line, r, s, arg, self.span_from(start))
            if w in ("hcom", "com"):
                self.next()
                if w == "com":
                    dv = self.binder_name()
                    self.expect(".")
                ty = self.atom()
                r = self.dim()
                s = self.dim()
                cap = self.atom()
                sys, tv0, t0, tv1, t1 = self._system()
                sp = self.span_from(start)
                if w == "hcom":
                    return SHCom(ty, r, s, cap, sys, tv0, t0, tv1, t1, sp)
                return SCom(dv, ty, r, s, cap, sys, tv0, t0, tv1, t1, sp)
            if w == "if":
                self.next()
                mvar, motive = None, None
                if self.at("(") and self.at("ident", ahead=1) \
                        and self.at(".", ahead=2):
                    self.next()
                    mvar = self.binder_name()
                    self.expect(".")
                    motive = self.term()
                    self.expect(")")
                scrut = self.atom()
                on_t = self.atom()
                on_f = self.atom()
                return SIf(mvar, motive, scrut, on_t, on_f,
                           self.span_from(start))
            if w == "pair":
                self.next()
                a = self.atom()
                b = self.atom()
                return SPair(a, b, self.span_from(start))
            if w in ("fst", "snd"):
                self.next()
                if self.at("(") and self.at("ident", ahead=1) \
                        and self.at(":", ahead=2):
                    var, dom, cod = self._ann3()
                    p = self.atom()
                    sp = self.span_from(start)
                    cls = SAnnFst if w == "fst" else SAnnSnd
                    return cls(var, dom, cod, p, sp)
                p = self.atom()
                sp = self.span_from(start)
                return (SFst if w == "fst" else SSnd)(p, sp)
            if w == "app":
                self.next()
                var, dom, cod = self._ann3()
                fn = self.atom()
                arg = self.atom()
                return SAnnApp(var, dom, cod, fn, arg, self.span_from(start))
            if w == "papp":
                self.next()
                self.expect("(")
                dv = self.binder_name()
                self.expect(".")
                line = self.term()
                self.expect(")")
                fn = self.atom()
                d = self.dim()
                return SAnnPApp(dv, line, fn, d, self.span_from(start))
            if w == "tycase":
                return self._tycase()
            if w == "lift":
                self.next()
                lo = int(self.expect("num", "a level").text)
                hi = int(self.expect("num", "a level").text)
                body = self.atom()
                return SLift(lo, hi, body, self.span_from(start))
            if w == "let":
                self.next()
                nm = self.binder_name()
                ann = None
                if self.at(":"):
                    self.next()
                    ann = self.term()
                self.expect("=")
                val = self.term()
                self.expect_kw("in")
                body = self.term()
                return SLet(nm, ann, val, body, self.span_from(start))
            # 'tt', 'ff', 'bool' fall through to atom
        if self.at("<"):
            self.next()
            dv = self.binder_name()
            self.expect(">")
            body = self.term()
            return SDimLam(dv, body, self.span_from(start))
        return self.atom()

    def _ann3(self) -> Tuple[str, SurfaceTerm, SurfaceTerm]:
        self.expect("(")
        var = self.binder_name()
        self.expect(":")
        dom = self.term()
        self.expect(".")
        cod = self.term()
        self.expect(")")
        return var, dom, cod

    def _system(self):
        self.expect("[")
        d0 = self.dim()
        self.expect("=")
        z = self.expect("num", "0")
        if z.text != "0":
            raise self.err("the first tube must be the 0 face")
        self.expect("=>")
        tv0 = self.binder_name()
        self.expect(".")
        t0 = self.term()
        self.expect("|")
        d1 = self.dim()
        self.expect("=")
        o = self.expect("num", "1")
        if o.text != "1":
            raise self.err("the second tube must be the 1 face")
        self.expect("=>")
        tv1 = self.binder_name()
        self.expect(".")
        t1 = self.term()
        self.expect("]")
        if (d0.name, d0.const) != (d1.name, d1.const):
            raise self.err("both tube faces must constrain the same dimension")
        return d0, tv0, t0, tv1, t1

    def _tycase(self) -> SurfaceTerm:
        start = self.peek().span
        self.expect_kw("tycase")
        level = None
        if self.at("["):
            self.next()
            level = int(self.expect("num", "a universe level").text)
            self.expect("]")
        scrut = self.atom()
        self.expect_kw("at")
        motive = self.atom()
        self.expect("{")
        self.expect_kw("pi")
        p1, p2 = self.binder_name(), self.binder_name()
        self.expect("=>")
        on_pi = self.term()
        self.expect("|")
        self.expect_kw("sg")
        s1, s2 = self.binder_name(), self.binder_name()
        self.expect("=>")
        on_sg = self.term()
        self.expect("|")
        self.expect_kw("eq")
        e = tuple(self.binder_name() for _ in range(5))
        self.expect("=>")
        on_eq = self.term()
        self.expect("|")
        self.expect_kw("bool")
        self.expect("=>")
        on_bool = self.term()
        self.expect("|")
        self.expect_kw("univ")
        self.expect("=>")
        on_univ = self.term()
        self.expect("}")
        return STyCase(level, scrut, motive, (p1, p2), on_pi, (s1, s2), on_sg,
                       e, on_eq, on_bool, on_univ, self.span_from(start))

    def atom(self) -> SurfaceTerm:
        t = self.peek()
        if t.kind == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "ident":
            self.next()
            return SVar(t.text, t.span)
        if t.kind == "kw":
            if t.text == "tt":
                self.next()
                return STrue(t.span)
            if t.text == "ff":
                self.next()
                return SFalse(t.span)
            if t.text == "bool":
                self.next()
                return SBool(t.span)
            # keyword heads are allowed where an atom is syntactically fine
            if t.text in ("fun", "U", "Eq", "coe", "hcom", "com", "if",
                          "pair", "fst", "snd", "app", "papp", "tycase",
                          "lift", "let"):
                raise self.err(f"{t.text!r} form must be parenthesized here")
        raise self.err(f"expected a term, found {t.text or 'end of input'!r}")

    # -- definitions ---------------------------------------------------------

    def file(self) -> List[SDef]:
        defs = []
        while not self.at("eof"):
            defs.append(self.definition())
        return defs

    def definition(self) -> SDef:
        start = self.peek().span
        self.expect_kw("def")
        name = self.expect("ident", "a definition name").text
        params: List[Tuple[str, SurfaceTerm]] = []
        while self.at("("):
            self.next()
            names = [self.binder_name()]
            while self.peek().kind == "ident":
                names.append(self.next().text)
            self.expect(":")
            dom = self.term()
            self.expect(")")
            params.extend((nm, dom) for nm in names)
        self.expect(":")
        ret = self.term()
        self.expect("=")
        body = self.term()
        return SDef(name, tuple(params), ret, body, self.span_from(start))


def parse(src: str, filename: str = "<input>") -> List[SDef]:
    """Parse a whole file into surface definitions (raises XttError)."""
    return _Parser(_lex(src, filename), filename).file()


def parse_term(src: str, filename: str = "<expr>") -> SurfaceTerm:
    p = _Parser(_lex(src, filename), filename)
    t = p.term()
    if not p.at("eof"):
        raise p.err("trailing input after expression")
    return t


# ---------------------------------------------------------------------------
# Name resolution (annotated surface -> core)
# ---------------------------------------------------------------------------

class ResolveError(XttError):
    pass


def _scope_fail(name: str, span: Span, candidates) -> ResolveError:
    msg = f"unbound name {name!r}"
    hint = difflib.get_close_matches(name, list(candidates), n=1)
    if hint:
        msg += f"; did you mean {hint[0]!r}?"
    return ResolveError(Diagnostic(span, "E-SCOPE", msg))


def _resolve_dim(d: SDim, dscope: Tuple[str, ...],
                 all_names=()) -> Dim:
    if d.const is not None:
        return DimConst(d.const)
    for lvl in range(len(dscope) - 1, -1, -1):
        if dscope[lvl] == d.name:
            return DimVar(lvl)
    raise _scope_fail(d.name, d.span, tuple(dscope) + tuple(all_names))


def resolve(t: SurfaceTerm, scope: Tuple[str, ...] = (),
            dscope: Tuple[str, ...] = (),
            defs: Tuple[str, ...] = ()) -> Term:
    """Translate annotated surface syntax to core, names to de Bruijn.

    Handles exactly the forms the printer emits.  Sugar that requires
    elaboration (unannotated application, projections, bare ``if``,
    ``let``, ``com``) is rejected with a ValueError; the type checker is
    the entry point for those.
    """
    def go(t, sc, dsc):
        match t:
            case SVar(name=nm, span=sp):
                for i, entry in enumerate(reversed(sc)):
                    if entry == nm:
                        return core.Var(i)
                if nm in defs:
                    return core.Def(nm)
                raise _scope_fail(nm, sp, tuple(sc) + tuple(defs))
            case SUniv(level=k):
                return core.Univ(k)
            case SBool():
                return core.Bool()
            case STrue():
                return core.TT()
            case SFalse():
                return core.FF()
            case SPi(var=x, dom=d, cod=c):
                return core.Pi(go(d, sc, dsc), go(c, sc + (x,), dsc))
            case SSg(var=x, dom=d, cod=c):
                return core.Sg(go(d, sc, dsc), go(c, sc + (x,), dsc))
            case SEq(dvar=i, line=a, lhs=l, rhs=r):
                return core.Eq(go(a, sc, dsc + (i,)), go(l, sc, dsc),
                               go(r, sc, dsc))
            case SLift(lo=lo, hi=hi, body=b):
                return core.Lift(lo, hi, go(b, sc, dsc))
            case SLam(var=x, body=b):
                return core.Lam(go(b, sc + (x,), dsc))
            case SDimLam(dvar=i, body=b):
                return core.DimLam(go(b, sc, dsc + (i,)))
            case SAnnApp(var=x, dom=d, cod=c, fn=f, arg=a):
                return core.App(go(d, sc, dsc), go(c, sc + (x,), dsc),
                                go(f, sc, dsc), go(a, sc, dsc))
            case SPair(fst=a, snd=b):
                return core.Pair(go(a, sc, dsc), go(b, sc, dsc))
            case SAnnFst(var=x, dom=d, cod=c, pair=p):
                return core.Fst(go(d, sc, dsc), go(c, sc + (x,), dsc),
                                go(p, sc, dsc))
            case SAnnSnd(var=x, dom=d, cod=c, pair=p):
                return core.Snd(go(d, sc, dsc), go(c, sc + (x,), dsc),
                                go(p, sc, dsc))
            case SAnnPApp(dvar=i, line=a, fn=f, dim=d):
                return core.PApp(go(a, sc, dsc + (i,)), go(f, sc, dsc),
                                 _resolve_dim(d, dsc, sc))
            case SIf(mvar=mv, motive=mot, scrut=s, on_true=a, on_false=b) \
                    if mot is not None:
                return core.If(go(mot, sc + (mv,), dsc), go(s, sc, dsc),
                               go(a, sc, dsc), go(b, sc, dsc))
            case SCoe(dvar=i, line=a, src=r, dst=s2, arg=m):
                return core.Coe(go(a, sc, dsc + (i,)),
                                _resolve_dim(r, dsc, sc),
                                _resolve_dim(s2, dsc, sc), go(m, sc, dsc))
            case SHCom(ty=ty, src=r, dst=s2, cap=cap, sys=sy,
                       tvar0=j0, tube0=t0, tvar1=j1, tube1=t1):
                return core.HCom(go(ty, sc, dsc), _resolve_dim(r, dsc, sc),
                                 _resolve_dim(s2, dsc, sc), go(cap, sc, dsc),
                                 _resolve_dim(sy, dsc, sc),
                                 go(t0, sc, dsc + (j0,)),
                                 go(t1, sc, dsc + (j1,)))
            case STyCase(level=k, scrut=s, motive=mot, pi_vars=pv, on_pi=bp,
                         sg_vars=sv, on_sg=bs, eq_vars=ev, on_eq=be,
                         on_bool=bb, on_univ=bu):
                if k is None:
                    raise ValueError(
                        "resolve: tycase without a level is elaboration sugar")
                return core.TypeCase(
                    k, go(mot, sc, dsc), go(s, sc, dsc),
                    go(bp, sc + pv, dsc), go(bs, sc + sv, dsc),
                    go(be, sc + ev, dsc), go(bb, sc, dsc), go(bu, sc, dsc))
            case SApp() | SFst() | SSnd() | SPApp() | SIf() | SLet() | SCom():
                raise ValueError(
                    f"resolve: {type(t).__name__} is elaboration sugar")
        raise ValueError(f"resolve: unhandled surface node {t!r}")

    return go(t, tuple(scope), tuple(dscope))


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC_ARROW = 0
_PREC_SIGMA = 1
_PREC_APP = 2
_PREC_ATOM = 3


def print_dim(d: Dim, dnames: Tuple[str, ...] = ()) -> str:
    if isinstance(d, DimConst):
        return str(d.eps)
    if d.level < len(dnames):
        return dnames[d.level]
    return f"i{d.level}"  # out-of-scope level; only in debug output


class _Printer:
    def __init__(self, annotated: bool):
        self.annotated = annotated

    def fresh_tm(self, vnames) -> str:
        return f"x{len(vnames)}"

    def fresh_dim(self, dnames) -> str:
        return f"i{len(dnames)}"

    def tm(self, t: Term, vn: Tuple[str, ...], dn: Tuple[str, ...],
           prec: int) -> str:
        s, lvl = self.render(t, vn, dn)
        if lvl < prec:
            return f"({s})"
        return s

    def render(self, t: Term, vn, dn) -> Tuple[str, int]:
        match t:
            case core.Var(index=i):
                if i < len(vn):
                    return vn[-1 - i], _PREC_ATOM
                return f"x?{i}", _PREC_ATOM
            case core.Def(name=nm):
                return nm, _PREC_ATOM
            case core.Bool():
                return "bool", _PREC_ATOM
            case core.TT():
                return "tt", _PREC_ATOM
            case core.FF():
                return "ff", _PREC_ATOM
            case core.Univ(level=k):
                return f"U {k}", _PREC_APP
            case core.Pi(dom=d, cod=c):
                x = self.fresh_tm(vn)
                return (f"({x} : {self.tm(d, vn, dn, _PREC_ARROW)}) -> "
                        f"{self.tm(c, vn + (x,), dn, _PREC_ARROW)}",
                        _PREC_ARROW)
            case core.Sg(dom=d, cod=c):
                x = self.fresh_tm(vn)
                return (f"({x} : {self.tm(d, vn, dn, _PREC_ARROW)}) * "
                        f"{self.tm(c, vn + (x,), dn, _PREC_SIGMA)}",
                        _PREC_ARROW)
            case core.Eq(line=a, lhs=l, rhs=r):
                i = self.fresh_dim(dn)
                return (f"Eq ({i} . {self.tm(a, vn, dn + (i,), _PREC_ARROW)})"
                        f" {self.tm(l, vn, dn, _PREC_ATOM)}"
                        f" {self.tm(r, vn, dn, _PREC_ATOM)}", _PREC_APP)
            case core.Lift(lo=lo, hi=hi, body=b):
                return (f"lift {lo} {hi} {self.tm(b, vn, dn, _PREC_ATOM)}",
                        _PREC_APP)
            case core.Lam(body=b):
                x = self.fresh_tm(vn)
                return (f"fun {x} => {self.tm(b, vn + (x,), dn, _PREC_ARROW)}",
                        _PREC_ARROW)
            case core.DimLam(body=b):
                i = self.fresh_dim(dn)
                return (f"<{i}> {self.tm(b, vn, dn + (i,), _PREC_ARROW)}",
                        _PREC_ARROW)
            case core.App(dom=d, cod=c, fn=f, arg=a):
                if self.annotated:
                    x = self.fresh_tm(vn)
                    ann = (f"({x} : {self.tm(d, vn, dn, _PREC_ARROW)} . "
                           f"{self.tm(c, vn + (x,), dn, _PREC_ARROW)})")
                    return (f"app {ann} {self.tm(f, vn, dn, _PREC_ATOM)} "
                            f"{self.tm(a, vn, dn, _PREC_ATOM)}", _PREC_APP)
                return (f"{self.tm(f, vn, dn, _PREC_APP)} "
                        f"{self.tm(a, vn, dn, _PREC_ATOM)}", _PREC_APP)
            case core.Pair(fst=a, snd=b):
                return (f"pair {self.tm(a, vn, dn, _PREC_ATOM)} "
                        f"{self.tm(b, vn, dn, _PREC_ATOM)}", _PREC_APP)
            case core.Fst(dom=d, cod=c, pair=p) | core.Snd(dom=d, cod=c, pair=p):
                head = "fst" if isinstance(t, core.Fst) else "snd"
                if self.annotated:
                    x = self.fresh_tm(vn)
                    ann = (f"({x} : {self.tm(d, vn, dn, _PREC_ARROW)} . "
                           f"{self.tm(c, vn + (x,), dn, _PREC_ARROW)})")
                    return (f"{head} {ann} {self.tm(p, vn, dn, _PREC_ATOM)}",
                            _PREC_APP)
                return f"{head} {self.tm(p, vn, dn, _PREC_ATOM)}", _PREC_APP
            case core.PApp(line=a, fn=f, dim=d):
                if self.annotated:
                    i = self.fresh_dim(dn)
                    ann = f"({i} . {self.tm(a, vn, dn + (i,), _PREC_ARROW)})"
                    return (f"papp {ann} {self.tm(f, vn, dn, _PREC_ATOM)} "
                            f"{print_dim(d, dn)}", _PREC_APP)
                return (f"{self.tm(f, vn, dn, _PREC_APP)} @ {print_dim(d, dn)}",
                        _PREC_APP)
            case core.If(motive=m, scrut=s, on_true=a, on_false=b):
                x = self.fresh_tm(vn)
                mot = f"({x} . {self.tm(m, vn + (x,), dn, _PREC_ARROW)})"
                return (f"if {mot} {self.tm(s, vn, dn, _PREC_ATOM)} "
                        f"{self.tm(a, vn, dn, _PREC_ATOM)} "
                        f"{self.tm(b, vn, dn, _PREC_ATOM)}", _PREC_APP)
            case core.Coe(line=a, src=r, dst=s, arg=m):
                i = self.fresh_dim(dn)
                return (f"coe {i} . {self.tm(a, vn, dn + (i,), _PREC_ATOM)} "
                        f"{print_dim(r, dn)} {print_dim(s, dn)} "
                        f"{self.tm(m, vn, dn, _PREC_ATOM)}", _PREC_APP)
            case core.HCom(ty=ty, src=r, dst=s, cap=cap, sys=sy,
                           tube0=t0, tube1=t1):
                j0 = self.fresh_dim(dn)
                j1 = self.fresh_dim(dn)
                d = print_dim(sy, dn)
                return (f"hcom {self.tm(ty, vn, dn, _PREC_ATOM)} "
                        f"{print_dim(r, dn)} {print_dim(s, dn)} "
                        f"{self.tm(cap, vn, dn, _PREC_ATOM)} "
                        f"[ {d}=0 => {j0} . "
                        f"{self.tm(t0, vn, dn + (j0,), _PREC_ARROW)} "
                        f"| {d}=1 => {j1} . "
                        f"{self.tm(t1, vn, dn + (j1,), _PREC_ARROW)} ]",
                        _PREC_APP)
            case core.TypeCase(level=k, motive=mot, scrut=s, on_pi=bp,
                               on_sg=bs, on_eq=be, on_bool=bb, on_univ=bu):
                a1 = self.fresh_tm(vn)
                a2 = f"x{len(vn) + 1}"
                e = tuple(f"x{len(vn) + i}" for i in range(5))
                lvl = f"[{k}]" if self.annotated else ""
                return (f"tycase{lvl} {self.tm(s, vn, dn, _PREC_ATOM)} at "
                        f"{self.tm(mot, vn, dn, _PREC_ATOM)} "
                        f"{{ pi {a1} {a2} => "
                        f"{self.tm(bp, vn + (a1, a2), dn, _PREC_ARROW)} "
                        f"| sg {a1} {a2} => "
                        f"{self.tm(bs, vn + (a1, a2), dn, _PREC_ARROW)} "
                        f"| eq {' '.join(e)} => "
                        f"{self.tm(be, vn + e, dn, _PREC_ARROW)} "
                        f"| bool => {self.tm(bb, vn, dn, _PREC_ARROW)} "
                        f"| univ => {self.tm(bu, vn, dn, _PREC_ARROW)} }}",
                        _PREC_APP)
        raise ValueError(f"print: unhandled term {t!r}")


def print_term(t: Term, var_names: Tuple[str, ...] = (),
               dim_names: Tuple[str, ...] = (), annotated: bool = True) -> str:
    """Render a core term; with ``annotated=True`` the output resolves back."""
    return _Printer(annotated).tm(t, tuple(var_names), tuple(dim_names),
                                  _PREC_ARROW)
