"""Terms of the lambda-ES calculus and the bang calculus.

Terms are immutable and compare modulo alpha-conversion: ``==`` and ``hash``
go through a nameless key where bound occurrences become binder depths and
free occurrences keep their names.  Binder names are still stored, because
typing contexts refer to variables by name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

LAMBDA_ES = "lambda-es"
BANG = "bang"
CALCULI = (LAMBDA_ES, BANG)


class Term:
    """Base class.  Subclasses are frozen dataclasses with eq disabled."""

    __slots__ = ()

    def key(self):
        k = self.__dict__.get("_key")
        if k is None:
            k = _key(self, {}, 0)
            object.__setattr__(self, "_key", k)
        return k

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def fv(self) -> frozenset:
        f = self.__dict__.get("_fv")
        if f is None:
            f = _free_vars(self)
            object.__setattr__(self, "_fv", f)
        return f

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"{type(self).__name__}<{pretty(self)}>"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class Abs(Term):
    var: str
    body: Term


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, eq=False, repr=False)
class ESub(Term):
    """``body[var := arg]``, the closure t[x\\u]."""

    body: Term
    var: str
    arg: Term


@dataclass(frozen=True, eq=False, repr=False)
class Bang(Term):
    body: Term


@dataclass(frozen=True, eq=False, repr=False)
class Der(Term):
    body: Term


def _key(t: Term, env: dict, depth: int):
    if isinstance(t, Var):
        d = env.get(t.name)
        return ("b", depth - d) if d is not None else ("f", t.name)
    if isinstance(t, App):
        return ("A", _key(t.fun, env, depth), _key(t.arg, env, depth))
    if isinstance(t, Abs):
        return ("L", _key(t.body, {**env, t.var: depth + 1}, depth + 1))
    if isinstance(t, ESub):
        return (
            "S",
            _key(t.body, {**env, t.var: depth + 1}, depth + 1),
            _key(t.arg, env, depth),
        )
    if isinstance(t, Bang):
        return ("!", _key(t.body, env, depth))
    if isinstance(t, Der):
        return ("D", _key(t.body, env, depth))
    raise TypeError(f"not a term: {t!r}")


def alpha_key(t: Term, env: Optional[dict] = None):
    """Nameless key of ``t``; ``env`` maps some free names to labels."""
    if not env:
        return t.key()
    return _key_env(t, env, {}, 0)


def _key_env(t, free_env, env, depth):
    if isinstance(t, Var):
        d = env.get(t.name)
        if d is not None:
            return ("b", depth - d)
        return ("f", free_env.get(t.name, t.name))
    if isinstance(t, App):
        return ("A", _key_env(t.fun, free_env, env, depth), _key_env(t.arg, free_env, env, depth))
    if isinstance(t, Abs):
        return ("L", _key_env(t.body, free_env, {**env, t.var: depth + 1}, depth + 1))
    if isinstance(t, ESub):
        return (
            "S",
            _key_env(t.body, free_env, {**env, t.var: depth + 1}, depth + 1),
            _key_env(t.arg, free_env, env, depth),
        )
    if isinstance(t, Bang):
        return ("!", _key_env(t.body, free_env, env, depth))
    return ("D", _key_env(t.body, free_env, env, depth))


def _free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        return t.fun.fv | t.arg.fv
    if isinstance(t, Abs):
        return t.body.fv - {t.var}
    if isinstance(t, ESub):
        return (t.body.fv - {t.var}) | t.arg.fv
    return t.body.fv


def free_vars(t: Term) -> frozenset:
    return t.fv


def alpha_eq(t: Term, u: Term) -> bool:
    return t.key() == u.key()


def names(t: Term) -> set:
    """Every name occurring in ``t``, free or bound."""
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, App):
            stack += (s.fun, s.arg)
        elif isinstance(s, Abs):
            out.add(s.var)
            stack.append(s.body)
        elif isinstance(s, ESub):
            out.add(s.var)
            stack += (s.body, s.arg)
        else:
            stack.append(s.body)
    return out


def is_bang_term(t: Term) -> bool:
    return any(isinstance(s, (Bang, Der)) for s in subterms(t))


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack += (s.arg, s.fun)
        elif isinstance(s, ESub):
            stack += (s.arg, s.body)
        elif not isinstance(s, Var):
            stack.append(s.body)


def size(t: Term) -> int:
    """Number of constructors."""
    return sum(1 for _ in subterms(t))


_BASE = re.compile(r"^(.*?)('*)$")


def fresh(base: str, avoid: Iterable[str]) -> str:
    """A name built from ``base`` by adding primes, not in ``avoid``."""
    avoid = set(avoid)
    root = _BASE.match(base).group(1) or "v"
    cand = root + "'"
    while cand in avoid:
        cand += "'"
    return cand


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding meta-level substitution t{x := u}.

    A binder is renamed only when it would capture a free variable of ``u``.
    """
    if x not in t.fv:
        return t
    return _subst(t, x, u, u.fv)


def _subst(t, x, u, ufv):
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(_subst(t.fun, x, u, ufv), _subst(t.arg, x, u, ufv))
    if isinstance(t, (Abs, ESub)):
        y, body = t.var, t.body
        arg = _subst(t.arg, x, u, ufv) if isinstance(t, ESub) else None
        if y != x and x in body.fv:
            if y in ufv:
                z = fresh(y, ufv | body.fv | {x})
                body = _subst(body, y, Var(z), frozenset((z,)))
                y = z
            body = _subst(body, x, u, ufv)
        return Abs(y, body) if isinstance(t, Abs) else ESub(body, y, arg)
    if isinstance(t, Bang):
        return Bang(_subst(t.body, x, u, ufv))
    return Der(_subst(t.body, x, u, ufv))


subst_meta = subst


def rename(t: Term, x: str, y: str) -> Term:
    return subst(t, x, Var(y))


# ---------------------------------------------------------------------------
# list contexts L ::= [] | L[x := u]

def split_l(t: Term) -> Tuple[Term, tuple]:
    """Decompose ``t`` as L<core>; layers are listed outermost first."""
    layers = []
    while isinstance(t, ESub):
        layers.append((t.var, t.arg))
        t = t.body
    return t, tuple(layers)


def plug_l(layers: tuple, core: Term) -> Term:
    for x, u in reversed(layers):
        core = ESub(core, x, u)
    return core


def freshen_l(t: Term, avoid) -> Term:
    """Rename the binders of the list context of ``t`` away from ``avoid``."""
    if not isinstance(t, ESub):
        return t
    avoid = frozenset(avoid)
    body, y = t.body, t.var
    if y in avoid:
        z = fresh(y, avoid | body.fv | names(t))
        body = rename(body, y, z)
        y = z
    return ESub(freshen_l(body, avoid), y, t.arg)


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class CalculusMismatch(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_']*)|(?P<assign>:=)|(?P<sym>[\\λ.()\[\]!]))"
)


def _tokenize(src: str):
    toks = []
    i = 0
    n = len(src)
    while True:
        while i < n and src[i].isspace():
            i += 1
        if i >= n:
            break
        m = _TOKEN.match(src, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {src[i]!r}", len(src[:i].encode()))
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "sym" and text == "λ":
            text = "\\"
        toks.append((kind, text, len(src[:start].encode())))
        i = m.end()
    toks.append(("eof", "", len(src.encode())))
    return toks


class _Parser:
    def __init__(self, src, calculus):
        if calculus not in CALCULI:
            raise ValueError(f"unknown calculus {calculus!r}")
        self.toks = _tokenize(src)
        self.i = 0
        self.bang = calculus == BANG

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, off = self.take()
        if val != text or kind == "ident":
            raise ParseError(f"expected {text!r}, found {val or 'end of input'!r}", off)

    def ident(self):
        kind, val, off = self.take()
        if kind != "ident" or (self.bang and val == "der"):
            raise ParseError(f"expected identifier, found {val or 'end of input'!r}", off)
        return val

    def term(self):
        kind, val, off = self.peek()
        if kind == "sym" and val == "\\":
            self.take()
            x = self.ident()
            self.expect(".")
            return Abs(x, self.term())
        return self.app()

    def starts_atom(self):
        kind, val, _ = self.peek()
        return kind == "ident" or (kind == "sym" and val in "(!\\")

    def app(self):
        t = self.atom()
        while self.starts_atom():
            kind, val, _ = self.peek()
            if val == "\\":
                # a trailing abstraction extends as far right as possible
                t = App(t, self.term())
                break
            t = App(t, self.atom())
        return t

    def atom(self):
        kind, val, off = self.peek()
        if kind == "sym" and val == "!":
            if not self.bang:
                raise CalculusMismatch("'!' is not part of the lambda-ES calculus", off)
            self.take()
            return Bang(self.atom())
        if kind == "ident" and val == "der" and not self.bang:
            nxt = self.toks[self.i + 1]
            if nxt[1] == "(" and nxt[2] == off + 3:
                raise CalculusMismatch("'der(' is not part of the lambda-ES calculus", off)
        if kind == "ident" and val == "der" and self.bang:
            self.take()
            self.expect("(")
            t = Der(self.term())
            self.expect(")")
        elif kind == "ident":
            self.take()
            t = Var(val)
        elif kind == "sym" and val == "(":
            self.take()
            t = self.term()
            self.expect(")")
        else:
            raise ParseError(f"unexpected {val or 'end of input'!r}", off)
        while self.peek()[1] == "[" and self.peek()[0] == "sym":
            self.take()
            x = self.ident()
            kind, val, off2 = self.take()
            if kind != "assign":
                raise ParseError(f"expected ':=', found {val or 'end of input'!r}", off2)
            u = self.term()
            self.expect("]")
            t = ESub(t, x, u)
        return t


def parse(src: str, calculus: str = LAMBDA_ES) -> Term:
    p = _Parser(src, calculus)
    t = p.term()
    kind, val, off = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", off)
    return t


# ---------------------------------------------------------------------------
# printing

def pretty(t: Term) -> str:
    return _pp(t, 0)


# levels: 0 = term, 1 = application, 2 = atom
def _pp(t, level):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        s = f"\\{t.var}.{_pp(t.body, 0)}"
        return s if level == 0 else f"({s})"
    if isinstance(t, App):
        s = f"{_pp(t.fun, 1)} {_pp(t.arg, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(t, ESub):
        body = _pp(t.body, 2)
        if isinstance(t.body, Bang):
            body = f"({body})"
        return f"{body}[{t.var} := {_pp(t.arg, 0)}]"
    if isinstance(t, Bang):
        return "!" + _pp(t.body, 2)
    if isinstance(t, Der):
        return f"der({_pp(t.body, 0)})"
    raise TypeError(f"not a term: {t!r}")
