"""CBN and CBV embeddings into the bang calculus, on terms and on derivations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .syntax import Abs, App, Bang, Der, ESub, Term, Var, split_l
from .typesys import (
    A, N, VL, VR, Arrow, Const, Derivation, Mult, Type, build, consts_of,
)

# ---------------------------------------------------------------------------
# terms


def cbn_term(t: Term) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, cbn_term(t.body))
    if isinstance(t, App):
        return App(cbn_term(t.fun), Bang(cbn_term(t.arg)))
    if isinstance(t, ESub):
        return ESub(cbn_term(t.body), t.var, Bang(cbn_term(t.arg)))
    raise TypeError(f"not a lambda-es term: {t!r}")


def cbv_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Bang(t)
    if isinstance(t, Abs):
        return Bang(Abs(t.var, cbv_term(t.body)))
    if isinstance(t, App):
        f = cbv_term(t.fun)
        core, layers = split_l(f)
        if isinstance(core, Bang):
            return App(_plug(layers, core.body), cbv_term(t.arg))
        return App(Der(f), cbv_term(t.arg))
    if isinstance(t, ESub):
        return ESub(cbv_term(t.body), t.var, cbv_term(t.arg))
    raise TypeError(f"not a lambda-es term: {t!r}")


def _plug(layers, core):
    for x, u in reversed(layers):
        core = ESub(core, x, u)
    return core


def has_adjacent_bangs(t: Term) -> bool:
    if isinstance(t, Bang):
        return isinstance(t.body, Bang) or has_adjacent_bangs(t.body)
    if isinstance(t, Var):
        return False
    if isinstance(t, App):
        return has_adjacent_bangs(t.fun) or has_adjacent_bangs(t.arg)
    if isinstance(t, ESub):
        return has_adjacent_bangs(t.body) or has_adjacent_bangs(t.arg)
    return has_adjacent_bangs(t.body)


def is_value_es(t: Term) -> bool:
    """val(t): a variable or abstraction under a list context."""
    core, _ = split_l(t)
    return isinstance(core, (Var, Abs))


def is_value_bang(t: Term) -> bool:
    """Values of the bang calculus: L<!u>."""
    core, _ = split_l(t)
    return isinstance(core, Bang)


# ---------------------------------------------------------------------------
# types

def cbn_type(t: Type) -> Type:
    return t


def cbv_type_neg(t: Type) -> Type:
    if isinstance(t, Const):
        return N if t == VR else t
    if isinstance(t, Arrow):
        return Arrow(cbv_type_neg(t.dom), cbv_type_pos(t.cod))
    return Mult.of(cbv_type_neg(s) for s in t.items)


def cbv_type_pos(t: Type) -> Type:
    if isinstance(t, Const):
        return Mult((N,)) if t == VR else t
    return cbv_type_neg(t)


def cbv_ctx(ctx):
    from .typesys import Context
    return Context({x: cbv_type_neg(m) for x, m in ctx.items()})


# ---------------------------------------------------------------------------
# measures

def countvr(d: Derivation) -> int:
    if d.rule == "var_p":
        return 1
    if d.rule in ("val_p", "abs_p", "var_c"):
        return 0
    sub = sum(countvr(p) for p in d.premises)
    if d.rule == "app_p" and is_value_es(d.term.fun):
        return sub - 1
    if d.rule in ("app_c", "appt_c") and not is_value_es(d.term.fun):
        return sub + 1
    return sub


def inversevr(d: Derivation) -> int:
    if d.rule in ("bg_p", "var_c"):
        return 0
    sub = sum(inversevr(p) for p in d.premises)
    if d.rule == "app_p" and is_value_bang(d.term.fun):
        return sub - 1
    if d.rule in ("app_c", "appt_c") and not is_value_bang(d.term.fun):
        return sub + 1
    return sub


# ---------------------------------------------------------------------------
# derivations

def translate_derivation_n(d: Derivation) -> Derivation:
    """N derivation of t to a B derivation of cbn(t) with the same counters."""
    r, ps = d.rule, d.premises
    t = d.term
    b = lambda rule, term, prem=(), ty=None: build("B", rule, term, prem, ty=ty)
    if r == "var_c":
        return b("var_c", t, (), d.type)
    if r == "app_p":
        f = translate_derivation_n(ps[0])
        arg = Bang(cbn_term(t.arg))
        return b("app_p", App(f.term, arg), (f, b("bg_p", arg)))
    if r == "abs_p":
        body = translate_derivation_n(ps[0])
        return b("abs_p", Abs(t.var, body.term), (body,))
    if r == "abs_c":
        body = translate_derivation_n(ps[0])
        return b("abs_c", Abs(t.var, body.term), (body,))
    if r == "app_c":
        f = translate_derivation_n(ps[0])
        arg = b("bg_c", Bang(cbn_term(t.arg)), [translate_derivation_n(p) for p in ps[1:]])
        return b("app_c", App(f.term, arg.term), (f, arg))
    if r == "es_c":
        body = translate_derivation_n(ps[0])
        arg = b("bg_c", Bang(cbn_term(t.arg)), [translate_derivation_n(p) for p in ps[1:]])
        return b("es_c", ESub(body.term, t.var, arg.term), (body, arg))
    raise ValueError(f"not an N rule: {r}")


def _strip_bang(d: Derivation) -> Derivation:
    """From a B derivation of L<!s> typed [σ] get one of L<s> typed σ."""
    if d.rule in ("es_p", "es_c"):
        body = _strip_bang(d.premises[0])
        return build("B", d.rule, ESub(body.term, d.term.var, d.term.arg), (body,) + d.premises[1:])
    if d.rule != "bg_c" or len(d.premises) != 1:
        raise ValueError(f"cannot strip a bang typed by {d.rule}")
    return d.premises[0]


def translate_derivation_v(d: Derivation) -> Derivation:
    """V derivation of t to a B derivation of cbv(t); e grows by countvr."""
    r, ps = d.rule, d.premises
    t = d.term
    b = lambda rule, term, prem=(), ty=None: build("B", rule, term, prem, ty=ty)
    if r == "var_p":
        return b("bg_c", Bang(t), (b("var_c", t, (), N),))
    if r in ("val_p", "abs_p"):
        return b("bg_p", cbv_term(t))
    if r == "var_c":
        return b("bg_c", Bang(t), [b("var_c", t, (), cbv_type_neg(s)) for s in d.type.items])
    if r == "abs_c":
        inner = []
        for p in ps:
            body = translate_derivation_v(p)
            inner.append(b("abs_c", Abs(t.var, body.term), (body,)))
        return b("bg_c", cbv_term(t), inner)
    if r in ("es_p", "es_c"):
        body = translate_derivation_v(ps[0])
        arg = translate_derivation_v(ps[1])
        return b(r, ESub(body.term, t.var, arg.term), (body, arg))
    if r in ("app_p", "app_c", "appt_c"):
        f = translate_derivation_v(ps[0])
        arg = translate_derivation_v(ps[1])
        if is_value_es(t.fun):
            f = _strip_bang(f)
        elif r == "app_p" and f.type == N:
            f = b("dr_p", Der(f.term), (f,))
        elif r == "app_p":
            # a non-value head typed vr translates to [n]; only dr_c fits,
            # and the result falls outside cbv-relevance
            f = b("dr_c", Der(f.term), (f,))
        else:
            f = b("dr_c", Der(f.term), (f,))
        return b(r, App(f.term, arg.term), (f, arg))
    raise ValueError(f"not a V rule: {r}")


# ---------------------------------------------------------------------------
# relevance

@dataclass
class RelevanceReport:
    cbn_relevant: Optional[bool] = None
    cbv_relevant: Optional[bool] = None
    bang_relevant: Optional[bool] = None
    witness: Optional[Tuple[int, ...]] = None

    def __str__(self):
        flags = [f"{k}={v}" for k, v in (("cbn", self.cbn_relevant), ("cbv", self.cbv_relevant),
                                          ("bang", self.bang_relevant)) if v is not None]
        w = "" if self.witness is None else f" witness={list(self.witness)}"
        return " ".join(flags) + w


def _walk(d: Derivation, path=()):
    yield path, d
    for i, p in enumerate(d.premises):
        yield from _walk(p, path + (i,))


def _types_of(d: Derivation):
    yield d.type
    for _, m in d.ctx.items():
        yield m


def _first(d, bad):
    for path, node in _walk(d):
        if bad(node):
            return path
    return None


def cbn_relevant(d: Derivation) -> Optional[Tuple[int, ...]]:
    """None when cbn-relevant, else the path of the first offending node.

    A bg_p conclusion typed vl is allowed: it is the image of an untyped
    argument in an N app_p."""
    def bad(node):
        for ty in _types_of(node):
            allowed = {N, A, VL} if (node.rule == "bg_p" and ty == VL) else {N, A}
            if not set(consts_of(ty)) <= allowed:
                return True
        return False
    return _first(d, bad)


def cbv_relevant(d: Derivation) -> Optional[Tuple[int, ...]]:
    def bad(node):
        if any(A in set(consts_of(ty)) for ty in _types_of(node)):
            return True
        if node.rule == "dr_c":
            ty = node.premises[0].type
            return not (isinstance(ty, Mult) and len(ty) == 1 and isinstance(ty.items[0], Arrow))
        return False
    return _first(d, bad)


def bang_relevant(d: Derivation) -> Optional[Tuple[int, ...]]:
    return _first(d, lambda node: node.type == VR)


def relevance(d: Derivation, system: str) -> RelevanceReport:
    if system == "B":
        wn, wv = cbn_relevant(d), cbv_relevant(d)
        return RelevanceReport(cbn_relevant=wn is None, cbv_relevant=wv is None,
                               witness=wn if wn is not None else wv)
    if system == "V":
        w = bang_relevant(d)
        return RelevanceReport(bang_relevant=w is None, witness=w)
    raise ValueError("relevance is defined for B and V derivations")
