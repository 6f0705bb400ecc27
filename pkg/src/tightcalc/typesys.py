"""Types, contexts and derivations for the tight systems N, V and B.

A derivation stores its full conclusion (context, subject, type, counters)
on every node.  The checker recomputes each conclusion from the premises
through the same builder that constructs derivations, so anything that
builds derivations through :func:`build` is correct by construction and
anything loaded from JSON is validated node by node.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .syntax import Abs, App, Bang, Der, ESub, Term, Var, alpha_key, parse, pretty

# ---------------------------------------------------------------------------
# types

CONST_ORDER = ("n", "a", "vl", "vr")


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Type):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Mult(Type):
    items: Tuple[Type, ...] = ()

    @staticmethod
    def of(items: Iterable[Type]) -> "Mult":
        return Mult(tuple(sorted(items, key=type_key)))

    def __add__(self, other: "Mult") -> "Mult":
        return Mult.of(self.items + other.items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    def __str__(self):
        return "[" + ", ".join(map(str, self.items)) + "]"


@dataclass(frozen=True)
class Arrow(Type):
    dom: Mult
    cod: Type

    def __str__(self):
        cod = f"({self.cod})" if isinstance(self.cod, Arrow) else str(self.cod)
        return f"{self.dom} -> {cod}"


N, A, VL, VR = Const("n"), Const("a"), Const("vl"), Const("vr")
EMPTY = Mult()


def type_key(t: Type):
    if isinstance(t, Const):
        return (0, CONST_ORDER.index(t.name))
    if isinstance(t, Mult):
        return (1, tuple(type_key(i) for i in t.items))
    return (2, type_key(t.dom), type_key(t.cod))


TIGHT = {"N": (N, A), "V": (N, VL, VR), "B": (N, A, VL)}
CALCULUS = {"N": "lambda-es", "V": "lambda-es", "B": "bang"}


def consts_of(t: Type):
    if isinstance(t, Const):
        yield t
    elif isinstance(t, Mult):
        for i in t.items:
            yield from consts_of(i)
    else:
        yield from consts_of(t.dom)
        yield from consts_of(t.cod)


# ---------------------------------------------------------------------------
# contexts

class Context:
    """Finite map from names to non-empty multitypes."""

    __slots__ = ("_m", "_hash")

    def __init__(self, mapping: Optional[Dict[str, Mult]] = None):
        self._m = {k: v for k, v in (mapping or {}).items() if v}
        self._hash = None

    @staticmethod
    def single(x: str, m: Mult) -> "Context":
        return Context({x: m})

    def get(self, x: str) -> Mult:
        return self._m.get(x, EMPTY)

    def __getitem__(self, x):
        return self.get(x)

    def __add__(self, other: "Context") -> "Context":
        out = dict(self._m)
        for k, v in other._m.items():
            out[k] = out[k] + v if k in out else v
        return Context(out)

    def minus(self, x: str) -> "Context":
        if x not in self._m:
            return self
        return Context({k: v for k, v in self._m.items() if k != x})

    def rename(self, a: str, b: str) -> "Context":
        if a not in self._m:
            return self
        out = {k: v for k, v in self._m.items() if k != a}
        moved = self._m[a]
        out[b] = out[b] + moved if b in out else moved
        return Context(out)

    def items(self):
        return sorted(self._m.items())

    def domain(self):
        return set(self._m)

    def __eq__(self, other):
        return isinstance(other, Context) and self._m == other._m

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.items()))
        return self._hash

    def __str__(self):
        return ", ".join(f"{k}:{v}" for k, v in self.items())

    __repr__ = __str__


def ctx_sum(ctxs: Iterable[Context]) -> Context:
    out = Context()
    for c in ctxs:
        out = out + c
    return out


# ---------------------------------------------------------------------------
# tightness

def tight(x, system: str) -> bool:
    if isinstance(x, Derivation):
        return isinstance(x.type, Const) and tight(x.ctx, system) and tight(x.type, system)
    if isinstance(x, Context):
        return all(tight(m, system) for _, m in x.items())
    if isinstance(x, Mult):
        return all(isinstance(i, Const) and i in TIGHT[system] for i in x.items)
    if isinstance(x, Const):
        return x in TIGHT[system]
    return False


# ---------------------------------------------------------------------------
# derivations

RULES = {
    "N": ("app_p", "abs_p", "var_c", "app_c", "abs_c", "es_c"),
    "V": ("var_p", "val_p", "abs_p", "app_p", "es_p", "var_c", "app_c", "appt_c", "abs_c", "es_c"),
    "B": ("app_p", "abs_p", "bg_p", "dr_p", "es_p", "var_c", "app_c", "appt_c", "abs_c", "bg_c", "dr_c", "es_c"),
}

SUBJECT = {
    "var_p": Var, "val_p": Var, "var_c": Var,
    "app_p": App, "app_c": App, "appt_c": App,
    "abs_p": Abs, "abs_c": Abs,
    "es_p": ESub, "es_c": ESub,
    "bg_p": Bang, "bg_c": Bang,
    "dr_p": Der, "dr_c": Der,
}

AXIOMS = {"var_p", "val_p", "var_c", "bg_p"}


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    ctx: Context
    term: Term
    type: Type
    m: int
    e: int
    s: int
    premises: Tuple["Derivation", ...] = ()

    @property
    def counters(self) -> Tuple[int, int, int]:
        return (self.m, self.e, self.s)

    def __str__(self):
        return f"{self.ctx} |- {pretty(self.term)} : {self.type} ({self.m},{self.e},{self.s})"

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def render(self, indent: int = 0) -> str:
        lines = [" " * indent + f"{self.rule}: {self}"]
        for p in self.premises:
            lines.append(p.render(indent + 2))
        return "\n".join(lines)


class RuleError(Exception):
    """A rule schema is violated while building or checking a node."""


# ---------------------------------------------------------------------------
# builder

def build(system: str, rule: str, term: Term, premises: Sequence[Derivation] = (),
          ty: Optional[Type] = None) -> Derivation:
    """Instantiate ``rule`` on ``term`` from ``premises``; raises RuleError.

    Axioms that need a type take it through ``ty``: var_c in N and B takes
    the assigned type sigma, var_c in V the multitype M.
    """
    if rule not in RULES[system]:
        raise RuleError(f"unknown rule {rule} for system {system}")
    if not isinstance(term, SUBJECT[rule]):
        raise RuleError(f"{rule} cannot type {pretty(term)}")
    ps = tuple(premises)
    fn = _BUILDERS[rule]
    ctx, typ, m, e, s = fn(system, term, ps, ty)
    return Derivation(rule, ctx, term, typ, m, e, s, ps)


def _need(cond: bool, msg: str):
    if not cond:
        raise RuleError(msg)


def _arity(ps, n, rule):
    _need(len(ps) == n, f"{rule} expects {n} premise(s), got {len(ps)}")


def _sum3(ps):
    return sum(p.m for p in ps), sum(p.e for p in ps), sum(p.s for p in ps)


def _b_var_c(system, t, ps, ty):
    _arity(ps, 0, "var_c")
    _need(ty is not None, "var_c needs a type")
    if system == "V":
        _need(isinstance(ty, Mult), "var_c in V types a variable with a multitype")
        return Context.single(t.name, ty), ty, 0, 1, 0
    return Context.single(t.name, Mult((ty,))), ty, 0, 0, 0


def _b_var_p(system, t, ps, ty):
    _arity(ps, 0, "var_p")
    return Context.single(t.name, Mult((VR,))), VR, 0, 0, 0


def _b_val_p(system, t, ps, ty):
    _arity(ps, 0, "val_p")
    return Context(), VL, 0, 0, 0


def _b_bg_p(system, t, ps, ty):
    _arity(ps, 0, "bg_p")
    return Context(), VL, 0, 0, 0


def _b_abs_p(system, t, ps, ty):
    if system == "V":
        _arity(ps, 0, "abs_p")
        return Context(), VL, 0, 0, 0
    _arity(ps, 1, "abs_p")
    (d,) = ps
    _need(tight(d.type, system), "abs_p body type must be tight")
    _need(tight(d.ctx.get(t.var), system), "abs_p needs a tight type for the binder")
    return d.ctx.minus(t.var), A, d.m, d.e, d.s + 1


def _b_app_p(system, t, ps, ty):
    if system == "N":
        _arity(ps, 1, "app_p")
        (d,) = ps
        _need(d.type == N, "app_p function must have type n")
        return d.ctx, N, d.m, d.e, d.s + 1
    _arity(ps, 2, "app_p")
    f, a = ps
    if system == "V":
        _need(f.type in (N, VR), "app_p function must have type n or vr")
        _need(a.type in (N, VL), "app_p argument must have type n or vl")
    else:
        _need(f.type == N, "app_p function must have type n")
        _need(a.type in (N, VL), "app_p argument must have type n or vl")
    return f.ctx + a.ctx, N, f.m + a.m, f.e + a.e, f.s + a.s + 1


def _b_app_c(system, t, ps, ty):
    _need(len(ps) >= 1, "app_c needs a function premise")
    f, args = ps[0], ps[1:]
    if system == "N":
        _need(isinstance(f.type, Arrow), "app_c function must have an arrow type")
        _need(f.type.dom == Mult.of(a.type for a in args),
              "app_c argument types must form the arrow domain")
        m, e, s = _sum3(args)
        return f.ctx + ctx_sum(a.ctx for a in args), f.type.cod, 1 + f.m + m, 1 + f.e + e, f.s + s
    _arity(ps, 2, "app_c")
    (a,) = args
    arrow = _fun_arrow(system, f, "app_c")
    _need(a.type == arrow.dom, "app_c argument type must equal the arrow domain")
    de = -1 if system == "V" else 0
    return f.ctx + a.ctx, arrow.cod, f.m + a.m + 1, f.e + a.e + de, f.s + a.s


def _b_appt_c(system, t, ps, ty):
    _arity(ps, 2, "appt_c")
    f, a = ps
    arrow = _fun_arrow(system, f, "appt_c")
    _need(a.type == N, "appt_c argument must have type n")
    _need(tight(arrow.dom, system), "appt_c arrow domain must be tight")
    de = -1 if system == "V" else 0
    return f.ctx + a.ctx, arrow.cod, f.m + a.m + 1, f.e + a.e + de, f.s + a.s


def _fun_arrow(system, f, rule) -> Arrow:
    if system == "V":
        _need(isinstance(f.type, Mult) and len(f.type) == 1 and isinstance(f.type.items[0], Arrow),
              f"{rule} function must have type [M -> tau]")
        return f.type.items[0]
    _need(isinstance(f.type, Arrow), f"{rule} function must have an arrow type")
    return f.type


def _b_abs_c(system, t, ps, ty):
    if system == "V":
        m, e, s = _sum3(ps)
        typ = Mult.of(Arrow(d.ctx.get(t.var), d.type) for d in ps)
        return ctx_sum(d.ctx.minus(t.var) for d in ps), typ, m, 1 + e, s
    _arity(ps, 1, "abs_c")
    (d,) = ps
    return d.ctx.minus(t.var), Arrow(d.ctx.get(t.var), d.type), d.m, d.e, d.s


def _b_bg_c(system, t, ps, ty):
    m, e, s = _sum3(ps)
    return ctx_sum(d.ctx for d in ps), Mult.of(d.type for d in ps), m, 1 + e, s


def _b_dr_p(system, t, ps, ty):
    _arity(ps, 1, "dr_p")
    (d,) = ps
    _need(d.type == N, "dr_p premise must have type n")
    return d.ctx, N, d.m, d.e, d.s


def _b_dr_c(system, t, ps, ty):
    _arity(ps, 1, "dr_c")
    (d,) = ps
    _need(isinstance(d.type, Mult) and len(d.type) == 1, "dr_c premise must have type [sigma]")
    return d.ctx, d.type.items[0], d.m, d.e, d.s


def _b_es_p(system, t, ps, ty):
    _arity(ps, 2, "es_p")
    b, a = ps
    _need(a.type == N, "es_p argument must have type n")
    _need(tight(b.ctx.get(t.var), system), "es_p needs a tight type for the substituted variable")
    return b.ctx.minus(t.var) + a.ctx, b.type, b.m + a.m, b.e + a.e, b.s + a.s


def _b_es_c(system, t, ps, ty):
    _need(len(ps) >= 1, "es_c needs a body premise")
    b, args = ps[0], ps[1:]
    if system == "N":
        _need(b.ctx.get(t.var) == Mult.of(a.type for a in args),
              "es_c argument types must form the type of the substituted variable")
        m, e, s = _sum3(args)
        return (b.ctx.minus(t.var) + ctx_sum(a.ctx for a in args), b.type,
                b.m + m, 1 + b.e + e, b.s + s)
    _arity(ps, 2, "es_c")
    (a,) = args
    _need(a.type == b.ctx.get(t.var), "es_c argument type must equal the type of the substituted variable")
    return b.ctx.minus(t.var) + a.ctx, b.type, b.m + a.m, b.e + a.e, b.s + a.s


_BUILDERS = {
    "var_c": _b_var_c, "var_p": _b_var_p, "val_p": _b_val_p,
    "bg_p": _b_bg_p, "abs_p": _b_abs_p, "app_p": _b_app_p,
    "app_c": _b_app_c, "appt_c": _b_appt_c, "abs_c": _b_abs_c,
    "bg_c": _b_bg_c, "dr_p": _b_dr_p, "dr_c": _b_dr_c,
    "es_p": _b_es_p, "es_c": _b_es_c,
}


# ---------------------------------------------------------------------------
# premise roles

def premise_children(d: Derivation) -> List[Term]:
    """The subterm each premise of ``d`` must type, in order."""
    t = d.term
    k = len(d.premises)
    if isinstance(t, App):
        return [t.fun] + [t.arg] * (k - 1)
    if isinstance(t, ESub):
        return [t.body] + [t.arg] * (k - 1)
    if isinstance(t, (Abs, Bang, Der)):
        return [t.body] * k
    return []


def premise_selectors(d: Derivation) -> List[str]:
    t = d.term
    k = len(d.premises)
    if isinstance(t, App):
        return ["fun"] + ["arg"] * (k - 1)
    if isinstance(t, ESub):
        return ["sbody"] + ["sarg"] * (k - 1)
    return ["body"] * k


# ---------------------------------------------------------------------------
# checker

@dataclass(frozen=True)
class Ok:
    def __bool__(self):
        return True

    def __str__(self):
        return "ok"


@dataclass(frozen=True)
class RuleViolation:
    path: Tuple[int, ...]
    reason: str

    def __bool__(self):
        return False

    def __str__(self):
        where = "root" if not self.path else "root." + ".".join(map(str, self.path))
        return f"rule violation at {where}: {self.reason}"


@dataclass(frozen=True)
class NegativeCounter(RuleViolation):
    def __str__(self):
        return "negative counter: " + RuleViolation.__str__(self)


CheckResult = Union[Ok, RuleViolation]


def check_derivation(d: Derivation, system: str) -> CheckResult:
    return _check(d, system, ())


def _check(d, system, path) -> CheckResult:
    if d.rule not in RULES[system]:
        return RuleViolation(path, f"unknown rule {d.rule} for system {system}")
    for i, p in enumerate(d.premises):
        r = _check(p, system, path + (i,))
        if not r:
            return r
    for c in consts_of(d.type):
        if c not in TIGHT[system]:
            return RuleViolation(path, f"constant {c} not allowed in {system}")
    for _, mt in d.ctx.items():
        for c in consts_of(mt):
            if c not in TIGHT[system]:
                return RuleViolation(path, f"constant {c} not allowed in {system}")
    if CALCULUS[system] == "lambda-es" and _has_bang(d.term):
        return RuleViolation(path, "bang constructs are not part of this calculus")
    if not isinstance(d.term, SUBJECT[d.rule]):
        return RuleViolation(path, f"{d.rule} cannot type {pretty(d.term)}")
    for p, child in zip(d.premises, premise_children(d)):
        if p.term != child:
            return RuleViolation(path, f"premise subject {pretty(p.term)} is not {pretty(child)}")
    try:
        ref = build(system, d.rule, d.term, d.premises, ty=d.type if d.rule in AXIOMS else None)
    except RuleError as exc:
        return RuleViolation(path, str(exc))
    if ref.ctx != d.ctx:
        return RuleViolation(path, f"context should be {{{ref.ctx}}}, found {{{d.ctx}}}")
    if ref.type != d.type:
        return RuleViolation(path, f"type should be {ref.type}, found {d.type}")
    if min(ref.counters) < 0 or min(d.counters) < 0:
        return NegativeCounter(path, f"counters {d.counters}, schema gives {ref.counters}")
    if ref.counters != d.counters:
        return RuleViolation(path, f"counters should be {ref.counters}, found {d.counters}")
    return Ok()


def _has_bang(t):
    if isinstance(t, (Bang, Der)):
        return True
    if isinstance(t, Var):
        return False
    if isinstance(t, Abs):
        return _has_bang(t.body)
    if isinstance(t, App):
        return _has_bang(t.fun) or _has_bang(t.arg)
    return _has_bang(t.body) or _has_bang(t.arg)


# ---------------------------------------------------------------------------
# census

def rule_census_counters(d: Derivation, system: str) -> Tuple[int, int, int]:
    c = Counter(n.rule for n in d.nodes())
    if system == "N":
        return c["app_c"], c["app_c"] + c["es_c"], c["app_p"] + c["abs_p"]
    if system == "B":
        return c["app_c"] + c["appt_c"], c["bg_c"], c["app_p"] + c["abs_p"]
    if system == "V":
        apps = c["app_c"] + c["appt_c"]
        return apps, c["var_c"] + c["abs_c"] - apps, c["app_p"]
    raise ValueError(system)


# ---------------------------------------------------------------------------
# alpha-equality of derivations

_MULTISET_GROUPS = {("N", "app_c"), ("N", "es_c"), ("V", "abs_c"), ("B", "bg_c")}


def derivation_key(d: Derivation, env: Optional[dict] = None):
    """Canonical key: invariant under binder renaming and under permutation
    of premises indexed by a multiset."""
    env = env or {}
    ctx = tuple(sorted((repr(env.get(k, k)), type_key(v)) for k, v in d.ctx.items()))
    t = d.term
    sub_env = env
    if isinstance(t, (Abs, ESub)):
        sub_env = {**env, t.var: ("bound", len(env))}
    keys = []
    for sel, p in zip(premise_selectors(d), d.premises):
        keys.append(derivation_key(p, sub_env if sel in ("body", "sbody") else env))
    head, rest = keys[:1], keys[1:]
    if isinstance(t, (Abs, Bang)):
        head, rest = [], keys
    rest = sorted(rest, key=repr)
    return (d.rule, ctx, alpha_key(t, env), type_key(d.type), d.counters, tuple(head), tuple(rest))


def derivation_alpha_eq(a: Derivation, b: Derivation) -> bool:
    return derivation_key(a) == derivation_key(b)


# ---------------------------------------------------------------------------
# JSON

def type_to_json(t: Type):
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Mult):
        return {"mult": [type_to_json(i) for i in t.items]}
    return {"arrow": {"dom": [type_to_json(i) for i in t.dom.items], "cod": type_to_json(t.cod)}}


def type_from_json(obj) -> Type:
    if isinstance(obj, str):
        if obj not in CONST_ORDER:
            raise ValueError(f"unknown type constant {obj!r}")
        return Const(obj)
    if isinstance(obj, dict) and set(obj) == {"mult"}:
        return Mult.of(type_from_json(i) for i in obj["mult"])
    if isinstance(obj, dict) and set(obj) == {"arrow"}:
        a = obj["arrow"]
        return Arrow(Mult.of(type_from_json(i) for i in a["dom"]), type_from_json(a["cod"]))
    raise ValueError(f"malformed type {obj!r}")


def to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "ctx": {k: [type_to_json(i) for i in v.items] for k, v in d.ctx.items()},
        "term": pretty(d.term),
        "type": type_to_json(d.type),
        "counters": [d.m, d.e, d.s],
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(obj, system: str) -> Derivation:
    try:
        ctx = Context({k: Mult.of(type_from_json(i) for i in v) for k, v in obj["ctx"].items()})
        m, e, s = obj["counters"]
        return Derivation(
            obj["rule"], ctx, parse(obj["term"], CALCULUS[system]), type_from_json(obj["type"]),
            int(m), int(e), int(s), tuple(from_json(p, system) for p in obj.get("premises", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed derivation node: {exc}") from exc


def dumps(d: Derivation, **kw) -> str:
    return json.dumps(to_json(d), **kw)


def loads(text: str, system: str) -> Derivation:
    return from_json(json.loads(text), system)


def parse_type(text: str) -> Type:
    """Parse ``n``, ``[t, ...]`` and ``M -> t`` (right associative)."""
    toks = text.replace("[", " [ ").replace("]", " ] ").replace(",", " , ").replace("->", " -> ").split()
    pos = 0

    def ty():
        nonlocal pos
        left = atom()
        if pos < len(toks) and toks[pos] == "->":
            if not isinstance(left, Mult):
                raise ValueError("arrow domain must be a multitype")
            pos += 1
            return Arrow(left, ty())
        return left

    def atom():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok == "[":
            items = []
            if toks[pos] != "]":
                items.append(ty())
                while toks[pos] == ",":
                    pos += 1
                    items.append(ty())
            if toks[pos] != "]":
                raise ValueError("expected ]")
            pos += 1
            return Mult.of(items)
        if tok == "(":
            inner = ty()
            pos += 1
            return inner
        if tok in CONST_ORDER:
            return Const(tok)
        raise ValueError(f"unexpected {tok!r}")

    toks = [t for tok in toks for t in (["("] if tok == "(" else [tok])]
    out = ty()
    if pos != len(toks):
        raise ValueError("trailing input in type")
    return out
