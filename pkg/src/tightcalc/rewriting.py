"""Rewrite rules, strategies and normal forms.

Three calculi share one term type.  CBN uses dB/sn closed under N contexts,
CBV uses dB/sv closed under V contexts, and the bang calculus uses dB/s!/d!
closed under surface contexts.  Every rule acts at a distance through a list
context L of explicit substitutions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .syntax import (
    Abs, App, Bang, Der, ESub, Term, Var, freshen_l, plug_l, pretty, split_l, subst,
)

Position = Tuple[str, ...]
FUN, ARG, BODY, SBODY, SARG = "fun", "arg", "body", "sbody", "sarg"


class StepKind(enum.Enum):
    dB = "dB"
    sn = "sn"
    sv = "sv"
    sBang = "s!"
    dBang = "d!"

    @property
    def multiplicative(self) -> bool:
        return self is StepKind.dB

    @property
    def tag(self) -> str:
        return "m" if self.multiplicative else "e"

    def __str__(self):
        return self.value


RULES_OF = {
    "n": (StepKind.dB, StepKind.sn),
    "v": (StepKind.dB, StepKind.sv),
    "f": (StepKind.dB, StepKind.sBang, StepKind.dBang),
}
STRATEGY_RELATION = {"dn": "n", "dv": "v", "fdet": "f"}
STRATEGY_FLAVOR = {"dn": "n", "dv": "v", "fdet": "f"}


# ---------------------------------------------------------------------------
# positions

def subterm_at(t: Term, pos: Position) -> Term:
    for sel in pos:
        t = _child(t, sel)
    return t


def _child(t, sel):
    if sel == FUN and isinstance(t, App):
        return t.fun
    if sel == ARG and isinstance(t, App):
        return t.arg
    if sel == BODY and isinstance(t, (Abs, Bang, Der)):
        return t.body
    if sel == SBODY and isinstance(t, ESub):
        return t.body
    if sel == SARG and isinstance(t, ESub):
        return t.arg
    raise ValueError(f"invalid selector {sel!r} for {pretty(t)}")


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    sel, rest = pos[0], pos[1:]
    return replace_child(t, sel, replace_at(_child(t, sel), rest, new))


def replace_child(t: Term, sel: str, new: Term) -> Term:
    if sel == FUN:
        return App(new, t.arg)
    if sel == ARG:
        return App(t.fun, new)
    if sel == SBODY:
        return ESub(new, t.var, t.arg)
    if sel == SARG:
        return ESub(t.body, t.var, new)
    if isinstance(t, Abs):
        return Abs(t.var, new)
    if isinstance(t, Bang):
        return Bang(new)
    if isinstance(t, Der):
        return Der(new)
    raise ValueError(f"invalid selector {sel!r}")


def format_position(pos: Position) -> str:
    return ".".join(pos) if pos else "root"


def parse_position(text: str) -> Position:
    return () if text in ("", "root") else tuple(text.split("."))


# ---------------------------------------------------------------------------
# predicates

def is_abs(t: Term) -> bool:
    return isinstance(split_l(t)[0], Abs)


def is_val(t: Term) -> bool:
    """CBV value under a list context: L<x> or L<\\x.t>."""
    return isinstance(split_l(t)[0], (Var, Abs))


def is_bang_val(t: Term) -> bool:
    """Value of the bang calculus: L<!u>."""
    return isinstance(split_l(t)[0], Bang)


# ---------------------------------------------------------------------------
# root rules

def root_rule(t: Term, rule: StepKind) -> Optional[Term]:
    if rule is StepKind.dB:
        if isinstance(t, App):
            core, _ = split_l(t.fun)
            if isinstance(core, Abs):
                core, layers = split_l(freshen_l(t.fun, t.arg.fv))
                return plug_l(layers, ESub(core.body, core.var, t.arg))
        return None
    if rule is StepKind.sn:
        if isinstance(t, ESub):
            return subst(t.body, t.var, t.arg)
        return None
    if rule in (StepKind.sv, StepKind.sBang):
        if not isinstance(t, ESub):
            return None
        core, _ = split_l(t.arg)
        if rule is StepKind.sv and isinstance(core, (Var, Abs)):
            core, layers = split_l(freshen_l(t.arg, t.body.fv))
            return plug_l(layers, subst(t.body, t.var, core))
        if rule is StepKind.sBang and isinstance(core, Bang):
            core, layers = split_l(freshen_l(t.arg, t.body.fv))
            return plug_l(layers, subst(t.body, t.var, core.body))
        return None
    if rule is StepKind.dBang:
        if isinstance(t, Der):
            core, layers = split_l(t.body)
            if isinstance(core, Bang):
                return plug_l(layers, core.body)
        return None
    raise ValueError(rule)


# ---------------------------------------------------------------------------
# deterministic strategies

Step = Tuple[Term, StepKind, Position]


def step(t: Term, strategy: str) -> Optional[Step]:
    """One step of dn, dv or fdet; ``None`` iff ``t`` is normal for it."""
    fn = _STRATEGIES[strategy]
    r = fn(t, [])
    if r is None:
        return None
    new, kind, path = r
    return new, kind, tuple(path)


def _dn(t, path):
    if isinstance(t, App):
        r = root_rule(t, StepKind.dB)
        if r is not None:
            return r, StepKind.dB, path
        inner = _dn(t.fun, path + [FUN])
        if inner is not None:
            return App(inner[0], t.arg), inner[1], inner[2]
        return None
    if isinstance(t, ESub):
        return root_rule(t, StepKind.sn), StepKind.sn, path
    if isinstance(t, Abs):
        inner = _dn(t.body, path + [BODY])
        if inner is not None:
            return Abs(t.var, inner[0]), inner[1], inner[2]
    return None


def _dv(t, path):
    if isinstance(t, App):
        r = root_rule(t, StepKind.dB)
        if r is not None:
            return r, StepKind.dB, path
        inner = _dv(t.fun, path + [FUN])
        if inner is not None:
            return App(inner[0], t.arg), inner[1], inner[2]
        if classify_v(t.fun) in (VarV, NeutralV):
            inner = _dv(t.arg, path + [ARG])
            if inner is not None:
                return App(t.fun, inner[0]), inner[1], inner[2]
        return None
    if isinstance(t, ESub):
        r = root_rule(t, StepKind.sv)
        if r is not None:
            return r, StepKind.sv, path
        inner = _dv(t.arg, path + [SARG])
        if inner is not None:
            return ESub(t.body, t.var, inner[0]), inner[1], inner[2]
        if classify_v(t.arg) is NeutralV:
            inner = _dv(t.body, path + [SBODY])
            if inner is not None:
                return ESub(inner[0], t.var, t.arg), inner[1], inner[2]
    return None


def _fdet(t, path):
    for rule in (StepKind.dB, StepKind.sBang, StepKind.dBang):
        r = root_rule(t, rule)
        if r is not None:
            return r, rule, path
    if isinstance(t, App):
        inner = _fdet(t.fun, path + [FUN])
        if inner is not None:
            return App(inner[0], t.arg), inner[1], inner[2]
        inner = _fdet(t.arg, path + [ARG])
        if inner is not None:
            return App(t.fun, inner[0]), inner[1], inner[2]
    elif isinstance(t, Der):
        inner = _fdet(t.body, path + [BODY])
        if inner is not None:
            return Der(inner[0]), inner[1], inner[2]
    elif isinstance(t, Abs):
        inner = _fdet(t.body, path + [BODY])
        if inner is not None:
            return Abs(t.var, inner[0]), inner[1], inner[2]
    elif isinstance(t, ESub):
        inner = _fdet(t.body, path + [SBODY])
        if inner is not None:
            return ESub(inner[0], t.var, t.arg), inner[1], inner[2]
        inner = _fdet(t.arg, path + [SARG])
        if inner is not None:
            return ESub(t.body, t.var, inner[0]), inner[1], inner[2]
    return None


_STRATEGIES = {"dn": _dn, "dv": _dv, "fdet": _fdet}


# ---------------------------------------------------------------------------
# non-deterministic relations

def reducts(t: Term, relation: str) -> List[Step]:
    """All one-step reducts of ``t`` for the relation n, v or f."""
    rules = RULES_OF[relation]
    out = []
    seen = set()
    for pos, sub in _redex_positions(t, relation, ()):
        for rule in rules:
            r = root_rule(sub, rule)
            if r is not None:
                new = replace_at(t, pos, r)
                if (pos, new) not in seen:
                    seen.add((pos, new))
                    out.append((new, rule, pos))
    return out


def _redex_positions(t, relation, pos):
    yield pos, t
    if isinstance(t, App):
        yield from _redex_positions(t.fun, relation, pos + (FUN,))
        if relation != "n":
            yield from _redex_positions(t.arg, relation, pos + (ARG,))
    elif isinstance(t, Abs):
        if relation != "v":
            yield from _redex_positions(t.body, relation, pos + (BODY,))
    elif isinstance(t, ESub):
        yield from _redex_positions(t.body, relation, pos + (SBODY,))
        if relation != "n":
            yield from _redex_positions(t.arg, relation, pos + (SARG,))
    elif isinstance(t, Der):
        if relation == "f":
            yield from _redex_positions(t.body, relation, pos + (BODY,))


# ---------------------------------------------------------------------------
# traces and normalisation

@dataclass(frozen=True)
class TraceStep:
    position: Position
    kind: StepKind
    before: Term
    after: Term


@dataclass
class Trace:
    initial: Term
    steps: List[TraceStep] = field(default_factory=list)

    @property
    def m(self) -> int:
        return sum(1 for s in self.steps if s.kind.multiplicative)

    @property
    def e(self) -> int:
        return sum(1 for s in self.steps if not s.kind.multiplicative)

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.initial

    def count(self, kind: StepKind) -> int:
        return sum(1 for s in self.steps if s.kind is kind)

    def log(self) -> str:
        lines = [
            f"{format_position(s.position)} {s.kind.tag}:{s.kind} {pretty(s.before)} ~> {pretty(s.after)}"
            for s in self.steps
        ]
        lines.append(f"m={self.m} e={self.e}")
        return "\n".join(lines)


@dataclass
class Normal:
    trace: Trace
    nf: Term


@dataclass
class FuelExhausted:
    trace: Trace


def normalize(t: Term, strategy: str, fuel: int = 1000) -> Union[Normal, FuelExhausted]:
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    trace = Trace(t)
    cur = t
    for _ in range(fuel):
        r = step(cur, strategy)
        if r is None:
            return Normal(trace, cur)
        new, kind, pos = r
        trace.steps.append(TraceStep(pos, kind, cur, new))
        cur = new
    if step(cur, strategy) is None:
        return Normal(trace, cur)
    return FuelExhausted(trace)


# ---------------------------------------------------------------------------
# sizes

def size(t: Term, flavor: str) -> int:
    if flavor == "n":
        return _size_n(t)
    if flavor == "v":
        return _size_v(t)
    if flavor == "f":
        return _size_f(t)
    raise ValueError(flavor)


def _size_n(t):
    if isinstance(t, Var):
        return 0
    if isinstance(t, (Abs, App)):
        return _size_n(t.body if isinstance(t, Abs) else t.fun) + 1
    if isinstance(t, ESub):
        return _size_n(t.body)
    raise ValueError("bang constructs have no n-size")


def _size_v(t):
    if isinstance(t, (Var, Abs)):
        return 0
    if isinstance(t, App):
        return _size_v(t.fun) + _size_v(t.arg) + 1
    if isinstance(t, ESub):
        return _size_v(t.body) + _size_v(t.arg)
    raise ValueError("bang constructs have no v-size")


def _size_f(t):
    if isinstance(t, (Var, Bang)):
        return 0
    if isinstance(t, Abs):
        return 1 + _size_f(t.body)
    if isinstance(t, App):
        return 1 + _size_f(t.fun) + _size_f(t.arg)
    if isinstance(t, ESub):
        return _size_f(t.body) + _size_f(t.arg)
    return _size_f(t.body)


# ---------------------------------------------------------------------------
# normal-form grammars

class NormClass(enum.Enum):
    NeutralN = "ne_n"
    NormalN = "no_n"
    VarV = "vr_v"
    NeutralV = "ne_v"
    NormalV = "no_v"
    NeScf = "ne_scf"
    NaScf = "na_scf"
    NbScf = "nb_scf"
    NoScf = "no_scf"
    ClashNormal = "clash"
    Reducible = "reducible"


NeutralN, NormalN = NormClass.NeutralN, NormClass.NormalN
VarV, NeutralV, NormalV = NormClass.VarV, NormClass.NeutralV, NormClass.NormalV
NeScf, NaScf, NbScf, NoScf = NormClass.NeScf, NormClass.NaScf, NormClass.NbScf, NormClass.NoScf
ClashNormal, Reducible = NormClass.ClashNormal, NormClass.Reducible


def classify_n(t: Term) -> NormClass:
    if _ne_n(t):
        return NeutralN
    if _no_n(t):
        return NormalN
    return Reducible


def _ne_n(t):
    while isinstance(t, App):
        t = t.fun
    return isinstance(t, Var)


def _no_n(t):
    while isinstance(t, Abs):
        t = t.body
    return _ne_n(t)


def classify_v(t: Term) -> NormClass:
    c = _class_v(t)
    return Reducible if c is None else c


def _class_v(t):
    """Most specific CBV class (vr_v, ne_v, no_v) or None."""
    if isinstance(t, Var):
        return VarV
    if isinstance(t, Abs):
        return NormalV
    if isinstance(t, App):
        f = _class_v(t.fun)
        if f in (VarV, NeutralV) and _class_v(t.arg) is not None:
            return NeutralV
        return None
    if isinstance(t, ESub):
        if _class_v(t.arg) is not NeutralV:
            return None
        b = _class_v(t.body)
        return b
    return None


def classify_scf(t: Term) -> NormClass:
    c = _class_scf(t)
    if c is not None:
        return c
    return Reducible if step(t, "fdet") is not None else ClashNormal


def in_no_scf(t: Term) -> bool:
    return _class_scf(t) is not None


def _class_scf(t):
    """ne_scf, then na_scf, then nb_scf; None when outside no_scf."""
    if _ne_scf(t):
        return NeScf
    if _na_scf(t):
        return NaScf
    if _nb_scf(t):
        return NbScf
    return None


def _ne_scf(t):
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return _ne_scf(t.fun) and _na_scf(t.arg)
    if isinstance(t, Der):
        return _ne_scf(t.body)
    if isinstance(t, ESub):
        return _ne_scf(t.body) and _ne_scf(t.arg)
    return False


def _na_scf(t):
    if isinstance(t, Bang):
        return True
    if isinstance(t, ESub):
        return _na_scf(t.body) and _ne_scf(t.arg)
    return _ne_scf(t)


def _nb_scf(t):
    if isinstance(t, Abs):
        return _class_scf(t.body) is not None
    if isinstance(t, ESub):
        return _nb_scf(t.body) and _ne_scf(t.arg)
    return _ne_scf(t)


def classify(t: Term, flavor: str) -> NormClass:
    if flavor == "n":
        return classify_n(t)
    if flavor == "v":
        return classify_v(t)
    if flavor == "scf":
        return classify_scf(t)
    raise ValueError(flavor)


def is_clash(t: Term) -> bool:
    """Root clash: L<!t> u, t[y := L<\\x.u>], der(L<\\x.u>) or t L<\\x.u>."""
    if isinstance(t, App):
        return isinstance(split_l(t.fun)[0], Bang) or isinstance(split_l(t.arg)[0], Abs)
    if isinstance(t, ESub):
        return isinstance(split_l(t.arg)[0], Abs)
    if isinstance(t, Der):
        return isinstance(split_l(t.body)[0], Abs)
    return False


# ---------------------------------------------------------------------------
# exhaustive path enumeration

@dataclass
class PathSummary:
    """Every maximal path from a term: normal forms with their (m, e) pairs."""
    outcomes: dict
    paths: int

    @property
    def normal_forms(self):
        return list(self.outcomes)

    @property
    def lengths(self):
        return {me for mes in self.outcomes.values() for me in mes}


@dataclass
class CapExceeded:
    cap: int
    reason: str = "path cap"


def enumerate_paths(t: Term, relation: str = "f", cap: int = 10_000,
                    max_depth: int = 200) -> Union[PathSummary, CapExceeded]:
    """Follow every reduction path of ``relation`` from ``t``.

    Paths are counted exactly but explored once per distinct intermediate
    term (alpha-equal reducts share their continuations), so the cost is the
    size of the reduct graph rather than the number of paths.
    """
    memo = {}

    class _Stop(Exception):
        pass

    def go(u: Term, depth: int):
        hit = memo.get(u)
        if hit is not None:
            return hit
        if depth > max_depth:
            raise _Stop("depth")
        rs = reducts(u, relation)
        if not rs:
            res = ({u: frozenset({(0, 0)})}, 1)
        else:
            outcomes, paths = {}, 0
            for new, kind, _ in rs:
                sub, n = go(new, depth + 1)
                paths += n
                if paths > cap:
                    raise _Stop("path cap")
                dm, de = (1, 0) if kind.multiplicative else (0, 1)
                for nf, mes in sub.items():
                    outcomes.setdefault(nf, set()).update((m + dm, e + de) for m, e in mes)
            res = ({k: frozenset(v) for k, v in outcomes.items()}, paths)
        memo[u] = res
        return res

    try:
        outcomes, paths = go(t, 0)
    except _Stop as exc:
        return CapExceeded(cap, str(exc))
    return PathSummary({k: set(v) for k, v in outcomes.items()}, paths)
