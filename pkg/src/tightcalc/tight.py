"""Tight derivation synthesis by exact subject expansion.

The normal form of a term is typed tightly, then the reduction trace is
replayed backwards.  Each backward step rebuilds the derivation around the
redex with the construction from the matching subject-expansion proof,
using anti-substitution (and, in V, merging of value derivations).  The
forward direction (subject reduction and substitution) is implemented too
so that the two can be checked against each other.

Derivations are always rebuilt through :func:`typesys.build`, so counters
and contexts follow the rule schemas and never need patching by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

from .rewriting import (
    RULES_OF, FuelExhausted, Position, StepKind, Trace, TraceStep,
    classify, in_no_scf, normalize, root_rule, subterm_at,
)
from .syntax import (
    Abs, App, Bang, Der, ESub, Term, Var, fresh, freshen_l, pretty, rename, split_l, subst,
)
from .typesys import (
    AXIOMS, EMPTY, N, VR, Derivation, Mult, build, premise_selectors,
)

STRATEGY = {"N": "dn", "V": "dv", "B": "fdet"}
FLAVOR = {"N": "n", "V": "v", "B": "f"}
NF_FLAVOR = {"N": "n", "V": "v", "B": "scf"}


class TightError(Exception):
    pass


class NotNormal(TightError):
    pass


class ClashNormal(TightError):
    pass


class NonExpandableShape(TightError):
    pass


class StepMismatch(TightError):
    pass


class ArityMismatch(TightError):
    pass


class SkeletonMismatch(TightError):
    pass


class NotAValue(TightError):
    pass


# ---------------------------------------------------------------------------
# small helpers

def syn_eq(a: Term, b: Term) -> bool:
    """Syntactic equality, binder names included."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return a.name == b.name
    if isinstance(a, App):
        return syn_eq(a.fun, b.fun) and syn_eq(a.arg, b.arg)
    if isinstance(a, Abs):
        return a.var == b.var and syn_eq(a.body, b.body)
    if isinstance(a, ESub):
        return a.var == b.var and syn_eq(a.body, b.body) and syn_eq(a.arg, b.arg)
    return syn_eq(a.body, b.body)


def _retype(system, d: Derivation, term: Term, premises: Sequence[Derivation]) -> Derivation:
    return build(system, d.rule, term, premises, ty=d.type if d.rule in AXIOMS else None)


def _children(t: Term):
    if isinstance(t, App):
        return {"fun": t.fun, "arg": t.arg}
    if isinstance(t, ESub):
        return {"sbody": t.body, "sarg": t.arg}
    if isinstance(t, Var):
        return {}
    return {"body": t.body}


def _assemble(t: Term, ch: dict) -> Term:
    if isinstance(t, App):
        return App(ch["fun"], ch["arg"])
    if isinstance(t, ESub):
        return ESub(ch["sbody"], t.var, ch["sarg"])
    if isinstance(t, Abs):
        return Abs(t.var, ch["body"])
    if isinstance(t, Bang):
        return Bang(ch["body"])
    if isinstance(t, Der):
        return Der(ch["body"])
    return t


def _with_binder(t: Term, var: str) -> Term:
    if isinstance(t, Abs):
        return Abs(var, t.body)
    return ESub(t.body, var, t.arg)


def _map_premises(system, d: Derivation, fn, untyped=None, term_override=None) -> Derivation:
    """Rebuild ``d`` applying ``fn(selector, premise)`` to each premise.

    Children without a premise become ``untyped(selector, child)`` (default:
    unchanged).  The node's subject is reassembled from the new children.
    """
    sels = premise_selectors(d)
    new_ps = [fn(sel, p) for sel, p in zip(sels, d.premises)]
    base = term_override if term_override is not None else d.term
    ch = dict(_children(base))
    typed = {}
    for sel, p in zip(sels, new_ps):
        typed.setdefault(sel, p.term)
    for sel, child in list(ch.items()):
        if sel in typed:
            ch[sel] = typed[sel]
        elif untyped is not None:
            ch[sel] = untyped(sel, child)
    return _retype(system, d, _assemble(base, ch), new_ps)


# ---------------------------------------------------------------------------
# renaming inside derivations

def rename_free(d: Derivation, a: str, b: str, system: str) -> Derivation:
    """Rename the free variable ``a`` to ``b`` (``b`` must not be free)."""
    t = d.term
    if a not in t.fv:
        return d
    if isinstance(t, Var):
        return _retype(system, d, Var(b), ())
    if isinstance(t, (Abs, ESub)) and t.var != a and a in t.body.fv and t.var == b:
        z = fresh(t.var, {b} | t.body.fv | {a})
        d = rename_binder(d, z, system)
        t = d.term
    binder = t.var if isinstance(t, (Abs, ESub)) else None

    def fn(sel, p):
        if binder == a and sel in ("body", "sbody"):
            return p
        return rename_free(p, a, b, system)

    def untyped(sel, child):
        if binder == a and sel in ("body", "sbody"):
            return child
        return rename(child, a, b)

    return _map_premises(system, d, fn, untyped)


def rename_binder(d: Derivation, new: str, system: str) -> Derivation:
    t = d.term
    old = t.var
    if old == new:
        return d
    if new in t.body.fv:
        raise ValueError(f"renaming {old} to {new} would capture")
    new_t = _with_binder(t, new)

    def fn(sel, p):
        return rename_free(p, old, new, system) if sel in ("body", "sbody") else p

    def untyped(sel, child):
        return rename(child, old, new) if sel in ("body", "sbody") else child

    return _map_premises(system, d, fn, untyped, term_override=new_t)


def realign(d: Derivation, target: Term, system: str) -> Derivation:
    """Rename binders of ``d`` so that its subject is exactly ``target``."""
    if syn_eq(d.term, target):
        return d
    if d.term != target:
        raise SkeletonMismatch(f"{pretty(d.term)} is not alpha-equal to {pretty(target)}")
    if isinstance(target, (Abs, ESub)) and d.term.var != target.var:
        d = rename_binder(d, target.var, system)
    tch = _children(target)
    return _map_premises(system, d, lambda sel, p: realign(p, tch[sel], system),
                         lambda sel, child: tch[sel])


# ---------------------------------------------------------------------------
# list contexts on derivations

def peel_l(d: Derivation, depth: int):
    """Strip ``depth`` ES layers; returns (core derivation, layers).

    A layer is (rule, binder, arg term, arg premises), outermost first.
    """
    layers = []
    for _ in range(depth):
        if not isinstance(d.term, ESub) or d.rule not in ("es_p", "es_c"):
            raise NonExpandableShape(f"expected an ES layer at {pretty(d.term)}")
        layers.append((d.rule, d.term.var, d.term.arg, d.premises[1:]))
        d = d.premises[0]
    return d, layers


def wrap_l(core: Derivation, layers, system: str) -> Derivation:
    for rule, var, arg, args in reversed(layers):
        core = build(system, rule, ESub(core.term, var, arg), (core,) + tuple(args))
    return core


def _rename_layers(d: Derivation, target_names: Sequence[str], system: str) -> Derivation:
    """Rename the binders of the leading ES layers of ``d``, outermost first."""
    if not target_names:
        return d
    d = rename_binder(d, target_names[0], system) if d.term.var != target_names[0] else d
    body = _rename_layers(d.premises[0], target_names[1:], system)
    return _retype(system, d, ESub(body.term, d.term.var, d.term.arg), (body,) + d.premises[1:])


# ---------------------------------------------------------------------------
# values (V)

def _is_value(t: Term) -> bool:
    return isinstance(t, (Var, Abs))


def empty_value(v: Term) -> Derivation:
    """The derivation of a value with the empty multitype, counters (0,1,0)."""
    if isinstance(v, Var):
        return build("V", "var_c", v, (), ty=EMPTY)
    if isinstance(v, Abs):
        return build("V", "abs_c", v, ())
    raise NotAValue(pretty(v))


def merge_value(v: Term, ds: Sequence[Derivation]) -> Derivation:
    """Merge consuming derivations of the value ``v`` into one of the multiset sum."""
    if not _is_value(v):
        raise NotAValue(pretty(v))
    if isinstance(v, Var):
        total = EMPTY
        for d in ds:
            if d.rule != "var_c":
                raise NotAValue(f"cannot merge {d.rule}")
            total = total + d.type
        return build("V", "var_c", v, (), ty=total)
    premises = []
    for d in ds:
        if d.rule != "abs_c":
            raise NotAValue(f"cannot merge {d.rule}")
        d = realign(d, v, "V")
        premises.extend(d.premises)
    return build("V", "abs_c", v, premises)


def split_value(d: Derivation, parts: Sequence[Mult]) -> List[Derivation]:
    """Split a consuming value derivation of type sum(parts) along ``parts``."""
    v = d.term
    if d.rule not in ("var_c", "abs_c"):
        raise NotAValue(f"cannot split {d.rule}")
    total = EMPTY
    for p in parts:
        total = total + p
    if total != d.type:
        raise ArityMismatch(f"parts {list(map(str, parts))} do not sum to {d.type}")
    if d.rule == "var_c":
        return [build("V", "var_c", v, (), ty=p) for p in parts]
    pool = list(d.premises)
    out = []
    for p in parts:
        chosen = []
        for want in p.items:
            for i, q in enumerate(pool):
                if _arrow_of(q, v) == want:
                    chosen.append(pool.pop(i))
                    break
            else:
                raise ArityMismatch(f"no premise of type {want}")
        out.append(build("V", "abs_c", v, chosen))
    return out


def _arrow_of(premise: Derivation, v: Abs):
    from .typesys import Arrow
    return Arrow(premise.ctx.get(v.var), premise.type)


# ---------------------------------------------------------------------------
# substitution (forward)

def substitute_derivation(d_t: Derivation, x: str, u: Term, d_u, system: str) -> Derivation:
    """Derivation of t{x:=u} from one of t and the derivation(s) for u.

    N and B take a list with one derivation per typed occurrence of ``x``.
    V takes a single consuming derivation of the value ``u`` typed Γ(x).
    """
    if system == "V":
        if not _is_value(u):
            raise NotAValue(pretty(u))
        if d_t.ctx.get(x) != d_u.type:
            raise ArityMismatch(f"value typed {d_u.type}, variable needs {d_t.ctx.get(x)}")
        pool = _ValuePool(u, d_u)
        out = _subst_d(d_t, x, u, u.fv, system, pool)
        pool.finish()
        return out
    pool = _ListPool(list(d_u))
    if d_t.ctx.get(x) != Mult.of(p.type for p in d_u):
        raise ArityMismatch(f"{len(d_u)} derivation(s) for {d_t.ctx.get(x)}")
    out = _subst_d(d_t, x, u, u.fv, system, pool)
    pool.finish()
    return out


class _ListPool:
    def __init__(self, ds):
        self.ds = ds

    def take(self, occ: Derivation) -> Derivation:
        if occ.rule != "var_c":
            raise ArityMismatch(f"occurrence typed by {occ.rule}")
        for i, d in enumerate(self.ds):
            if d.type == occ.type:
                return self.ds.pop(i)
        raise ArityMismatch(f"no derivation of type {occ.type}")

    def finish(self):
        if self.ds:
            raise ArityMismatch(f"{len(self.ds)} unused derivation(s)")


class _ValuePool:
    def __init__(self, v: Term, d: Derivation):
        self.v = v
        if isinstance(v, Var):
            self.types = list(d.type.items)
            self.premises = None
        else:
            d = realign(d, v, "V")
            self.premises = list(d.premises)

    def _take(self, want: Mult) -> Derivation:
        v = self.v
        if self.premises is None:
            for ty in want.items:
                if ty not in self.types:
                    raise ArityMismatch(f"missing {ty}")
                self.types.remove(ty)
            return build("V", "var_c", v, (), ty=want)
        chosen = []
        for ty in want.items:
            for i, q in enumerate(self.premises):
                if _arrow_of(q, v) == ty:
                    chosen.append(self.premises.pop(i))
                    break
            else:
                raise ArityMismatch(f"missing {ty}")
        return build("V", "abs_c", v, chosen)

    def take(self, occ: Derivation) -> Derivation:
        v = self.v
        if occ.rule == "var_p":
            if not isinstance(v, Var):
                raise ArityMismatch("an abstraction cannot replace a vr occurrence")
            self._take(Mult((VR,)))
            return build("V", "var_p", v)
        if occ.rule == "val_p":
            return build("V", "val_p", v) if isinstance(v, Var) else build("V", "abs_p", v)
        if occ.rule == "var_c":
            return self._take(occ.type)
        raise ArityMismatch(f"occurrence typed by {occ.rule}")

    def finish(self):
        left = self.types if self.premises is None else self.premises
        if left:
            raise ArityMismatch("value derivation not fully used")


def _subst_d(d: Derivation, x: str, u: Term, ufv, system, pool) -> Derivation:
    t = d.term
    if x not in t.fv:
        return d
    if isinstance(t, Var):
        return pool.take(d)
    if isinstance(t, (Abs, ESub)):
        if t.var != x and x in t.body.fv and t.var in ufv:
            z = fresh(t.var, set(ufv) | t.body.fv | {x})
            d = rename_binder(d, z, system)
            t = d.term
        binder = t.var
    else:
        binder = None

    def fn(sel, p):
        if binder == x and sel in ("body", "sbody"):
            return p
        return _subst_d(p, x, u, ufv, system, pool)

    def untyped(sel, child):
        if binder == x and sel in ("body", "sbody"):
            return child
        return subst(child, x, u)

    return _map_premises(system, d, fn, untyped)


# ---------------------------------------------------------------------------
# anti-substitution

def anti_substitute(d: Derivation, skeleton: Term, x: str, u: Term, system: str):
    """Split a derivation of skeleton{x:=u} into one of skeleton and pieces for u.

    Returns ``(d_t, [d_u ...])`` for N and B, ``(d_t, d_v)`` for V.
    """
    if not syn_eq(d.term, subst(skeleton, x, u)):
        if d.term != subst(skeleton, x, u):
            raise SkeletonMismatch(f"{pretty(d.term)} is not {pretty(skeleton)}{{{x}:={pretty(u)}}}")
        d = realign(d, subst(skeleton, x, u), system)
    if system == "V":
        if not _is_value(u):
            raise NotAValue(pretty(u))
        d_t, pieces = _anti_v(d, skeleton, x, u)
        return d_t, merge_value(u, pieces)
    return _anti_list(d, skeleton, x, u, system)


def _align_skeleton(s: Term, d: Derivation) -> Term:
    """Give the skeleton binder the name used by the derivation's subject."""
    if isinstance(s, (Abs, ESub)) and s.var != d.term.var:
        y2 = d.term.var
        return _with_binder(s, y2).__class__(*_rebind(s, y2))
    return s


def _rebind(s, y2):
    body = rename(s.body, s.var, y2)
    if isinstance(s, Abs):
        return (y2, body)
    return (body, y2, s.arg)


def _anti_list(d, s, x, u, system):
    if x not in s.fv:
        return d, []
    if isinstance(s, Var):
        return build(system, "var_c", s, (), ty=d.type), [d]
    s = _align_skeleton(s, d)
    binder = s.var if isinstance(s, (Abs, ESub)) else None
    sch = _children(s)
    pieces = []

    def fn(sel, p):
        child = sch[sel]
        if binder == x and sel in ("body", "sbody"):
            return p
        dt, more = _anti_list(p, child, x, u, system)
        pieces.extend(more)
        return dt

    out = _map_premises(system, d, fn, lambda sel, child: sch[sel], term_override=s)
    return out, pieces


def _anti_v(d, s, x, v):
    """Returns (d_s, list of consuming value derivations for v)."""
    if x not in s.fv:
        return d, []
    if isinstance(s, Var):
        if d.rule == "var_p":
            return build("V", "var_p", s), [build("V", "var_c", v, (), ty=Mult((VR,)))]
        if d.rule in ("val_p", "abs_p"):
            return build("V", "val_p", s), []
        if d.rule in ("var_c", "abs_c"):
            return build("V", "var_c", s, (), ty=d.type), [d]
        raise NonExpandableShape(f"value occurrence typed by {d.rule}")
    s = _align_skeleton(s, d)
    binder = s.var if isinstance(s, (Abs, ESub)) else None
    sch = _children(s)
    pieces = []

    def fn(sel, p):
        if binder == x and sel in ("body", "sbody"):
            return p
        dt, more = _anti_v(p, sch[sel], x, v)
        pieces.extend(more)
        return dt

    out = _map_premises("V", d, fn, lambda sel, child: sch[sel], term_override=s)
    return out, pieces


# ---------------------------------------------------------------------------
# normal forms

def type_normal_form(p: Term, system: str) -> Derivation:
    """Tight derivation of a normal form, counters (0, 0, size)."""
    c = classify(p, NF_FLAVOR[system])
    if system == "B" and c.name == "ClashNormal":
        raise ClashNormal(pretty(p))
    if c.name == "Reducible":
        raise NotNormal(pretty(p))
    if system == "N":
        return _nf_n(p)
    if system == "V":
        return _nf_v(p, head=False)
    return _nf_b(p)


def _nf_n(t):
    if isinstance(t, Var):
        return build("N", "var_c", t, (), ty=N)
    if isinstance(t, App):
        return build("N", "app_p", t, (_nf_n(t.fun),))
    if isinstance(t, Abs):
        return build("N", "abs_p", t, (_nf_n(t.body),))
    raise NotNormal(pretty(t))


def _nf_v(t, head):
    """``head``: the term is the function of a neutral application."""
    if isinstance(t, Var):
        return build("V", "var_p", t) if head else build("V", "val_p", t)
    if isinstance(t, Abs):
        return build("V", "abs_p", t)
    if isinstance(t, App):
        return build("V", "app_p", t, (_nf_v(t.fun, head=True), _nf_v(t.arg, head=False)))
    if isinstance(t, ESub):
        return build("V", "es_p", t, (_nf_v(t.body, head), _nf_v(t.arg, head=False)))
    raise NotNormal(pretty(t))


def _nf_b(t):
    if isinstance(t, Var):
        return build("B", "var_c", t, (), ty=N)
    if isinstance(t, App):
        return build("B", "app_p", t, (_nf_b(t.fun), _nf_b(t.arg)))
    if isinstance(t, Abs):
        return build("B", "abs_p", t, (_nf_b(t.body),))
    if isinstance(t, Bang):
        return build("B", "bg_p", t)
    if isinstance(t, Der):
        return build("B", "dr_p", t, (_nf_b(t.body),))
    return build("B", "es_p", t, (_nf_b(t.body), _nf_b(t.arg)))


# ---------------------------------------------------------------------------
# expansion and reduction at a position

def _at_position(d: Derivation, pos: Position, new_sub: Term, system: str, fn) -> Derivation:
    """Apply ``fn`` to every premise typing the subterm at ``pos``; the
    subject at ``pos`` becomes ``new_sub``."""
    if not pos:
        return fn(d)
    sel, rest = pos[0], pos[1:]
    sels = premise_selectors(d)
    if sel not in sels:
        raise NonExpandableShape(f"untyped redex position under {d.rule}")

    def g(s, p):
        return _at_position(p, rest, new_sub, system, fn) if s == sel else p

    return _map_premises(system, d, g)


def expand_step(d2: Derivation, st: TraceStep, system: str) -> Derivation:
    """From a derivation of ``st.after`` build one of ``st.before``."""
    if not syn_eq(d2.term, st.after):
        d2 = realign(d2, st.after, system)
    redex = subterm_at(st.before, st.position)
    if st.kind not in RULES_OF[FLAVOR[system]]:
        raise StepMismatch(f"{st.kind} is not a step of system {system}")
    out = _at_position(d2, st.position, redex, system,
                       lambda dr: realign(_expand_root(dr, redex, st.kind, system), redex, system))
    return out


def reduce_step(d: Derivation, st: TraceStep, system: str) -> Derivation:
    """From a derivation of ``st.before`` build one of ``st.after``."""
    if not syn_eq(d.term, st.before):
        d = realign(d, st.before, system)
    redex = subterm_at(st.before, st.position)
    contractum = root_rule(redex, st.kind)
    if contractum is None:
        raise StepMismatch(f"no {st.kind} redex at {st.position}")
    out = _at_position(d, st.position, contractum, system,
                       lambda dr: realign(_reduce_root(dr, redex, contractum, st.kind, system),
                                          contractum, system))
    if not syn_eq(out.term, st.after):
        out = realign(out, st.after, system)
    return out


def _expand_root(d2: Derivation, r: Term, kind: StepKind, system: str) -> Derivation:
    r2 = root_rule(r, kind)
    if r2 is None:
        raise StepMismatch(f"{pretty(r)} is not a {kind} redex")
    if not syn_eq(d2.term, r2):
        d2 = realign(d2, r2, system)
    if kind is StepKind.dB:
        _, layers = split_l(r.fun)
        core, ls = peel_l(d2, len(layers))
        if not isinstance(core.term, ESub) or core.rule not in ("es_c", "es_p"):
            raise NonExpandableShape(f"dB contractum typed by {core.rule}")
        x, d_s, args = core.term.var, core.premises[0], core.premises[1:]
        lam = Abs(x, d_s.term)
        if system == "N":
            f = build("N", "abs_c", lam, (d_s,))
            return build("N", "app_c", App(wrap_l(f, ls, system).term, core.term.arg),
                         (wrap_l(f, ls, system),) + tuple(args))
        f = wrap_l(build(system, "abs_c", lam, (d_s,)), ls, system)
        rule = "app_c" if core.rule == "es_c" else "appt_c"
        return build(system, rule, App(f.term, core.term.arg), (f,) + tuple(args))
    if kind is StepKind.sn:
        d_s, pieces = anti_substitute(d2, r.body, r.var, r.arg, "N")
        return build("N", "es_c", ESub(d_s.term, r.var, r.arg), (d_s,) + tuple(pieces))
    if kind is StepKind.sv:
        _, layers = split_l(r.arg)
        inner, ls = peel_l(d2, len(layers))
        v2, _ = split_l(_freshened_arg(r))
        d_s, d_v = anti_substitute(inner, r.body, r.var, v2, "V")
        arg = wrap_l(d_v, ls, "V")
        return build("V", "es_c", ESub(d_s.term, r.var, arg.term), (d_s, arg))
    if kind is StepKind.sBang:
        _, layers = split_l(r.arg)
        inner, ls = peel_l(d2, len(layers))
        bang_body = _bang_body_after(r)
        d_s, pieces = anti_substitute(inner, r.body, r.var, bang_body, "B")
        bg = build("B", "bg_c", Bang(bang_body), tuple(pieces))
        arg = wrap_l(bg, ls, "B")
        return build("B", "es_c", ESub(d_s.term, r.var, arg.term), (d_s, arg))
    if kind is StepKind.dBang:
        _, layers = split_l(r.body)
        inner, ls = peel_l(d2, len(layers))
        bg = build("B", "bg_c", Bang(inner.term), (inner,))
        return build("B", "dr_c", Der(wrap_l(bg, ls, "B").term), (wrap_l(bg, ls, "B"),))
    raise StepMismatch(str(kind))


def _freshened_arg(r: ESub) -> Term:
    return freshen_l(r.arg, r.body.fv)


def _bang_body_after(r: ESub) -> Term:
    core, _ = split_l(_freshened_arg(r))
    return core.body


def _reduce_root(d: Derivation, r: Term, r2: Term, kind: StepKind, system: str) -> Derivation:
    if kind is StepKind.dB:
        if d.rule not in ("app_c", "appt_c"):
            raise NonExpandableShape(f"dB redex typed by {d.rule}")
        f, args = d.premises[0], d.premises[1:]
        _, new_layers = split_l(freshen_l(r.fun, r.arg.fv))
        names_ = [y for y, _ in new_layers]
        f = _rename_layers(f, names_, system)
        abs_d, ls = peel_l(f, len(names_))
        if abs_d.rule != "abs_c":
            raise NonExpandableShape(f"dB abstraction typed by {abs_d.rule}")
        if len(abs_d.premises) != 1:
            raise NonExpandableShape("dB abstraction with several premises")
        lam = abs_d.term
        d_s = abs_d.premises[0]
        rule = "es_c" if d.rule == "app_c" else "es_p"
        es = build(system, rule, ESub(lam.body, lam.var, r.arg), (d_s,) + tuple(args))
        return wrap_l(es, ls, system)
    if kind is StepKind.sn:
        if d.rule != "es_c":
            raise NonExpandableShape(f"sn redex typed by {d.rule}")
        return substitute_derivation(d.premises[0], r.var, r.arg, d.premises[1:], "N")
    if kind in (StepKind.sv, StepKind.sBang):
        if d.rule != "es_c":
            raise NonExpandableShape(f"{kind} redex typed by {d.rule}")
        d_s, d_arg = d.premises
        farg = _freshened_arg(r)
        core, layers = split_l(farg)
        d_arg = _rename_layers(d_arg, [y for y, _ in layers], system)
        d_core, ls = peel_l(d_arg, len(layers))
        if kind is StepKind.sv:
            inner = substitute_derivation(d_s, r.var, core, d_core, "V")
        else:
            if d_core.rule != "bg_c":
                raise NonExpandableShape(f"s! argument typed by {d_core.rule}")
            pieces = [realign(p, core.body, "B") for p in d_core.premises]
            inner = substitute_derivation(d_s, r.var, core.body, pieces, "B")
        return wrap_l(inner, ls, system)
    if kind is StepKind.dBang:
        if d.rule != "dr_c":
            raise NonExpandableShape(f"d! redex typed by {d.rule}")
        _, layers = split_l(r.body)
        d_core, ls = peel_l(d.premises[0], len(layers))
        if d_core.rule != "bg_c" or len(d_core.premises) != 1:
            raise NonExpandableShape("d! bang must carry exactly one premise")
        return wrap_l(d_core.premises[0], ls, "B")
    raise StepMismatch(str(kind))


# ---------------------------------------------------------------------------
# synthesis

@dataclass
class SynthesisResult:
    derivation: Derivation
    trace: Trace
    nf: Term
    # derivations of every term along the trace, initial term first
    chain: Optional[List[Derivation]] = None

    def to_json(self) -> dict:
        from .typesys import to_json
        return {"derivation": to_json(self.derivation), "trace": self.trace.log(),
                "nf": pretty(self.nf)}


@dataclass
class NotNormalizing:
    trace: Trace


@dataclass
class ClashNormalForm:
    trace: Trace
    nf: Term


def synthesize_tight(t: Term, system: str, fuel: int = 1000, keep_chain: bool = False
                     ) -> Union[SynthesisResult, NotNormalizing, ClashNormalForm]:
    res = normalize(t, STRATEGY[system], fuel)
    if isinstance(res, FuelExhausted):
        return NotNormalizing(res.trace)
    nf = res.nf
    if system == "B" and not in_no_scf(nf):
        return ClashNormalForm(res.trace, nf)
    d = type_normal_form(nf, system)
    chain = [d]
    for st in reversed(res.trace.steps):
        d = expand_step(d, st, system)
        chain.append(d)
    chain.reverse()
    return SynthesisResult(d, res.trace, nf, chain if keep_chain else None)
