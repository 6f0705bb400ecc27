"""Exhaustive small-term enumeration and theorem checking.

Every check is phrased as a property of one enumerated term.  A failure
records the term together with what was expected and what came out; terms
outside a theorem's hypothesis (fuel exhausted, clash normal forms, path
cap) are counted as skipped, never dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .rewriting import (
    CapExceeded, FuelExhausted, StepKind, enumerate_paths, normalize, size, step,
)
from .syntax import BANG, LAMBDA_ES, Abs, App, Bang, Der, ESub, Term, Var, pretty
from .tight import (
    ClashNormalForm, NotNormalizing, STRATEGY, SynthesisResult, reduce_step, synthesize_tight,
)
from .translate import (
    cbn_term, cbv_ctx, cbv_term, countvr, has_adjacent_bangs, inversevr, relevance,
    translate_derivation_n, translate_derivation_v,
)
from .typesys import (
    Mult, check_derivation, derivation_alpha_eq, rule_census_counters, tight,
)

# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class EnumSpec:
    max_constructors: int = 6
    var_pool: Tuple[str, ...] = ("x", "y", "z")
    calculus: str = LAMBDA_ES
    closed_only: bool = False
    # nodes charged for an application; 0 treats juxtaposition as free
    app_cost: int = 1


def enumerate_terms(spec: EnumSpec) -> Iterator[Term]:
    """Every term with at most ``max_constructors`` nodes, once per alpha class.

    All names, bound or free, come from ``var_pool``; a binder may shadow.
    Order: by size, then by generation order, which is deterministic.
    """
    if spec.max_constructors < 1 or not spec.var_pool:
        raise ValueError("bounds must be at least 1")
    pool = tuple(spec.var_pool)
    bang = spec.calculus == BANG
    seen = set()
    for n in range(1, spec.max_constructors + 1):
        for t in _exact(n, pool, bang, spec.app_cost):
            if t in seen:
                continue
            seen.add(t)
            if spec.closed_only and t.fv:
                continue
            yield t


@lru_cache(maxsize=None)
def _exact(n: int, pool: tuple, bang: bool, app_cost: int = 1) -> Tuple[Term, ...]:
    """Alpha-distinct terms with exactly ``n`` nodes."""
    out: List[Term] = []
    seen = set()

    def add(t):
        if t not in seen:
            seen.add(t)
            out.append(t)

    if n < 1:
        return ()
    if n == 1:
        for x in pool:
            add(Var(x))
    sub = lambda k: _exact(k, pool, bang, app_cost)
    for body in sub(n - 1):
        for x in pool:
            add(Abs(x, body))
        if bang:
            add(Bang(body))
            add(Der(body))
    for k in range(1, n - app_cost):
        for f in sub(k):
            for a in sub(n - app_cost - k):
                add(App(f, a))
    for k in range(1, n - 1):
        for f in sub(k):
            for a in sub(n - 1 - k):
                for x in pool:
                    add(ESub(f, x, a))
    return tuple(out)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Failure:
    term: str
    expected: str
    got: str


@dataclass
class TheoremReport:
    theorem: str
    tested: int = 0
    failures: List[Failure] = field(default_factory=list)
    skipped: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def skip(self, reason: str):
        self.skipped[reason] = self.skipped.get(reason, 0) + 1

    def fail(self, t: Term, expected, got):
        self.failures.append(Failure(pretty(t), str(expected), str(got)))

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "tested": self.tested,
            "failed": [f.__dict__ for f in self.failures],
            "skipped": dict(self.skipped),
        }

    def text(self, limit: int = 10) -> str:
        status = "PASS" if self.passed else "FAIL"
        skipped = ", ".join(f"{k}={v}" for k, v in sorted(self.skipped.items())) or "none"
        lines = [f"{self.theorem}: {status} tested={self.tested} failed={len(self.failures)} "
                 f"skipped: {skipped}"]
        for f in self.failures[:limit]:
            lines.append(f"  {f.term}: expected {f.expected}, got {f.got}")
        if len(self.failures) > limit:
            lines.append(f"  ... {len(self.failures) - limit} more")
        return "\n".join(lines)

    def __str__(self):
        return self.text()


# ---------------------------------------------------------------------------
# per-term properties.  Each returns None (pass), a skip reason via Skip,
# or raises Mismatch.


class Skip(Exception):
    pass


class Mismatch(Exception):
    def __init__(self, expected, got):
        super().__init__(f"expected {expected}, got {got}")
        self.expected, self.got = expected, got


def _expect(cond: bool, expected, got):
    if not cond:
        raise Mismatch(expected, got)


FLAVOR = {"N": "n", "V": "v", "B": "f"}


def _synth(t: Term, system: str, fuel: int, keep_chain: bool = False) -> SynthesisResult:
    r = synthesize_tight(t, system, fuel, keep_chain=keep_chain)
    if isinstance(r, NotNormalizing):
        raise Skip("fuel")
    if isinstance(r, ClashNormalForm):
        raise Skip("clash-normal")
    return r


def prop_completeness(system: str):
    def prop(t: Term, fuel: int):
        r = _synth(t, system, fuel)
        d = r.derivation
        ok = check_derivation(d, system)
        _expect(bool(ok), "checker Ok", ok)
        _expect(tight(d, system), "tight derivation", f"{d.ctx} |- {d.type}")
        _expect(d.term == t, pretty(t), pretty(d.term))
        # soundness direction: rerun the strategy independently of the trace
        # used to build the derivation
        res = normalize(t, STRATEGY[system], max(fuel, d.m + d.e + 1))
        _expect(not isinstance(res, FuelExhausted), "normalizes", "fuel exhausted")
        observed = (res.trace.m, res.trace.e, size(res.nf, FLAVOR[system]))
        _expect(d.counters == observed, observed, d.counters)
    return prop


def prop_confluence(cap: int):
    def prop(t: Term, fuel: int):
        res = normalize(t, "fdet", fuel)
        if isinstance(res, FuelExhausted):
            raise Skip("fuel")
        paths = enumerate_paths(t, "f", cap=cap, max_depth=4 * fuel)
        if isinstance(paths, CapExceeded):
            raise Skip(paths.reason)
        want = (pretty(res.nf), {(res.trace.m, res.trace.e)})
        nfs = paths.normal_forms
        _expect(len(nfs) == 1 and nfs[0] == res.nf and paths.lengths == want[1],
                want, ([pretty(n) for n in nfs], paths.lengths))
    return prop


def prop_simulation_cbn(t: Term, fuel: int):
    res = normalize(t, "dn", fuel)
    if isinstance(res, FuelExhausted):
        raise Skip("fuel")
    img = normalize(cbn_term(t), "fdet", 4 * fuel)
    _expect(not isinstance(img, FuelExhausted), "image normalizes", "fuel exhausted")
    _expect(img.nf == cbn_term(res.nf), pretty(cbn_term(res.nf)), pretty(img.nf))
    _expect((img.trace.m, img.trace.e) == (res.trace.m, res.trace.e),
            (res.trace.m, res.trace.e), (img.trace.m, img.trace.e))
    if not res.trace.steps:
        _expect(step(cbn_term(t), "fdet") is None, "f-normal image", "reducible image")


def prop_simulation_cbv(t: Term, fuel: int):
    res = normalize(t, "dv", fuel)
    if isinstance(res, FuelExhausted):
        raise Skip("fuel")
    img = normalize(cbv_term(t), "fdet", 4 * fuel)
    _expect(not isinstance(img, FuelExhausted), "image normalizes", "fuel exhausted")
    _expect(img.nf == cbv_term(res.nf), pretty(cbv_term(res.nf)), pretty(img.nf))
    _expect(img.trace.m == res.trace.m, f"m={res.trace.m}", f"m={img.trace.m}")
    extra = img.trace.count(StepKind.dBang)
    _expect(img.trace.e - res.trace.e == extra,
            f"e_f - e_v = {extra} d! steps", f"e_f - e_v = {img.trace.e - res.trace.e}")


def prop_translation_n(t: Term, fuel: int):
    d = _synth(t, "N", fuel).derivation
    b = translate_derivation_n(d)
    ok = check_derivation(b, "B")
    _expect(bool(ok), "checker Ok", ok)
    _expect(b.term == cbn_term(t), pretty(cbn_term(t)), pretty(b.term))
    _expect(b.counters == d.counters, d.counters, b.counters)
    _expect(b.ctx == d.ctx and b.type == d.type, f"{d.ctx} |- {d.type}", f"{b.ctx} |- {b.type}")
    rel = relevance(b, "B")
    _expect(rel.cbn_relevant, "cbn-relevant", rel)


def prop_translation_v(t: Term, fuel: int, require_relevance: bool = True):
    d = _synth(t, "V", fuel).derivation
    b = translate_derivation_v(d)
    ok = check_derivation(b, "B")
    _expect(bool(ok), "checker Ok", ok)
    _expect(b.term == cbv_term(t), pretty(cbv_term(t)), pretty(b.term))
    want = (d.m, d.e + countvr(d), d.s)
    _expect(b.counters == want, want, b.counters)
    _expect(b.ctx == cbv_ctx(d.ctx), cbv_ctx(d.ctx), b.ctx)
    if require_relevance:
        rel = relevance(b, "B")
        _expect(rel.cbv_relevant, "cbv-relevant", rel)


def prop_translation_v_counters(t: Term, fuel: int):
    prop_translation_v(t, fuel, require_relevance=False)


def prop_inversevr(t: Term, fuel: int):
    d = _synth(t, "V", fuel).derivation
    b = translate_derivation_v(d)
    _expect(inversevr(b) == countvr(d), f"inversevr = countvr = {countvr(d)}",
            f"inversevr = {inversevr(b)}")


def prop_tightness_transfer(t: Term, fuel: int):
    for system, tr, ctx_tr in (("N", translate_derivation_n, lambda c: c),
                               ("V", translate_derivation_v, cbv_ctx)):
        try:
            d = _synth(t, system, fuel).derivation
        except Skip:
            continue
        for node in d.nodes():
            src = tight(node.ctx, system)
            dst = tight(ctx_tr(node.ctx), "B")
            _expect(src == dst, f"tight({node.ctx})={src}", f"translated tight={dst}")


def prop_census(system: str):
    def prop(t: Term, fuel: int):
        r = _synth(t, system, fuel, keep_chain=True)
        for d in r.chain:
            for node in d.nodes():
                c = rule_census_counters(node, system)
                _expect(c == node.counters, node.counters, f"census {c} at {pretty(node.term)}")
    return prop


def prop_positivity_v(t: Term, fuel: int):
    r = _synth(t, "V", fuel, keep_chain=True)
    for d in r.chain:
        for node in d.nodes():
            _expect(node.e >= 0, "e >= 0", f"e={node.e} at {pretty(node.term)}")
            if isinstance(node.type, Mult):
                _expect(node.e > 0, "e > 0 on a multitype", f"e={node.e} at {pretty(node.term)}")


def prop_inverse_steps(system: str):
    def prop(t: Term, fuel: int):
        r = _synth(t, system, fuel, keep_chain=True)
        from .tight import expand_step
        for i, st in enumerate(r.trace.steps):
            before, after = r.chain[i], r.chain[i + 1]
            fwd = reduce_step(before, st, system)
            _expect(derivation_alpha_eq(fwd, after), "reduce(expand(d')) = d'",
                    f"mismatch at step {i} ({st.kind})")
            back = expand_step(fwd, st, system)
            _expect(derivation_alpha_eq(back, before), "expand(reduce(d)) = d",
                    f"mismatch at step {i} ({st.kind})")
            _expect(bool(check_derivation(fwd, system)), "checker Ok", f"step {i}")
    return prop


def prop_image_discipline(t: Term, fuel: int):
    for name, img in (("cbn", cbn_term(t)), ("cbv", cbv_term(t))):
        _expect(img.fv == t.fv, sorted(t.fv), f"{name}: {sorted(img.fv)}")
    _expect(not has_adjacent_bangs(cbv_term(t)), "no !!", pretty(cbv_term(t)))


# ---------------------------------------------------------------------------
# theorem table


@dataclass(frozen=True)
class Theorem:
    id: str
    calculus: str
    prop: Callable
    summary: str


def _theorems(cap: int = 10_000) -> Dict[str, Theorem]:
    es, bang = LAMBDA_ES, BANG
    ts = [
        Theorem("completeness-N", es, prop_completeness("N"),
                "tight N derivation with counters = (m, e, |nf|_n)"),
        Theorem("completeness-V", es, prop_completeness("V"),
                "tight V derivation with counters = (m, e, |nf|_v)"),
        Theorem("completeness-B", bang, prop_completeness("B"),
                "tight B derivation with counters = (m, e, |nf|_f)"),
        Theorem("confluence-f", bang, prop_confluence(cap),
                "all f-paths reach one normal form with one (m, e)"),
        Theorem("simulation-cbn", es, prop_simulation_cbn,
                "cbn image normalizes to cbn(nf) with the same (m, e)"),
        Theorem("simulation-cbv", es, prop_simulation_cbv,
                "cbv image normalizes to cbv(nf), same m, extra e = d! steps"),
        Theorem("translation-N", es, prop_translation_n,
                "N derivations translate to cbn-relevant B derivations, same counters"),
        Theorem("translation-V", es, prop_translation_v,
                "V derivations translate to cbv-relevant B derivations, e' = e + countvr"),
        Theorem("translation-V-counters", es, prop_translation_v_counters,
                "translation-V without the relevance clause"),
        Theorem("inversevr-V", es, prop_inversevr,
                "inversevr of the translation equals countvr of the source"),
        Theorem("tightness-transfer", es, prop_tightness_transfer,
                "context tightness is preserved by both type translations"),
        Theorem("census-N", es, prop_census("N"), "rule census equals stored counters"),
        Theorem("census-V", es, prop_census("V"), "rule census equals stored counters"),
        Theorem("census-B", bang, prop_census("B"), "rule census equals stored counters"),
        Theorem("positivity-V", es, prop_positivity_v, "V judgements have e >= 0, > 0 on multitypes"),
        Theorem("inverse-steps-N", es, prop_inverse_steps("N"), "reduce/expand are inverse"),
        Theorem("inverse-steps-V", es, prop_inverse_steps("V"), "reduce/expand are inverse"),
        Theorem("inverse-steps-B", bang, prop_inverse_steps("B"), "reduce/expand are inverse"),
        Theorem("image-discipline", es, prop_image_discipline,
                "images keep free variables and cbv images have no !!"),
    ]
    return {t.id: t for t in ts}


THEOREMS = _theorems()


def default_spec(calculus: str, max_constructors: Optional[int] = None) -> EnumSpec:
    if calculus == BANG:
        return EnumSpec(max_constructors or 6, ("x", "y"), BANG)
    return EnumSpec(max_constructors or 6, ("x", "y", "z"), LAMBDA_ES)


def verify(theorem: str, spec: Optional[EnumSpec] = None, fuel: int = 50,
           cap: int = 10_000) -> TheoremReport:
    if theorem not in THEOREMS:
        raise KeyError(f"unknown theorem {theorem!r}; known: {', '.join(THEOREMS)}")
    th = THEOREMS[theorem] if cap == 10_000 else _theorems(cap)[theorem]
    spec = spec or default_spec(th.calculus)
    if spec.calculus != th.calculus:
        raise ValueError(f"{theorem} ranges over {th.calculus} terms")
    report = TheoremReport(theorem)
    for t in enumerate_terms(spec):
        try:
            th.prop(t, fuel)
        except Skip as s:
            report.skip(str(s))
            continue
        except Mismatch as m:
            report.fail(t, m.expected, m.got)
        except Exception as exc:  # a crash is a failure of the property, not of the run
            report.fail(t, "no exception", f"{type(exc).__name__}: {exc}")
        report.tested += 1
    return report


def report_json(reports: List[TheoremReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)
